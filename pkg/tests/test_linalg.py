import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from belldistill import linalg
from belldistill.errors import ContractError, DimensionLimitError, ShapeError
from belldistill.linalg import PartySubset
from oracles import bisection_eigenvalues, charpoly_eigenvalues, random_hermitian

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def bell_pair_density():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return np.outer(psi, psi.conj())


def random_density(n, rng):
    g = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class TestTensorProduct:
    def test_identity(self):
        assert np.array_equal(linalg.tensor_product(I2, I2), np.eye(4))

    def test_bit_flip_moves_index_0_to_3(self):
        xx = linalg.tensor_product(X, X)
        assert np.array_equal(xx @ np.eye(4)[0], np.eye(4)[3])

    def test_xy_corner(self):
        # hand expansion: (X (x) Y)[0, 3] = X[0, 1] * Y[0, 1] = -i
        assert linalg.tensor_product(X, Y)[0, 3] == -1j

    def test_party_one_is_most_significant(self):
        up = np.diag([1, 0]).astype(complex)
        down = np.diag([0, 1]).astype(complex)
        # |1><1| (x) |0><0| selects basis index 0b10
        assert linalg.tensor_product(down, up)[2, 2] == 1

    def test_associative_exactly(self):
        # Gaussian-integer entries keep every product exact in floating point
        rng = np.random.default_rng(0)
        a, b, c = (rng.integers(-5, 6, (2, 2)) + 1j * rng.integers(-5, 6, (2, 2)) for _ in range(3))
        left = linalg.tensor_product(linalg.tensor_product(a, b), c)
        right = linalg.tensor_product(a, linalg.tensor_product(b, c))
        assert np.array_equal(left, right)

    def test_associative_random(self):
        rng = np.random.default_rng(1)
        a, b, c = (random_hermitian(2, rng) for _ in range(3))
        left = linalg.tensor_product(linalg.tensor_product(a, b), c)
        right = linalg.tensor_product(a, linalg.tensor_product(b, c))
        assert np.allclose(left, right, atol=1e-15, rtol=0)

    def test_dimension_cap(self):
        with pytest.raises(DimensionLimitError):
            linalg.tensor_product(np.eye(64), np.eye(64), max_dim=2**10)


class TestPartialTranspose:
    def test_identity_invariant(self):
        for mask in range(8):
            assert np.array_equal(linalg.partial_transpose(np.eye(8), PartySubset.from_mask(3, mask)), np.eye(8))

    def test_full_set_is_transpose(self):
        rho = random_density(3, np.random.default_rng(1))
        assert np.array_equal(linalg.partial_transpose(rho, PartySubset.of(3, 1, 2, 3)), rho.T)

    def test_empty_set_is_noop(self):
        rho = random_density(2, np.random.default_rng(2))
        assert np.array_equal(linalg.partial_transpose(rho, PartySubset(2)), rho)

    def test_two_qubit_reference_layout(self):
        rho = np.arange(16).reshape(4, 4).astype(complex)
        first = [[0, 1, 8, 9], [4, 5, 12, 13], [2, 3, 10, 11], [6, 7, 14, 15]]
        second = [[0, 4, 2, 6], [1, 5, 3, 7], [8, 12, 10, 14], [9, 13, 11, 15]]
        assert np.array_equal(linalg.partial_transpose(rho, PartySubset.of(2, 1)), first)
        assert np.array_equal(linalg.partial_transpose(rho, PartySubset.of(2, 2)), second)

    def test_bell_pair_spectrum(self, backend):
        pt = linalg.partial_transpose(bell_pair_density(), PartySubset.of(2, 2))
        # frozen from np.linalg.eigvalsh on the 4x4 matrix
        assert np.allclose(linalg.hermitian_eigenvalues(pt, backend), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)
        assert linalg.min_eigenvalue(pt, backend) == pytest.approx(-0.5, abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            linalg.partial_transpose(np.eye(8), PartySubset.of(2, 1))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), mask=st.integers(0, 7))
    def test_involution_trace_hermiticity(self, seed, mask):
        rho = random_density(3, np.random.default_rng(seed))
        subset = PartySubset.from_mask(3, mask)
        pt = linalg.partial_transpose(rho, subset)
        assert np.array_equal(linalg.partial_transpose(pt, subset), rho)
        assert np.array_equal(np.diagonal(pt), np.diagonal(rho))
        assert np.array_equal(pt, pt.conj().T) == np.array_equal(rho, rho.conj().T)
        assert linalg.is_hermitian(pt)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), mask=st.integers(0, 7))
    def test_complement_has_same_spectrum(self, seed, mask):
        rho = random_density(3, np.random.default_rng(seed))
        subset = PartySubset.from_mask(3, mask)
        a = linalg.hermitian_eigenvalues(linalg.partial_transpose(rho, subset))
        b = linalg.hermitian_eigenvalues(linalg.partial_transpose(rho, subset.complement()))
        assert np.allclose(a, b, atol=1e-9)


class TestPartySubset:
    def test_mask_roundtrip(self):
        for mask in range(16):
            assert PartySubset.from_mask(4, mask).mask == mask

    def test_party_one_is_high_bit(self):
        assert PartySubset.from_mask(3, 0b100).parties == {1}

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            PartySubset.of(3, 4)


class TestEigensolver:
    def test_pauli_x(self, backend):
        assert np.allclose(linalg.hermitian_eigenvalues(X, backend), [-1, 1], atol=1e-14)

    def test_scalar_matrix(self, backend):
        n = 4
        mixed = np.eye(2**n) / 2**n
        assert linalg.min_eigenvalue(mixed, backend) == pytest.approx(2.0**-n, abs=1e-15)

    def test_pure_state_projector(self, backend):
        rng = np.random.default_rng(5)
        psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi /= np.linalg.norm(psi)
        w = linalg.hermitian_eigenvalues(np.outer(psi, psi.conj()), backend)
        assert abs(w[0]) < 1e-9
        assert w[-1] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("dim", [1, 2, 3, 5, 8, 16, 33])
    def test_residual_and_trace(self, dim, backend):
        m = random_hermitian(dim, np.random.default_rng(dim))
        w, v = linalg.hermitian_eigh(m, vectors=True, backend=backend)
        norm = np.linalg.norm(m, 2)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.linalg.norm(m @ v - v * w, axis=0)) <= 1e-8 * norm
        assert abs(w.sum() - np.trace(m).real) <= 1e-8

    def test_random_8x8_against_bisection(self, backend):
        m = random_hermitian(8, np.random.default_rng(88))
        assert np.allclose(linalg.hermitian_eigenvalues(m, backend), bisection_eigenvalues(m), atol=1e-8)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_small_against_charpoly(self, dim, backend):
        m = random_hermitian(dim, np.random.default_rng(100 + dim))
        assert np.allclose(linalg.hermitian_eigenvalues(m, backend), charpoly_eigenvalues(m), atol=1e-8)

    def test_degenerate_spectrum(self, backend):
        q, _ = np.linalg.qr(random_hermitian(6, np.random.default_rng(9)))
        m = q @ np.diag([1, 1, 1, -2, -2, 5]) @ q.conj().T
        assert np.allclose(linalg.hermitian_eigenvalues(m, backend), [-2, -2, 1, 1, 1, 5], atol=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractError):
            linalg.hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))

    def test_symmetrizes_roundoff(self):
        m = X + 1e-13 * np.array([[0, 1], [0, 0]])
        assert np.allclose(linalg.hermitian_eigenvalues(m), [-1, 1], atol=1e-12)

    def test_backends_agree(self):
        m = random_hermitian(40, np.random.default_rng(40))
        results = [linalg.hermitian_eigenvalues(m, b) for b in linalg.available_backends()]
        for r in results[1:]:
            assert np.allclose(r, results[0], atol=1e-10)


def test_num_qubits():
    assert linalg.num_qubits(256) == 8
    with pytest.raises(ShapeError):
        linalg.num_qubits(6)


def test_check_density_rejects_bad_trace():
    with pytest.raises(ContractError):
        linalg.check_density(np.eye(2))
