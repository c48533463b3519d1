"""Dense complex linear algebra on N-qubit Hilbert spaces.

Every basis index is read as an N-bit string with party 1 in the most
significant bit, so ``np.kron(a, b)`` puts ``a`` on the leading parties.
Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.

The Hermitian eigensolver is a cyclic Jacobi iteration. A compiled Cython
kernel is used when it was built; otherwise a vectorized numpy version with
the same contract takes over. ``BACKEND`` names the one in use and the
environment variable ``BELLDISTILL_BACKEND=python`` forces the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from belldistill import _jacobi_py
from belldistill.errors import ContractError, DimensionLimitError, ParameterError, ShapeError

try:
    from belldistill import _jacobi as _jacobi_compiled
except ImportError:  # extension not built
    _jacobi_compiled = None

MAX_DIM = 2**14
HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-12
PSD_TOL = 1e-9
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60

_KERNELS = {"python": _jacobi_py.jacobi_hermitian}
if _jacobi_compiled is not None:
    _KERNELS["compiled"] = _jacobi_compiled.jacobi_hermitian

if os.environ.get("BELLDISTILL_BACKEND", "").lower() == "python" or _jacobi_compiled is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def available_backends() -> list[str]:
    return sorted(_KERNELS)


def as_square(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a square complex128 array, or raise ShapeError."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ShapeError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def num_qubits(dim: int) -> int:
    """Number of qubits ``N`` for a dimension ``2**N``."""
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ShapeError(f"dimension {dim} is not a power of two")
    return n


def check_dim(dim: int, max_dim: int = MAX_DIM) -> None:
    if dim > max_dim:
        raise DimensionLimitError(
            f"dense dimension {dim} exceeds the cap {max_dim}; "
            "use the GHZ-diagonal coefficient workflow for large N"
        )


def tensor_product(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with ``a`` on the more significant index block."""
    a = as_square(a, "a")
    b = as_square(b, "b")
    check_dim(a.shape[0] * b.shape[0], max_dim)
    return np.kron(a, b)


def tensor_all(factors, max_dim: int = MAX_DIM) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = tensor_product(out, f, max_dim)
    return out


@dataclass(frozen=True)
class PartySubset:
    """A set of parties (numbered 1..n_parties) acted on by a partial transpose."""

    n_parties: int
    parties: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.n_parties < 1:
            raise ParameterError("n_parties must be >= 1")
        parties = frozenset(int(p) for p in self.parties)
        bad = [p for p in parties if not 1 <= p <= self.n_parties]
        if bad:
            raise ParameterError(f"parties {sorted(bad)} outside 1..{self.n_parties}")
        object.__setattr__(self, "parties", parties)

    @classmethod
    def of(cls, n_parties: int, *parties: int) -> "PartySubset":
        return cls(n_parties, frozenset(parties))

    @classmethod
    def from_mask(cls, n_parties: int, mask: int) -> "PartySubset":
        """Bit ``n_parties - i`` of ``mask`` selects party ``i`` (party 1 most significant)."""
        if mask < 0 or mask >> n_parties:
            raise ParameterError(f"mask {mask:#b} does not fit {n_parties} parties")
        return cls(n_parties, frozenset(i for i in range(1, n_parties + 1) if mask >> (n_parties - i) & 1))

    @property
    def mask(self) -> int:
        return sum(1 << (self.n_parties - p) for p in self.parties)

    def complement(self) -> "PartySubset":
        return PartySubset(self.n_parties, frozenset(range(1, self.n_parties + 1)) - self.parties)


def partial_transpose(rho, subset: PartySubset) -> np.ndarray:
    """Transpose the row/column indices of the parties in ``subset``.

    Entries are only permuted, so applying the same transpose twice gives
    back the input exactly.
    """
    rho = as_square(rho, "rho")
    n = subset.n_parties
    if rho.shape[0] != 1 << n:
        raise ShapeError(f"matrix of dimension {rho.shape[0]} does not match {n} qubits")
    tensor = rho.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for p in subset.parties:
        axes[p - 1], axes[n + p - 1] = axes[n + p - 1], axes[p - 1]
    return np.ascontiguousarray(tensor.transpose(axes).reshape(rho.shape))


def hermitian_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_square(m)
    return hermitian_defect(m) <= tol * max(1.0, float(np.max(np.abs(m))))


def symmetrized(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """``(m + m^†)/2`` after checking ``m`` is Hermitian within ``tol``."""
    m = as_square(m)
    if not is_hermitian(m, tol):
        raise ContractError(f"matrix is not Hermitian (max |m - m^dag| = {hermitian_defect(m):.3e})")
    return 0.5 * (m + m.conj().T)


def hermitian_eigh(m, vectors: bool = False, backend: str | None = None):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns (``None`` unless ``vectors`` is set). Iteration
    stops once the off-diagonal Frobenius norm is at most
    ``JACOBI_REL_TOL * ||m||_F``.
    """
    a = np.array(symmetrized(m), dtype=np.complex128, order="C", copy=True)
    n = a.shape[0]
    kernel = _KERNELS[backend or BACKEND]
    vt = np.eye(n, dtype=np.complex128) if vectors else np.zeros((1, 1), dtype=np.complex128)
    tol = JACOBI_REL_TOL * float(np.linalg.norm(a))
    sweeps = kernel(a, vt, tol, JACOBI_MAX_SWEEPS, bool(vectors))
    if sweeps < 0:
        raise ContractError(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], (vt[order].T.copy() if vectors else None)


def hermitian_eigenvalues(m, backend: str | None = None) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending."""
    return hermitian_eigh(m, backend=backend)[0]


def min_eigenvalue(m, backend: str | None = None) -> float:
    return float(hermitian_eigenvalues(m, backend=backend)[0])


def check_density(rho, psd: bool = True, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate the density-matrix invariants and return ``rho`` as an array.

    Hermiticity and unit trace are checked to ``tol``; positivity (optional,
    as it costs an eigendecomposition) to ``-PSD_TOL``.
    """
    rho = as_square(rho, "rho")
    if hermitian_defect(rho) > tol:
        raise ContractError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ContractError(f"density matrix trace is {tr.real:.15g}, expected 1")
    if psd:
        lo = min_eigenvalue(rho)
        if lo < -PSD_TOL:
            raise ContractError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho
