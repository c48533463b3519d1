"""Mermin-Klyshko Bell operators and the classical-bound violation test.

Two builders are provided: :func:`mk_operator` runs the general two-setting
recursion for arbitrary unit vectors, and :func:`mk_xy_operator` writes down
the closed form obtained when every party measures sigma_x and sigma_y,

    B_N = 2**((N-1)/2) * (e^{i beta}|1..1><0..0| + e^{-i beta}|0..0><1..1|).

For those settings the recursion produces ``beta = pi*(N-1)/4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from belldistill import linalg
from belldistill.errors import ContractError, ParameterError, ShapeError

CLASSICAL_BOUND = 1.0
VIOLATION_SLACK = 1e-12
UNIT_TOL = 1e-12
IMAG_TOL = 1e-10
QUANTUM_MAX_SLACK = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# Two readings of "pi/4(N-1)". Only the first reproduces the recursion with
# sigma_x / sigma_y settings; the second is kept for comparison runs.
BETA_CONVENTIONS = {
    "pi*(N-1)/4": lambda n: math.pi * (n - 1) / 4,
    "pi/(4*(N-1))": lambda n: math.pi / (4 * (n - 1)) if n > 1 else 0.0,
}
DEFAULT_BETA_CONVENTION = "pi*(N-1)/4"


def beta_n(n: int, convention: str = DEFAULT_BETA_CONVENTION) -> float:
    """Phase of the sigma_x/sigma_y Bell operator for ``n`` parties."""
    try:
        return BETA_CONVENTIONS[convention](n)
    except KeyError:
        raise ParameterError(f"unknown beta convention {convention!r}") from None


def quantum_max(n: int) -> float:
    return 2.0 ** ((n - 1) / 2)


def _unit(vec, what: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ParameterError(f"{what} must be a finite real 3-vector, got {vec!r}")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ParameterError(f"{what} must have unit norm, |{what}| = {np.linalg.norm(v):.15g}")
    return v


def pauli_direction(direction) -> np.ndarray:
    """The dichotomic observable ``n . sigma`` for a unit 3-vector ``n``."""
    x, y, z = _unit(direction, "direction")
    return x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z


@dataclass(frozen=True)
class MeasurementSettings:
    """Two measurement directions per party: ``first[i]`` and ``second[i]``.

    ``first`` plays the role of the unprimed vectors in the recursion and
    ``second`` the primed ones.
    """

    first: tuple[tuple[float, float, float], ...]
    second: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        first = tuple(tuple(_unit(v, "first direction")) for v in self.first)
        second = tuple(tuple(_unit(v, "second direction")) for v in self.second)
        if len(first) != len(second) or not first:
            raise ParameterError("need one (first, second) pair of directions per party")
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    @property
    def n_parties(self) -> int:
        return len(self.first)

    @classmethod
    def xy(cls, n: int) -> "MeasurementSettings":
        """sigma_x as the first and sigma_y as the second observable at every site."""
        return cls(((1.0, 0.0, 0.0),) * n, ((0.0, 1.0, 0.0),) * n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "MeasurementSettings":
        def draw():
            v = rng.standard_normal(3)
            return tuple(v / np.linalg.norm(v))

        return cls(tuple(draw() for _ in range(n)), tuple(draw() for _ in range(n)))

    def to_dict(self) -> dict:
        return {
            "n_parties": self.n_parties,
            "settings": [{"n": list(a), "n_prime": list(b)} for a, b in zip(self.first, self.second)],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MeasurementSettings":
        rows = doc["settings"]
        if "n_parties" in doc and doc["n_parties"] != len(rows):
            raise ParameterError("n_parties does not match the number of settings rows")
        return cls(tuple(tuple(r["n"]) for r in rows), tuple(tuple(r["n_prime"]) for r in rows))


def mk_operator_pair(settings: MeasurementSettings, max_dim: int = linalg.MAX_DIM):
    """Return ``(B_N, B'_N)`` built in one joint recursion.

    ``B'`` is ``B`` with every first/second direction swapped; carrying both
    through the loop keeps the cost at N Kronecker products per operator.
    """
    linalg.check_dim(1 << settings.n_parties, max_dim)
    obs = [(pauli_direction(a), pauli_direction(b)) for a, b in zip(settings.first, settings.second)]
    b, bp = obs[0]
    for s, sp in obs[1:]:
        plus, minus = 0.5 * (s + sp), 0.5 * (s - sp)
        b, bp = np.kron(b, plus) + np.kron(bp, minus), np.kron(bp, plus) - np.kron(b, minus)
    return b, bp


def mk_operator(settings: MeasurementSettings, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """Mermin-Klyshko operator for arbitrary two-setting measurements."""
    return mk_operator_pair(settings, max_dim)[0]


def mk_xy_operator(n: int, beta: float | None = None, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """Closed-form operator for sigma_x/sigma_y settings: two anti-diagonal corners."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    dim = 1 << n
    linalg.check_dim(dim, max_dim)
    if beta is None:
        beta = beta_n(n)
    op = np.zeros((dim, dim), dtype=np.complex128)
    scale = quantum_max(n)
    op[dim - 1, 0] = scale * np.exp(1j * beta)
    op[0, dim - 1] = scale * np.exp(-1j * beta)
    return op


def ghz_projector_form(n: int, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """``2**((N-1)/2) (|GHZ+><GHZ+| - |GHZ-><GHZ-|)``, i.e. the xy operator with its phase removed."""
    return mk_xy_operator(n, 0.0, max_dim)


def local_phase_unitary(n: int, phase: float) -> np.ndarray:
    """Diagonal ``diag(1, e^{i phase/n})`` on every qubit.

    Conjugation ``W @ B(0) @ W^dag`` by this unitary turns the phase-free
    operator into ``mk_xy_operator(n, phase)``; it shifts a GHZ phase the
    same way.
    """
    weights = np.array([bin(k).count("1") for k in range(1 << n)])
    return np.diag(np.exp(1j * phase * weights / n))


def expectation(op, rho) -> float:
    """``Re tr(op @ rho)``; raises if the imaginary part exceeds ``IMAG_TOL``."""
    op = linalg.as_square(op, "op")
    rho = linalg.as_square(rho, "rho")
    if op.shape != rho.shape:
        raise ShapeError(f"operator {op.shape} and state {rho.shape} differ in shape")
    value = np.einsum("ij,ji->", op, rho)
    if abs(value.imag) > IMAG_TOL:
        raise ContractError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def xy_expectation(rho, beta: float | None = None) -> float:
    """Expectation of :func:`mk_xy_operator` without building it (reads one corner of ``rho``)."""
    rho = linalg.as_square(rho, "rho")
    n = linalg.num_qubits(rho.shape[0])
    if beta is None:
        beta = beta_n(n)
    corner = rho[0, -1]
    return float(2.0 * quantum_max(n) * (np.exp(1j * beta) * corner).real)


@dataclass(frozen=True)
class BellReport:
    value: float
    n_parties: int
    classical_bound: float = CLASSICAL_BOUND

    def __post_init__(self):
        if abs(self.value) > quantum_max(self.n_parties) + QUANTUM_MAX_SLACK:
            raise ContractError(
                f"Bell value {self.value:.12g} exceeds the quantum maximum {quantum_max(self.n_parties):.12g}; "
                "the input is not a valid state"
            )

    @property
    def quantum_max(self) -> float:
        return quantum_max(self.n_parties)

    @property
    def violates(self) -> bool:
        return self.value > self.classical_bound + VIOLATION_SLACK

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "classical_bound": self.classical_bound,
            "quantum_max": self.quantum_max,
            "violates": self.violates,
            "violation_slack": VIOLATION_SLACK,
        }


def bell_report(rho, settings: MeasurementSettings | str = "xy", beta: float | None = None) -> BellReport:
    """Evaluate ``<B_N>`` on ``rho`` and compare it with the classical bound.

    ``settings="xy"`` uses the sigma_x/sigma_y closed form with phase ``beta``
    (default ``beta_n(N)``); ``settings="projector"`` uses the phase-free
    projector form; otherwise the general recursion is built.
    """
    rho = linalg.as_square(rho, "rho")
    n = linalg.num_qubits(rho.shape[0])
    if isinstance(settings, str):
        if settings == "xy":
            value = xy_expectation(rho, beta)
        elif settings == "projector":
            value = xy_expectation(rho, 0.0)
        else:
            raise ParameterError(f"unknown settings shorthand {settings!r}")
    else:
        if settings.n_parties != n:
            raise ShapeError(f"settings for {settings.n_parties} parties, state has {n}")
        value = expectation(mk_operator(settings), rho)
    return BellReport(value=value, n_parties=n)
