"""GHZ-diagonal coefficients, bipartite splits and the distillability witness.

An N-qubit state is projected onto the GHZ-diagonal family

    rho_N = sum_{s=+-} l0^s |G0^s><G0^s| + sum_{j>=1} l_j (|Gj+><Gj+| + |Gj-><Gj-|),
    |Gj+-> = (|j>|0> +- |2**(N-1)-1-j>|1>)/sqrt(2),

by reading off ``l0+- = <G0+-|rho|G0+->`` and
``2 l_j = <Gj+|rho|Gj+> + <Gj-|rho|Gj->``. Only two diagonal entries per
``j`` and one corner entry of ``rho`` are involved, so extraction is O(2**N)
and everything downstream works on the coefficients alone.

Split ``j`` (an (N-1)-bit string, party 1 most significant) keeps party i
with party N when bit ``j_i`` is 0. The family is distillable across split
``j`` iff ``2 l_j < l0+ - l0-``; a state whose ``l0+ - l0-`` exceeds
``2**(-(N-1)/2)`` violates the Mermin-Klyshko bound, and for N > 2 such a
state always has at least one distillable split.

``phase`` arguments rotate ``|G0+->`` to ``(|0..0> +- e^{i phase}|1..1>)/sqrt(2)``.
With ``phase = beta_n(N)`` the gap ``l0+ - l0-`` equals the sigma_x/sigma_y
Bell value divided by ``2**((N-1)/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from belldistill import bell, linalg
from belldistill.errors import BellDistillError, ContractError, ParameterError, ShapeError

STRICT_SLACK = 1e-12
CLAMP_TOL = 1e-12
NORM_TOL = 1e-10
AUTO_FLOOR_MARGIN = 1e-9


class LemmaCounterexample(BellDistillError):
    """A Bell-violating state with no distillable split: an implementation defect."""


def n_splits(n: int) -> int:
    return (1 << (n - 1)) - 1


def violation_threshold(n: int) -> float:
    """Smallest gap ``l0+ - l0-`` that violates the classical bound: ``2**(-(N-1)/2)``."""
    return 2.0 ** (-(n - 1) / 2)


def pigeonhole_bound(n: int) -> float:
    """``(2**(n-1) - 1) / 2**((n-1)/2)``: a lower bound on ``2 sum l_j`` if no split were distillable."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    return n_splits(n) / 2.0 ** ((n - 1) / 2)


@dataclass(eq=False)
class GhzDiagonalCoefficients:
    """Coefficients ``l0+, l0-, l_1 .. l_{2**(N-1)-1}`` of a GHZ-diagonal state.

    ``lambdas[j - 1]`` holds ``l_j``. Values in ``[-CLAMP_TOL, 0)`` are
    clamped to zero and the family renormalized; anything more negative, or
    a normalization defect beyond ``NORM_TOL``, raises ContractError.
    """

    n_parties: int
    lambda0_plus: float
    lambda0_minus: float
    lambdas: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.n_parties
        if n < 2:
            raise ParameterError("GHZ-diagonal families need n_parties >= 2")
        lam = np.array(self.lambdas, dtype=float).reshape(-1)
        if lam.shape != (n_splits(n),):
            raise ShapeError(f"expected {n_splits(n)} lambdas for N={n}, got {lam.size}")
        vals = np.concatenate(([self.lambda0_plus, self.lambda0_minus], lam))
        if not np.all(np.isfinite(vals)):
            raise ContractError("coefficients must be finite")
        if vals.min() < -CLAMP_TOL:
            raise ContractError(f"negative coefficient {vals.min():.3e}")
        total = vals[0] + vals[1] + 2.0 * vals[2:].sum()
        if abs(total - 1.0) > NORM_TOL:
            raise ContractError(f"coefficients are not normalized (sum = {total:.15g})")
        if vals.min() < 0:
            vals = np.maximum(vals, 0.0)
            total = vals[0] + vals[1] + 2.0 * vals[2:].sum()
            vals = vals / total
        self.lambda0_plus = float(vals[0])
        self.lambda0_minus = float(vals[1])
        self.lambdas = vals[2:]
        self.lambdas.setflags(write=False)

    @property
    def delta(self) -> float:
        return self.lambda0_plus - self.lambda0_minus

    @property
    def normalization(self) -> float:
        return self.lambda0_plus + self.lambda0_minus + 2.0 * float(self.lambdas.sum())

    def lambda_(self, j: int) -> float:
        if not 1 <= j <= n_splits(self.n_parties):
            raise ParameterError(f"split label {j} outside 1..{n_splits(self.n_parties)}")
        return float(self.lambdas[j - 1])

    def to_density(self, phase: float = 0.0, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
        """Dense ``rho_N`` (cross terms between ``|Gj+>`` and ``|Gj->`` cancel for j >= 1)."""
        n = self.n_parties
        dim = 1 << n
        linalg.check_dim(dim, max_dim)
        rho = np.zeros((dim, dim), dtype=np.complex128)
        a = np.arange(0, dim, 2)
        diag = np.empty(dim)
        diag[a[1:]] = self.lambdas
        diag[dim - 1 - a[1:]] = self.lambdas
        diag[0] = diag[dim - 1] = 0.5 * (self.lambda0_plus + self.lambda0_minus)
        rho[np.arange(dim), np.arange(dim)] = diag
        rho[0, dim - 1] = 0.5 * self.delta * np.exp(-1j * phase)
        rho[dim - 1, 0] = np.conj(rho[0, dim - 1])
        return rho

    def allclose(self, other: "GhzDiagonalCoefficients", atol: float) -> bool:
        return (
            self.n_parties == other.n_parties
            and abs(self.lambda0_plus - other.lambda0_plus) <= atol
            and abs(self.lambda0_minus - other.lambda0_minus) <= atol
            and bool(np.all(np.abs(self.lambdas - other.lambdas) <= atol))
        )

    def to_dict(self) -> dict:
        return {
            "lambda0_plus": self.lambda0_plus,
            "lambda0_minus": self.lambda0_minus,
            "lambdas": [float(x) for x in self.lambdas],
        }

    @classmethod
    def from_dict(cls, n_parties: int, doc: dict) -> "GhzDiagonalCoefficients":
        return cls(n_parties, doc["lambda0_plus"], doc["lambda0_minus"], np.asarray(doc["lambdas"], dtype=float))


def _from_diagonal(n: int, diag: np.ndarray, corner: complex, phase: float) -> GhzDiagonalCoefficients:
    dim = 1 << n
    a = np.arange(2, dim, 2)
    two_lambda = diag[a] + diag[dim - 1 - a]
    coherence = float((np.exp(1j * phase) * corner).real)
    mean = 0.5 * (diag[0] + diag[dim - 1])
    return GhzDiagonalCoefficients(n, mean + coherence, mean - coherence, 0.5 * two_lambda)


def extract_coefficients(state, phase: float = 0.0) -> GhzDiagonalCoefficients:
    """Project a density matrix (2-D) or pure state (1-D) onto the GHZ-diagonal family."""
    arr = np.asarray(state, dtype=np.complex128)
    if arr.ndim == 1:
        n = linalg.num_qubits(arr.size)
        if abs(np.vdot(arr, arr).real - 1.0) > linalg.DENSITY_TOL:
            raise ContractError("pure state is not normalized")
        diag = np.abs(arr) ** 2
        corner = arr[0] * np.conj(arr[-1])
    else:
        rho = linalg.check_density(arr, psd=False)
        n = linalg.num_qubits(rho.shape[0])
        diag = np.diagonal(rho).real
        corner = rho[0, -1]
    if n < 2:
        raise ShapeError("coefficient extraction needs at least two qubits")
    return _from_diagonal(n, diag, corner, phase)


def delta(c: GhzDiagonalCoefficients) -> float:
    return c.delta


def violates_threshold(c: GhzDiagonalCoefficients) -> bool:
    """``l0+ - l0- > 2**(-(N-1)/2)`` with strict slack ``STRICT_SLACK``."""
    return c.delta > violation_threshold(c.n_parties) + STRICT_SLACK


def bell_value(c: GhzDiagonalCoefficients) -> float:
    """Bell value of the family in its own phase frame: ``2**((N-1)/2) * (l0+ - l0-)``."""
    return bell.quantum_max(c.n_parties) * c.delta


@dataclass(frozen=True)
class BipartiteSplit:
    """Bipartition of N parties labelled by a nonzero (N-1)-bit integer."""

    n_parties: int
    label: int

    def __post_init__(self):
        if self.n_parties < 2:
            raise ParameterError("a split needs at least two parties")
        if not 1 <= self.label <= n_splits(self.n_parties):
            raise ParameterError(f"split label must be in 1..{n_splits(self.n_parties)}, got {self.label}")

    @classmethod
    def from_bits(cls, bits: str) -> "BipartiteSplit":
        """Parse ``"j1 j2 ... j_{N-1}"`` written as a bit string, e.g. ``"110"`` for N = 4."""
        bits = bits.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise ParameterError(f"split must be a string of 0/1 characters, got {bits!r}")
        return cls(len(bits) + 1, int(bits, 2))

    @property
    def bits(self) -> str:
        return format(self.label, f"0{self.n_parties - 1}b")

    def bit(self, party: int) -> int:
        return (self.label >> (self.n_parties - 1 - party)) & 1

    def groups(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return split_groups(self)

    def __str__(self):
        with_last, other = self.groups()
        return f"({''.join(map(str, with_last))})-({''.join(map(str, other))})"


def split_groups(split: BipartiteSplit) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``(group_with_last, other_group)``: party i joins party N iff bit ``j_i`` is 0."""
    n = split.n_parties
    with_last = tuple(i for i in range(1, n) if split.bit(i) == 0) + (n,)
    other = tuple(i for i in range(1, n) if split.bit(i) == 1)
    return with_last, other


def enumerate_splits(n: int) -> list[BipartiteSplit]:
    if n < 2:
        raise ParameterError("n must be >= 2")
    return [BipartiteSplit(n, j) for j in range(1, n_splits(n) + 1)]


@dataclass(frozen=True)
class SplitReport:
    split: BipartiteSplit
    two_lambda_j: float
    delta: float

    @property
    def group_with_last(self) -> tuple[int, ...]:
        return split_groups(self.split)[0]

    @property
    def other_group(self) -> tuple[int, ...]:
        return split_groups(self.split)[1]

    @property
    def distillable(self) -> bool:
        return self.two_lambda_j < self.delta - STRICT_SLACK

    def to_dict(self) -> dict:
        return {
            "label": self.split.bits,
            "split": str(self.split),
            "group_with_last": list(self.group_with_last),
            "other_group": list(self.other_group),
            "two_lambda_j": self.two_lambda_j,
            "delta": self.delta,
            "distillable": self.distillable,
        }


def split_report(c: GhzDiagonalCoefficients, split: BipartiteSplit) -> SplitReport:
    if split.n_parties != c.n_parties:
        raise ShapeError(f"split for {split.n_parties} parties, coefficients for {c.n_parties}")
    return SplitReport(split, 2.0 * c.lambda_(split.label), c.delta)


def split_scan(c: GhzDiagonalCoefficients) -> list[SplitReport]:
    """Reports for all ``2**(N-1) - 1`` splits, ordered by label."""
    return [split_report(c, s) for s in enumerate_splits(c.n_parties)]


def distillable_labels(c: GhzDiagonalCoefficients) -> np.ndarray:
    """Labels ``j`` with ``2 l_j < l0+ - l0-`` (vectorized)."""
    return np.flatnonzero(2.0 * c.lambdas < c.delta - STRICT_SLACK) + 1


@dataclass(frozen=True)
class LemmaWitness:
    """Outcome of the Bell-violation -> distillable-split check for one state.

    ``applicable`` is False when the state does not violate the bound; the
    full split scan is still reported, but nothing is claimed about it.
    """

    n_parties: int
    bell_value: float
    coefficients: GhzDiagonalCoefficients
    splits: tuple[SplitReport, ...]

    @property
    def applicable(self) -> bool:
        return self.bell_value > bell.CLASSICAL_BOUND + bell.VIOLATION_SLACK

    @property
    def witnesses(self) -> tuple[SplitReport, ...]:
        return tuple(r for r in self.splits if r.distillable)


def lemma_witness(state, beta: float | None = None) -> LemmaWitness:
    """Check that a Bell-violating state has a distillable split.

    ``state`` is a density matrix, a pure state vector, or a
    :class:`GhzDiagonalCoefficients` (taken to be expressed in the frame
    where the Bell operator is phase free). Dense inputs are evaluated
    against the sigma_x/sigma_y operator with phase ``beta`` (default
    ``beta_n(N)``) and projected in the matching frame.

    Raises :class:`LemmaCounterexample` if the state violates the bound
    but no split passes the witness.
    """
    if isinstance(state, GhzDiagonalCoefficients):
        coeffs = state
        value = bell_value(coeffs)
    else:
        arr = np.asarray(state, dtype=np.complex128)
        n = linalg.num_qubits(arr.shape[0])
        if beta is None:
            beta = bell.beta_n(n)
        coeffs = extract_coefficients(arr, phase=beta)
        rho = np.outer(arr, arr.conj()) if arr.ndim == 1 else arr
        value = bell.bell_report(rho, "xy", beta).value
    if coeffs.n_parties < 3:
        raise ParameterError("the lemma check needs N > 2 (two-qubit states are handled separately)")
    result = LemmaWitness(coeffs.n_parties, value, coeffs, tuple(split_scan(coeffs)))
    if result.applicable and not result.witnesses:
        raise LemmaCounterexample(
            f"Bell value {value:.15g} > 1 but no split has 2*lambda_j < delta = {coeffs.delta:.15g}"
        )
    return result


def auto_delta_floor(n: int) -> float:
    """Default sampling floor for lemma campaigns: just above the violation threshold."""
    return min(1.0, violation_threshold(n) + AUTO_FLOOR_MARGIN)


def witness_counts(delta_values: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
    """Number of distillable splits per row of a batch of families."""
    return np.count_nonzero(2.0 * lambdas < (delta_values - STRICT_SLACK)[:, None], axis=1)


@dataclass
class LemmaCampaign:
    n_parties: int
    trials: int
    seed: int
    delta_floor: float
    violating: int
    counterexamples: int
    witness_histogram: dict[int, int]
    min_witnesses: int
    min_delta: float

    def to_dict(self) -> dict:
        return {
            "n_parties": self.n_parties,
            "trials": self.trials,
            "seed": self.seed,
            "delta_floor": self.delta_floor,
            "threshold": violation_threshold(self.n_parties),
            "violating": self.violating,
            "counterexamples": self.counterexamples,
            "min_witnesses": self.min_witnesses,
            "min_delta": self.min_delta,
            "witness_histogram": {str(k): v for k, v in sorted(self.witness_histogram.items())},
            "strict_slack": STRICT_SLACK,
        }


def verify_lemma(n: int, trials: int, seed: int, delta_floor: float | str = "auto") -> LemmaCampaign:
    """Sample violating families and count those with no distillable split.

    Works on coefficient arrays only, so ``n`` may go well beyond the dense cap.
    """
    from belldistill.states import random_ghz_diagonal_arrays

    if n < 3:
        raise ParameterError("the lemma requires N > 2: the pigeonhole bound is below one at N = 2")
    if delta_floor == "auto":
        delta_floor = auto_delta_floor(n)
    delta_floor = float(delta_floor)
    plus, minus, lambdas = random_ghz_diagonal_arrays(n, trials, seed, delta_floor)
    gaps = plus - minus
    violating = gaps > violation_threshold(n) + STRICT_SLACK
    counts = witness_counts(gaps, lambdas)
    hist_keys, hist_vals = np.unique(counts[violating], return_counts=True)
    return LemmaCampaign(
        n_parties=n,
        trials=trials,
        seed=seed,
        delta_floor=delta_floor,
        violating=int(violating.sum()),
        counterexamples=int(np.count_nonzero(violating & (counts == 0))),
        witness_histogram={int(k): int(v) for k, v in zip(hist_keys, hist_vals)},
        min_witnesses=int(counts[violating].min()) if violating.any() else 0,
        min_delta=float(gaps.min()),
    )

