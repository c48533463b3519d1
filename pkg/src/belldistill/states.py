"""State constructors: GHZ states, the Dur bound-entangled family and seeded samplers.

Random objects are drawn from numpy's ``Generator(PCG64(seed))``; its
``random`` and ``standard_normal`` streams are reproducible across platforms
for a given numpy major version.
"""

from __future__ import annotations

import math

import numpy as np

from belldistill import bell, linalg
from belldistill.errors import ParameterError

MATCHED = "matched"


def resolve_phase(phase: float | str, n: int) -> float:
    """Turn a phase value (radians, or ``"matched"`` for ``beta_n(n)``) into a value in [0, 2 pi)."""
    if isinstance(phase, str):
        if phase != MATCHED:
            try:
                phase = float(phase)
            except ValueError:
                raise ParameterError(f"phase must be a number or {MATCHED!r}, got {phase!r}") from None
        else:
            phase = bell.beta_n(n)
    phase = float(phase)
    if not math.isfinite(phase):
        raise ParameterError("phase must be finite")
    return math.fmod(phase, 2 * math.pi) % (2 * math.pi)


def rng_for(seed: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ParameterError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(int(seed)))


def ghz(n: int, alpha: float | str = 0.0, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """``(|0...0> + e^{i alpha}|1...1>)/sqrt(2)`` as a length ``2**n`` vector."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    linalg.check_dim(1 << n, max_dim)
    alpha = resolve_phase(alpha, n)
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1 / math.sqrt(2)
    psi[-1] = np.exp(1j * alpha) / math.sqrt(2)
    return psi


def ghz_pair_indices(n: int, j: int) -> tuple[int, int]:
    """Basis indices of ``|j>|0>`` and ``|2**(n-1)-1-j>|1>``.

    The second index is the bitwise complement of the first.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0 <= j < 1 << (n - 1):
        raise ParameterError(f"j = {j} outside 0..{(1 << (n - 1)) - 1}")
    first = j << 1
    return first, (1 << n) - 1 - first


def ghz_basis_state(n: int, j: int, sign: int = +1, phase: float = 0.0) -> np.ndarray:
    """GHZ-like basis vector ``(|j>|0> +/- e^{i phase}|~j>|1>)/sqrt(2)``.

    ``j`` labels parties 1..n-1 (party 1 most significant) and the last
    factor is party n. ``phase`` is 0 for the standard basis.
    """
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    a, b = ghz_pair_indices(n, j)
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[a] = 1 / math.sqrt(2)
    psi[b] = sign * np.exp(1j * phase) / math.sqrt(2)
    return psi


def density(psi) -> np.ndarray:
    """``|psi><psi|``, symmetrized so that it is exactly Hermitian."""
    psi = np.asarray(psi, dtype=np.complex128)
    rho = np.outer(psi, psi.conj())
    return 0.5 * (rho + rho.conj().T)


def maximally_mixed(n: int, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    linalg.check_dim(1 << n, max_dim)
    return np.eye(1 << n, dtype=np.complex128) / (1 << n)


def dur_state(n: int, alpha: float | str = MATCHED, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """Dur's N-party state ``(|Psi><Psi| + 1/2 sum_i (P_i + Pbar_i)) / (N + 1)``.

    ``|Psi>`` is ``ghz(n, alpha)``; ``P_i`` projects onto the product state
    with party i in |1> and every other party in |0>, and ``Pbar_i`` onto its
    bitwise complement.
    """
    if n < 2:
        raise ParameterError("the Dur state needs n >= 2")
    dim = 1 << n
    linalg.check_dim(dim, max_dim)
    rho = density(ghz(n, alpha, max_dim))
    for i in range(1, n + 1):
        k = 1 << (n - i)
        rho[k, k] += 0.5
        rho[dim - 1 - k, dim - 1 - k] += 0.5
    return rho / (n + 1)


def random_density_matrix(n: int, seed: int, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
    """``G G^dag / tr(G G^dag)`` with ``G`` a seeded complex Gaussian matrix."""
    dim = 1 << n
    linalg.check_dim(dim, max_dim)
    rng = rng_for(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_pure_state(n: int, seed: int) -> np.ndarray:
    rng = rng_for(seed)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return psi / np.linalg.norm(psi)


def random_ghz_diagonal_arrays(n: int, trials: int, seed: int, delta_floor: float = 0.0):
    """Draw ``trials`` coefficient families as arrays.

    Returns ``(lambda0_plus, lambda0_minus, lambdas)`` with shapes
    ``(trials,)``, ``(trials,)`` and ``(trials, 2**(n-1) - 1)``. Each row is
    normalized (``l0+ + l0- + 2 sum l_j = 1``) and has ``l0+ - l0- >= delta_floor``.

    Weights for ``l0+``, ``l0-`` and each ``2 l_j`` are uniform on [0, 1),
    normalized to unit mass; rows short of the floor get a fraction ``t`` of
    all other mass moved into ``l0+``, the smallest that reaches the floor.
    """
    if n < 2:
        raise ParameterError("n must be >= 2")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if not 0.0 <= delta_floor <= 1.0:
        raise ParameterError(f"delta_floor must lie in [0, 1], got {delta_floor}")
    rng = rng_for(seed)
    n_pairs = (1 << (n - 1)) - 1
    w = rng.random((trials, n_pairs + 2))
    w /= w.sum(axis=1, keepdims=True)
    p, m = w[:, 0], w[:, 1]
    short = (p - m) < delta_floor
    # moving fraction t of the rest into l0+: delta(t) = p + t(1-p) - (1-t)m
    denom = 1.0 - p + m
    t = np.where(short, (delta_floor - p + m) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    rest = w[:, 1:] * (1.0 - t)[:, None]
    plus = p + t * (1.0 - p)
    total = plus + rest.sum(axis=1)
    plus = plus / total
    rest = rest / total[:, None]
    # ulp-level nudge so the floor survives rounding; normalization moves by ~1e-16
    lag = delta_floor - (plus - rest[:, 0])
    plus = np.where(lag > 0, plus + lag, plus)
    return plus, rest[:, 0], 0.5 * rest[:, 1:]


def random_ghz_diagonal(n: int, seed: int, delta_floor: float = 0.0):
    """One seeded :class:`~belldistill.ghz_family.GhzDiagonalCoefficients` sample."""
    from belldistill.ghz_family import GhzDiagonalCoefficients

    plus, minus, lambdas = random_ghz_diagonal_arrays(n, 1, seed, delta_floor)
    return GhzDiagonalCoefficients(n, float(plus[0]), float(minus[0]), lambdas[0])
