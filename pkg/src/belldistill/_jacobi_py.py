"""Pure-numpy Jacobi eigensolver used when the compiled kernel is unavailable.

Rotations are applied in round-robin (tournament) order: each round pairs
every index with exactly one partner, so the ``n // 2`` rotations of a round
touch disjoint rows/columns and can be applied as a single vectorized update.
"""

import numpy as np


def round_robin_pairs(n):
    """Return the ``n - 1`` (or ``n``) rounds of disjoint index pairs covering all pairs."""
    m = n + (n % 2)
    ring = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(ring[i], ring[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        ring = [ring[0], ring[-1]] + ring[1:-1]
    return rounds


def _offdiag_norm(a):
    upper = a[np.triu_indices(a.shape[0], 1)]
    return np.sqrt(2.0 * np.sum(upper.real**2 + upper.imag**2))


def jacobi_hermitian(a, vt, tol, max_sweeps, want_vectors):
    """Same contract as the compiled kernel: mutates ``a`` (and ``vt``) in place.

    ``vt`` accumulates the transposed eigenvector matrix.
    """
    n = a.shape[0]
    negligible = tol * 1e-6
    rounds = round_robin_pairs(n)
    for sweep in range(max_sweeps + 1):
        if _offdiag_norm(a) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for P, Q in rounds:
            b = a[P, Q]
            mag = np.abs(b)
            active = mag > negligible
            if not active.any():
                a[P, Q] = 0.0
                a[Q, P] = 0.0
                continue
            safe = np.where(active, mag, 1.0)
            e = np.where(active, b / safe, 1.0)
            app = a[P, P].real
            aqq = a[Q, Q].real
            theta = (aqq - app) / (2.0 * safe)
            t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            se = s * e
            sec = s * np.conj(e)

            cols_p = a[:, P].copy()
            cols_q = a[:, Q]
            a[:, P] = cols_p * c - cols_q * sec
            a[:, Q] = cols_p * se + cols_q * c
            rows_p = a[P, :].copy()
            rows_q = a[Q, :]
            a[P, :] = c[:, None] * rows_p - se[:, None] * rows_q
            a[Q, :] = sec[:, None] * rows_p + c[:, None] * rows_q
            a[P, P] = app - t * mag
            a[Q, Q] = aqq + t * mag
            a[P, Q] = 0.0
            a[Q, P] = 0.0

            if want_vectors:
                vp = vt[P, :].copy()
                vq = vt[Q, :]
                vt[P, :] = c[:, None] * vp - sec[:, None] * vq
                vt[Q, :] = se[:, None] * vp + c[:, None] * vq
    return -1
