"""Pure numpy versions of the hot loops (same signatures as ``_native``)."""
from __future__ import annotations

import numpy as np

SERIES_CUT = 1e-3


def _phi1_weights(E0, E1, z):
    """``(E1 - E0)/z`` with a series in ``z`` near 0 (``E1 = E0 e^z``)."""
    small = np.abs(z) < SERIES_CUT
    safe = np.where(small, 1.0, z)
    series = E0 * (1 + z * (1 / 2 + z * (1 / 6 + z / 24)))
    return np.where(small, series, (E1 - E0) / safe)


def j0_double_sum(w, A, B, g, G, d, da, idx):
    """``sum_{i,j} w_i w_j sum_k exp(Phi_k) phi1(Phi_{k+1} - Phi_k) dGamma_k``.

    ``Phi_k(i, j) = A[k,i] + A[k,j] + B[k, s]`` and
    ``dGamma_k = G[k, s] - g[k,i] - g[k,j] - d[k,i] d[k,j] da[k]`` where ``s`` is
    ``idx[i, j]``, or ``i + j`` when ``idx`` is None (uniform frequency grid).
    Returns ``(total, pair_evaluations)``; the pair sum uses ``i <= j`` symmetry.
    """
    n = w.size
    M = da.size
    EA = np.exp(A)
    EB = np.exp(B)
    dA = np.diff(A, axis=0)
    dB = np.diff(B, axis=0)
    total = 0j
    for i in range(n):
        j = np.arange(i, n)
        s = i + j if idx is None else idx[i, i:]
        E = EA[:, i, None] * EA[:, i:] * EB[:, s]
        acc = np.zeros(n - i, complex)
        for k in range(M):
            z = dA[k, i] + dA[k, i:] + dB[k, s]
            gam = G[k, s] - g[k, i] - g[k, i:] - d[k, i] * d[k, i:] * da[k]
            acc += gam * _phi1_weights(E[k], E[k + 1], z)
        pair = w[i] * w[i:] * acc
        total += pair[0] + 2 * np.sum(pair[1:])
    return total, n * (n + 1) // 2


def _interp_uniform(row, x0, dx, x):
    pos = (x - x0) / dx
    j = np.clip(np.floor(pos).astype(np.int64), 0, row.size - 2)
    f = pos - j
    return row[j] * (1 - f) + row[j + 1] * f


def hedge_table(X, alpha, H0, fT, x0, dx, Htab, Ktab, feedback):
    """Terminal hedging errors with strategies read from uniform-x tables.

    ``X`` is ``(paths, N+1)``; row ``k`` of the tables is used on ``(t_k, t_{k+1}]``.
    """
    P, N1 = X.shape
    gains = np.zeros(P)
    for k in range(N1 - 1):
        x = X[:, k]
        v = _interp_uniform(Ktab[k], x0, dx, x)
        if feedback:
            v = v + alpha[k] * (_interp_uniform(Htab[k], x0, dx, x) - H0 - gains)
        gains += v * (X[:, k + 1] - x)
    return fT - H0 - gains


def _atom_sum(coef, u, x):
    ph = np.outer(x, u)
    return np.cos(ph) @ coef.real - np.sin(ph) @ coef.imag


def hedge_atoms(X, alpha, H0, fT, u, Hcoef, Kcoef, feedback):
    """As :func:`hedge_table`, with ``H(t_k, x) = Re sum_j Hcoef[k, j] e^{i u_j x}``."""
    P, N1 = X.shape
    gains = np.zeros(P)
    for k in range(N1 - 1):
        x = X[:, k]
        v = _atom_sum(Kcoef[k], u, x)
        if feedback:
            v = v + alpha[k] * (_atom_sum(Hcoef[k], u, x) - H0 - gains)
        gains += v * (X[:, k + 1] - x)
    return fT - H0 - gains
