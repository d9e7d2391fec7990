"""Sum capacity of a selected antenna set and centralized baselines."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from ..errors import DimensionMismatch


def power_matrix(P, n_r: int) -> np.ndarray:
    if P is None:
        return np.eye(n_r)
    P = np.asarray(P, dtype=float)
    if P.shape != (n_r, n_r):
        raise DimensionMismatch(f"P must be {n_r}x{n_r}, got {P.shape}")
    if np.any(P != np.diag(np.diag(P))) or np.any(np.diag(P) < 0):
        raise DimensionMismatch("P must be diagonal and nonnegative")
    return P


def capacity(Hc, rho: float, n_ts: int, n_r: int, P=None) -> float:
    """log2 det(I + rho * (n_r / n_ts) * Hc P Hc^H) in bits/s/Hz.

    ``Hc`` holds one row per antenna (zero rows for antennas that are off)
    and ``n_r`` columns.  The determinant is taken through a Cholesky
    factor since the matrix is Hermitian positive definite.
    """
    Hc = np.asarray(Hc, dtype=complex)
    if Hc.ndim != 2 or Hc.shape[1] != n_r:
        raise DimensionMismatch(f"Hc must have {n_r} columns, got shape {Hc.shape}")
    if n_ts < 1:
        raise DimensionMismatch("n_ts must be positive")
    P = power_matrix(P, n_r)
    rows = Hc.shape[0]
    if rows == 0:
        return 0.0
    G = np.eye(rows) + rho * (n_r / n_ts) * (Hc @ P @ Hc.conj().T)
    L = np.linalg.cholesky(G)
    return float(max(0.0, 2.0 * np.sum(np.log2(np.diag(L).real))))


def subset_capacities(H, subsets, rho: float, n_ts: int, P=None) -> np.ndarray:
    """Capacity of many equal-size antenna subsets at once.

    Uses det(I + A A^H) = det(I + A^H A) so every determinant is n_r x n_r.
    """
    H = np.asarray(H, dtype=complex)
    n_r = H.shape[1]
    P = power_matrix(P, n_r)
    idx = np.asarray(subsets, dtype=int)
    if idx.size == 0:
        return np.zeros(len(idx))
    root = np.sqrt(np.diag(P))
    A = H[idx] * root  # (batch, k, n_r)
    G = np.eye(n_r) + rho * (n_r / n_ts) * np.einsum("bki,bkj->bij", A.conj(), A)
    sign, logdet = np.linalg.slogdet(G)
    return np.maximum(logdet.real / np.log(2.0), 0.0)


def rayleigh_channel(n_t: int, n_r: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian entries with unit variance."""
    return (rng.standard_normal((n_t, n_r)) + 1j * rng.standard_normal((n_t, n_r))) / np.sqrt(2.0)


def to_real_row(h) -> tuple[float, ...]:
    """Interleave real and imaginary parts: (re0, im0, re1, im1, ...)."""
    h = np.asarray(h, dtype=complex)
    return tuple(float(v) for pair in zip(h.real, h.imag) for v in pair)


def from_real_row(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0::2] + 1j * v[1::2]


def greedy_selection(H, rho: float, n_ts: int, P=None) -> tuple[tuple[int, ...], float]:
    """Grow the set one antenna at a time, always adding the best one.

    Ties go to the lowest antenna index.
    """
    H = np.asarray(H, dtype=complex)
    n_t, n_r = H.shape
    chosen: list[int] = []
    for _ in range(n_ts):
        best, best_cap = None, -np.inf
        for i in range(n_t):
            if i in chosen:
                continue
            c = capacity(H[chosen + [i]], rho, n_ts, n_r, P)
            if c > best_cap:
                best, best_cap = i, c
        chosen.append(best)
    sel = tuple(sorted(chosen))
    return sel, capacity(H[list(sel)], rho, n_ts, n_r, P)


def exhaustive_selection(H, rho: float, n_ts: int, P=None, chunk: int = 4096):
    """Best n_ts-subset by enumeration; ties go to the lexicographically first."""
    H = np.asarray(H, dtype=complex)
    n_t = H.shape[0]
    best, best_cap = None, -np.inf
    it = itertools.combinations(range(n_t), n_ts)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        caps = subset_capacities(H, block, rho, n_ts, P)
        j = int(np.argmax(caps))
        if caps[j] > best_cap:
            best, best_cap = block[j], float(caps[j])
    return tuple(best), best_cap


def exhaustive_feasible(n_t: int, n_ts: int, limit: int = 100_000) -> bool:
    return comb(n_t, n_ts) <= limit
