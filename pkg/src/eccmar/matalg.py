"""Foundational matrix utilities.

Kronecker/vec algebra, orthogonal complements, symmetric inverse square
roots, nearest-Kronecker factorization, and subspace distances. Everything
here is a pure function of its arguments.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotPositiveDefiniteError, RankDeficientError

# Singular values below RANK_RTOL * s_max count as zero.
RANK_RTOL = 1e-10


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with block (i, j) equal to a[i, j] * b."""
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization: returns a 1-d array of length m*n."""
    return np.asarray(x, dtype=float).reshape(-1, order="F")


def unvec(v: np.ndarray, m: int, n: int) -> np.ndarray:
    """Inverse of :func:`vec`; ``unvec(vec(x), m, n) == x`` exactly."""
    v = np.asarray(v, dtype=float).ravel()
    if v.size != m * n:
        raise DimensionError(f"cannot reshape length-{v.size} vector to {m}x{n}")
    return v.reshape(m, n, order="F")


def numerical_rank(a: np.ndarray) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def orth_complement(m: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(m).

    For a d x k full-column-rank input returns a d x (d-k) matrix N with
    N'm = 0 and N'N = I. For k = d the complement is the d x 0 matrix.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    d, k = m.shape
    if k == 0:
        return np.eye(d)
    u, s, _ = np.linalg.svd(m, full_matrices=True)
    if k > d or np.sum(s > RANK_RTOL * s[0]) < k:
        raise RankDeficientError(f"input of shape {d}x{k} is not full column rank")
    return u[:, k:]


def inv_sqrt_sym(s: np.ndarray) -> np.ndarray:
    """Symmetric inverse square root R of an SPD matrix, R s R = I.

    The input is symmetrized first, absorbing accumulation noise from
    pooled moment sums. Eigenvalues below 1e-12 * trace/dim signal a
    near-singular covariance.
    """
    s = np.atleast_2d(np.asarray(s, dtype=float))
    if s.shape[0] != s.shape[1]:
        raise DimensionError("expected a square matrix")
    s = 0.5 * (s + s.T)
    w, v = np.linalg.eigh(s)
    floor = 1e-12 * np.trace(s) / s.shape[0]
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"eigenvalue {w[0]:.3e} below floor {floor:.3e}"
        )
    return (v / np.sqrt(w)) @ v.T


def sqrt_sym(s: np.ndarray) -> np.ndarray:
    """Symmetric square root of an SPD matrix."""
    s = np.atleast_2d(np.asarray(s, dtype=float))
    s = 0.5 * (s + s.T)
    w, v = np.linalg.eigh(s)
    floor = 1e-12 * np.trace(s) / s.shape[0]
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"eigenvalue {w[0]:.3e} below floor {floor:.3e}"
        )
    return (v * np.sqrt(w)) @ v.T


def kron_rearrange(x: np.ndarray, m: int, n: int) -> np.ndarray:
    """Rearrangement mapping kron(a, b) (a: n x n, b: m x m) to an outer
    product vec(a) vec(b)'. Result is n^2 x m^2."""
    x = np.asarray(x, dtype=float)
    if x.shape != (m * n, m * n):
        raise DimensionError(f"expected {(m * n, m * n)}, got {x.shape}")
    # Block (i, j) of x (each m x m) corresponds to entry a[i, j]; row
    # (j * n + i) of the rearrangement is vec of that block.
    r = np.empty((n * n, m * m))
    for j in range(n):
        for i in range(n):
            block = x[i * m : (i + 1) * m, j * m : (j + 1) * m]
            r[j * n + i, :] = block.reshape(-1, order="F")
    return r


def nearest_kron(x: np.ndarray, m: int, n: int):
    """Frobenius-optimal rank-one Kronecker approximant of an mn x mn matrix.

    Returns ``(a, b, relative_residual)`` with a of shape n x n, b of shape
    m x m minimizing ||x - kron(a, b)||_F, found as the dominant singular
    pair of the Kronecker rearrangement of x.
    """
    x = np.asarray(x, dtype=float)
    r = kron_rearrange(x, m, n)
    u, s, vt = np.linalg.svd(r)
    a = (np.sqrt(s[0]) * u[:, 0]).reshape(n, n, order="F")
    b = (np.sqrt(s[0]) * vt[0, :]).reshape(m, m, order="F")
    norm_x = np.linalg.norm(x)
    if norm_x == 0.0:
        return a, b, 0.0
    resid = np.linalg.norm(x - np.kron(a, b)) / norm_x
    return a, b, float(resid)


def projector(basis: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of a full-column-rank basis."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    q, r = np.linalg.qr(basis)
    diag = np.abs(np.diag(r))
    if basis.shape[1] > 0 and (diag.min() <= RANK_RTOL * max(diag.max(), 1.0)):
        raise RankDeficientError("basis is numerically rank deficient")
    return q @ q.T


def subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Spectral-norm distance between the orthogonal projectors onto two spans."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"ambient dimensions differ: {a.shape[0]} vs {b.shape[0]}"
        )
    return float(np.linalg.norm(projector(a) - projector(b), ord=2))


def rank_factorize(x: np.ndarray, r: int | None = None):
    """Factor x = left @ right' with full-column-rank factors of rank r.

    When r is None the numerical rank is used. Returns ``(left, right, r)``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    u, s, vt = np.linalg.svd(x)
    if r is None:
        r = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > RANK_RTOL * s[0]))
    left = u[:, :r] * s[:r]
    right = vt[:r, :].T
    return left, right, r


def solve_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for symmetric positive definite a via Cholesky."""
    a = 0.5 * (a + a.T)
    try:
        c, low = scipy.linalg.cho_factor(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    return scipy.linalg.cho_solve((c, low), b)
