"""Data-generating process for cointegrated matrix autoregressions.

Parameter construction and validation, matrix-normal noise, simulation of
the error-correction recursion, and reduction of proportional order-p
systems to error-correction form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matalg
from ._kernels import simulate_recursion
from .errors import DesignSearchError, DimensionError, ProportionalityError

MAX_REDRAWS = 10_000


@dataclass
class MatrixSeries:
    """An ordered sequence of T real m x n observation matrices."""

    data: np.ndarray  # (T, m, n)
    row_labels: list[str] | None = None
    col_labels: list[str] | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 3:
            raise DimensionError("series data must have shape (T, m, n)")
        if not np.all(np.isfinite(self.data)):
            raise DimensionError("series contains non-finite entries")
        if self.row_labels is None:
            self.row_labels = [f"r{i + 1}" for i in range(self.m)]
        if self.col_labels is None:
            self.col_labels = [f"c{j + 1}" for j in range(self.n)]
        if len(self.row_labels) != self.m or len(self.col_labels) != self.n:
            raise DimensionError("label lengths do not match dimensions")

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    @property
    def n(self) -> int:
        return self.data.shape[2]

    def vectorized(self) -> np.ndarray:
        """Column-stacked observations, shape (T, m*n)."""
        return self.data.transpose(0, 2, 1).reshape(self.T, self.m * self.n)

    def transposed(self) -> "MatrixSeries":
        return MatrixSeries(
            np.transpose(self.data, (0, 2, 1)),
            row_labels=list(self.col_labels),
            col_labels=list(self.row_labels),
        )


@dataclass
class EccMarParams:
    """Full parameter set of the error-correction matrix model.

    The level-form coefficient factors are exposed as ``lam`` (I + tau gamma')
    and ``psi`` (I + theta phi').
    """

    tau: np.ndarray  # m x r1
    gamma: np.ndarray  # m x r1
    phi: np.ndarray  # n x r2
    theta: np.ndarray  # n x r2
    sigma_r: np.ndarray  # m x m SPD
    sigma_c: np.ndarray  # n x n SPD
    gamma1: list = field(default_factory=list)  # p-1 blocks, m x m
    gamma2: list = field(default_factory=list)  # p-1 blocks, n x n

    def __post_init__(self):
        for name in ("tau", "gamma", "phi", "theta", "sigma_r", "sigma_c"):
            setattr(self, name, np.atleast_2d(np.asarray(getattr(self, name), float)))
        self.gamma1 = [np.asarray(g, float) for g in self.gamma1]
        self.gamma2 = [np.asarray(g, float) for g in self.gamma2]
        m, r1 = self.tau.shape
        n, r2 = self.phi.shape
        if self.gamma.shape != (m, r1) or self.theta.shape != (n, r2):
            raise DimensionError("factor shapes are inconsistent")
        if not (0 < r1 < m and 0 < r2 < n):
            raise DimensionError(f"ranks must satisfy 0 < r1 < m, 0 < r2 < n; got {(r1, r2, m, n)}")
        if self.sigma_r.shape != (m, m) or self.sigma_c.shape != (n, n):
            raise DimensionError("covariance shapes are inconsistent")
        if len(self.gamma1) != len(self.gamma2):
            raise DimensionError("short-run block lists must have equal length")
        for g in self.gamma1:
            if g.shape != (m, m):
                raise DimensionError("short-run row blocks must be m x m")
        for g in self.gamma2:
            if g.shape != (n, n):
                raise DimensionError("short-run column blocks must be n x n")

    @property
    def m(self) -> int:
        return self.tau.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    @property
    def r1(self) -> int:
        return self.tau.shape[1]

    @property
    def r2(self) -> int:
        return self.phi.shape[1]

    @property
    def p(self) -> int:
        return len(self.gamma1) + 1

    @property
    def lam(self) -> np.ndarray:
        return np.eye(self.m) + self.tau @ self.gamma.T

    @property
    def psi(self) -> np.ndarray:
        return np.eye(self.n) + self.phi @ self.theta.T


def check_I1(params: EccMarParams) -> dict:
    """Validate the I(1) conditions on the level-form factors (order 1 only).

    Requires exactly m - r1 (resp. n - r2) unit eigenvalues, all others
    strictly inside the unit disk, and semisimplicity of the unit eigenvalue
    checked through the rank of lam - I (resp. psi - I).
    """
    if params.p != 1:
        raise DimensionError("I(1) check is defined for order-1 parameters")
    eigs_lambda = np.linalg.eigvals(params.lam)
    eigs_psi = np.linalg.eigvals(params.psi)

    def _ok(eigs, dim, rank_target, residual):
        unit = np.abs(eigs - 1.0) < 1e-8
        if unit.sum() != dim - rank_target:
            return False
        if np.any(np.abs(eigs[~unit]) >= 1.0 - 1e-8):
            return False
        return matalg.numerical_rank(residual) == rank_target

    is_i1 = _ok(
        eigs_lambda, params.m, params.r1, params.lam - np.eye(params.m)
    ) and _ok(eigs_psi, params.n, params.r2, params.psi - np.eye(params.n))
    return {"is_I1": bool(is_i1), "eigs_lambda": eigs_lambda, "eigs_psi": eigs_psi}


def draw_design(m: int, n: int, r1: int, r2: int, seed) -> EccMarParams:
    """Draw a random valid order-1 design.

    tau has its first m - r1 rows zero and phi its first n - r2 rows zero;
    remaining entries and all of gamma, theta are standard normal. Draws are
    rejected until the I(1) conditions hold; both covariance factors start
    at the identity (trace(sigma_r) = m by construction).
    """
    if not (0 < r1 < m and 0 < r2 < n):
        raise DimensionError(f"invalid rank pair {(r1, r2)} for dims {(m, n)}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_REDRAWS):
        tau = np.zeros((m, r1))
        tau[m - r1 :, :] = rng.standard_normal((r1, r1))
        gamma = rng.standard_normal((m, r1))
        phi = np.zeros((n, r2))
        phi[n - r2 :, :] = rng.standard_normal((r2, r2))
        theta = rng.standard_normal((n, r2))
        params = EccMarParams(
            tau=tau, gamma=gamma, phi=phi, theta=theta,
            sigma_r=np.eye(m), sigma_c=np.eye(n),
        )
        if check_I1(params)["is_I1"]:
            return params
    raise DesignSearchError(
        f"no valid draw for (m, n, r1, r2) = {(m, n, r1, r2)} in {MAX_REDRAWS} tries"
    )


def sample_matrix_normal(sigma_r, sigma_c, rng, size: int = 1) -> np.ndarray:
    """Draw matrix-normal noise with separable covariance.

    Returns an array of shape (size, m, n); each draw E satisfies
    Var(vec(E)) = sigma_c (x) sigma_r.
    """
    sigma_r = np.atleast_2d(np.asarray(sigma_r, float))
    sigma_c = np.atleast_2d(np.asarray(sigma_c, float))
    a = matalg.sqrt_sym(sigma_r)
    b = matalg.sqrt_sym(sigma_c)
    z = rng.standard_normal((size, sigma_r.shape[0], sigma_c.shape[0]))
    return a @ z @ b.T


def simulate(
    params: EccMarParams,
    T: int,
    seed,
    burnin: int = 100,
    noiseless: bool = False,
) -> MatrixSeries:
    """Simulate T observations of the error-correction recursion.

    Starts from X_0 = 0 with zero pre-sample differences, iterates for
    burnin + T steps, and returns the last T observations. ``noiseless``
    zeroes the innovations (the covariance factors stay SPD).
    """
    if T < params.p + 2:
        raise DimensionError(f"T = {T} too short for order p = {params.p}")
    steps = burnin + T
    if noiseless:
        noise = np.zeros((steps, params.m, params.n))
    else:
        rng = np.random.default_rng(seed)
        noise = sample_matrix_normal(params.sigma_r, params.sigma_c, rng, size=steps)
    g1 = np.asarray(params.gamma1, float).reshape(params.p - 1, params.m, params.m)
    g2 = np.asarray(params.gamma2, float).reshape(params.p - 1, params.n, params.n)
    levels = simulate_recursion(
        np.ascontiguousarray(params.lam),
        np.ascontiguousarray(params.psi),
        np.ascontiguousarray(g1),
        np.ascontiguousarray(g2),
        np.ascontiguousarray(noise),
    )
    return MatrixSeries(levels[burnin:])


def _proportionality_scalar(x: np.ndarray, base: np.ndarray, rtol: float = 1e-8):
    """Least-squares scalar c with x ~= c * base; None if not proportional."""
    denom = float(np.sum(base * base))
    c = float(np.sum(x * base)) / denom
    if np.linalg.norm(x - c * base) > rtol * max(np.linalg.norm(base), 1.0):
        return None
    return c


def marp_reduce(lambdas: list, psis: list) -> EccMarParams:
    """Reduce a proportional order-p level system to error-correction form.

    Requires every lag coefficient pair to be proportional to the first
    (Lambda_i = l_i Lambda_1, Psi_i = d_i Psi_1) with s = sum l_i d_i != 0,
    and the eigenvalue bounds |eig(Lambda_1)| <= 1 (after rescaling to put
    the unit eigenvalue on Lambda) and |eig(Psi_1)| <= |s|^{-1}. The level
    factors minus identity must be rank deficient (cointegration present on
    both sides).
    """
    lambdas = [np.atleast_2d(np.asarray(x, float)) for x in lambdas]
    psis = [np.atleast_2d(np.asarray(x, float)) for x in psis]
    if len(lambdas) != len(psis) or not lambdas:
        raise DimensionError("need equal, nonzero numbers of lag coefficients")
    p = len(lambdas)
    m = lambdas[0].shape[0]
    n = psis[0].shape[0]

    ls, ds = [1.0], [1.0]
    for i in range(1, p):
        c = _proportionality_scalar(lambdas[i], lambdas[0])
        if c is None:
            raise ProportionalityError(
                f"row coefficient at lag {i + 1} is not proportional to lag 1",
                condition="proportionality",
            )
        ls.append(c)
        d = _proportionality_scalar(psis[i], psis[0])
        if d is None:
            raise ProportionalityError(
                f"column coefficient at lag {i + 1} is not proportional to lag 1",
                condition="proportionality",
            )
        ds.append(d)

    s = float(np.sum(np.array(ls) * np.array(ds)))
    if abs(s) < 1e-12:
        raise ProportionalityError("scalar weight sum s is zero", condition="s_zero")

    # Rescale so the level row factor carries the unit eigenvalue: the level
    # term is s * Psi_1 (x) Lambda_1 = psi_lvl (x) lam_lvl with the free
    # scale fixed by spectral radius 1 on the row side.
    rho = float(np.max(np.abs(np.linalg.eigvals(lambdas[0]))))
    if rho == 0.0:
        raise ProportionalityError("row lag-1 coefficient is zero", condition="rank")
    c_scale = 1.0 / rho
    lam_lvl = c_scale * lambdas[0]
    psi_lvl = (s / c_scale) * psis[0]

    if np.max(np.abs(np.linalg.eigvals(lam_lvl))) > 1.0 + 1e-8:
        raise ProportionalityError(
            "row eigenvalue bound violated", condition="eigenvalue_bound"
        )
    if np.max(np.abs(np.linalg.eigvals(psi_lvl))) > 1.0 + 1e-8:
        raise ProportionalityError(
            "column eigenvalue bound violated", condition="eigenvalue_bound"
        )

    pi1 = lam_lvl - np.eye(m)
    pi2 = psi_lvl - np.eye(n)
    r1 = matalg.numerical_rank(pi1)
    r2 = matalg.numerical_rank(pi2)
    if r1 >= m or r2 >= n:
        raise ProportionalityError(
            "level factor minus identity has full rank (no cointegration)",
            condition="full_rank",
        )
    if r1 == 0 or r2 == 0:
        raise ProportionalityError(
            "level factor equals identity (no error-correction term)",
            condition="rank",
        )
    tau, gamma, _ = matalg.rank_factorize(pi1, r1)
    phi, theta_t, _ = matalg.rank_factorize(pi2, r2)

    # Tail sums s_j = sum_{i >= j} l_i d_i give the short-run blocks:
    # gamma2_j (x) gamma1_j = -s_{j+1} Psi_1 (x) Lambda_1.
    gamma1_blocks, gamma2_blocks = [], []
    for j in range(1, p):
        s_tail = float(np.sum([ls[i] * ds[i] for i in range(j, p)]))
        gamma1_blocks.append(lam_lvl.copy())
        gamma2_blocks.append(-(s_tail / s) * psi_lvl)

    return EccMarParams(
        tau=tau, gamma=gamma, phi=phi, theta=theta_t,
        sigma_r=np.eye(m), sigma_c=np.eye(n),
        gamma1=gamma1_blocks, gamma2=gamma2_blocks,
    )


def marp_expand(params: EccMarParams):
    """Vectorized lag coefficients of the order-p level form of ``params``.

    Returns the list of mn x mn matrices [A_1, ..., A_p] with
    vec(X_t) = sum_j A_j vec(X_{t-j}) + noise. For parameters produced by
    :func:`marp_reduce` these reproduce the Kronecker products of the
    original lag coefficients; used as the roundtrip oracle.
    """
    # Level-form coefficients of the companion expansion: the vectorized
    # system is vec(X_t) = sum_j A_j vec(X_{t-j}) + noise with
    # A_1 = level + tail_1, A_j = tail_j - tail_{j-1} style telescoping; we
    # return the vectorized lag polynomials directly.
    m, n, p = params.m, params.n, params.p
    lvl = matalg.kron(params.psi, params.lam)
    tails = [matalg.kron(g2, g1) for g1, g2 in zip(params.gamma1, params.gamma2)]
    # vec(X_t) = [lvl] vec(X_{t-1}) + sum_j tails_j [vec(dX_{t-j})]
    # = (lvl + tails_1) vec(X_{t-1}) + sum_{j=2..p-1} (tails_j - tails_{j-1}) vec(X_{t-j})
    #   - tails_{p-1} vec(X_{t-p})
    coefs = []
    if p == 1:
        coefs.append(lvl)
    else:
        coefs.append(lvl + tails[0])
        for j in range(1, p - 1):
            coefs.append(tails[j] - tails[j - 1])
        coefs.append(-tails[p - 2])
    return coefs
