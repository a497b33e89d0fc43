"""Exact path samplers and Monte Carlo hedging backtests.

Random numbers come from counter-based Philox streams, one per fixed-size
chunk of paths, keyed by ``(seed, chunk index)``. A batch is therefore
bit-for-bit reproducible and independent of how chunks are scheduled.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .decompose import FSDecomposition, default_x_grid
from .errors import GridMismatch, UnsupportedModel
from .model import (NIG, CustomLevy, LevyModel, Model, OUWrapper, Poisson, TimeChangedBrownian,
                    VarianceGamma, WienerLevy)
from .operators import OperatorContext, build_table
from .payoff import ComplexMeasure
from .risk import variance_error

CHUNK = 8192
STRATEGIES = ("fs-pure", "vo-feedback")


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(chunk)])))


@dataclass(frozen=True, eq=False)
class PathBatch:
    """Increments of ``X`` on ``times``; ``X_0 = 0``."""

    times: np.ndarray
    increments: np.ndarray
    seed: int
    model_tag: str

    @property
    def n_paths(self) -> int:
        return self.increments.shape[0]

    @property
    def steps(self) -> int:
        return self.increments.shape[1]

    @property
    def paths(self) -> np.ndarray:
        out = np.zeros((self.n_paths, self.steps + 1))
        np.cumsum(self.increments, axis=1, out=out[:, 1:])
        return out

    @property
    def terminal(self) -> np.ndarray:
        return self.increments.sum(axis=1)

    def coarsen(self, factor: int = 2) -> "PathBatch":
        """Same paths observed on every ``factor``-th time."""
        if self.steps % factor:
            raise ValueError(f"{self.steps} steps are not divisible by {factor}")
        inc = self.increments.reshape(self.n_paths, self.steps // factor, factor).sum(axis=2)
        return PathBatch(self.times[::factor], inc, self.seed, self.model_tag)


def _time_grid(grid) -> np.ndarray:
    if isinstance(grid, tuple) and len(grid) == 2:
        T, n = grid
        return np.linspace(0.0, float(T), int(n) + 1)
    times = np.asarray(grid, float)
    if times.ndim != 1 or times.size < 2 or times[0] != 0 or np.any(np.diff(times) <= 0):
        raise ValueError("time grid must start at 0 and increase strictly")
    return times


def _levy_increments(model: LevyModel, dt: np.ndarray, n: int, rng) -> np.ndarray:
    """``n`` rows of independent increments over the step lengths ``dt``."""
    shape = (n, dt.size)
    if isinstance(model, Poisson):
        return rng.poisson(model.lam * dt, size=shape).astype(float)
    if isinstance(model, VarianceGamma):
        M, G = model.gamma_rates
        k = model.delta * dt
        return rng.gamma(k, 1 / M, size=shape) - rng.gamma(k, 1 / G, size=shape) + model.mu * dt
    if isinstance(model, NIG):
        mean = model.delta * dt / model.gamma0
        y = rng.wald(np.broadcast_to(mean, shape), np.broadcast_to((model.delta * dt) ** 2, shape))
        return model.mu * dt + model.beta * y + np.sqrt(y) * rng.standard_normal(shape)
    raise UnsupportedModel(f"no exact sampler for {type(model).__name__}")


def _chunk_increments(model: Model, times: np.ndarray, n: int, rng) -> np.ndarray:
    dt = np.diff(times)
    if isinstance(model, TimeChangedBrownian):
        dg = np.diff(model.gamma(times))
        dv = np.diff(model.time_change(times))
        return dg + np.sqrt(dv) * rng.standard_normal((n, dt.size))
    if isinstance(model, CustomLevy):
        raise UnsupportedModel("custom triplets have no exact sampler")
    if isinstance(model, LevyModel):
        return _levy_increments(model, dt, n, rng)
    if isinstance(model, WienerLevy):
        cuts = np.unique(np.concatenate([times, model.knots[(model.knots > 0) & (model.knots < times[-1])]]))
        step_of = np.searchsorted(times, cuts[:-1], side="right") - 1
        fine = _levy_increments(model.base, np.diff(cuts), n, rng)
        w = np.array([model.weight(t) for t in cuts[:-1]])
        out = np.zeros((n, dt.size))
        np.add.at(out.T, step_of, (fine * w).T)
        return out
    if isinstance(model, OUWrapper):
        y = np.zeros((n, times.size))
        np.cumsum(_chunk_increments(model.base, times, n, rng), axis=1, out=y[:, 1:])
        return np.diff(np.exp(-model.rate * times) * y, axis=1)
    raise UnsupportedModel(f"no exact sampler for {type(model).__name__}")


def simulate_paths(model: Model, grid, n_paths: int, seed: int, chunk: int = CHUNK) -> PathBatch:
    """Exact-in-law increments on ``grid`` (array of times or ``(T, steps)``)."""
    times = _time_grid(grid)
    if n_paths < 1:
        raise ValueError("need at least one path")
    parts = []
    for c, start in enumerate(range(0, n_paths, chunk)):
        n = min(chunk, n_paths - start)
        parts.append(_chunk_increments(model, times, n, chunk_rng(seed, c)))
    return PathBatch(times, np.vstack(parts), int(seed), getattr(model, "name", type(model).__name__))


# ---------------------------------------------------------------------------
# backtests

@dataclass
class BacktestReport:
    n_paths: int
    steps: int
    realized_mse: float
    se: float
    analytic_j0: float
    h0_used: float
    strategy: str
    seed: int
    floor: float | None = None
    floor_se: float | None = None
    coarse_mse: float | None = None
    extrapolated_mse: float | None = None
    extrapolated_se: float | None = None
    extrapolation: str | None = None
    backend: str = _kernels.BACKEND
    residuals: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("residuals")
        return d


def terminal_payoff(mu: ComplexMeasure, x: np.ndarray) -> np.ndarray:
    if mu.payoff is not None:
        return np.asarray(mu.payoff(x), float)
    return np.real(mu.transform(x, adaptive=False))


class _Strategy:
    """``H(t_k, x)`` and ``xi(t_k, x)`` on a fixed hedge grid."""

    def __init__(self, dec: FSDecomposition, times: np.ndarray, x_range: tuple[float, float]):
        self.dec = dec
        self.times = times
        ctx, mu = dec.ctx, dec.mu
        hedge_t = times[:-1]
        self.atoms = mu.density is None
        if self.atoms:
            self.u = np.ascontiguousarray(mu.atoms_u, float)
            self.hcoef = np.array([mu.atoms_w * ctx.multiplier("h", t)(self.u) for t in hedge_t])
            self.kcoef = np.array([mu.atoms_w * ctx.multiplier("k", t)(self.u) for t in hedge_t])
        else:
            lo, hi = x_range
            self.htab = build_table(ctx, mu, "h", hedge_t, lo, hi)
            self.ktab = build_table(ctx, mu, "k", hedge_t, lo, hi)

    def covers(self, X: np.ndarray) -> bool:
        if self.atoms:
            return True
        return bool(np.all(self.htab.covers(X[:, :-1])))

    def evaluate(self, k: int, x: np.ndarray):
        """Real ``(H, xi)`` at hedge time ``k``; exact kernels off the table range."""
        if self.atoms:
            ph = np.exp(1j * np.outer(x, self.u))
            return np.real(ph @ self.hcoef[k]), np.real(ph @ self.kcoef[k])
        t = self.times[k]
        h = np.real(self.htab.lookup(t, x))
        xi = np.real(self.ktab.lookup(t, x))
        out = ~self.htab.covers(x)
        if np.any(out):
            ctx, mu = self.dec.ctx, self.dec.mu
            h[out] = np.real(mu.transform(x[out], g=ctx.multiplier("h", t), adaptive=False))
            xi[out] = np.real(mu.transform(x[out], g=ctx.multiplier("k", t), adaptive=False))
        return h, xi


def _errors(strategy: _Strategy, X: np.ndarray, alpha: np.ndarray, H0: float, fT: np.ndarray,
            feedback: bool) -> np.ndarray:
    X = np.ascontiguousarray(X)
    if strategy.atoms:
        return _kernels.hedge_atoms(X, alpha, H0, fT, strategy.u, np.ascontiguousarray(strategy.hcoef),
                                    np.ascontiguousarray(strategy.kcoef), feedback)
    if strategy.covers(X):
        x = strategy.htab.x
        return _kernels.hedge_table(X, alpha, H0, fT, float(x[0]), float(x[1] - x[0]),
                                    np.ascontiguousarray(strategy.htab.values.real),
                                    np.ascontiguousarray(strategy.ktab.values.real), feedback)
    warnings.warn("paths leave the strategy table range; evaluating kernels directly there",
                  GridMismatch, stacklevel=3)
    gains = np.zeros(X.shape[0])
    for k in range(X.shape[1] - 1):
        h, xi = strategy.evaluate(k, X[:, k])
        v = xi + alpha[k] * (h - H0 - gains) if feedback else xi
        gains += v * (X[:, k + 1] - X[:, k])
    return fT - H0 - gains


def _table_range(ctx: OperatorContext, X: np.ndarray | None) -> tuple[float, float]:
    xs = default_x_grid(ctx, n=2)
    return float(xs[0]), float(xs[-1])


def hedging_errors(dec: FSDecomposition, batch: PathBatch, strategy_kind: str = "vo-feedback",
                   x_range: tuple[float, float] | None = None) -> np.ndarray:
    """Per-path ``f(X_T) - H_0 - sum_k v_k (X_{t_{k+1}} - X_{t_k})``."""
    if strategy_kind not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy_kind!r}")
    ctx = dec.ctx
    if abs(batch.times[-1] - ctx.T) > 1e-12 * ctx.T:
        raise ValueError(f"paths end at {batch.times[-1]}, decomposition at T = {ctx.T}")
    X = batch.paths
    rng = x_range or _table_range(ctx, X)
    strat = _Strategy(dec, batch.times, rng)
    alpha = np.ascontiguousarray(np.real(ctx.sc.alpha(batch.times[:-1])), float)
    fT = np.ascontiguousarray(terminal_payoff(dec.mu, X[:, -1]), float)
    H0 = float(np.real(dec.initial_complex))
    return _errors(strat, X, alpha, H0, fT, strategy_kind == "vo-feedback")


def _mean_se(v: np.ndarray) -> tuple[float, float]:
    n = v.size
    return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")


def _discretization(sq: np.ndarray, coarse: list[np.ndarray]) -> tuple[str, float, float]:
    """Estimate of ``mse(N) - mse(inf)`` from the same paths hedged on coarser grids.

    ``coarse`` holds squared errors at N/2 and, if available, N/4 steps. When
    both differences are resolved (the finer one above 10 standard errors and
    shrinking) Aitken's delta-squared rule ``d2^2 / (d1 - d2)`` is used, which
    does not assume a convergence order. Otherwise the first-order Richardson
    estimate ``d2`` is used. Standard errors come from per-path linearization.
    """
    d2 = coarse[0] - sq
    D2, se2 = _mean_se(d2)
    if len(coarse) > 1:
        d1 = coarse[1] - coarse[0]
        D1 = float(np.mean(d1))
        if D1 > D2 > 10 * se2:
            den = D1 - D2
            g1 = -D2 * D2 / den ** 2
            g2 = (2 * D2 * den + D2 * D2) / den ** 2
            _, se = _mean_se(g1 * d1 + g2 * d2)
            return "aitken", D2 * D2 / den, se
    return "richardson", D2, se2


def backtest(model: Model, payoff: ComplexMeasure, decomposition: FSDecomposition,
             strategy_kind: str, batch: PathBatch, refine: bool = True,
             analytic_j0: float | None = None, keep_residuals: bool = False) -> BacktestReport:
    """Realized squared hedging error on ``batch``.

    With ``refine`` the same paths are also hedged on every second (and every
    fourth) time. The implied discretization error of the N-step hedge is
    reported as ``floor`` and ``realized_mse - floor`` as the extrapolated
    continuous-time error, both with standard errors from per-path values.
    """
    if decomposition.mu is not payoff:
        raise ValueError("decomposition was built for a different payoff")
    if decomposition.ctx.model is not model:
        raise ValueError("decomposition was built for a different model")
    if analytic_j0 is None:
        analytic_j0 = variance_error(decomposition.ctx, payoff).j0
    err = hedging_errors(decomposition, batch, strategy_kind)
    sq = err * err
    mse, se = _mean_se(sq)
    rep = BacktestReport(batch.n_paths, batch.steps, mse, se, float(analytic_j0),
                         float(np.real(decomposition.initial_complex)), strategy_kind, batch.seed)
    if refine and batch.steps % 2 == 0 and batch.n_paths > 1:
        coarse = []
        for f in (2, 4):
            if batch.steps % f:
                break
            e = hedging_errors(decomposition, batch.coarsen(f), strategy_kind)
            coarse.append(e * e)
        rep.coarse_mse = float(np.mean(coarse[0]))
        rep.extrapolation, rep.floor, rep.floor_se = _discretization(sq, coarse)
        rep.extrapolated_mse = mse - rep.floor
        # realized and floor estimates share paths; combine per path
        if rep.extrapolation == "richardson":
            _, rep.extrapolated_se = _mean_se(2 * sq - coarse[0])
        else:
            rep.extrapolated_se = math.hypot(se, rep.floor_se)
    if keep_residuals:
        rep.residuals = err
    return rep


def orthogonality_check(model: Model, payoff: ComplexMeasure, decomposition: FSDecomposition,
                        batch: PathBatch, refine: bool = True) -> float:
    """t-statistic of ``E[L_T M_T]`` with ``L_T`` the fs-pure residual and ``M_T = X_T - E X_T``.

    The discrete-time residual carries an ``O(1/N)`` covariance with ``M_T``
    even when the continuous one vanishes, so with ``refine`` the per-path
    products at N and N/2 steps are combined as ``2 q_N - q_{N/2}``.
    """
    M = batch.terminal - model.mean(batch.times[-1])
    q = hedging_errors(decomposition, batch, "fs-pure") * M
    if refine and batch.steps % 2 == 0:
        q = 2 * q - hedging_errors(decomposition, batch.coarsen(2), "fs-pure") * M
    m, se = _mean_se(q)
    return m / se if se > 0 else 0.0


def martingale_means(ctx: OperatorContext, mu: ComplexMeasure, batch: PathBatch, kind: str = "e",
                     indices=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample mean and standard error of a kernel along the paths at selected times."""
    X = batch.paths
    idx = np.arange(batch.steps + 1) if indices is None else np.asarray(indices)
    means, ses = [], []
    for k in idx:
        t = float(batch.times[k])
        vals = np.real(mu.transform(X[:, k], g=ctx.multiplier(kind, t), adaptive=False))
        m, s = _mean_se(vals)
        means.append(m)
        ses.append(s)
    return batch.times[idx], np.array(means), np.array(ses)
