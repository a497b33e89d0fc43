"""Finite complex measures and Fourier-represented payoffs ``f(x) = ∫ e^{iux} mu(du)``."""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, QuadratureFailure, TruncationTooTight

HERMITIAN_TOL = 1e-12
DEFAULT_QUAD_TOL = 1e-8
# density nodes whose weighted integrand falls below this are dropped at the tails
TRUNCATION_FLOOR = 1e-12
MAX_REFINEMENTS = 4


@dataclass(frozen=True, eq=False)
class ComplexMeasure:
    """Atoms ``sum_j w_j delta_{u_j}`` plus an optional density on ``[lower, upper]``.

    The density part is integrated with the trapezoid rule on a uniform grid of
    spacing ``step``; the grid is refined adaptively when point evaluations ask
    for a tolerance. ``payoff`` optionally carries the closed-form ``f`` the
    measure represents, used by simulations to evaluate the realized claim.
    """

    atoms_u: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atoms_w: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    density: Callable[[np.ndarray], np.ndarray] | None = None
    lower: float = 0.0
    upper: float = 0.0
    step: float = 0.05
    payoff: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "atoms"

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.atoms_u, float))
        w = np.atleast_1d(np.asarray(self.atoms_w, complex))
        if u.shape != w.shape:
            raise ValueError("atom locations and weights must have equal length")
        if not np.all(np.isfinite(u)) or not np.all(np.isfinite(w)):
            raise ValueError("atoms must be finite")
        object.__setattr__(self, "atoms_u", u)
        object.__setattr__(self, "atoms_w", w)
        if self.density is not None:
            if not (self.upper > self.lower and self.step > 0):
                raise ValueError("density needs lower < upper and step > 0")

    @classmethod
    def from_atoms(cls, pairs) -> "ComplexMeasure":
        pairs = list(pairs)
        return cls(np.array([p[0] for p in pairs], float), np.array([p[1] for p in pairs], complex))

    @classmethod
    def point_mass(cls, u: float, w: complex = 1.0) -> "ComplexMeasure":
        return cls(np.array([u]), np.array([w], complex))

    def density_nodes(self, step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Density grid and trapezoid weights (density value times quadrature weight)."""
        if self.density is None:
            return np.zeros(0), np.zeros(0, complex)
        h = self.step if step is None else step
        n = int(round((self.upper - self.lower) / h))
        u = self.lower + h * np.arange(n + 1)
        q = np.full(n + 1, h)
        q[0] = q[-1] = h / 2
        return u, q * np.asarray(self.density(u), complex)

    def nodes(self, step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """All quadrature nodes: atoms followed by weighted density nodes."""
        du, dw = self.density_nodes(step)
        return np.concatenate([self.atoms_u, du]), np.concatenate([self.atoms_w, dw])

    @property
    def total_variation(self) -> float:
        _, dw = self.density_nodes()
        return float(np.sum(np.abs(self.atoms_w)) + np.sum(np.abs(dw)))

    @property
    def is_hermitian(self) -> bool:
        u, w = self.atoms_u, self.atoms_w
        for uj, wj in zip(u, w):
            match = np.abs(u + uj) <= HERMITIAN_TOL * (1 + abs(uj))
            if abs(np.sum(w[match]) - np.conj(np.sum(w[np.abs(u - uj) <= HERMITIAN_TOL * (1 + abs(uj))]))) \
                    > HERMITIAN_TOL * (1 + abs(wj)):
                return False
        if self.density is not None:
            if abs(self.lower + self.upper) > HERMITIAN_TOL * (1 + abs(self.upper)):
                return False
            du, _ = self.density_nodes()
            d = np.asarray(self.density(du), complex)
            dm = np.asarray(self.density(-du), complex)
            if np.max(np.abs(dm - np.conj(d))) > HERMITIAN_TOL * (1 + np.max(np.abs(d))):
                return False
        return True

    def scaled_frequencies(self, factor: float) -> "ComplexMeasure":
        """Measure representing ``x -> f(factor * x)``."""
        dens = None
        lo, hi, step = self.lower, self.upper, self.step
        if self.density is not None:
            base = self.density
            a = abs(factor)

            def dens(u):
                return base(np.asarray(u) / factor) / a
            lo, hi = sorted((self.lower * factor, self.upper * factor))
            step = self.step * abs(factor)
        pay = None
        if self.payoff is not None:
            f0 = self.payoff

            def pay(x):
                return f0(factor * np.asarray(x))
        return ComplexMeasure(self.atoms_u * factor, self.atoms_w, dens, lo, hi, step, pay, self.label)

    # -- integration -----------------------------------------------------

    def _sum(self, u, w, g, x):
        coef = w if g is None else w * g(u)
        if coef.size == 0:
            return np.zeros(np.shape(x), complex)
        x = np.asarray(x, float)
        flat = x.ravel()
        out = np.empty(flat.shape, complex)
        chunk = max(1, 2_000_000 // max(1, coef.size))
        for s in range(0, flat.size, chunk):
            out[s:s + chunk] = np.exp(1j * np.outer(flat[s:s + chunk], u)) @ coef
        return out.reshape(x.shape)

    def _truncate(self, u, w, g):
        """Drop tail density nodes where |g * density| is negligible."""
        if u.size == 0:
            return u, w
        mag = np.abs(w) / max(self.step, 1e-300)
        if g is not None:
            mag = mag * np.abs(g(u))
        big = np.nonzero(mag >= TRUNCATION_FLOOR)[0]
        if big.size == 0:
            return u[:0], w[:0]
        return u[big[0]:big[-1] + 1], w[big[0]:big[-1] + 1]

    def transform(self, x, g: Callable | None = None, tol: float = DEFAULT_QUAD_TOL,
                  adaptive: bool = True):
        """``∫ g(u) e^{iux} mu(du)`` for scalar or array ``x``."""
        scalar = np.ndim(x) == 0
        out = self._sum(self.atoms_u, self.atoms_w, g, x)
        if self.density is not None:
            step = self.step
            du, dw = self._truncate(*self.density_nodes(step), g)
            prev = self._sum(du, dw, g, x)
            if adaptive:
                for _ in range(MAX_REFINEMENTS):
                    step /= 2
                    du, dw = self._truncate(*self.density_nodes(step), g)
                    cur = self._sum(du, dw, g, x)
                    err = float(np.max(np.abs(cur - prev))) if np.size(cur) else 0.0
                    prev = cur
                    if err <= tol:
                        break
                else:
                    raise QuadratureFailure(
                        f"density quadrature did not reach {tol:g} (last change {err:.3g})")
            out = out + prev
        return complex(out) if scalar else out


def fourier_eval(mu: ComplexMeasure, x, tol: float = DEFAULT_QUAD_TOL):
    """``f(x) = ∫ e^{iux} mu(du)``; real-valued when ``mu`` is Hermitian."""
    val = mu.transform(x, tol=tol)
    if mu.is_hermitian:
        return float(np.real(val)) if np.ndim(val) == 0 else np.real(val)
    return val


def self_quanto_put_payoff(K: float):
    def f(x):
        ex = np.exp(np.asarray(x, float))
        return ex * np.maximum(K - ex, 0.0)
    return f


def self_quanto_put(K: float, truncation: float = 1000.0, grid_step: float = 0.05,
                    check: bool = True) -> ComplexMeasure:
    """Density measure for ``f(x) = e^x (K - e^x)_+``.

    With ``F(u) = ∫ e^{iux} f(x) dx = K^{2+iu} / ((1+iu)(2+iu))`` the inversion
    ``f(x) = (1/2π) ∫ e^{-iux} F(u) du`` gives ``mu(du) = F(-u) du / (2π)``.
    The density decays like ``u^-2``, so the truncation error is largest at the
    kink ``x = ln K`` where it is about ``K^2 / (π * truncation)``.
    """
    if not K > 0:
        raise ValueError(f"strike must be positive, got {K}")
    lk = math.log(K)

    def density(u):
        u = np.asarray(u, float)
        return K * K * np.exp(-1j * u * lk) / ((1 - 1j * u) * (2 - 1j * u)) / (2 * np.pi)

    mu = ComplexMeasure(density=density, lower=-truncation, upper=truncation, step=grid_step,
                        payoff=self_quanto_put_payoff(K), label="self_quanto_put")
    if check:
        x = lk + np.linspace(-6.0, 1.0, 141)
        err = np.max(np.abs(mu.transform(x, adaptive=False) - mu.payoff(x)))
        if err > 1e-3:
            raise TruncationTooTight(
                f"reconstruction error {err:.3g} exceeds 1e-3; raise truncation or lower the step")
    return mu


# ---------------------------------------------------------------------------
# key-value configuration

PAYOFF_KEYS = {"payoff"}


def payoff_from_config(cfg: Mapping[str, str]) -> ComplexMeasure:
    """Parse ``payoff = atoms [(u, w), ...]`` or ``payoff = self_quanto_put K=1 ...``."""
    text = cfg.get("payoff", "").strip()
    kind, _, rest = text.partition(" ")
    kind = kind.lower()
    if kind == "atoms":
        try:
            pairs = ast.literal_eval(rest.strip())
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"cannot parse atom list {rest!r}", key="payoff") from exc
        if isinstance(pairs, tuple) and len(pairs) == 2 and not isinstance(pairs[0], (tuple, list)):
            pairs = [pairs]
        try:
            return ComplexMeasure.from_atoms([(float(u), complex(w)) for u, w in pairs])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"atoms must be (u, w) pairs: {exc}", key="payoff") from exc
    if kind == "self_quanto_put":
        opts = {}
        for tok in rest.split():
            k, eq, v = tok.partition("=")
            if not eq:
                raise ConfigError(f"expected key=value, got {tok!r}", key="payoff")
            opts[k.strip().lower()] = float(v)
        unknown = set(opts) - {"k", "truncation", "step"}
        if unknown:
            raise ConfigError(f"unknown self_quanto_put options {sorted(unknown)}", key="payoff")
        if "k" not in opts:
            raise ConfigError("self_quanto_put needs K=<strike>", key="payoff")
        return self_quanto_put(opts["k"], opts.get("truncation", 1000.0), opts.get("step", 0.05))
    raise ConfigError(f"unknown payoff kind {kind!r}; use 'atoms' or 'self_quanto_put'", key="payoff")
