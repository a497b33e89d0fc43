"""Processes with independent increments and their log-characteristic functions.

Every model exposes ``psi(t, u)`` with ``E[exp(iu X_t)] = exp(psi(t, u))`` and
the first two ``u``-derivatives. All families are built so that, between two
consecutive :meth:`Model.breakpoints`, ``t -> psi(t, u)`` is affine. The
operator layer relies on that to integrate in time exactly.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import integrate, special

from .errors import ModelError

# step for the 4th-order central differences used when a family has no
# closed-form derivative; balances truncation O(h^4) against rounding O(eps/h^2)
FD_STEP = 1e-3


@dataclass(frozen=True)
class Horizon:
    T: float

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ModelError(f"terminal time must be positive, got {self.T}")


@dataclass(frozen=True)
class LevyTriplet:
    """Characteristics ``(b, c, F)`` with truncation function ``1_{|x|<=1}``.

    ``F`` is a finite list of atoms ``(jumps[j], weights[j])`` plus an optional
    Lebesgue density restricted to ``support``.
    """

    b: float = 0.0
    c: float = 0.0
    jumps: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: Callable[[np.ndarray], np.ndarray] | None = None
    support: tuple[float, float] = (-np.inf, np.inf)

    def __post_init__(self):
        jumps = np.atleast_1d(np.asarray(self.jumps, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "weights", weights)
        if jumps.shape != weights.shape:
            raise ModelError("jump sizes and weights must have equal length")
        if not self.c >= 0:
            raise ModelError(f"gaussian coefficient must be >= 0, got {self.c}")
        if np.any(weights <= 0):
            raise ModelError("all jump weights must be > 0")
        if np.any(jumps == 0):
            raise ModelError("jump atoms at 0 carry no mass in a Levy measure")
        if not math.isfinite(self.second_moment()):
            raise ModelError("jump measure must have a finite second moment")

    @classmethod
    def from_density_grid(cls, b: float, c: float, x: np.ndarray, values: np.ndarray,
                          jumps=(), weights=()) -> "LevyTriplet":
        """Jump density sampled on a grid, stored as trapezoid-weighted atoms."""
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != values.shape or x.size < 2:
            raise ModelError("density grid needs matching 1-d x and value arrays")
        if np.any(np.diff(x) <= 0):
            raise ModelError("density grid must be strictly increasing")
        if np.any(values < 0):
            raise ModelError("jump density must be nonnegative")
        w = np.zeros_like(x)
        dx = np.diff(x)
        w[:-1] += dx / 2
        w[1:] += dx / 2
        w = w * values
        keep = (w > 0) & (x != 0)
        return cls(b=b, c=c,
                   jumps=np.concatenate([np.asarray(jumps, float), x[keep]]),
                   weights=np.concatenate([np.asarray(weights, float), w[keep]]))

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray]) -> complex:
        """``∫ fn(x) F(dx)`` for a (possibly complex) integrand."""
        total = complex(np.sum(self.weights * fn(self.jumps))) if self.jumps.size else 0j
        if self.density is not None:
            lo, hi = self.support
            cuts = [lo] + [p for p in (-1.0, 0.0, 1.0) if lo < p < hi] + [hi]
            for a, b in zip(cuts[:-1], cuts[1:]):
                def re(x):
                    return float(np.real(fn(np.array([x]))[0]) * self.density(np.array([x]))[0])

                def im(x):
                    return float(np.imag(fn(np.array([x]))[0]) * self.density(np.array([x]))[0])
                r, _ = integrate.quad(re, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)
                i, _ = integrate.quad(im, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)
                total += complex(r, i)
        return total

    def second_moment(self) -> float:
        return float(np.real(self.integrate(lambda x: x * x)))

    def scaled(self, g: float) -> "LevyTriplet":
        """Characteristics of ``g * L`` (drift term left unscaled-exact only for atoms)."""
        if g == 0:
            return LevyTriplet()
        dens = None
        if self.density is not None:
            base = self.density

            def dens(x):
                return base(np.asarray(x) / g) / abs(g)
        lo, hi = sorted((self.support[0] * g, self.support[1] * g))
        return LevyTriplet(b=self.b * g, c=self.c * g * g, jumps=self.jumps * g,
                           weights=self.weights, density=dens, support=(lo, hi))

    def normalized(self, scale: float) -> "LevyTriplet":
        """Divide every characteristic by ``scale`` (used to get c + ∫x²F = 1)."""
        dens = None
        if self.density is not None:
            base = self.density

            def dens(x):
                return base(x) / scale
        return LevyTriplet(b=self.b / scale, c=self.c / scale, jumps=self.jumps,
                           weights=self.weights / scale, density=dens, support=self.support)


class Model:
    """A square-integrable process with independent increments."""

    is_levy = False
    name = "model"

    def psi(self, t: float, u):
        raise NotImplementedError

    def psi_d1(self, t: float, u):
        u = np.asarray(u, dtype=float)
        h = FD_STEP
        return (-self.psi(t, u + 2 * h) + 8 * self.psi(t, u + h)
                - 8 * self.psi(t, u - h) + self.psi(t, u - 2 * h)) / (12 * h)

    def psi_d2(self, t: float, u):
        u = np.asarray(u, dtype=float)
        h = FD_STEP
        return (-self.psi(t, u + 2 * h) + 16 * self.psi(t, u + h) - 30 * self.psi(t, u)
                + 16 * self.psi(t, u - h) - self.psi(t, u - 2 * h)) / (12 * h * h)

    def breakpoints(self, T: float) -> np.ndarray:
        """Times in [0, T] between which ``psi(., u)`` is affine."""
        return np.array([0.0, T])

    def normalized_triplet(self, t: float) -> LevyTriplet:
        """Characteristics at time ``t`` as densities w.r.t. ``d(-psi''_t(0))``."""
        raise NotImplementedError

    def mean(self, t: float) -> float:
        return float(np.real(-1j * self.psi_d1(t, 0.0)))

    def variance(self, t: float) -> float:
        return float(np.real(-self.psi_d2(t, 0.0)))


class LevyModel(Model):
    """Levy process: ``psi(t, u) = t * exponent(u)``."""

    is_levy = True

    def exponent(self, u):
        raise NotImplementedError

    def exponent_d1(self, u):
        return Model.psi_d1(self, 1.0, u)

    def exponent_d2(self, u):
        return Model.psi_d2(self, 1.0, u)

    def triplet(self) -> LevyTriplet:
        raise NotImplementedError

    def psi(self, t, u):
        return t * self.exponent(np.asarray(u, dtype=float))

    def psi_d1(self, t, u):
        return t * self.exponent_d1(np.asarray(u, dtype=float))

    def psi_d2(self, t, u):
        return t * self.exponent_d2(np.asarray(u, dtype=float))

    def normalized_triplet(self, t: float = 0.0) -> LevyTriplet:
        var = float(np.real(-self.exponent_d2(0.0)))
        if var <= 0:
            return LevyTriplet()
        return self.triplet().normalized(var)


@dataclass(frozen=True, eq=False)
class Poisson(LevyModel):
    lam: float
    name = "poisson"

    def __post_init__(self):
        if not self.lam > 0:
            raise ModelError(f"Poisson intensity must be > 0, got {self.lam}")

    def exponent(self, u):
        return self.lam * (np.exp(1j * np.asarray(u, float)) - 1)

    def exponent_d1(self, u):
        return 1j * self.lam * np.exp(1j * np.asarray(u, float))

    def exponent_d2(self, u):
        return -self.lam * np.exp(1j * np.asarray(u, float)) + 0j

    def triplet(self) -> LevyTriplet:
        return LevyTriplet(b=self.lam, c=0.0, jumps=[1.0], weights=[self.lam])


@dataclass(frozen=True, eq=False)
class NIG(LevyModel):
    """Normal inverse Gaussian, ``psi(u) = i mu u + delta (g(0) - g(iu))``,
    ``g(iu) = sqrt(theta^2 - (beta + iu)^2)``."""

    theta: float
    beta: float
    delta: float
    mu: float = 0.0
    name = "nig"

    def __post_init__(self):
        if not (self.theta > abs(self.beta) > 0):
            raise ModelError("NIG requires theta > |beta| > 0")
        if not self.delta > 0:
            raise ModelError("NIG requires delta > 0")

    @property
    def gamma0(self) -> float:
        return math.sqrt(self.theta ** 2 - self.beta ** 2)

    def _root(self, u):
        return np.sqrt(self.theta ** 2 - (self.beta + 1j * np.asarray(u, float)) ** 2)

    def exponent(self, u):
        u = np.asarray(u, float)
        return 1j * self.mu * u + self.delta * (self.gamma0 - self._root(u))

    def exponent_d1(self, u):
        u = np.asarray(u, float)
        return 1j * self.mu + 1j * self.delta * (self.beta + 1j * u) / self._root(u)

    def exponent_d2(self, u):
        u = np.asarray(u, float)
        g = self._root(u)
        z = self.beta + 1j * u
        return -self.delta * (1 / g + z * z / g ** 3)

    def levy_density(self, x):
        x = np.asarray(x, float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.delta * self.theta / np.pi) * np.exp(self.beta * x - self.theta * ax) \
                * special.k1e(self.theta * ax) / ax
        return np.where(ax > 0, out, 0.0)

    def triplet(self) -> LevyTriplet:
        t = LevyTriplet(density=self.levy_density)
        big = np.real(t.integrate(lambda x: np.where(np.abs(x) > 1, x, 0.0)))
        mean = np.real(-1j * self.exponent_d1(0.0))
        return LevyTriplet(b=float(mean - big), density=self.levy_density)


@dataclass(frozen=True, eq=False)
class VarianceGamma(LevyModel):
    """``psi(u) = i mu u + delta Log(theta / (theta - i beta u + u^2/2))``,
    principal branch of the logarithm."""

    theta: float
    beta: float
    delta: float
    mu: float = 0.0
    name = "vg"

    def __post_init__(self):
        if not (self.theta > 0 and self.beta > 0):
            raise ModelError("VG requires theta > 0 and beta > 0")
        if not self.delta > 0:
            # delta < 0 makes psi''(0) > 0, i.e. a negative variance
            raise ModelError("VG requires delta > 0")

    def _den(self, u):
        u = np.asarray(u, float)
        return self.theta - 1j * self.beta * u + u * u / 2

    def exponent(self, u):
        u = np.asarray(u, float)
        return 1j * self.mu * u + self.delta * np.log(self.theta / self._den(u))

    def exponent_d1(self, u):
        u = np.asarray(u, float)
        return 1j * self.mu + self.delta * (1j * self.beta - u) / self._den(u)

    def exponent_d2(self, u):
        u = np.asarray(u, float)
        d = self._den(u)
        return self.delta * ((1j * self.beta - u) ** 2 - d) / d ** 2

    @property
    def gamma_rates(self) -> tuple[float, float]:
        """Rates ``(M, G)`` with ``X = Gamma(delta, M) - Gamma(delta, G) + mu``."""
        s = math.sqrt(self.beta ** 2 + 2 * self.theta)
        return s - self.beta, s + self.beta

    def levy_density(self, x):
        x = np.asarray(x, float)
        ax = np.abs(x)
        s = math.sqrt(self.beta ** 2 + 2 * self.theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.delta * np.exp(self.beta * x - s * ax) / ax
        return np.where(ax > 0, out, 0.0)

    def triplet(self) -> LevyTriplet:
        t = LevyTriplet(density=self.levy_density)
        big = np.real(t.integrate(lambda x: np.where(np.abs(x) > 1, x, 0.0)))
        mean = np.real(-1j * self.exponent_d1(0.0))
        return LevyTriplet(b=float(mean - big), density=self.levy_density)


@dataclass(frozen=True, eq=False)
class CustomLevy(LevyModel):
    """Levy process given directly by its characteristics."""

    params: LevyTriplet
    name = "levy"

    def _jump_terms(self, u):
        u = np.asarray(u, float)
        return u[..., None] * self.params.jumps

    def exponent(self, u):
        u = np.asarray(u, float)
        p = self.params
        out = 1j * u * p.b - u * u * p.c / 2 + 0j
        if p.jumps.size:
            ux = self._jump_terms(u)
            small = np.abs(p.jumps) <= 1
            out = out + np.sum(p.weights * (np.exp(1j * ux) - 1 - 1j * ux * small), axis=-1)
        if p.density is not None:
            out = out + _vec(lambda v: p.integrate(
                lambda x: np.exp(1j * v * x) - 1 - 1j * v * x * (np.abs(x) <= 1)), u)
        return out

    def exponent_d1(self, u):
        u = np.asarray(u, float)
        p = self.params
        out = 1j * p.b - u * p.c + 0j
        if p.jumps.size:
            ux = self._jump_terms(u)
            small = np.abs(p.jumps) <= 1
            out = out + np.sum(p.weights * 1j * p.jumps * (np.exp(1j * ux) - small), axis=-1)
        if p.density is not None:
            out = out + _vec(lambda v: p.integrate(
                lambda x: 1j * x * (np.exp(1j * v * x) - (np.abs(x) <= 1))), u)
        return out

    def exponent_d2(self, u):
        u = np.asarray(u, float)
        p = self.params
        out = -p.c + 0j * u
        if p.jumps.size:
            ux = self._jump_terms(u)
            out = out - np.sum(p.weights * p.jumps ** 2 * np.exp(1j * ux), axis=-1)
        if p.density is not None:
            out = out - _vec(lambda v: p.integrate(lambda x: x * x * np.exp(1j * v * x)), u)
        return out

    def triplet(self) -> LevyTriplet:
        return self.params


def _vec(fn, u):
    flat = np.ravel(u)
    return np.array([fn(float(v)) for v in flat], dtype=complex).reshape(np.shape(u))


def _check_knots(knots: np.ndarray, what: str):
    if knots.ndim != 1 or knots.size < 1:
        raise ModelError(f"{what} grid must be a non-empty 1-d array")
    if np.any(np.diff(knots) <= 0):
        raise ModelError(f"{what} grid times must be strictly increasing")


@dataclass(frozen=True, eq=False)
class TimeChangedBrownian(Model):
    """``X_t = gamma(t) + W_{psi(t)}`` with piecewise-linear ``gamma`` and ``psi``.

    Both functions are shifted so that they vanish at 0; outside their grids they
    are held constant.
    """

    gamma_t: np.ndarray
    gamma_v: np.ndarray
    psi_t: np.ndarray
    psi_v: np.ndarray
    name = "time_changed_brownian"

    def __post_init__(self):
        for attr in ("gamma_t", "gamma_v", "psi_t", "psi_v"):
            object.__setattr__(self, attr, np.atleast_1d(np.asarray(getattr(self, attr), float)))
        _check_knots(self.gamma_t, "gamma")
        _check_knots(self.psi_t, "psi")
        if self.gamma_t.shape != self.gamma_v.shape or self.psi_t.shape != self.psi_v.shape:
            raise ModelError("grid times and values must have equal length")
        if np.any(np.diff(self.psi_v) < 0):
            raise ModelError("psi must be nondecreasing")

    @classmethod
    def from_functions(cls, gamma: Callable, psi: Callable, knots) -> "TimeChangedBrownian":
        knots = np.asarray(knots, float)
        return cls(knots, np.array([gamma(t) for t in knots]), knots, np.array([psi(t) for t in knots]))

    def gamma(self, t):
        return np.interp(t, self.gamma_t, self.gamma_v) - np.interp(0.0, self.gamma_t, self.gamma_v)

    def time_change(self, t):
        return np.interp(t, self.psi_t, self.psi_v) - np.interp(0.0, self.psi_t, self.psi_v)

    def psi(self, t, u):
        u = np.asarray(u, float)
        return 1j * self.gamma(t) * u - u * u * self.time_change(t) / 2

    def psi_d1(self, t, u):
        u = np.asarray(u, float)
        return 1j * self.gamma(t) - u * self.time_change(t) + 0j

    def psi_d2(self, t, u):
        u = np.asarray(u, float)
        return -self.time_change(t) + 0j * u

    def breakpoints(self, T: float) -> np.ndarray:
        pts = np.concatenate([[0.0, T], self.gamma_t, self.psi_t])
        return np.unique(pts[(pts >= 0) & (pts <= T)])

    def normalized_triplet(self, t: float) -> LevyTriplet:
        h = 1e-9
        dpsi = self.time_change(t + h) - self.time_change(t)
        dgam = self.gamma(t + h) - self.gamma(t)
        b = dgam / dpsi if dpsi > 0 else 0.0
        return LevyTriplet(b=float(b), c=1.0)


@dataclass(frozen=True, eq=False)
class WienerLevy(Model):
    """``X_t = ∫_0^t w(s) dL_s`` for a Levy process ``L`` and a piecewise-constant
    weight ``w = values[j]`` on ``[knots[j], knots[j+1])``."""

    base: LevyModel
    knots: np.ndarray
    values: np.ndarray
    name = "wiener_levy"

    def __post_init__(self):
        object.__setattr__(self, "knots", np.atleast_1d(np.asarray(self.knots, float)))
        object.__setattr__(self, "values", np.atleast_1d(np.asarray(self.values, float)))
        _check_knots(self.knots, "weight")
        if self.knots.size != self.values.size + 1:
            raise ModelError("weight grid needs one more knot than values")
        if self.knots[0] != 0.0:
            raise ModelError("weight grid must start at t = 0")
        if not isinstance(self.base, LevyModel):
            raise ModelError("Wiener integrals are defined over a Levy base")

    def covers(self, T: float) -> bool:
        return self.knots[-1] >= T

    def _lengths(self, t: float) -> np.ndarray:
        if t > self.knots[-1] + 1e-12:
            raise ModelError(f"weight grid ends at {self.knots[-1]}, before t = {t}")
        return np.clip(np.minimum(self.knots[1:], t) - self.knots[:-1], 0.0, None)

    def weight(self, t: float) -> float:
        j = int(np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, self.values.size - 1))
        return float(self.values[j])

    def psi(self, t, u):
        u = np.asarray(u, float)
        ell = self._lengths(t)
        return sum(l * self.base.exponent(u * g) for l, g in zip(ell, self.values) if l > 0) + 0j * u

    def psi_d1(self, t, u):
        u = np.asarray(u, float)
        ell = self._lengths(t)
        return sum(l * g * self.base.exponent_d1(u * g) for l, g in zip(ell, self.values) if l > 0) + 0j * u

    def psi_d2(self, t, u):
        u = np.asarray(u, float)
        ell = self._lengths(t)
        return sum(l * g * g * self.base.exponent_d2(u * g)
                   for l, g in zip(ell, self.values) if l > 0) + 0j * u

    def breakpoints(self, T: float) -> np.ndarray:
        pts = np.concatenate([[0.0, T], self.knots])
        return np.unique(pts[(pts >= 0) & (pts <= T)])

    def normalized_triplet(self, t: float) -> LevyTriplet:
        g = self.weight(t)
        var = float(np.real(-self.base.exponent_d2(0.0))) * g * g
        if var <= 0:
            return LevyTriplet()
        return self.base.triplet().scaled(g).normalized(var)


@dataclass(frozen=True, eq=False)
class OUWrapper(Model):
    """``X_t = exp(-rate t) * Y_t`` for an additive process ``Y`` (marginal laws only;
    ``X`` itself does not have independent increments)."""

    rate: float
    base: Model
    name = "ou"

    def psi(self, t, u):
        return self.base.psi(t, np.exp(-self.rate * t) * np.asarray(u, float))

    def psi_d1(self, t, u):
        s = math.exp(-self.rate * t)
        return s * self.base.psi_d1(t, s * np.asarray(u, float))

    def psi_d2(self, t, u):
        s = math.exp(-self.rate * t)
        return s * s * self.base.psi_d2(t, s * np.asarray(u, float))

    def breakpoints(self, T: float) -> np.ndarray:
        return self.base.breakpoints(T)


def psi(model: Model, t: float, u):
    return model.psi(t, u)


def psi_d1(model: Model, t: float, u):
    return model.psi_d1(t, u)


def psi_d2(model: Model, t: float, u):
    return model.psi_d2(t, u)


# ---------------------------------------------------------------------------
# key-value configuration

_LEVY_KEYS = {
    "poisson": ("lambda",),
    "nig": ("theta", "beta", "delta", "mu"),
    "vg": ("theta", "beta", "delta", "mu"),
    "levy": ("b", "c", "jumps", "density"),
}
MODEL_KEYS = {
    **_LEVY_KEYS,
    "time_changed_brownian": ("gamma", "psi"),
    "wiener_levy": ("base", "knots", "weights"),
    "ou": ("rate", "base"),
}


def parse_pairs(text: str) -> np.ndarray:
    """``"(0, 0), (1, 0.5)"`` -> array of shape (n, 2)."""
    try:
        val = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise ModelError(f"cannot parse pair list {text!r}") from exc
    if isinstance(val, tuple) and len(val) == 2 and not isinstance(val[0], (tuple, list)):
        val = (val,)
    arr = np.asarray(val, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ModelError(f"expected comma-separated (a, b) pairs, got {text!r}")
    return arr


def parse_floats(text: str) -> np.ndarray:
    try:
        return np.atleast_1d(np.asarray([float(s) for s in text.split(",") if s.strip()]))
    except ValueError as exc:
        raise ModelError(f"cannot parse number list {text!r}") from exc


def _levy_from_config(family: str, cfg: Mapping[str, str]) -> LevyModel:
    f = lambda k, d=None: float(cfg[k]) if k in cfg or d is None else d  # noqa: E731
    if family == "poisson":
        return Poisson(f("lambda"))
    if family == "nig":
        return NIG(f("theta"), f("beta"), f("delta"), f("mu", 0.0))
    if family == "vg":
        return VarianceGamma(f("theta"), f("beta"), f("delta"), f("mu", 0.0))
    jumps = parse_pairs(cfg["jumps"]) if cfg.get("jumps", "").strip() else np.zeros((0, 2))
    if cfg.get("density", "").strip():
        d = parse_pairs(cfg["density"])
        trip = LevyTriplet.from_density_grid(f("b", 0.0), f("c", 0.0), d[:, 0], d[:, 1],
                                             jumps[:, 0], jumps[:, 1])
    else:
        trip = LevyTriplet(b=f("b", 0.0), c=f("c", 0.0), jumps=jumps[:, 0], weights=jumps[:, 1])
    return CustomLevy(trip)


def model_from_config(cfg: Mapping[str, str]) -> Model:
    """Build a model from a flat key-value mapping (the ``[model]`` section)."""
    cfg = {k.lower(): v for k, v in cfg.items()}
    family = cfg.get("family", "").strip().lower()
    if family not in MODEL_KEYS:
        raise ModelError(f"unknown model family {family!r}; expected one of {sorted(MODEL_KEYS)}")
    if family in _LEVY_KEYS:
        return _levy_from_config(family, cfg)
    if family == "time_changed_brownian":
        g = parse_pairs(cfg["gamma"])
        p = parse_pairs(cfg["psi"])
        return TimeChangedBrownian(g[:, 0], g[:, 1], p[:, 0], p[:, 1])
    base_family = cfg.get("base", "").strip().lower()
    if family == "wiener_levy":
        if base_family not in _LEVY_KEYS:
            raise ModelError(f"wiener_levy base must be a Levy family, got {base_family!r}")
        return WienerLevy(_levy_from_config(base_family, cfg),
                          parse_floats(cfg["knots"]), parse_floats(cfg["weights"]))
    sub = dict(cfg, family=base_family)
    return OUWrapper(float(cfg["rate"]), model_from_config(sub))


def accepted_model_keys(family: str) -> set[str]:
    keys = {"family", *MODEL_KEYS[family]}
    if family == "wiener_levy":
        for fam in _LEVY_KEYS:
            keys |= set(_LEVY_KEYS[fam])
    if family == "ou":
        for fam in MODEL_KEYS:
            if fam != "ou":
                keys |= accepted_model_keys(fam)
    return keys
