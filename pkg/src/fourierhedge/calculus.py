"""Structure condition, mean-variance trade-off and the variance base measure.

Time is handled on the model's breakpoints ``0 = t_0 < ... < t_M = T``. On each
segment ``psi_t(u)`` is affine in ``t``, so Radon-Nikodym densities against
``d(-psi''_t(0))`` are ratios of increments and every time integral is a finite
sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SCViolated
from .model import Horizon, LevyModel, Model, OUWrapper

ALPHA_IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BaseMeasure:
    """``a_t = -psi''_t(0) = Var(X_t)`` sampled at the breakpoints (affine in between)."""

    times: np.ndarray
    values: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.values[-1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)


def base_measure(model: Model, T: float) -> BaseMeasure:
    times = model.breakpoints(T)
    vals = np.array([float(np.real(-model.psi_d2(t, 0.0))) for t in times])
    return BaseMeasure(times, vals)


@dataclass(frozen=True, eq=False)
class StructureCondition:
    """Verdict of the structure condition plus ``alpha`` and ``K`` per segment.

    ``alpha_seg[k]`` is ``i dpsi'(0)/dpsi''(0)`` on segment ``k`` (complex as
    computed; real when satisfied). ``K_nodes`` holds ``K`` at the breakpoints.
    """

    satisfied: bool
    times: np.ndarray
    alpha_seg: np.ndarray
    K_nodes: np.ndarray
    reason: str = ""

    @property
    def K_T(self) -> float:
        return float(self.K_nodes[-1])

    def segment(self, t) -> np.ndarray | int:
        """Index of the segment ``[t_k, t_{k+1})`` holding ``t`` (``T`` maps to the last)."""
        k = np.searchsorted(self.times, t, side="right") - 1
        return np.clip(k, 0, len(self.times) - 2)

    def alpha(self, t):
        a = self.alpha_seg[self.segment(t)]
        return np.real(a) if self.satisfied else a

    def K(self, t):
        return np.interp(t, self.times, self.K_nodes)


def check_sc(model: Model, horizon: Horizon | float, strict: bool = True) -> StructureCondition:
    """Decide the structure condition on the model's segment grid.

    A segment with zero variance increment but nonzero drift increment violates
    it (drift not absolutely continuous w.r.t. the variance). Zero-variance,
    zero-drift segments carry ``alpha = 0``.
    """
    T = horizon.T if isinstance(horizon, Horizon) else float(horizon)
    if isinstance(model, OUWrapper):
        raise TypeError("OU-transformed processes are not PII; check the base model instead")
    times = model.breakpoints(T)
    d1 = np.array([complex(model.psi_d1(t, 0.0)) for t in times])
    a = np.array([float(np.real(-model.psi_d2(t, 0.0))) for t in times])
    da = np.diff(a)
    dd1 = np.diff(d1)
    scale_a = max(abs(a[-1]), 1e-300)
    scale_d = max(float(np.max(np.abs(d1))), 1e-300)
    alpha = np.zeros(len(da), complex)
    reason = ""
    for k in range(len(da)):
        if da[k] <= 1e-14 * scale_a:
            if abs(dd1[k]) > 1e-14 * max(1.0, scale_d):
                kind = "Levy model with psi''(0) = 0 and psi'(0) != 0" if model.is_levy \
                    else f"drift moves on zero-variance segment [{times[k]:g}, {times[k + 1]:g}]"
                reason = reason or kind
            continue
        alpha[k] = -1j * dd1[k] / da[k]
    if not reason:
        bad = np.abs(alpha.imag) > ALPHA_IMAG_TOL * np.maximum(np.abs(alpha), 1.0)
        if np.any(bad):
            reason = "alpha has a nonzero imaginary part (drift is not real)"
    satisfied = not reason
    K = np.concatenate([[0.0], np.cumsum(np.real(alpha) ** 2 * np.where(da > 0, da, 0.0))])
    sc = StructureCondition(satisfied, times, alpha if not satisfied else alpha.real + 0j, K, reason)
    if strict and not satisfied:
        raise SCViolated(reason)
    return sc


def mvt(sc: StructureCondition, t) -> float:
    """Mean-variance trade-off ``K_t = ∫_0^t alpha_s^2 d(-psi''_s(0))``."""
    if not sc.satisfied:
        raise SCViolated(sc.reason)
    return sc.K(t)


def _affine_segment(model: Model, s: float) -> tuple[float, float]:
    """A time interval around ``s`` on which ``psi(., u)`` is affine."""
    if isinstance(model, LevyModel):
        return 0.0, 1.0
    knots = getattr(model, "knots", None)
    end = float(knots[-1]) if knots is not None else s + 1.0
    pts = model.breakpoints(end)
    k = int(np.clip(np.searchsorted(pts, s, side="right") - 1, 0, len(pts) - 2))
    return float(pts[k]), float(pts[k + 1])


def second_density(model: Model, s: float, u):
    """Density of ``dpsi''_.(u)`` w.r.t. ``dpsi''_.(0)`` at time ``s``.

    Equals ``c_s + ∫ x^2 e^{iux} F_s(dx)`` in normalized characteristics; 1 at
    ``u = 0``. Zero-variance segments return 1 (normalization convention).
    """
    lo, hi = _affine_segment(model, s)
    u = np.asarray(u, float)
    num = model.psi_d2(hi, u) - model.psi_d2(lo, u)
    den = complex(model.psi_d2(hi, 0.0) - model.psi_d2(lo, 0.0))
    if abs(den) == 0:
        return np.ones_like(u) + 0j
    return num / den


def first_density(model: Model, s: float, u):
    """Density of ``dpsi'_.(u)`` w.r.t. ``d(-psi''_.(0))`` at time ``s``.

    Levy families evaluate ``i b - u c + ∫ ix (e^{iux} - 1_{|x|<=1}) F(dx)`` from
    their normalized characteristics; other families use increment ratios.
    """
    u = np.asarray(u, float)
    if isinstance(model, LevyModel):
        trip = model.normalized_triplet()

        def one(v):
            return 1j * trip.b - v * trip.c + trip.integrate(
                lambda x: 1j * x * (np.exp(1j * v * x) - (np.abs(x) <= 1)))
        return np.vectorize(one, otypes=[complex])(u)
    lo, hi = _affine_segment(model, s)
    num = model.psi_d1(hi, u) - model.psi_d1(lo, u)
    den = float(np.real(model.psi_d2(lo, 0.0) - model.psi_d2(hi, 0.0)))
    if den == 0:
        return np.zeros_like(u) + 0j
    return num / den
