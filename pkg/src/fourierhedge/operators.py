"""Expectation and derivative operators and the Fourier kernels built on them.

For a frequency ``u`` the operators are

* ``epsilon(t, u) = exp(psi_T(u) - psi_t(u))``,
* ``delta(t, u)``, the density of ``i d(psi'_.(u) - psi'_.(0))`` w.r.t. ``d psi''_.(0)``,
* ``phase(t, u) = i ∫_t^T delta_s(u) d psi'_s(0)``,

and the kernels ``e, d, h, k`` integrate ``epsilon``, ``delta*epsilon``,
``exp(phase)*epsilon`` and ``exp(phase)*delta*epsilon`` against the payoff measure.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .calculus import BaseMeasure, StructureCondition, base_measure, check_sc
from .errors import ModelError
from .model import FD_STEP, Horizon, Model, OUWrapper, WienerLevy
from .payoff import DEFAULT_QUAD_TOL, ComplexMeasure

_CACHE_SIZE = 16


@dataclass(frozen=True, eq=False)
class Marginals:
    """Per-frequency quantities on the breakpoint grid for a vector of ``u``.

    Shapes: ``psi`` and ``phase`` are ``(M+1, n)`` (values at the breakpoints,
    ``phase[k]`` integrating from ``t_k`` to ``T``); ``delta`` and ``dpsi`` are
    ``(M, n)`` per segment.
    """

    u: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    delta: np.ndarray
    phase: np.ndarray


class OperatorContext:
    """A model on ``[0, T]`` together with its structure condition and base measure."""

    def __init__(self, model: Model, horizon: Horizon | float):
        if isinstance(model, OUWrapper):
            raise ModelError("operators need a process with independent increments; "
                             "use decompose.ou_transform for OU-type models")
        self.model = model
        self.T = horizon.T if isinstance(horizon, Horizon) else Horizon(float(horizon)).T
        if isinstance(model, WienerLevy) and not model.covers(self.T):
            raise ModelError(f"weight grid ends at {model.knots[-1]}, before T = {self.T}")
        self.sc: StructureCondition = check_sc(model, self.T)
        self.base: BaseMeasure = base_measure(model, self.T)
        self.times = self.sc.times
        self.da = self.base.increments
        d1 = np.array([complex(model.psi_d1(t, 0.0)) for t in self.times])
        self.dpsi1_0 = np.diff(d1)
        self._cache: OrderedDict = OrderedDict()

    @property
    def n_segments(self) -> int:
        return len(self.times) - 1

    # -- per-frequency tables ----------------------------------------------

    def marginals(self, u) -> Marginals:
        u = np.ascontiguousarray(np.atleast_1d(np.asarray(u, float)))
        key = (u.shape, u.tobytes())
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        m = self.model
        psi = np.array([m.psi(t, u) for t in self.times], complex).reshape(len(self.times), u.size)
        d1 = np.array([m.psi_d1(t, u) for t in self.times], complex).reshape(len(self.times), u.size)
        dd1 = np.diff(d1, axis=0) - self.dpsi1_0[:, None]
        pos = self.da > 0
        delta = np.zeros_like(dd1)
        delta[pos] = -1j * dd1[pos] / self.da[pos, None]
        seg_phase = 1j * delta * self.dpsi1_0[:, None]
        phase = np.zeros_like(psi)
        phase[:-1] = np.cumsum(seg_phase[::-1], axis=0)[::-1]
        out = Marginals(u, psi, np.diff(psi, axis=0), delta, phase)
        self._cache[key] = out
        if len(self._cache) > _CACHE_SIZE:
            self._cache.popitem(last=False)
        return out

    def _locate(self, t: float) -> tuple[int, float]:
        """Segment holding ``t`` (right-continuous) and the fraction of it left after ``t``."""
        if not (0.0 <= t <= self.T * (1 + 1e-12)):
            raise ValueError(f"t = {t} outside [0, {self.T}]")
        k = int(self.sc.segment(t))
        lo, hi = self.times[k], self.times[k + 1]
        return k, float(np.clip((hi - t) / (hi - lo), 0.0, 1.0))

    def psi_at(self, mg: Marginals, t: float) -> np.ndarray:
        k, rest = self._locate(t)
        return mg.psi[k + 1] - rest * mg.dpsi[k]

    def phase_at(self, mg: Marginals, t: float) -> np.ndarray:
        k, rest = self._locate(t)
        return mg.phase[k + 1] + rest * 1j * mg.delta[k] * self.dpsi1_0[k]

    def delta_at(self, mg: Marginals, t: float) -> np.ndarray:
        k, _ = self._locate(t)
        return mg.delta[k]

    def multiplier(self, kind: str, t: float):
        """Fourier multiplier ``u -> m(u)`` of kernel ``kind`` in {e, d, h, k} at time ``t``."""
        if kind not in ("e", "d", "h", "k"):
            raise ValueError(f"unknown kernel {kind!r}")

        def m(u):
            mg = self.marginals(u)
            out = np.exp(mg.psi[-1] - self.psi_at(mg, t))
            if kind in ("h", "k"):
                out = out * np.exp(self.phase_at(mg, t))
            if kind in ("d", "k"):
                out = out * self.delta_at(mg, t)
            return out.reshape(np.shape(u))
        return m


def _scalar(u, arr):
    return complex(arr[0]) if np.ndim(u) == 0 else arr.reshape(np.shape(u))


def epsilon(ctx: OperatorContext, t: float, u):
    mg = ctx.marginals(u)
    return _scalar(u, np.exp(mg.psi[-1] - ctx.psi_at(mg, t)))


def delta(ctx: OperatorContext, t: float, u):
    return _scalar(u, ctx.delta_at(ctx.marginals(u), t))


def phase(ctx: OperatorContext, t: float, u):
    """The exponent ``i ∫_t^T delta_s(u) d psi'_s(0)`` (not its exponential)."""
    return _scalar(u, ctx.phase_at(ctx.marginals(u), t))


def _kernel(kind, ctx, mu, t, x, tol):
    return mu.transform(x, g=ctx.multiplier(kind, t), tol=tol)


def kernel_e(ctx: OperatorContext, payoff: ComplexMeasure, t: float, x, tol: float = DEFAULT_QUAD_TOL):
    """``E[f(X_T) | X_t = x]``."""
    return _kernel("e", ctx, payoff, t, x, tol)


def kernel_d(ctx: OperatorContext, payoff: ComplexMeasure, t: float, x, tol: float = DEFAULT_QUAD_TOL):
    """Kunita-Watanabe integrand against the martingale part."""
    return _kernel("d", ctx, payoff, t, x, tol)


def kernel_h(ctx: OperatorContext, payoff: ComplexMeasure, t: float, x, tol: float = DEFAULT_QUAD_TOL):
    """Value process of the Follmer-Schweizer decomposition."""
    return _kernel("h", ctx, payoff, t, x, tol)


def kernel_k(ctx: OperatorContext, payoff: ComplexMeasure, t: float, x, tol: float = DEFAULT_QUAD_TOL):
    """Follmer-Schweizer hedge ratio."""
    return _kernel("k", ctx, payoff, t, x, tol)


KERNELS = {"e": kernel_e, "d": kernel_d, "h": kernel_h, "k": kernel_k}


def derivative_identity_check(ctx: OperatorContext, payoff: ComplexMeasure, t: float, x: float,
                              tol: float = DEFAULT_QUAD_TOL) -> complex:
    """``c_t g'(x) + ∫ (g(x+y) - g(x)) y F_t(dy)`` with ``g = kernel_e(t, .)``.

    ``(c_t, F_t)`` are the characteristics normalized by the variance rate, so
    the result should equal ``kernel_d(t, x)``. ``g'`` is a 4th-order central
    difference.
    """
    def g(y):
        return kernel_e(ctx, payoff, t, y, tol)

    h = FD_STEP
    pts = x + h * np.array([-2.0, -1.0, 1.0, 2.0])
    gv = g(pts)
    gprime = (gv[0] - 8 * gv[1] + 8 * gv[2] - gv[3]) / (12 * h)
    trip = ctx.model.normalized_triplet(t)
    gx = complex(g(x))
    jumps = trip.integrate(lambda y: (g(x + np.asarray(y, float)) - gx) * y)
    return trip.c * gprime + jumps


# ---------------------------------------------------------------------------
# bounds

def _phi1(z):
    """``(e^z - 1)/z`` with a series near 0."""
    z = np.asarray(z, complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 + z / 2 + z * z / 6, np.expm1(safe) / safe)


def hedge_energy(ctx: OperatorContext, u) -> np.ndarray:
    """``∫_0^T |delta_s(u) epsilon_{s,T}(u)|^2 d(-psi''_s(0))``, exact per segment."""
    mg = ctx.marginals(u)
    re_after = 2 * np.real(mg.psi[-1] - mg.psi[1:])          # log|eps|^2 at segment ends
    slope = 2 * np.real(mg.dpsi)                              # growth of log|eps|^2 backwards
    seg = ctx.da[:, None] * np.abs(mg.delta) ** 2 * np.exp(re_after) * np.real(_phi1(slope))
    return np.sum(seg, axis=0)


def xi_cross_energy(ctx: OperatorContext, u: float, v: float) -> float:
    """``∫_0^T |xi_s(u)| |xi_s(v)| d(-psi''_s(0))`` with ``|xi_s(u)| = |delta e^{phase} epsilon|``.

    This is the variation proxy for the ``<L(u), L(v)>`` cross term; the
    theoretical bound is ``4 exp(2 K_T)``.
    """
    mg = ctx.marginals(np.array([u, v], float))
    logmag = np.real(mg.psi[-1] - mg.psi + mg.phase)           # log|e^{phase} eps| at nodes
    tot = logmag[:, 0] + logmag[:, 1]
    end, start = tot[1:], tot[:-1]
    amp = np.abs(mg.delta[:, 0] * mg.delta[:, 1])
    seg = ctx.da * amp * np.exp(end) * np.real(_phi1(start - end))
    return float(np.sum(seg))


# ---------------------------------------------------------------------------
# precomputed tables for the simulator

def _nodes_uniform(mu: ComplexMeasure) -> bool:
    return mu.density is not None and mu.atoms_u.size == 0


@dataclass(frozen=True, eq=False)
class KernelTable:
    """Kernel values on a ``(t, x)`` grid.

    Lookups are piecewise constant in ``t`` (row ``j`` serves ``t`` in
    ``[t_j, t_{j+1})``, so a hedge decided at ``t_j`` uses row ``j``) and linear
    in ``x``. Points outside ``[x[0], x[-1]]`` are flagged by :meth:`covers`.
    """

    kind: str
    t: np.ndarray
    x: np.ndarray
    values: np.ndarray

    def row(self, t: float) -> int:
        j = int(np.searchsorted(self.t, t * (1 + 1e-13) + 1e-300, side="right") - 1)
        return int(np.clip(j, 0, len(self.t) - 1))

    def covers(self, x) -> np.ndarray:
        x = np.asarray(x)
        return (x >= self.x[0]) & (x <= self.x[-1])

    def lookup(self, t: float, x) -> np.ndarray:
        vals = self.values[self.row(t)]
        return np.interp(x, self.x, vals.real) + 1j * np.interp(x, self.x, vals.imag)


def _fft_transform(mu: ComplexMeasure, mult, x_lo: float, x_hi: float, target_dx: float):
    """``∫ m(u) e^{iux} mu(du)`` on a uniform x-grid via one FFT.

    With nodes ``u_i = u_0 + i h`` and ``x_j = x_lo + j dx``, ``dx = 2π/(L h)``,
    the sum is ``e^{i u_0 x_j} * L * ifft(c_i e^{i i h x_lo})_j``.
    """
    u, w = mu.density_nodes()
    coef = w * mult(u)
    h = mu.step
    need = int(np.ceil(2 * np.pi / (h * target_dx)))
    L = 1 << int(np.ceil(np.log2(max(need, u.size, 2))))
    dx = 2 * np.pi / (L * h)
    n_x = int(np.floor((x_hi - x_lo) / dx)) + 1
    if n_x > L:
        raise ValueError("x-range wider than the FFT period; lower the payoff grid step")
    buf = np.zeros(L, complex)
    buf[:u.size] = coef * np.exp(1j * np.arange(u.size) * h * x_lo)
    x = x_lo + dx * np.arange(n_x)
    vals = np.exp(1j * u[0] * x) * (L * np.fft.ifft(buf))[:n_x]
    return x, vals


def build_table(ctx: OperatorContext, mu: ComplexMeasure, kind: str, times, x_lo: float,
                x_hi: float, n_x: int = 2049) -> KernelTable:
    """Tabulate kernel ``kind`` at each time in ``times`` over ``[x_lo, x_hi]``.

    Pure-density measures go through an FFT (grid spacing at most the requested
    one); other measures are summed directly on ``n_x`` points.
    """
    times = np.asarray(times, float)
    target = (x_hi - x_lo) / (n_x - 1)
    rows = []
    x = None
    for t in times:
        mult = ctx.multiplier(kind, float(t))
        if _nodes_uniform(mu):
            x, vals = _fft_transform(mu, mult, x_lo, x_hi, target)
        else:
            x = np.linspace(x_lo, x_hi, n_x)
            vals = mu.transform(x, g=mult, adaptive=False)
        rows.append(vals)
    return KernelTable(kind, times, x, np.array(rows))
