"""Variance of the variance-optimal hedging error.

For two frequencies the error kernel is

    J0(u, v) = ∫_0^T exp(Phi_t(u, v)) dGamma_t(u, v),

    Phi_t = -(K_T - K_t) + P_t(u) + P_t(v) + (psi_T - psi_t)(u) + (psi_T - psi_t)(v) + psi_t(u + v),

with ``P_t`` the phase exponent and ``Gamma_t = nu_t - ∫_0^t delta(u) delta(v) d(-psi''(0))``.
``Phi`` and ``Gamma`` are affine on every breakpoint segment, so each segment
contributes ``exp(Phi_k) phi1(Phi_{k+1} - Phi_k) dGamma_k`` exactly. The total
error is ``J0 = ∫∫ J0(u, v) mu(du) mu(dv)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import NegativeVariance, QuadratureFailure
from .model import LevyModel
from .operators import OperatorContext, _phi1
from .payoff import ComplexMeasure

NEG_TOL = 1e-10


@dataclass(frozen=True)
class ErrorReport:
    j0: float
    imag_residual: float
    kernel_evals: int
    quad_error: float = 0.0
    backend: str = _kernels.BACKEND

    def as_dict(self) -> dict:
        return {"j0": self.j0, "imag_residual": self.imag_residual,
                "kernel_evals": self.kernel_evals, "quad_error": self.quad_error,
                "backend": self.backend}


def nu(ctx: OperatorContext, t: float, u: float, v: float) -> complex:
    m = ctx.model
    return complex(m.psi(t, u + v) - m.psi(t, u) - m.psi(t, v))


def _delta_delta_mass(ctx: OperatorContext, t: float, u: float, v: float) -> complex:
    """``∫_0^t delta_s(u) delta_s(v) d(-psi''_s(0))`` on the segment grid."""
    mg = ctx.marginals(np.array([u, v], float))
    k, rest = ctx._locate(t)
    mass = ctx.da.copy()
    mass[k] *= 1 - rest
    mass[k + 1:] = 0.0
    return complex(np.sum(mg.delta[:, 0] * mg.delta[:, 1] * mass))


def gamma(ctx: OperatorContext, t: float, u: float, v: float) -> complex:
    """``Gamma_t(u, v)``; zero for Gaussian and Poisson models."""
    return nu(ctx, t, u, v) - _delta_delta_mass(ctx, t, u, v)


def gamma_levy(model: LevyModel, u: float, v: float) -> complex:
    """Per-unit-time ``Gamma(u, v)`` of a Levy model from its exponent."""
    e, e1 = model.exponent, model.exponent_d1
    var = -complex(model.exponent_d2(0.0)).real
    nu1 = complex(e(u + v) - e(u) - e(v))
    if var == 0:
        return nu1
    a0 = complex(e1(0.0))
    return nu1 + complex(e1(u) - a0) * complex(e1(v) - a0) / var


def _node_tables(ctx: OperatorContext, u: np.ndarray):
    """Per-frequency arrays feeding the double sum: ``A`` (M+1, n), ``g``/``d`` (M, n)."""
    mg = ctx.marginals(u)
    K = ctx.sc.K_nodes
    # the discount -(K_T - K_t) is split evenly between the two frequencies
    A = mg.phase + (mg.psi[-1] - mg.psi) - 0.5 * (K[-1] - K)[:, None]
    return mg, A


def _sum_tables(ctx: OperatorContext, s: np.ndarray):
    mg = ctx.marginals(s)
    return mg.psi, mg.dpsi


def j0_kernel(ctx: OperatorContext, u: float, v: float, method: str = "exact") -> complex:
    """``J0(u, v)``.

    ``method="exact"`` integrates each affine segment in closed form;
    ``method="quadrature"`` integrates ``exp(Phi_t)`` numerically in ``t`` as a
    cross-check.
    """
    pts = np.array([u, v], float)
    mg, A = _node_tables(ctx, pts)
    B, dG = _sum_tables(ctx, np.array([u + v], float))
    Phi = A[:, 0] + A[:, 1] + B[:, 0]
    dGam = dG[:, 0] - mg.dpsi[:, 0] - mg.dpsi[:, 1] - mg.delta[:, 0] * mg.delta[:, 1] * ctx.da
    if method == "exact":
        return complex(np.sum(dGam * np.exp(Phi[:-1]) * _phi1(np.diff(Phi))))
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    total = 0j
    for k in range(ctx.n_segments):
        z0, dz = Phi[k], Phi[k + 1] - Phi[k]
        re, err_r = integrate.quad(lambda s: (np.exp(z0 + s * dz)).real, 0, 1, epsabs=1e-14, epsrel=1e-12)
        im, err_i = integrate.quad(lambda s: (np.exp(z0 + s * dz)).imag, 0, 1, epsabs=1e-14, epsrel=1e-12)
        if max(err_r, err_i) > 1e-8:
            raise QuadratureFailure(f"time quadrature error {max(err_r, err_i):.3g} on segment {k}")
        total += dGam[k] * complex(re, im)
    return total


def j0_kernel_levy(model: LevyModel, T: float, u: float, v: float) -> complex:
    """Closed form of ``J0(u, v)`` for a Levy model, from exponents only."""
    e, e1, e2 = model.exponent, model.exponent_d1, model.exponent_d2
    var = -complex(e2(0.0)).real
    a0 = complex(e1(0.0))
    if var == 0:
        return 0j
    k_rate = (a0.imag) ** 2 / var
    dl_u = 1j * complex(e1(u) - a0) / -var
    dl_v = 1j * complex(e1(v) - a0) / -var
    rate = -k_rate + 1j * (dl_u + dl_v) * a0 + complex(e(u)) + complex(e(v)) - complex(e(u + v))
    return gamma_levy(model, u, v) * T * complex(np.exp(T * complex(e(u + v)))) * complex(_phi1(T * rate))


def _pair_index(u: np.ndarray):
    """Unique pairwise sums and the ``(n, n)`` index into them."""
    s = u[:, None] + u[None, :]
    uniq, inv = np.unique(np.round(s, 12), return_inverse=True)
    return uniq, inv.reshape(s.shape)


def _double_sum(ctx: OperatorContext, u: np.ndarray, w: np.ndarray, uniform_step: float | None):
    mg, A = _node_tables(ctx, u)
    if uniform_step is not None:
        sums = 2 * u[0] + uniform_step * np.arange(2 * u.size - 1)
        idx = None
    else:
        sums, idx = _pair_index(u)
    B, G = _sum_tables(ctx, sums)
    return _kernels.j0_double_sum(
        np.ascontiguousarray(w, complex), np.ascontiguousarray(A), np.ascontiguousarray(B),
        np.ascontiguousarray(mg.dpsi), np.ascontiguousarray(G), np.ascontiguousarray(mg.delta),
        np.ascontiguousarray(ctx.da, float), idx)


def variance_error(ctx: OperatorContext, mu: ComplexMeasure, quad_tol: float = 1e-6) -> ErrorReport:
    """``J0 = ∫∫ J0(u, v) mu(du) mu(dv)`` with an imaginary-part and sign check.

    Density measures are summed on their trapezoid grid and again on the grid of
    twice the step; the difference is reported as ``quad_error`` and must stay
    below ``quad_tol * (1 + |J0|)``.
    """
    quad_err = 0.0
    uniform = mu.density is not None and mu.atoms_u.size == 0
    if uniform:
        u, w = mu.density_nodes()
        total, evals = _double_sum(ctx, u, w, mu.step)
        n = u.size
        if n >= 5:
            u2, w2 = mu.density_nodes(2 * mu.step)
            coarse, e2 = _double_sum(ctx, u2, w2, 2 * mu.step)
            evals += e2
            quad_err = abs(total - coarse)
            if quad_err > quad_tol * (1 + abs(total)):
                raise QuadratureFailure(
                    f"J0 changed by {quad_err:.3g} between grid steps {mu.step:g} and {2 * mu.step:g}")
    else:
        u, w = mu.nodes()
        total, evals = _double_sum(ctx, u, w, None)
    tv = mu.total_variation
    tol = NEG_TOL * (1 + tv * tv * math.exp(2 * ctx.sc.K_T))
    j0 = float(total.real)
    if j0 < -tol:
        raise NegativeVariance(f"hedging-error variance {j0:.3g} is below -{tol:.1e}")
    if j0 < 0:
        warnings.warn(f"clamping rounding-level negative variance {j0:.3g} to 0", RuntimeWarning,
                      stacklevel=2)
        j0 = 0.0
    return ErrorReport(j0, abs(total.imag), int(evals), float(quad_err))
