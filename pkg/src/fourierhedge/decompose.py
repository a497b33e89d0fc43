"""Kunita-Watanabe and Follmer-Schweizer decompositions as ``(t, x)`` evaluators."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .model import OUWrapper
from .operators import OperatorContext, kernel_d, kernel_e, kernel_h, kernel_k
from .payoff import DEFAULT_QUAD_TOL, ComplexMeasure

CSV_COLUMNS = ("t", "x", "xi", "Z", "H", "V")
IMAG_TOL = 1e-9


def _project(val, hermitian: bool):
    """Drop the imaginary part at the API boundary for real-valued claims."""
    if not hermitian:
        return val
    return float(np.real(val)) if np.ndim(val) == 0 else np.real(val)


@dataclass(frozen=True, eq=False)
class _Decomposition:
    ctx: OperatorContext
    mu: ComplexMeasure
    initial_complex: complex
    tol: float = DEFAULT_QUAD_TOL

    @property
    def hermitian(self) -> bool:
        return self.mu.is_hermitian

    @property
    def imag_initial(self) -> float:
        return abs(self.initial_complex.imag)

    def _value_complex(self, t, x):
        raise NotImplementedError

    def _strategy_complex(self, t, x):
        raise NotImplementedError

    def value(self, t: float, x):
        return _project(self._value_complex(t, x), self.hermitian)

    def strategy(self, t: float, x):
        return _project(self._strategy_complex(t, x), self.hermitian)


class KWDecomposition(_Decomposition):
    """``H = V_0 + ∫ Z dM + O_T`` with ``V = kernel_e`` and ``Z = kernel_d``."""

    kind = "kw"

    @property
    def V0(self):
        return _project(self.initial_complex, self.hermitian)

    def _value_complex(self, t, x):
        return kernel_e(self.ctx, self.mu, t, x, self.tol)

    def _strategy_complex(self, t, x):
        return kernel_d(self.ctx, self.mu, t, x, self.tol)

    V = _Decomposition.value
    Z = _Decomposition.strategy


class FSDecomposition(_Decomposition):
    """``H = H_0 + ∫ xi dX + L_T`` with ``H = kernel_h`` and ``xi = kernel_k``."""

    kind = "fs"

    @property
    def H0(self):
        return _project(self.initial_complex, self.hermitian)

    def _value_complex(self, t, x):
        return kernel_h(self.ctx, self.mu, t, x, self.tol)

    def _strategy_complex(self, t, x):
        return kernel_k(self.ctx, self.mu, t, x, self.tol)

    Hmap = _Decomposition.value
    xi = _Decomposition.strategy


def kw(ctx: OperatorContext, mu: ComplexMeasure, tol: float = DEFAULT_QUAD_TOL) -> KWDecomposition:
    return KWDecomposition(ctx, mu, complex(kernel_e(ctx, mu, 0.0, 0.0, tol)), tol)


def fs(ctx: OperatorContext, mu: ComplexMeasure, tol: float = DEFAULT_QUAD_TOL) -> FSDecomposition:
    return FSDecomposition(ctx, mu, complex(kernel_h(ctx, mu, 0.0, 0.0, tol)), tol)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck transform

@dataclass(frozen=True, eq=False)
class OUStrategy:
    """Decomposition for ``X_t = e^{-rate t} Y_t`` read off one for the additive ``Y``.

    ``base`` decomposes ``f(e^{-rate T} Y_T)``. Values are ``base(t, e^{rate t} x)``
    and the hedge is ``e^{rate t} base_strategy(t, e^{rate t} x)``.
    """

    rate: float
    base: _Decomposition

    @property
    def kind(self) -> str:
        return self.base.kind

    @property
    def initial(self):
        return _project(self.base.initial_complex, self.base.hermitian)

    def value(self, t: float, x):
        return self.base.value(t, math.exp(self.rate * t) * np.asarray(x, float))

    def strategy(self, t: float, x):
        s = math.exp(self.rate * t)
        return s * self.base.strategy(t, s * np.asarray(x, float))


def ou_transform(decomposition: _Decomposition, rate: float) -> OUStrategy:
    return OUStrategy(float(rate), decomposition)


def ou_decompose(model: OUWrapper, mu: ComplexMeasure, T: float, kind: str = "fs",
                 tol: float = DEFAULT_QUAD_TOL) -> OUStrategy:
    """Decompose ``f(X_T)`` for an OU-type model via its additive base process."""
    ctx = OperatorContext(model.base, T)
    mu_base = mu.scaled_frequencies(math.exp(-model.rate * T))
    dec = {"fs": fs, "kw": kw}[kind](ctx, mu_base, tol)
    return ou_transform(dec, model.rate)


# ---------------------------------------------------------------------------
# strategy tables

def default_x_grid(ctx: OperatorContext, n: int = 201, width: float = 8.0) -> np.ndarray:
    """``n`` points spanning ``width`` standard deviations of ``X_T`` around its mean."""
    m = ctx.model.mean(ctx.T)
    sd = math.sqrt(max(ctx.model.variance(ctx.T), 1e-300))
    return np.linspace(m - width * sd, m + width * sd, n)


def strategy_rows(kwd: KWDecomposition, fsd: FSDecomposition, times, xs):
    """Rows ``(t, x, xi, Z, H, V)`` on the product grid."""
    xs = np.asarray(xs, float)
    for t in np.asarray(times, float):
        cols = (fsd.xi(t, xs), kwd.Z(t, xs), fsd.Hmap(t, xs), kwd.V(t, xs))
        for j, x in enumerate(xs):
            yield (float(t), float(x), *(c[j] for c in cols))


def strategy_csv(kwd: KWDecomposition, fsd: FSDecomposition, times, xs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in strategy_rows(kwd, fsd, times, xs):
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    return f"{float(v):.12g}"
