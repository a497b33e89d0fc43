import csv
import io
import math

import numpy as np
import pytest

from fourierhedge import ComplexMeasure, OperatorContext, OUWrapper, Poisson, TimeChangedBrownian
from fourierhedge.decompose import (CSV_COLUMNS, default_x_grid, fs, kw, ou_decompose, ou_transform,
                                    strategy_csv)


def test_constant_payoff(vg):
    ctx = OperatorContext(vg, 1.0)
    mu = ComplexMeasure.point_mass(0.0, 3.0)
    k, f = kw(ctx, mu), fs(ctx, mu)
    assert k.V0 == pytest.approx(3.0) and f.H0 == pytest.approx(3.0)
    assert np.allclose(k.Z(0.4, np.linspace(-2, 2, 5)), 0)
    assert np.allclose(f.xi(0.4, np.linspace(-2, 2, 5)), 0)


def test_poisson_atom_initial_value():
    ctx = OperatorContext(Poisson(1.0), 2.0)
    mu = ComplexMeasure.point_mass(1.0)
    assert kw(ctx, mu).V0 == pytest.approx(np.exp(2.0 * (np.exp(1j) - 1)))


def test_initial_values_match_maps(vg, cos_pair):
    ctx = OperatorContext(vg, 1.0)
    k, f = kw(ctx, cos_pair), fs(ctx, cos_pair)
    assert k.V(0.0, 0.0) == pytest.approx(k.V0)
    assert f.Hmap(0.0, 0.0) == pytest.approx(f.H0)
    x = np.linspace(-3, 3, 7)
    assert np.allclose(f.Hmap(1.0, x), np.cos(x))
    assert isinstance(f.H0, float)


def test_non_hermitian_stays_complex(vg):
    ctx = OperatorContext(vg, 1.0)
    f = fs(ctx, ComplexMeasure.point_mass(1.0))
    assert isinstance(f.H0, complex)


def test_ou_zero_rate_is_identity(vg, cos_pair):
    dec = fs(OperatorContext(vg, 1.0), cos_pair)
    ou = ou_transform(dec, 0.0)
    x = np.linspace(-2, 2, 5)
    assert np.allclose(ou.strategy(0.3, x), dec.strategy(0.3, x))
    assert np.allclose(ou.value(0.3, x), dec.value(0.3, x))


def test_ou_constant_payoff_has_no_hedge():
    ou = ou_decompose(OUWrapper(0.7, Poisson(1.0)), ComplexMeasure.point_mass(0.0, 2.0), 1.0, "kw")
    assert np.allclose(ou.strategy(0.5, np.linspace(-1, 1, 3)), 0)
    assert ou.initial == pytest.approx(2.0)


def test_ou_over_brownian_closed_form():
    # X_t = e^{-a t} W_t; E[e^{iu X_T} | X_t = x] = exp(iu e^{-a(T-t)} x - u^2 e^{-2aT}(T-t)/2)
    a, u, T, t = 0.4, 1.3, 1.0, 0.35
    bm = TimeChangedBrownian.from_functions(lambda s: 0.0 * s, lambda s: s, [0.0, T])
    ou = ou_decompose(OUWrapper(a, bm), ComplexMeasure.point_mass(u), T, "kw")
    x = np.linspace(-2, 2, 5)
    s = u * math.exp(-a * (T - t))
    value = np.exp(1j * s * x - (u * math.exp(-a * T)) ** 2 * (T - t) / 2)
    assert np.allclose(ou.value(t, x), value)
    # hedge per unit of X: d/dx of the value
    assert np.allclose(ou.strategy(t, x), 1j * s * value)


def test_strategy_csv(vg, cos_pair):
    ctx = OperatorContext(vg, 1.0)
    xs = default_x_grid(ctx, 11)
    text = strategy_csv(kw(ctx, cos_pair), fs(ctx, cos_pair), [0.0, 0.5, 1.0], xs)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 3 * 11
    last = rows[-1]
    assert float(last[4]) == pytest.approx(math.cos(float(last[1])), abs=1e-9)


def test_default_grid_is_centred(vg):
    xs = default_x_grid(OperatorContext(vg, 1.0), 5, width=2)
    assert xs[2] == pytest.approx(vg.mean(1.0))
    assert xs[-1] - xs[2] == pytest.approx(2 * math.sqrt(vg.variance(1.0)))
