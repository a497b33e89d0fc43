import numpy as np
import pytest

from fourierhedge import (NIG, ComplexMeasure, CustomLevy, GridMismatch, LevyTriplet, OperatorContext,
                          OUWrapper, Poisson, UnsupportedModel, VarianceGamma, WienerLevy,
                          self_quanto_put)
from fourierhedge.decompose import fs
from fourierhedge.simulate import CHUNK, backtest, hedging_errors, orthogonality_check, simulate_paths


def _within(sample, expect, k=3.5):
    se = np.std(sample, ddof=1) / np.sqrt(sample.size)
    return abs(np.mean(sample) - expect) < k * se


def test_poisson_moments():
    x = simulate_paths(Poisson(2.0), (1.0, 4), 100_000, seed=5).terminal
    assert _within(x, 2.0)
    assert _within((x - 2.0) ** 2, 2.0)


def test_brownian_moments(brownian):
    x = simulate_paths(brownian, (1.0, 8), 100_000, seed=6).terminal
    assert _within(x, 0.0) and _within(x * x, 1.0)


@pytest.mark.parametrize("model", [VarianceGamma(2.0, 1.0, 1.0), NIG(2.0, 1.0, 1.0, 0.2), Poisson(1.5),
                                   WienerLevy(VarianceGamma(2.0, 1.0, 1.0), [0.0, 0.3, 1.0], [1.0, -0.5]),
                                   OUWrapper(0.8, Poisson(1.0))],
                         ids=lambda m: m.name)
def test_empirical_characteristic_function(model):
    x = simulate_paths(model, (1.0, 5), 100_000, seed=9).terminal
    for u in (0.5, 1.0, 2.0):
        target = np.exp(model.psi(1.0, u))
        z = np.exp(1j * u * x)
        assert _within(z.real, target.real) and _within(z.imag, target.imag)


def test_reproducible_and_chunked(vg):
    a = simulate_paths(vg, (1.0, 10), 20_000, seed=3)
    b = simulate_paths(vg, (1.0, 10), 20_000, seed=3)
    c = simulate_paths(vg, (1.0, 10), 20_000, seed=4)
    assert np.array_equal(a.increments, b.increments)
    assert not np.array_equal(a.increments, c.increments)
    # whole chunks do not depend on how many paths were requested
    d = simulate_paths(vg, (1.0, 10), CHUNK, seed=3)
    assert np.array_equal(a.increments[:CHUNK], d.increments)


def test_coarsen_keeps_terminal(vg):
    b = simulate_paths(vg, (1.0, 8), 100, seed=1)
    assert np.allclose(b.coarsen(4).terminal, b.terminal)
    with pytest.raises(ValueError):
        b.coarsen(3)


def test_custom_triplet_has_no_sampler():
    with pytest.raises(UnsupportedModel):
        simulate_paths(CustomLevy(LevyTriplet(c=1.0)), (1.0, 2), 10, seed=0)


def test_bad_grid():
    with pytest.raises(ValueError):
        simulate_paths(Poisson(1.0), [0.0, 0.5, 0.4], 10, seed=0)


def test_martingale_model_strategies_coincide(cos_pair):
    m = VarianceGamma(2.0, 1.0, 1.0, mu=-0.5)
    dec = fs(OperatorContext(m, 1.0), cos_pair)
    b = simulate_paths(m, (1.0, 20), 2_000, seed=2)
    assert np.array_equal(hedging_errors(dec, b, "fs-pure"), hedging_errors(dec, b, "vo-feedback"))


def test_mse_falls_with_refinement(gaussian, cos_pair):
    dec = fs(OperatorContext(gaussian, 1.0), cos_pair)
    b = simulate_paths(gaussian, (1.0, 64), 20_000, seed=8)
    mses = [np.mean(hedging_errors(dec, b.coarsen(f) if f > 1 else b) ** 2) for f in (8, 4, 2, 1)]
    assert all(x > y for x, y in zip(mses, mses[1:]))


@pytest.mark.parametrize("name", ["gaussian", "poisson", "vg"])
def test_orthogonality(name, gaussian, poisson, vg, cos_pair):
    model = {"gaussian": gaussian, "poisson": poisson, "vg": vg}[name]
    dec = fs(OperatorContext(model, 1.0), cos_pair)
    b = simulate_paths(model, (1.0, 50), 40_000, seed=12)
    assert abs(orthogonality_check(model, cos_pair, dec, b)) < 3


def test_backtest_report(poisson, cos_pair):
    ctx = OperatorContext(poisson, 1.0)
    dec = fs(ctx, cos_pair)
    b = simulate_paths(poisson, (1.0, 40), 5_000, seed=1)
    rep = backtest(poisson, cos_pair, dec, "vo-feedback", b, keep_residuals=True)
    assert rep.analytic_j0 < 1e-12 and rep.n_paths == 5_000 and rep.steps == 40
    assert rep.residuals.shape == (5_000,)
    assert "residuals" not in rep.as_dict()
    assert rep.extrapolation in ("aitken", "richardson")
    with pytest.raises(ValueError):
        backtest(poisson, ComplexMeasure.point_mass(0.0), dec, "vo-feedback", b)
    with pytest.raises(ValueError):
        hedging_errors(dec, b, "delta")


def test_table_mismatch_falls_back(vg):
    mu = self_quanto_put(1.0, truncation=200.0, check=False)
    dec = fs(OperatorContext(vg, 1.0), mu)
    b = simulate_paths(vg, (1.0, 4), 500, seed=0)
    with pytest.warns(GridMismatch):
        narrow = hedging_errors(dec, b, x_range=(-0.5, 0.5))
    wide = hedging_errors(dec, b)
    assert np.max(np.abs(narrow - wide)) < 1e-3
