import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourierhedge import (ComplexMeasure, ConfigError, QuadratureFailure, TruncationTooTight,
                          fourier_eval, self_quanto_put)
from fourierhedge.payoff import payoff_from_config, self_quanto_put_payoff


def test_cos_pair_reproduces_cosine(cos_pair):
    x = np.linspace(-4, 4, 17)
    assert np.allclose(fourier_eval(cos_pair, x), np.cos(x))


def test_atom_at_zero_is_constant():
    mu = ComplexMeasure.point_mass(0.0, 2.5)
    assert fourier_eval(mu, 1.7) == pytest.approx(2.5)


@pytest.mark.parametrize("x, expect", [(0.0, 0.0), (1.0, 0.0), (-10.0, math.exp(-10) * (1 - math.exp(-10)))])
def test_self_quanto_point_values(x, expect):
    mu = self_quanto_put(1.0)
    assert abs(fourier_eval(mu, x) - expect) < 1e-3


def test_self_quanto_far_values_tight():
    mu = self_quanto_put(1.0)
    assert abs(fourier_eval(mu, -10.0) - math.exp(-10) * (1 - math.exp(-10))) < 1e-4
    assert abs(fourier_eval(mu, 1.0)) < 1e-4


def test_self_quanto_other_strike():
    # the kink error scales like K^2 / truncation
    with pytest.raises(TruncationTooTight):
        self_quanto_put(2.0)
    mu = self_quanto_put(2.0, truncation=4000.0)
    x = np.linspace(-3, 1, 41)
    assert np.max(np.abs(np.real(mu.transform(x)) - self_quanto_put_payoff(2.0)(x))) < 1e-3


def test_tight_truncation_is_reported():
    with pytest.raises(TruncationTooTight):
        self_quanto_put(1.0, truncation=20.0)


def test_hermitian_flag():
    assert self_quanto_put(1.0).is_hermitian
    assert ComplexMeasure.from_atoms([(1, 0.5 + 0.1j), (-1, 0.5 - 0.1j)]).is_hermitian
    assert not ComplexMeasure.from_atoms([(1, 1.0)]).is_hermitian


def test_total_variation():
    mu = ComplexMeasure.from_atoms([(1, 3 + 4j), (2, -1)])
    assert mu.total_variation == pytest.approx(6.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-2, 2), st.floats(-2, 2)), min_size=1, max_size=6),
       st.floats(-10, 10))
def test_hermitian_atoms_give_real_payoff(atoms, x):
    pairs = []
    for u, a, b in atoms:
        pairs += [(u, complex(a, b) / 2), (-u, complex(a, -b) / 2)]
    mu = ComplexMeasure.from_atoms(pairs)
    assert mu.is_hermitian
    val = mu.transform(x)
    assert abs(val.imag) <= 1e-12 * (1 + mu.total_variation)
    assert abs(val) <= mu.total_variation + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-3, 3))
def test_scaled_frequencies(factor, x):
    mu = ComplexMeasure.from_atoms([(1.0, 0.4), (-2.0, 0.3j)])
    assert abs(mu.scaled_frequencies(factor).transform(x) - mu.transform(factor * x)) < 1e-12


def test_quadrature_failure_on_unreachable_tolerance():
    mu = self_quanto_put(1.0)
    with pytest.raises(QuadratureFailure):
        mu.transform(0.0, tol=1e-15)


def test_invalid_measures():
    with pytest.raises(ValueError):
        ComplexMeasure(np.array([1.0, 2.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        ComplexMeasure(density=lambda u: u, lower=1.0, upper=0.0)
    with pytest.raises(ValueError):
        self_quanto_put(-1.0)


def test_config_parsing():
    mu = payoff_from_config({"payoff": "atoms [(1, 0.5), (-1, 0.5)]"})
    assert np.isclose(mu.transform(0.3), math.cos(0.3))
    sq = payoff_from_config({"payoff": "self_quanto_put K=1 truncation=1000"})
    assert sq.label == "self_quanto_put"
    for bad in ("atoms [(1,", "call K=1", "self_quanto_put strike=1", "self_quanto_put"):
        with pytest.raises(ConfigError):
            payoff_from_config({"payoff": bad})
