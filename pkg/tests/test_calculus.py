import numpy as np
import pytest

from fourierhedge import (NIG, CustomLevy, LevyTriplet, OUWrapper, Poisson, SCViolated,
                          TimeChangedBrownian, VarianceGamma, WienerLevy, check_sc, first_density,
                          mvt, second_density)
from fourierhedge.calculus import base_measure


def test_poisson_alpha_is_one():
    sc = check_sc(Poisson(1.0), 1.0)
    assert sc.satisfied and np.all(sc.alpha_seg == 1)


def test_zero_process():
    sc = check_sc(CustomLevy(LevyTriplet()), 1.0)
    assert sc.satisfied and sc.K_T == 0 and np.all(sc.alpha_seg == 0)
    assert mvt(sc, 0.5) == 0


def test_vg_alpha_from_derivatives(vg):
    # differentiating the exponent gives +2/3; the -2/3 substitution uses different derivative values
    sc = check_sc(vg, 1.0)
    assert sc.alpha(0.5) == pytest.approx(2 / 3, abs=1e-12)


def test_nig_alpha_matches_derivative_ratio():
    m = NIG(2.0, 1.0, 1.0, 0.5)
    a = (1j * m.psi_d1(1.0, 0.0) / m.psi_d2(1.0, 0.0)).real
    assert check_sc(m, 1.0).alpha(0.3) == pytest.approx(a, rel=1e-12)


def test_mvt_poisson():
    assert mvt(check_sc(Poisson(1.0), 2.0), 2.0) == pytest.approx(2.0)


def test_mvt_driftless_brownian(brownian):
    sc = check_sc(brownian, 1.0)
    assert sc.K_T == 0


@pytest.mark.parametrize("model", [Poisson(2.0), NIG(2.0, 1.0, 1.0, 0.3), VarianceGamma(2.0, 1.0, 1.0)],
                         ids=lambda m: m.name)
def test_levy_mvt_closed_form(model):
    d1, d2 = model.exponent_d1(0.0), model.exponent_d2(0.0)
    expect = 1.5 * (d1 * np.conj(d1)).real / -d2.real
    assert mvt(check_sc(model, 1.5), 1.5) == pytest.approx(expect, rel=1e-10)


def test_sc_violation_for_pure_drift():
    with pytest.raises(SCViolated) as info:
        check_sc(CustomLevy(LevyTriplet(b=1.0)), 1.0)
    assert info.value.reason
    assert not check_sc(CustomLevy(LevyTriplet(b=1.0)), 1.0, strict=False).satisfied


def test_sc_violation_on_frozen_clock():
    m = TimeChangedBrownian(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 1.0]),
                            np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 0.5]))
    with pytest.raises(SCViolated):
        check_sc(m, 1.0)


def test_ou_is_rejected():
    with pytest.raises(TypeError):
        check_sc(OUWrapper(1.0, Poisson(1.0)), 1.0)


def test_wiener_levy_piecewise_alpha():
    sc = check_sc(WienerLevy(Poisson(1.0), [0.0, 0.5, 1.0], [1.0, 2.0]), 1.0)
    assert sc.alpha(0.2) == pytest.approx(1.0) and sc.alpha(0.7) == pytest.approx(0.5)
    assert sc.K_T == pytest.approx(0.5 * 1 + 0.5 * 4 * 0.25)


@pytest.mark.parametrize("model", [Poisson(1.7), VarianceGamma(2.0, 1.0, 1.0), NIG(2.0, 1.0, 1.0)],
                         ids=lambda m: m.name)
def test_second_density(model):
    u = np.linspace(-6, 6, 25)
    sd = second_density(model, 0.3, u)
    assert np.all(np.abs(sd) <= 1 + 1e-12)
    assert second_density(model, 0.3, 0.0) == pytest.approx(1.0)


def test_second_density_poisson_and_gaussian(gaussian):
    assert second_density(Poisson(3.0), 0.2, 1.3) == pytest.approx(np.exp(1.3j))
    assert second_density(gaussian, 0.2, 4.0) == pytest.approx(1.0)


@pytest.mark.parametrize("model", [Poisson(1.7), VarianceGamma(2.0, 1.0, 1.0), NIG(2.0, 1.0, 1.0, 0.2)],
                         ids=lambda m: m.name)
def test_first_density_integrates_to_psi_d1(model):
    u = np.array([-2.0, 0.0, 0.7, 3.0])
    # density is taken against the variance measure d(-psi''(0))
    assert np.allclose(model.variance(0.8) * first_density(model, 0.4, u), model.psi_d1(0.8, u), atol=1e-8)


def test_base_measure_is_variance(vg):
    bm = base_measure(vg, 2.0)
    assert bm.total_mass == pytest.approx(vg.variance(2.0))
    assert bm(1.0) == pytest.approx(vg.variance(1.0))
