import math

import pytest
from scipy.integrate import quad as scipy_quad

from dft.analysis.gates import after_prob, before_prob, cdf_prob, csp_prob, wsp_prob
from dft.distributions import dormant_variant, exponential, fresh_activation, memoryless_activation, weibull

E = math.e


def test_cdf_prob():
    assert cdf_prob(exponential(1.0), 1.0).value == pytest.approx(1 - 1 / E, abs=1e-12)
    with pytest.raises(ValueError):
        cdf_prob(exponential(1.0), -1.0)


def test_after_prob_closed_form(quad):
    value = after_prob(exponential(1.0), exponential(2.0), 1.0, quad).value
    expected = (1 - math.exp(-2)) - (2 / 3) * (1 - math.exp(-3))
    assert value == pytest.approx(expected, abs=1e-9)
    assert value == pytest.approx(0.2311894, abs=1e-7)


def test_after_prob_at_zero(quad):
    assert after_prob(exponential(1.0), exponential(2.0), 0.0, quad).value == 0.0


def test_iid_race_is_even(quad):
    lam = 0.5
    value = after_prob(exponential(lam), exponential(lam), 50 / lam, quad).value
    assert value == pytest.approx(0.5, abs=1e-6)


def test_before_prob_race(quad):
    x, y = exponential(1.0), exponential(2.0)
    assert before_prob(x, y, 50.0, quad).value == pytest.approx(1 / 3, abs=1e-6)
    assert before_prob(x, y, 0.0, quad).value == 0.0
    total = before_prob(x, y, 60.0, quad).value + before_prob(y, x, 60.0, quad).value
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_partition_identity(quad, t):
    x, y = weibull(1.5, 1.2), exponential(0.7)
    total = before_prob(x, y, t, quad).value + after_prob(y, x, t, quad).value
    assert total == pytest.approx(x.cdf(t), abs=1e-8)


def test_csp_erlang(quad):
    main = exponential(1.0)
    spare = memoryless_activation(exponential(1.0))
    assert csp_prob(main, spare, 1.0, quad).value == pytest.approx(1 - 2 / E, abs=1e-9)
    assert csp_prob(main, spare, 0.0, quad).value == 0.0


def test_csp_instant_spare_tends_to_main(quad):
    main = exponential(1.0)
    spare = memoryless_activation(exponential(1e4))
    value = csp_prob(main, spare, 1.0, quad).value
    assert value == pytest.approx(1 - 1 / E, abs=1e-3)


def test_csp_fresh_weibull_matches_scipy(quad):
    main, active = weibull(2.0, 1.0), weibull(1.5, 2.0)
    t = 1.7
    value = csp_prob(main, fresh_activation(active), t, quad).value
    reference, _ = scipy_quad(lambda v: main.pdf(v) * active.cdf(t - v), 0.0, t, epsabs=1e-13)
    assert value == pytest.approx(reference, abs=1e-9)


def test_wsp_full_dormancy_is_hot(quad):
    law = exponential(1.0)
    value = wsp_prob(law, memoryless_activation(law), dormant_variant(law, 1.0), 1.0, quad).value
    assert value == pytest.approx((1 - 1 / E) ** 2, abs=1e-9)


def test_wsp_tiny_dormancy_is_cold(quad):
    main, law = exponential(1.0), exponential(1.0)
    active = memoryless_activation(law)
    warm = wsp_prob(main, active, dormant_variant(law, 1e-6), 1.0, quad).value
    cold = csp_prob(main, active, 1.0, quad).value
    assert warm == pytest.approx(cold, abs=1e-4)


def test_wsp_at_zero(quad):
    law = exponential(1.0)
    assert wsp_prob(law, memoryless_activation(law), dormant_variant(law, 0.5), 0.0, quad).value == 0.0


def test_wsp_scenarios_add_up(quad):
    main, law = exponential(1.0), exponential(2.0)
    dormant = dormant_variant(law, 0.3)
    active = memoryless_activation(law)
    t = 1.3
    total = wsp_prob(main, active, dormant, t, quad).value
    activated = csp_prob(main, active, t, quad, dormant=dormant).value
    dormant_first = after_prob(dormant, main, t, quad).value
    assert total == pytest.approx(activated + dormant_first, abs=1e-9)
