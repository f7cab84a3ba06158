"""Variance, integral means, LIL statistic and ball averages."""

import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochlab import blochlib, spectra
from blochlab.core.hyperbolic import HyperbolicPoint, ball_points, distance, hyperbolic_radius, quotient_values
from blochlab.errors import DomainError

INV_LOG2 = 1.0 / math.log(2.0)
R04 = hyperbolic_radius(0.4)


# -- oracles -------------------------------------------------------------------------


def _circle_lacunary_oracle(r, K=40):
    # mean of |sum z^(2^k)|^2 on |z| = r is sum r^(2 2^k) by orthogonality
    with mpmath.workdps(40):
        r = mpmath.mpf(r)
        s = mpmath.fsum(r ** (2 * 2**k) for k in range(K + 1))
        return float(r * s / abs(mpmath.log(1 - r)))


def _strip_lacunary_oracle(h, K=40):
    # for b(w) = sum e^(2 pi i 2^k w), the x-mean of |2 y b'|^2 is
    # 16 pi^2 y^2 sum 4^k e^(-4 pi 2^k y); the y-integral is closed form
    with mpmath.workdps(40):
        h = mpmath.mpf(h)
        tot = 0
        for k in range(K + 1):
            c = 4 * mpmath.pi * 2**k
            F = lambda y: -mpmath.exp(-c * y) * (c * y + 1) / c**2  # noqa: E731
            tot += 16 * mpmath.pi**2 * 4**k * (F(1) - F(h))
        return float(tot / abs(mpmath.log(h)))


# -- variance on circles -------------------------------------------------------------


def test_variance_circle_of_zero_is_zero():
    est = spectra.variance_circle(blochlib.constant(0.0), [0.5, 0.9, 0.99])
    assert est.per_step == [0.0, 0.0, 0.0]
    assert est.value == 0.0 and est.method == "circle" and est.converged


def test_variance_circle_of_identity():
    # per-step (1/(2 pi L)) * 2 pi r * r^2 = r^3 / |log(1-r)|, tending to 0
    rs = [0.5, 0.9, 0.999, 1 - 1e-8]
    est = spectra.variance_circle(blochlib.identity(), rs)
    for r, v in zip(rs, est.per_step):
        assert v == pytest.approx(r**3 / abs(math.log1p(-r)), rel=1e-13)
    assert est.per_step[-1] < est.per_step[1]


def test_variance_circle_lacunary_matches_coefficient_sum():
    rs = [0.9, 1 - 1e-4, 1 - 1e-8]
    est = spectra.variance_circle(blochlib.lacunary(2), rs)
    assert est.converged
    for r, v in zip(rs, est.per_step):
        assert v == pytest.approx(_circle_lacunary_oracle(r), rel=1e-10)
    assert abs(est.value / INV_LOG2 - 1) < 0.08


def test_variance_estimate_is_the_last_step_and_non_negative():
    est = spectra.variance_circle(blochlib.make_special(0.3), [0.9, 0.99, 0.999])
    assert est.value == est.per_step[-1]
    assert all(v >= 0 for v in est.per_step)
    rows = est.csv_rows()
    assert rows[0] == ("parameter", "value") and len(rows) == 4
    doc = json.loads(json.dumps(est.to_dict()))
    assert doc["method"] == "circle" and doc["per_step"] == est.per_step


def test_variance_circle_flags_non_convergence():
    est = spectra.variance_circle(blochlib.logmap(), [1 - 1e-9], tol=1e-14, max_nodes=83 * 2**5)
    assert not est.converged


@pytest.mark.parametrize("rs", [[], [0.0], [1.0], [0.5, 1.2]])
def test_variance_circle_rejects_bad_radii(rs):
    with pytest.raises(DomainError):
        spectra.variance_circle(blochlib.identity(), rs)


def test_variance_methods_check_the_domain():
    with pytest.raises(DomainError):
        spectra.variance_circle(blochlib.logz(), [0.5])
    with pytest.raises(DomainError):
        spectra.variance_strip(blochlib.identity(), 0.1)
    with pytest.raises(DomainError):
        spectra.variance_strip(blochlib.logz(), 1.0)


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.01, 10.0), a=st.floats(0.0, 0.9))
def test_variance_scales_by_c_squared(c, a):
    b = blochlib.make_special(a)
    rs = [0.5, 0.99, 0.9999]
    base = spectra.variance_circle(b, rs)
    scaled = spectra.variance_circle(b * c, rs)
    for v, w in zip(base.per_step, scaled.per_step):
        assert w == pytest.approx(c * c * v, rel=1e-12, abs=1e-300)


def test_variance_scaling_by_powers_of_two_is_bitwise():
    b = blochlib.make_special(0.3)
    rs = [0.5, 0.99, 0.9999]
    base = spectra.variance_circle(b, rs)
    assert spectra.variance_circle(b * 2.0, rs).per_step == [4 * v for v in base.per_step]
    assert spectra.variance_circle(b * 0.5, rs).per_step == [v / 4 for v in base.per_step]


# -- variance on strips --------------------------------------------------------------


def test_variance_strip_of_constant_is_zero():
    est = spectra.variance_strip(blochlib.constant(2.0, "half-plane"), [0.1, 1e-4])
    assert est.per_step == [0.0, 0.0]


@pytest.mark.parametrize("h", [0.5, 1e-2, 1e-4])
def test_variance_strip_of_identity_matches_closed_form(h):
    # |2 y b'|^2 = 4 y^2, so int_h^1 4 y dy / |log h| = 2 (1 - h^2) / |log h|
    est = spectra.variance_strip(blochlib.identity("half-plane"), h)
    assert est.value == pytest.approx(2 * (1 - h * h) / abs(math.log(h)), rel=1e-10)


def test_variance_strip_identity_example_value():
    v = spectra.variance_strip(blochlib.identity("half-plane"), 1e-4).value
    assert v == pytest.approx(0.21714723878, abs=1e-10)


@pytest.mark.parametrize("h", [1e-2, 1e-4, 1e-6])
def test_variance_strip_lacunary_matches_series_oracle(h):
    est = spectra.variance_strip(blochlib.conjugate_exponential(blochlib.lacunary(2)), h)
    assert est.converged
    assert est.value == pytest.approx(_strip_lacunary_oracle(h), rel=1e-7)


def test_strip_lacunary_approaches_inverse_log_two_slowly():
    # the exact finite-depth values rise towards 1/log 2 like 1 - c/|log h|
    vals = [_strip_lacunary_oracle(h) for h in (1e-4, 1e-6, 1e-8, 1e-12)]
    assert all(u < v < INV_LOG2 for u, v in zip(vals, vals[1:]))
    assert abs(vals[2] / INV_LOG2 - 1) < 0.10


@pytest.mark.parametrize(
    "name, depth",
    [("special:0.3", 1e-3), ("special:0.3", 1e-4), ("special:0.3", 1e-6), ("lacunary:2", 1e-6)],
)
def test_strip_and_circle_variances_agree(name, depth):
    b = blochlib.parse_function_spec(name)
    circle = spectra.variance_circle(b, [1 - depth]).value
    strip = spectra.variance_strip(blochlib.conjugate_exponential(b), depth).value
    assert abs(strip / circle - 1) < 0.10


# -- integral means ------------------------------------------------------------------


def test_integral_means_at_tau_zero():
    assert spectra.integral_means(blochlib.make_special(0.3), 0, [0.9, 0.999]) == 0.0


def test_integral_means_of_zero_function():
    r = 1 - 1e-6
    v = spectra.integral_means(blochlib.constant(0.0), 1.0, [r])
    assert v == pytest.approx(math.log(2 * math.pi * r) / abs(math.log1p(-r)), rel=1e-12)
    assert v < 0.14


def test_integral_means_profile_reports_every_radius():
    prof = spectra.integral_means_profile(blochlib.make_special(0.3), 0.5, [0.5, 0.9, 0.99])
    assert prof.parameters == [0.5, 0.9, 0.99] and len(prof.per_step) == 3
    assert prof.value == prof.per_step[-1] and prof.converged
    assert len(prof.csv_rows()) == 4


@pytest.mark.parametrize("r", [0.9, 1 - 1e-4])
def test_integral_means_log_map_closed_form(r):
    # int_{|z|=r} |1-z|^-2 |dz| = 2 pi r / (1 - r^2)
    v = spectra.integral_means(blochlib.logmap(), 2, [r])
    exact = math.log(2 * math.pi * r / ((1 - r) * (1 + r))) / abs(math.log1p(-r))
    assert v == pytest.approx(exact, rel=1e-6)


@pytest.mark.slow
def test_integral_means_log_map_near_one():
    r = 1 - 1e-6
    v = spectra.integral_means(blochlib.logmap(), 2, [r])
    exact = math.log(2 * math.pi * r / ((1 - r) * (1 + r))) / abs(math.log1p(-r))
    assert v == pytest.approx(exact, rel=1e-6)
    # the (1-r)^-1 growth gives 1, up to the log(pi)/|log(1-r)| offset
    assert abs(v - 1) < 0.1


def test_integral_means_survives_huge_exponents():
    v = spectra.integral_means(blochlib.logmap(), 800, [1 - 1e-3])
    assert math.isfinite(v)


@pytest.mark.parametrize("name", ["special:0.3", "lacunary:2"])
@pytest.mark.parametrize("tau", [0.1, 0.1j, 0.1 * (1 + 1j) / math.sqrt(2)])
def test_small_tau_spectrum_tracks_the_variance(name, tau):
    # at finite r the circumference term log(2 pi r)/|log(1-r)| is removed
    # (it is the tau = 0 value) and b is centred, so only the quadratic
    # term of log mean e^{Re tau b} ~ |tau|^2 mean|b|^2 / 4 remains
    b = blochlib.parse_function_spec(name)
    c = b - blochlib.constant(complex(b(0.0)))
    r = 1 - 1e-4
    base = spectra.integral_means_profile(c, 0, [r]).value
    beta = (spectra.integral_means(c, tau, [r]) - base) * 4 / abs(tau) ** 2
    var = spectra.variance_circle(c, [r]).value
    assert 0.5 * var <= beta <= 2 * var


# -- LIL statistic -------------------------------------------------------------------


def _lil_denominator(r):
    L = -math.log1p(-r)
    return math.sqrt(L * math.log(math.log(L)))


def test_lil_statistic_examples():
    r = 1 - 1e-6
    assert spectra.lil_statistic(blochlib.constant(0.0), 0.3, r) == 0.0
    assert spectra.lil_statistic(blochlib.constant(3 - 4j), 0.3, r) == pytest.approx(5 / _lil_denominator(r), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0, 2 * math.pi), r=st.floats(0.95, 1 - 1e-12))
def test_lil_statistic_is_linear_in_b(theta, r):
    b = blochlib.make_special(0.3)
    assert spectra.lil_statistic(b * 2.0, theta, r) == 2 * spectra.lil_statistic(b, theta, r)


@pytest.mark.parametrize("r", [0.5, 1 - math.exp(-math.e), 0.0, 1.0])
def test_lil_statistic_rejects_small_radii(r):
    with pytest.raises(DomainError):
        spectra.lil_statistic(blochlib.identity(), 0.0, r)


# -- ball averages -------------------------------------------------------------------


def test_alpha_average_of_constant_is_zero():
    assert spectra.alpha_average(blochlib.constant(1.5), None, R04) == 0.0


def test_alpha_average_of_identity_is_one_minus_r_squared():
    assert spectra.alpha_average(blochlib.identity(), HyperbolicPoint(0j), R04) == pytest.approx(0.84, abs=1e-12)
    for r in (0.1, 0.7):
        assert spectra.alpha_average(blochlib.identity(), 0j, hyperbolic_radius(r)) == pytest.approx(1 - r * r, abs=1e-12)


def test_alpha_average_is_automorphism_invariant():
    b = blochlib.make_special(0.3)
    c = 0.2 - 0.4j
    moved = blochlib.compose_automorphism(b, c, 0.0)
    from blochlab.core.hyperbolic import disk_automorphism

    phi, _ = disk_automorphism(c, 0.0)
    v0 = spectra.alpha_average(b, HyperbolicPoint(complex(phi(0.3j))), 1.0)
    v1 = spectra.alpha_average(moved, HyperbolicPoint(0.3j), 1.0)
    assert v0 == pytest.approx(v1, rel=1e-6)


def test_alpha_average_on_the_half_plane():
    # log z has quotient 2y/|z|; at the centre i its ball average is the disk
    # average of the pulled-back function, which the polar rule resolves
    v = spectra.alpha_average(blochlib.logz(), HyperbolicPoint(1j, "half-plane"), 0.5)
    assert 0 < v <= 4.0


def test_special_function_ball_average_is_below_the_bound():
    v = spectra.alpha_average(blochlib.make_special(0.3), None, R04)
    assert 0.0 <= v <= 0.8998


@pytest.mark.parametrize("name", ["poly:0,1", "special:0.3", "special:0.57", "lacunary:2", "poly:0,0.5,0.25"])
def test_alpha_average_is_below_the_sampled_sup_quotient(name):
    b = blochlib.parse_function_spec(name)
    for center, R in ((0j, R04), (0.5 + 0.2j, 1.0)):
        v = spectra.alpha_average(b, center, R)
        q = quotient_values(b, ball_points(center, R, "disk", 80, 160))
        assert v <= float(np.max(q)) ** 2 + 1e-6


def test_alpha_average_errors():
    with pytest.raises(DomainError):
        spectra.alpha_average(blochlib.identity(), None, 0.0)
    with pytest.raises(DomainError):
        spectra.alpha_average(blochlib.identity(), HyperbolicPoint(1j, "half-plane"), 1.0)
    with pytest.raises(DomainError):
        spectra.alpha_average(blochlib.identity(), None, 80.0)


def test_alpha_sup_estimate_brackets():
    v = spectra.alpha_sup_estimate(R04, 24, seed=7)
    assert 0.84 <= v <= 0.8998


def test_alpha_sup_estimate_is_deterministic():
    a = spectra.alpha_search(R04, 12, seed=3)
    b = spectra.alpha_search(R04, 12, seed=3)
    assert a.value == b.value and a.values == b.values and a.label == b.label
    assert a.evaluated == 12


def test_alpha_sup_estimate_needs_a_budget():
    with pytest.raises(DomainError):
        spectra.alpha_sup_estimate(R04, 0)


# -- small quotient balls ------------------------------------------------------------


def test_small_quotient_ball_for_identity():
    w = spectra.small_quotient_ball_search(blochlib.identity(), 0j, 2.0)
    assert w.found and w.radius > 0
    assert 1 - abs(w.point) ** 2 < 0.5
    assert float(distance(0j, w.point)) + w.radius <= 2.0 + 1e-9
    sub = quotient_values(blochlib.identity(), ball_points(w.point, w.radius, "disk", 30, 60))
    assert np.all(sub < 0.5)


def test_small_quotient_ball_near_the_zero_of_a_special_function():
    b = blochlib.make_special(0.3)
    assert abs(complex(b.derivative(-0.3))) == 0.0
    w = spectra.small_quotient_ball_search(b, 0j, 1.0)
    assert w.found
    assert float(distance(w.point, -0.3)) < w.radius


def test_small_quotient_ball_for_constant_is_the_whole_ball():
    w = spectra.small_quotient_ball_search(blochlib.constant(1.0), 0.2, 1.0)
    assert w.found and w.point == 0.2 and w.radius == 1.0 and w.max_quotient == 0.0


def test_small_quotient_ball_reports_missing_witness():
    # logmap has quotient |1 - |z|^2| / |1 - z| > 1/2 near 0; a tiny ball has no witness
    w = spectra.small_quotient_ball_search(blochlib.logmap(), 0j, 0.05)
    assert not w.found and "no witness at resolution" in w.message
