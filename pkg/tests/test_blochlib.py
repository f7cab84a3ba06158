"""The function zoo, derivative coefficients, norm estimates and the mini-language."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochlab import blochlib
from blochlab.blochlib import (
    cauchy_bound,
    conjugate_exponential,
    derivative_coefficients,
    lacunary,
    make_special,
    parse_function_spec,
)
from blochlab.core.hyperbolic import DISK, HALF_PLANE, quotient_values
from blochlab.errors import DomainError, ParseError

# -- oracles ---------------------------------------------------------------------------


def _special_taylor_oracle(a, order=3):
    """Taylor coefficients of b_a' at 0 by mpmath differentiation of an independent formula."""
    with mpmath.workdps(40):
        a = mpmath.mpf(a)
        c = mpmath.mpf(3) / 4 * mpmath.sqrt(3)
        f = lambda z: c * ((z + a) / (1 + a * z)) ** 2  # noqa: E731
        series = mpmath.taylor(f, 0, order + 1)
        # coefficient of z^(k+1) in b times (k+1) is q_k
        return [float((k + 1) * series[k + 1]) for k in range(order + 1)]


def _cauchy_oracle(k):
    with mpmath.workdps(40):
        k = mpmath.mpf(k)
        return float((k + 2) / 2 * ((k + 2) / k) ** (k / 2))


def _gap_sum(z, base, K):
    return sum(z ** (base**k) for k in range(K + 1))


# -- special functions -------------------------------------------------------------------


@pytest.mark.parametrize(
    "a, q0, q1",
    [(0.0, 0.0, 2.598076), (1 / math.sqrt(3), 1.0, 0.0), (0.2, 0.498831, 2.194855)],
)
def test_special_coefficient_examples(a, q0, q1):
    b = make_special(a)
    assert b.coefficients[0].real == pytest.approx(q0, abs=5e-7)
    assert b.coefficients[1].real == pytest.approx(q1, abs=5e-7)
    oracle = _special_taylor_oracle(a)
    assert b.coefficients[0].real == pytest.approx(oracle[0], abs=1e-12)
    assert b.coefficients[1].real == pytest.approx(oracle[1], abs=1e-12)


@pytest.mark.parametrize("a", [-0.1, 1.0, 1.2])
def test_special_rejects_parameters_outside_range(a):
    with pytest.raises(DomainError):
        make_special(a)


@pytest.mark.parametrize("a", [round(0.1 * i, 1) for i in range(10)])
def test_special_functions_lie_in_the_unit_ball(a):
    b = make_special(a)
    r = np.concatenate([np.linspace(0, 0.999, 400), 1 - np.logspace(-3, -8, 40)])
    th = np.linspace(0, 2 * np.pi, 721)
    z = r[:, None] * np.exp(1j * th)[None, :]
    assert np.max(quotient_values(b, z)) <= 1 + 1e-6


def test_special_norm_estimate_is_close_to_one():
    est = blochlib.bloch_norm_estimate(make_special(0.3))
    assert 0.9 < est <= 1.0001


def test_special_coefficients_satisfy_q0_bound():
    for a in np.linspace(0, 0.999, 500):
        q0, _ = blochlib.special_coefficients(a)
        assert abs(q0) <= 1 + 1e-12


# -- Cauchy bounds -------------------------------------------------------------------------


@pytest.mark.parametrize("k, value", [(1, 2.598076), (2, 4.0), (3, 5.379143)])
def test_cauchy_bound_examples(k, value):
    # the quoted six decimals are truncated, not rounded (5.3791435...)
    assert cauchy_bound(k) == pytest.approx(value, abs=1e-6)
    assert cauchy_bound(k) == pytest.approx(_cauchy_oracle(k), rel=1e-14)


def test_cauchy_bound_rejects_k_zero():
    with pytest.raises(DomainError):
        cauchy_bound(0)
    with pytest.raises(DomainError):
        cauchy_bound(1.5)


def test_cauchy_bound_grows_like_e_over_two_times_k():
    assert cauchy_bound(200) / 200 == pytest.approx(math.e / 2, rel=0.01)


@pytest.mark.parametrize("a", [0.0, 0.2, 0.5, 0.9])
def test_special_coefficients_respect_cauchy_estimates(a):
    q = derivative_coefficients(make_special(a), 12, radius=0.5)
    for k in range(1, 13):
        assert abs(q[k]) <= cauchy_bound(k) + 1e-9


# -- derivative coefficients -----------------------------------------------------------


def test_coefficients_of_simple_polynomials():
    q = derivative_coefficients(blochlib.polynomial([0, 0, 1]), 5)
    assert np.allclose(q.coefficients, [0, 2, 0, 0, 0, 0], atol=1e-13)
    q = derivative_coefficients(blochlib.identity(), 4)
    assert np.allclose(q.coefficients, [1, 0, 0, 0, 0], atol=1e-13)


def test_coefficients_match_closed_form_for_special():
    b = make_special(0.2)
    q = derivative_coefficients(b, 1)
    assert abs(q[0] - b.coefficients[0]) <= 1e-10
    assert abs(q[1] - b.coefficients[1]) <= 1e-10
    oracle = _special_taylor_oracle(0.2, order=3)
    q = derivative_coefficients(b, 3)
    assert np.allclose(q.coefficients.real, oracle, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    coeffs=st.lists(st.floats(-2, 2), min_size=2, max_size=8),
    r1=st.floats(0.21, 0.79),
    r2=st.floats(0.21, 0.79),
)
def test_coefficients_do_not_depend_on_the_radius(coeffs, r1, r2):
    b = blochlib.polynomial(coeffs)
    q1 = derivative_coefficients(b, 6, radius=r1).coefficients
    q2 = derivative_coefficients(b, 6, radius=r2).coefficients
    assert np.max(np.abs(q1 - q2)) <= 1e-8


def test_coefficient_radius_is_checked():
    with pytest.raises(DomainError):
        derivative_coefficients(blochlib.identity(), 3, radius=1.0)
    with pytest.raises(DomainError):
        derivative_coefficients(blochlib.logz(), 3)


# -- lacunary series ------------------------------------------------------------------------


def test_lacunary_examples():
    b = lacunary(2, 3)
    assert complex(b(0.5)) == pytest.approx(_gap_sum(0.5, 2, 3), abs=1e-15)
    assert complex(b(0.5)).real == pytest.approx(0.81640625, abs=1e-15)
    assert complex(b(-0.5)).real == pytest.approx(-0.5 + 0.25 + 0.0625 + 0.00390625, abs=1e-15)
    for base in (2, 3, 5):
        assert complex(lacunary(base, 4)(0.0)) == 0


def test_lacunary_defaults_and_errors():
    assert lacunary(2).meta["K"] == 40
    with pytest.raises(DomainError):
        lacunary(1, 3)
    with pytest.raises(DomainError):
        lacunary(2, 0)
    with pytest.raises(OverflowError):
        lacunary(2, 70)


@settings(max_examples=100, deadline=None)
@given(r=st.floats(0.0, 0.99), t=st.floats(0, 2 * math.pi), base=st.integers(2, 5))
def test_lacunary_matches_direct_summation(r, t, base):
    z = r * complex(math.cos(t), math.sin(t))
    K = 6
    b = lacunary(base, K)
    assert complex(b(z)) == pytest.approx(_gap_sum(z, base, K), abs=1e-12)
    d = sum(base**k * z ** (base**k - 1) for k in range(K + 1))
    assert complex(b.derivative(z)) == pytest.approx(d, rel=1e-10, abs=1e-10)


# -- derivative consistency across the zoo ----------------------------------------------------

ZOO = [
    blochlib.identity(),
    blochlib.polynomial([1, -2, 0.5j, 3]),
    blochlib.logmap(),
    make_special(0.35),
    lacunary(2, 8),
    blochlib.compose_automorphism(make_special(0.5), 0.3 - 0.2j, 1.0),
    blochlib.logz(),
    conjugate_exponential(make_special(0.3)),
    blochlib.to_disk(blochlib.logz()),
]


@pytest.mark.parametrize("b", ZOO, ids=lambda b: b.label)
def test_derivative_is_the_complex_derivative(b):
    rng = np.random.default_rng(7)
    if b.domain == DISK:
        z = 0.8 * np.sqrt(rng.uniform(0, 1, 50)) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
    else:
        z = rng.uniform(-1, 1, 50) + 1j * rng.uniform(0.2, 2, 50)
    errs = []
    for h in (1e-3, 1e-4):
        fd = (b(z + h) - b(z)) / h
        errs.append(np.max(np.abs(fd - b.derivative(z))))
    # first-order difference: the error falls with h
    assert errs[1] < 0.2 * errs[0] + 1e-9
    # central differences agree to many digits
    h = 1e-5
    cd = (b(z + h) - b(z - h)) / (2 * h)
    assert np.max(np.abs(cd - b.derivative(z)) / np.maximum(1, np.abs(cd))) < 1e-6


def test_declared_norm_bounds_hold_on_samples():
    for b in ZOO:
        if b.norm_bound is None:
            continue
        est = blochlib.bloch_norm_estimate(b, samples=2000)
        assert est <= b.norm_bound * (1 + 1e-9) + 1e-9


# -- norm estimates ---------------------------------------------------------------------------


def test_norm_estimate_examples():
    assert blochlib.bloch_norm_estimate(blochlib.identity()) == pytest.approx(1.0, abs=1e-9)
    assert blochlib.bloch_norm_estimate(blochlib.constant(3.0)) == 0.0
    # log(1/(1-z)) has norm 2, approached at the boundary only
    assert 1.9 < blochlib.bloch_norm_estimate(blochlib.logmap()) <= 2.0


def test_polynomial_norm_upper_bounds_the_estimate():
    rng = np.random.default_rng(3)
    for _ in range(5):
        dc = rng.normal(size=4) + 1j * rng.normal(size=4)
        coeffs = np.concatenate([[0], dc / np.arange(1, 5)])
        b = blochlib.polynomial(coeffs)
        assert blochlib.bloch_norm_estimate(b, samples=2000) <= blochlib.polynomial_norm_upper(dc)


# -- exponential conjugation ----------------------------------------------------------------


def test_conjugate_exponential_examples():
    c = conjugate_exponential(blochlib.constant(2.5))
    assert complex(c(0.3 + 0.7j)) == 2.5
    e = conjugate_exponential(blochlib.identity())
    assert e.domain == HALF_PLANE
    assert complex(e(1j)) == pytest.approx(math.exp(-2 * math.pi), rel=1e-14)
    assert complex(e(1j)).real == pytest.approx(0.00186744, abs=5e-9)
    assert complex(e.derivative(1j)) == pytest.approx(2j * math.pi * math.exp(-2 * math.pi), rel=1e-14)


def test_conjugate_exponential_is_periodic_and_keeps_quotients():
    b = make_special(0.4)
    e = conjugate_exponential(b)
    w = np.array([0.1 + 0.3j, 0.77 + 0.01j])
    assert np.allclose(e(w), e(w + 1))
    # the exponential map is a covering isometry up to the density scaling
    xi = np.exp(2j * np.pi * w)
    q_h = quotient_values(e, w)
    q_d = quotient_values(b, xi)
    ratio = (2 * w.imag * 2 * np.pi * np.abs(xi)) / (1 - np.abs(xi) ** 2)
    assert np.allclose(q_h, q_d * ratio)
    with pytest.raises(DomainError):
        conjugate_exponential(blochlib.logz())


# -- arithmetic ----------------------------------------------------------------------------


def test_scaling_and_sums():
    b = make_special(0.2)
    z = np.array([0.1, 0.3j])
    assert np.allclose((2 * b)(z), 2 * b(z))
    assert np.allclose((b + blochlib.identity()).derivative(z), b.derivative(z) + 1)
    assert np.allclose((b - 1.0)(z), b(z) - 1.0)
    assert (2 * b).norm_bound == 2.0
    with pytest.raises(DomainError):
        b + blochlib.logz()


# -- mini-language --------------------------------------------------------------------------


def test_parse_examples():
    b = parse_function_spec("special:0.2")
    assert b.coefficients[0].real == pytest.approx(0.498831, abs=5e-7)
    lac = parse_function_spec("lacunary:2")
    assert complex(lac(0.0)) == 0
    assert lac.meta == {"base": 2, "K": 40}
    assert parse_function_spec("lacunary:3:5").meta == {"base": 3, "K": 5}
    p = parse_function_spec("poly:0,1,1j")
    assert complex(p(2.0)) == pytest.approx(2 + 4j)
    assert parse_function_spec("logmap").domain == DISK
    assert parse_function_spec("logz").domain == HALF_PLANE
    assert parse_function_spec(" Special:0.5 ").meta["a"] == 0.5


@pytest.mark.parametrize(
    "spec, position",
    [
        ("special:1.5", 8),
        ("special:abc", 8),
        ("special:0.1j", 8),
        ("bessel:1", 0),
        ("lacunary:1", 9),
        ("lacunary:2:0", 11),
        ("lacunary:2:x", 11),
        ("lacunary:2:99", 9),
        ("poly:1,,2", 7),
        ("logz:3", 5),
    ],
)
def test_parse_errors_carry_positions(spec, position):
    with pytest.raises(ParseError) as info:
        parse_function_spec(spec)
    assert info.value.position == position


def test_labels_round_trip_through_the_parser():
    for spec in ("special:0.3", "lacunary:2:40", "poly:0,1,2", "logmap", "logz"):
        b = parse_function_spec(spec)
        assert parse_function_spec(b.label).label == b.label
