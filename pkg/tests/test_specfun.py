import math

import mpmath as mp
import numpy as np
import pytest

from alsm import specfun as sf
from alsm.ald import ALParams, al_pdf
from alsm.errors import DomainError, QuadratureError

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# -- generalized exponential integral ---------------------------------------

def test_expint_order_zero_is_exp():
    assert sf.gen_exp_integral(0.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_expint_classical_e1():
    assert sf.gen_exp_integral(1.0, 1.0) == pytest.approx(0.21938393440, abs=1e-11)


def test_expint_real_order_against_quadrature():
    ref = float(mp.quad(lambda t: t ** -2.5 * mp.exp(-0.7 * t), [1, 2, mp.inf]))
    assert rel(sf.gen_exp_integral(2.5, 0.7), ref) < 1e-12


@pytest.mark.parametrize("nu", [-2.5, -1.0, 0.0, 0.3, 1.0, 1.5, 2.5, 7.0, 12.3, 40.0])
@pytest.mark.parametrize("z", [1e-6, 0.01, 0.5, 1.0, 3.0, 30.0, 300.0])
def test_expint_matches_mpmath(nu, z):
    ref = mp.expint(nu, z) if nu != math.floor(nu) or nu > 0 else mp.mpf(z) ** (nu - 1) * mp.gammainc(1 - nu, z)
    assert rel(sf.gen_exp_integral(nu, z), float(ref)) < 1e-12


def test_expint_domain():
    with pytest.raises(DomainError):
        sf.gen_exp_integral(1.0, 0.0)


# -- incomplete gamma --------------------------------------------------------

@pytest.mark.parametrize("s", [-3.5, -2.0, -0.5, 0.0, 0.5, 1.0, 2.0, 7.5])
@pytest.mark.parametrize("x", [1e-4, 0.3, 1.0, 5.0, 50.0])
def test_upper_gamma_matches_mpmath(s, x):
    assert rel(sf.upper_incomplete_gamma(s, x), float(mp.gammainc(s, x))) < 1e-12


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 3.0, 10.0])
def test_upper_gamma_at_zero_is_gamma(s):
    assert rel(sf.upper_incomplete_gamma(s, 0.0), math.gamma(s)) < 1e-14


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 5.0, 10.0])
@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
def test_lower_plus_upper_is_gamma(s, x):
    tot = sf.lower_incomplete_gamma(s, x) + sf.upper_incomplete_gamma(s, x)
    assert rel(tot, math.gamma(s)) < 1e-12


def test_upper_gamma_nonpositive_order_at_zero():
    with pytest.raises(DomainError):
        sf.upper_incomplete_gamma(-1.0, 0.0)


def test_chi_square_survival():
    # chi-square(1) survival at 4 and chi-square(2) survival at 6
    assert sf.regularized_gamma_q(0.5, 2.0) == pytest.approx(0.0455002638963584, rel=1e-12)
    assert sf.regularized_gamma_q(1.0, 3.0) == pytest.approx(math.exp(-3.0), rel=1e-14)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("z", [0.2, 1.0, 4.0, 25.0])
def test_misra_function_identity(m, z):
    lhs = sf.misra_phi(m, z)
    rhs = z ** -(m + 1) * sf.upper_incomplete_gamma(m + 1, z)
    assert rel(lhs, rhs) < 1e-12
    assert rel(lhs, float(mp.quad(lambda t: t**m * mp.exp(-z * t), [1, mp.inf]))) < 1e-12


# -- digamma and Bessel K ----------------------------------------------------

@pytest.mark.parametrize("x", [1e-3, 0.5, 1.0, 2.0, 13.7, 1e4])
def test_digamma(x):
    assert rel(sf.digamma(x), float(mp.digamma(x))) < 1e-13


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.3, 4.0])
@pytest.mark.parametrize("x", [0.05, 1.0, 10.0, 200.0])
def test_bessel_k(nu, x):
    assert rel(sf.bessel_k(nu, x), float(mp.besselk(nu, x))) < 1e-12
    assert sf.bessel_k(nu, x) == pytest.approx(sf.bessel_k(-nu, x), rel=1e-14)


def test_special_function_domains():
    for f, args in [(sf.digamma, (0.0,)), (sf.bessel_k, (1.0, 0.0)), (sf.misra_phi, (1, 0.0)),
                    (sf.lower_incomplete_gamma, (0.0, 1.0)), (sf.regularized_gamma_q, (1.0, -1.0))]:
        with pytest.raises(DomainError):
            f(*args)


# -- agreement with the quadrature of each defining integral ------------------

_DEFINING = [
    ("E", lambda nu, z: sf.gen_exp_integral(nu, z), lambda nu, z: (lambda t: t**-nu * math.exp(-z * t), 1.0, math.inf)),
    ("G", lambda s, x: sf.upper_incomplete_gamma(s, x), lambda s, x: (lambda t: t ** (s - 1) * math.exp(-t), x, math.inf)),
    ("g", lambda s, x: sf.lower_incomplete_gamma(s, x), lambda s, x: (lambda t: t ** (s - 1) * math.exp(-t), 0.0, x)),
    ("K", lambda nu, x: sf.bessel_k(nu, x),
     lambda nu, x: (lambda t: math.exp(-x * math.cosh(t)) * math.cosh(nu * t), 0.0, 12.0)),
]


@pytest.mark.parametrize("name,func,integral", _DEFINING, ids=[d[0] for d in _DEFINING])
def test_twenty_point_quadrature_agreement(name, func, integral):
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = float(rng.uniform(0.5, 4.0))
        b = float(rng.uniform(0.2, 6.0))
        f, lo, hi = integral(a, b)
        ref = sf.adaptive_quadrature(f, lo, hi, sf.QuadratureConfig(1e-14, 1e-13, 400))
        assert rel(func(a, b), ref) < 1e-8


# -- adaptive quadrature -----------------------------------------------------

def test_quadrature_normal_density():
    val = sf.adaptive_quadrature(lambda t: math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi), -math.inf, math.inf)
    assert abs(val - 1.0) < 1e-10


def test_quadrature_exponential():
    assert sf.adaptive_quadrature(lambda t: math.exp(-t), 0.0, math.inf) == pytest.approx(1.0, abs=1e-10)


def test_quadrature_al_density():
    p = ALParams(0.3, 2.0, 0.7)
    val = sf.adaptive_quadrature(lambda t: float(al_pdf(t, p)), -math.inf, math.inf)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_quadrature_failure_carries_estimate():
    cfg = sf.QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=2)
    with pytest.raises(QuadratureError) as info:
        sf.adaptive_quadrature(lambda t: math.sin(60.0 * t) * math.exp(-t), 0.0, 20.0, cfg)
    assert math.isfinite(info.value.estimate)


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        sf.QuadratureConfig(abs_tol=0.0)


# -- truncated gamma expectations --------------------------------------------

def test_trunc_gamma_untruncated_examples():
    m, lg, inv = sf.trunc_gamma_expectations(2.0, 1.0, 0.0, math.inf)
    assert m == pytest.approx(2.0, rel=1e-12)
    assert lg == pytest.approx(float(mp.digamma(2)), rel=1e-10)
    assert inv == pytest.approx(1.0, rel=1e-10)


@pytest.mark.parametrize("shape,rate", [(1.5, 0.3), (2.0, 1.0), (7.0, 4.0), (30.0, 0.5)])
def test_trunc_gamma_untruncated_closed_forms(shape, rate):
    m, lg, inv = sf.trunc_gamma_expectations(shape, rate, 0.0, math.inf)
    assert rel(m, shape / rate) < 1e-10
    assert abs(lg - (float(mp.digamma(shape)) - math.log(rate))) < 1e-10
    assert rel(inv, rate / (shape - 1.0)) < 1e-10


@pytest.mark.parametrize("shape,rate,lo,hi", [(2.0, 3.0, 1.0, math.inf), (1.7, 2.0, 0.0, 1.0),
                                              (3.0, 0.5, 0.4, 2.5), (1.2, 40.0, 1.0, math.inf)])
def test_trunc_gamma_against_mpmath(shape, rate, lo, hi):
    mp_hi = mp.inf if math.isinf(hi) else hi
    dens = lambda w: w ** (shape - 1) * mp.exp(-rate * w)  # noqa: E731
    pts = [lo, mp_hi] if math.isinf(hi) else [lo, (lo + hi) / 2, hi]
    z = mp.quad(dens, pts)
    ref = (mp.quad(lambda w: w * dens(w), pts) / z, mp.quad(lambda w: mp.log(w) * dens(w), pts) / z,
           mp.quad(lambda w: dens(w) / w, pts) / z)
    got = sf.trunc_gamma_expectations(shape, rate, lo, hi)
    for g, r in zip(got, ref):
        assert abs(g - float(r)) < 1e-9 * max(1.0, abs(float(r)))


def test_trunc_gamma_inverse_mean_diverges():
    assert sf.trunc_gamma_expectations(0.8, 1.0, 0.0, 1.0)[2] == math.inf


def test_trunc_gamma_no_mass():
    with pytest.raises(DomainError):
        sf.trunc_gamma_expectations(2.0, 1.0, 1000.0, 1001.0)


# -- private log-space helpers -----------------------------------------------

@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 3.0, 10.0, 200.0])
def test_log_lower_gamma_scaled(s):
    ys = [0.0, 1e-8, 0.3, 5.0, 60.0, 1e3]
    got = sf._log_lower_gamma_scaled(s, ys)
    for y, g in zip(ys, got):
        ref = -mp.log(s) if y == 0 else mp.log(mp.gammainc(s, 0, y)) - s * mp.log(y)
        assert abs(g - float(ref)) < 1e-12 * max(1.0, abs(float(ref)))


def _kernel_reference(alpha, rate, lo, hi):
    # exact incomplete-gamma forms; d/d alpha of log-normalizer gives E log W
    def log_norm(a):
        a = mp.mpf(a)
        if hi == 1.0:
            return mp.log(mp.gammainc(a, 0, rate)) - a * mp.log(rate)
        return mp.log(mp.gammainc(a, rate, mp.inf)) - a * mp.log(rate)

    ln = log_norm(alpha)
    return float(ln), float(mp.exp(log_norm(alpha + 1) - ln)), float(mp.diff(log_norm, alpha))


@pytest.mark.parametrize("alpha,rate,lo,hi", [
    (3.0, 0.5, 0.0, 1.0), (1.1, 1e-4, 0.0, 1.0), (25.0, 80.0, 0.0, 1.0), (0.05, 3.0, 0.0, 1.0),
    (-0.5, 2.0, 1.0, math.inf), (-2.0, 1e-3, 1.0, math.inf), (-9.0, 50.0, 1.0, math.inf),
])
def test_kernel_moments_against_exact(alpha, rate, lo, hi):
    got = sf._log_gamma_kernel_moments(alpha, rate, lo, hi)
    ref = _kernel_reference(alpha, rate, lo, hi)
    for g, r in zip(got, ref):
        assert abs(float(g[0]) - r) < 1e-10 * max(1.0, abs(r))
