"""Method-of-moments starting values."""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from ..ald import ALParams
from ..errors import MomentDoesNotExist
from ..family import ALSMParams, alsm_moments, make_mixing

__all__ = ["DEFAULT_THETA", "default_init", "sample_moments", "mm_beta", "mm_mu",
           "method_of_moments", "method_of_moments_init"]

DEFAULT_THETA = {"tp-al": (0.9, 3.0), "se-al": 5.0, "ug-al": 0.2, "ig-al": 0.5,
                 "pf-al": 10.0, "p-al": 10.0, "u-al": 0.5, "g-al": 20.0}

# theta ranges in which the fourth moment exists (TP: range of theta2, theta1 fixed)
_MM_RANGE = {"tp-al": (1.0 + 1e-6, 1e3), "se-al": (1e-3, 1e3), "ug-al": (1e-4, 1.0 / 3.0 - 1e-6),
             "ig-al": (1e-4, 1e3), "pf-al": (4.0 + 1e-6, 1e4), "p-al": (1e-3, 1e4),
             "u-al": (1e-6, 1.0 - 1e-6), "g-al": (8.0 + 1e-6, 1e4)}
_TP_THETA1 = 0.9


def default_init(tag: str, data) -> ALSMParams:
    """Symmetric-Laplace start: median, kappa = 1, mean absolute deviation."""
    x = np.asarray(data, dtype=float)
    mu = float(np.median(x))
    beta = float(np.mean(np.abs(x - mu)))
    if not beta > 0:
        beta = 1.0
    return ALSMParams(ALParams(mu, beta, 1.0), make_mixing(tag, DEFAULT_THETA[tag]))


def sample_moments(data):
    """Mean, variance (n-1), skewness and raw kurtosis with s from the n-1 variance."""
    x = np.asarray(data, dtype=float)
    n = x.size
    if x.min() == x.max():
        # exact zero spread; the floating-point mean need not equal the value
        return float(x[0]), 0.0, math.nan, math.nan
    m = x.mean()
    c = x - m
    s2 = c @ c / (n - 1)
    s = math.sqrt(s2)
    if s == 0:
        return float(m), 0.0, math.nan, math.nan
    skew = np.sum(c**3) / (n * s**3)
    kurt = np.sum(c**4) / (n * s**4)
    return float(m), float(s2), float(skew), float(kurt)


def mm_beta(s2, kappa, e1, e2):
    """Scale matching the sample variance, given kappa and E(1/W), E(1/W^2)."""
    k2 = kappa * kappa
    den = 2.0 * (1.0 + k2**3) * e2 - (1.0 - k2 * k2) * (1.0 - k2) * e1 * e1
    return math.sqrt(s2 * k2 * (1.0 + k2) / den)


def mm_mu(mean, beta, kappa, e1):
    """Location matching the sample mean."""
    return mean - beta * (1.0 / kappa - kappa) * e1


def _mixing(tag, theta):
    return make_mixing(tag, (_TP_THETA1, theta) if tag == "tp-al" else theta)


def method_of_moments(tag: str, data, tol: float = 1e-6):
    """Solve sample skewness/kurtosis for (kappa, theta), then beta and mu.

    For the two-point law theta1 is held at 0.9 and theta2 is solved for.

    Returns
    -------
    params : ALSMParams
    ok : bool
        False when no solution was found; ``params`` is then the default
        start of :func:`default_init`.
    """
    mean, s2, skew, kurt = sample_moments(data)
    if not (np.isfinite(skew) and np.isfinite(kurt)):
        return default_init(tag, data), False
    lo, hi = _MM_RANGE[tag]

    def resid(z):
        kappa, theta = math.exp(z[0]), math.exp(z[1])
        _, _, sk, ku = alsm_moments(ALSMParams(ALParams(0.0, 1.0, kappa), _mixing(tag, theta)))
        return [sk - skew, (ku - kurt) / kurt]

    best = None
    for k0 in (1.0, 0.7, 1.4):
        for frac in (0.2, 0.5, 0.8):
            t0 = math.exp(math.log(lo) + frac * (math.log(hi) - math.log(lo)))
            try:
                sol = optimize.least_squares(resid, [math.log(k0), math.log(t0)],
                                             bounds=([math.log(1e-3), math.log(lo)], [math.log(1e3), math.log(hi)]),
                                             xtol=1e-15, ftol=1e-15, gtol=1e-15)
            except (ValueError, MomentDoesNotExist, OverflowError):
                continue
            if best is None or sol.cost < best.cost:
                best = sol
    if best is None or np.max(np.abs(best.fun)) > tol:
        return default_init(tag, data), False
    kappa, theta = math.exp(best.x[0]), math.exp(best.x[1])
    mix = _mixing(tag, theta)
    e1, e2 = mix.inv_moment(1), mix.inv_moment(2)
    beta = mm_beta(s2, kappa, e1, e2)
    return ALSMParams(ALParams(mm_mu(mean, beta, kappa, e1), beta, kappa), mix), True


def method_of_moments_init(tag: str, data) -> ALSMParams:
    """Moment-based start, falling back to :func:`default_init`."""
    return method_of_moments(tag, data)[0]
