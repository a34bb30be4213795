"""Special functions and quadrature used by the densities and E-steps.

The public functions are scalar and follow textbook definitions.  A few
private, array-valued helpers (prefixed ``_``) do the heavy lifting for
the vectorized log-likelihoods and E-steps in :mod:`alsm.family` and
:mod:`alsm.fit`.

Well-tested library routines back the plain cases (``scipy.special`` for
the regularized incomplete gamma, digamma and modified Bessel function,
``scipy.integrate.quad`` for adaptive quadrature).  Generalized
exponential integrals of real order, negative-order incomplete gammas and
the log-space posterior expectations are implemented here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import DomainError, QuadratureError

__all__ = [
    "QuadratureConfig",
    "upper_incomplete_gamma",
    "lower_incomplete_gamma",
    "regularized_gamma_q",
    "digamma",
    "bessel_k",
    "misra_phi",
    "gen_exp_integral",
    "trunc_gamma_expectations",
    "adaptive_quadrature",
]

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for :func:`adaptive_quadrature`.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Requested absolute and relative error; the estimate is accepted
        when ``|error| <= max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Maximum number of interval bisections.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be >= 1")


def adaptive_quadrature(f: Callable[[float], float], a: float, b: float,
                        cfg: QuadratureConfig | None = None,
                        points=None) -> float:
    """Integrate ``f`` over ``(a, b)``; either limit may be infinite.

    Globally adaptive Gauss-Kronrod (QUADPACK via ``scipy.integrate.quad``);
    infinite ranges are mapped to finite ones by the usual substitution.

    Raises
    ------
    QuadratureError
        If the error estimate does not meet the tolerance within the
        subdivision budget.  The best estimate is attached.
    """
    cfg = cfg or QuadratureConfig()
    kw = dict(epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
              limit=int(cfg.max_subdivisions), full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kw["points"] = points
    res = integrate.quad(f, a, b, **kw)
    value, err = res[0], res[1]
    if len(res) > 3 and err > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        raise QuadratureError(f"quadrature did not converge: {res[3]}", value)
    return float(value)


# ---------------------------------------------------------------------------
# incomplete gamma and exponential integrals
# ---------------------------------------------------------------------------

def _lgamma1p(a: float) -> float:
    """log Gamma(1 + a), accurate also for tiny |a|."""
    if abs(a) > 0.1:
        return float(special.gammaln(1.0 + a))
    k = np.arange(2, 40)
    return float(-EULER_GAMMA * a + np.sum((-a) ** k * special.zeta(k) / k))


def _upper_gamma_small(a: float, z: np.ndarray) -> np.ndarray:
    """Gamma(a, z) for a in (-1, 1) and 0 < z < 1 by the power series.

    Uses Gamma(a, z) = Gamma(a) - gamma(a, z) with the leading term
    rearranged as [Gamma(1+a) - z^a]/a so that nothing blows up as a -> 0.
    """
    z = np.asarray(z, dtype=float)
    lz = np.log(z)
    k = np.arange(1, 30)[:, None]
    if a == 0.0:
        lead = -EULER_GAMMA - lz
        tail = np.sum((-z) ** k / (k * special.factorial(k)), axis=0)
    else:
        lead = (math.expm1(_lgamma1p(a)) - np.expm1(a * lz)) / a
        tail = np.sum((-1.0) ** k * np.exp((a + k) * lz) / (special.factorial(k) * (a + k)), axis=0)
    return lead - tail


def _cf_scaled_expint(nu: float, z: np.ndarray, maxit: int = 6000) -> np.ndarray:
    """e^z E_nu(z) by the modified Lentz continued fraction (z > 0)."""
    tiny = 1e-300
    b = z + nu
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, maxit):
        an = -i * (nu - 1.0 + i)
        b = b + 2.0
        dd = an * d + b
        dd = np.where(dd == 0.0, tiny, dd)
        d = 1.0 / dd
        c = b + an / c
        c = np.where(c == 0.0, tiny, c)
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > 2e-16
        if not active.any():
            break
    return h


def _log_expint(nu: float, z) -> np.ndarray:
    """log E_nu(z) for real order ``nu`` and an array of z >= 0.

    Strategy: continued fraction when z >= 1 or nu >= 10 (fast, accurate);
    for nu <= 0 the relation E_nu(z) = z^(nu-1) Gamma(1-nu, z) with a
    positive first argument; otherwise the small-z series for an order in
    [0.5, 1.5) followed by the stable upward recurrence
    E_{v+1}(z) = (e^-z - z E_v(z)) / v.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.empty_like(z)
    zero = z == 0.0
    out[zero] = -math.log(nu - 1.0) if nu > 1.0 else np.inf
    pos = ~zero
    if nu <= 0.0:
        a = 1.0 - nu
        zp = z[pos]
        with np.errstate(divide="ignore"):
            out[pos] = (nu - 1.0) * np.log(zp) + np.log(special.gammaincc(a, zp)) + special.gammaln(a)
        return out
    cf = pos & ((z >= 1.0) | (nu >= 10.0))
    if cf.any():
        out[cf] = np.log(_cf_scaled_expint(nu, z[cf])) - z[cf]
    small = pos & ~cf
    if small.any():
        zs = z[small]
        if nu < 1.5:
            e = np.exp((nu - 1.0) * np.log(zs)) * _upper_gamma_small(1.0 - nu, zs)
        else:
            steps = int(math.floor(nu - 0.5))
            v = nu - steps
            e = np.exp((v - 1.0) * np.log(zs)) * _upper_gamma_small(1.0 - v, zs)
            ez = np.exp(-zs)
            for _ in range(steps):
                e = (ez - zs * e) / v
                v += 1.0
        out[small] = np.log(e)
    return out


def gen_exp_integral(nu: float, z: float) -> float:
    """Generalized exponential integral E_nu(z) = int_1^inf t^-nu e^{-zt} dt.

    Parameters
    ----------
    nu : float
        Real order (non-integer allowed).
    z : float
        Argument, z > 0.
    """
    if not z > 0:
        raise DomainError("gen_exp_integral requires z > 0")
    return float(np.exp(_log_expint(float(nu), z)[0]))


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma function Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt.

    Non-positive ``s`` is allowed for x > 0, via Gamma(s, x) = x^s E_{1-s}(x).
    """
    s, x = float(s), float(x)
    if x < 0:
        raise DomainError("upper_incomplete_gamma requires x >= 0")
    if s <= 0:
        if x == 0:
            raise DomainError("Gamma(s, 0) diverges for s <= 0")
        return float(np.exp(s * math.log(x) + _log_expint(1.0 - s, x)[0]))
    return float(special.gammaincc(s, x) * special.gamma(s))


def _log_upper_gamma(s: float, x: float) -> float:
    """log Gamma(s, x), avoiding underflow for large x."""
    if s <= 0:
        return float(s * math.log(x) + _log_expint(1.0 - s, x)[0])
    q = special.gammaincc(s, x)
    if q > 1e-280 or x < 1.0:
        return float(math.log(q) + special.gammaln(s))
    # far tail: x^s E_{1-s}(x) with the continued fraction (x is large here)
    return float(s * math.log(x) + math.log(_cf_scaled_expint(1.0 - s, np.array([x]))[0]) - x)


def lower_incomplete_gamma(s: float, x: float) -> float:
    """Lower incomplete gamma function gamma(s, x) = int_0^x t^{s-1} e^{-t} dt."""
    if not s > 0:
        raise DomainError("lower_incomplete_gamma requires s > 0")
    if x < 0:
        raise DomainError("lower_incomplete_gamma requires x >= 0")
    return float(special.gammainc(s, x) * special.gamma(s))


def regularized_gamma_q(s: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).

    The chi-square survival function with k degrees of freedom at t is
    ``regularized_gamma_q(k / 2, t / 2)``.
    """
    if not s > 0 or x < 0:
        raise DomainError("regularized_gamma_q requires s > 0 and x >= 0")
    return float(special.gammaincc(s, x))


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0."""
    if not x > 0:
        raise DomainError("digamma requires x > 0")
    return float(special.digamma(x))


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function of the second (third) kind K_nu(x), x > 0."""
    if not x > 0:
        raise DomainError("bessel_k requires x > 0")
    val = float(special.kv(nu, x))
    if math.isinf(val):
        raise OverflowError(f"K_{nu}({x}) overflows")
    return val


def misra_phi(m: int, z: float) -> float:
    """Misra function phi_m(z) = int_1^inf t^m e^{-zt} dt = z^-(m+1) Gamma(m+1, z)."""
    if not z > 0:
        raise DomainError("misra_phi requires z > 0")
    return gen_exp_integral(-float(m), z)


# ---------------------------------------------------------------------------
# log-space helpers for densities and posterior expectations
# ---------------------------------------------------------------------------

def _log_lower_gamma_scaled(s: float, y) -> np.ndarray:
    """log of int_0^1 t^(s-1) e^(-y t) dt = y^-s gamma(s, y), for s > 0, y >= 0.

    Equals -log(s) at y = 0.  Uses the regularized incomplete gamma where it
    is comfortably representable and the Kummer series
    e^-y sum_k y^k / (s (s+1) ... (s+k)) otherwise.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(y)
    with np.errstate(divide="ignore", under="ignore"):
        p = special.gammainc(s, y)
    big = (y >= 0.5 * s) & (p > 1e-250)
    if big.any():
        yb = y[big]
        out[big] = special.gammaln(s) + np.log(p[big]) - s * np.log(yb)
    rest = ~big
    if rest.any():
        yr = y[rest]
        term = np.full_like(yr, 1.0 / s)
        total = term.copy()
        k = 0
        while True:
            k += 1
            term = term * yr / (s + k - 1.0 + 1.0)
            total += term
            if np.all(term <= 1e-17 * total) or k > 100000:
                break
        out[rest] = -yr + np.log(total)
    return out


_TS_H = 1.0 / 24.0
_TS_K = np.arange(-80, 81) * _TS_H
_TS_X = np.tanh(0.5 * np.pi * np.sinh(_TS_K))
_TS_W = _TS_H * 0.5 * np.pi * np.cosh(_TS_K) / np.cosh(0.5 * np.pi * np.sinh(_TS_K)) ** 2


def _trim_point(phi, m, phim, bound, direction, drop):
    """Point beyond the mode where the concave log-density has fallen by ``drop``.

    Returns ``bound`` itself when the density never falls that far inside it.
    """
    span = np.abs(bound - m)
    target = phim - drop
    keep = np.isfinite(bound) & (phi(np.where(np.isfinite(bound), bound, m)) >= target)
    t = np.minimum(1.0, span)
    for _ in range(200):
        grow = ~keep & (phi(m + direction * t) >= target)
        if not grow.any():
            break
        t = np.where(grow, np.minimum(2.0 * t, span), t)
    lo, hi = np.zeros_like(t), t
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        below = phi(m + direction * mid) < target
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return np.where(keep, bound, m + direction * hi)


def _log_gamma_kernel_moments(alpha, rate, lo, hi, drop: float = 46.0):
    """Expectations under the density proportional to w^(alpha-1) e^(-rate w) on (lo, hi).

    Works in u = log w, where the log-density alpha*u - rate*e^u is concave,
    trims the range to the region within ``drop`` log-units of the mode and
    integrates with a fixed tanh-sinh rule.  ``alpha`` may be any real
    number as long as the density is integrable; all arguments broadcast.

    Returns
    -------
    log_norm, mean_w, mean_log_w : ndarray
        ``log_norm`` is log int_lo^hi w^(alpha-1) e^(-rate w) dw.

    Notes
    -----
    E(1/W) is deliberately not offered: its integrand decays much more
    slowly than the density when alpha is close to 1 and lo = 0, so the
    trimming rule would not be safe for it.
    """
    alpha, rate, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (alpha, rate, lo, hi)))
    alpha, rate = alpha.ravel(), rate.ravel()
    with np.errstate(divide="ignore"):
        ulo = np.log(lo.ravel())
        uhi = np.log(hi.ravel())

    def phi(u):
        with np.errstate(over="ignore", invalid="ignore"):
            return alpha * u - rate * np.exp(u)

    with np.errstate(divide="ignore", invalid="ignore"):
        interior = np.where((alpha > 0) & (rate > 0), np.log(alpha / rate), np.nan)
    m = np.where(np.isnan(interior), np.where(alpha > 0, uhi, ulo), interior)
    m = np.clip(m, ulo, uhi)
    if not np.all(np.isfinite(m)):
        raise ValueError("posterior kernel is not integrable")
    phim = phi(m)
    upper = _trim_point(phi, m, phim, uhi, 1.0, drop)
    lower = _trim_point(phi, m, phim, ulo, -1.0, drop)
    half = 0.5 * (upper - lower)
    u = 0.5 * (upper + lower)[:, None] + half[:, None] * _TS_X[None, :]
    g = np.exp(_phi_nodes(alpha, rate, u) - phim[:, None]) * _TS_W[None, :]
    z = g.sum(axis=1)
    ew = (g * np.exp(u)).sum(axis=1) / z
    elog = (g * u).sum(axis=1) / z
    log_norm = phim + np.log(z * half)
    return log_norm, ew, elog


def _phi_nodes(alpha, rate, u):
    with np.errstate(over="ignore", invalid="ignore"):
        return alpha[:, None] * u - rate[:, None] * np.exp(u)


def trunc_gamma_expectations(shape: float, rate: float, lo: float, hi: float,
                             cfg: QuadratureConfig | None = None):
    """Posterior-style expectations of a truncated gamma(shape, rate) law.

    Parameters
    ----------
    shape, rate : float
        Gamma shape and rate, both > 0.
    lo, hi : float
        Truncation interval, ``0 <= lo < hi <= inf``.

    Returns
    -------
    mean_w, mean_log_w, mean_inv_w : float
        The mean uses the incomplete-gamma ratio
        [Gamma(shape+1, rate*lo) - Gamma(shape+1, rate*hi)] /
        (rate [Gamma(shape, rate*lo) - Gamma(shape, rate*hi)]);
        the other two are computed by adaptive quadrature.
        ``mean_inv_w`` is ``inf`` when it diverges (shape <= 1, lo = 0).
    """
    if not (shape > 0 and rate > 0 and 0 <= lo < hi):
        raise DomainError("trunc_gamma_expectations: need shape>0, rate>0, 0<=lo<hi")
    cfg = cfg or QuadratureConfig(abs_tol=1e-14, rel_tol=1e-12)
    ll, lh = rate * lo, rate * hi

    def log_mass(a):
        # log [Gamma(a, ll) - Gamma(a, lh)] in a cancellation-aware way
        ql = special.gammaincc(a, ll)
        qh = special.gammaincc(a, lh) if math.isfinite(lh) else 0.0
        if ql - qh > 1e-3 * ql:
            return math.log(ql - qh) + special.gammaln(a)
        # narrow or far-tail interval: work relative to Gamma(a, ll)
        top = _log_upper_gamma(a, ll)
        if not math.isfinite(lh):
            return top
        bottom = _log_upper_gamma(a, lh)
        return top + math.log(-math.expm1(bottom - top))

    lm0 = log_mass(shape)
    if lm0 - shape * math.log(rate) < math.log(1e-300):
        raise DomainError("truncated gamma has (numerically) no mass on the interval")
    mean_w = math.exp(log_mass(shape + 1.0) - lm0) / rate

    # quadrature in t = rate * w, with the density scaled by its log-maximum
    mode = min(max(shape - 1.0, ll), lh)
    lnorm = lm0

    def dens(t):
        if t <= 0:
            return 0.0
        return math.exp((shape - 1.0) * math.log(t) - t - lnorm)

    pts = None
    if math.isfinite(lh):
        pts = [p for p in (mode,) if ll < p < lh]

    def integ(g):
        return adaptive_quadrature(lambda t: g(t) * dens(t), ll, lh, cfg, points=pts)

    mean_log_w = integ(math.log) - math.log(rate)
    if lo == 0 and shape <= 1:
        mean_inv_w = math.inf
    else:
        mean_inv_w = integ(lambda t: 1.0 / t) * rate
    return float(mean_w), float(mean_log_w), float(mean_inv_w)
