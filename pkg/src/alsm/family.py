"""Asymmetric Laplace scale mixtures (ALSM).

X = mu + beta * Y / W with Y ~ AL(0, 1, kappa) and W > 0 independent of Y,
so that X | W = w ~ AL(mu, beta / w, kappa).  Eight mixing laws for W are
provided, each with a closed-form marginal density.  Writing
d = delta(x) for the standardized AL distance, every density has the form

    f(x) = (1/beta) * kappa / (1 + kappa^2) * K(d),   K(d) = E[W exp(-W d)],

and each mixing law implements ``log K`` in a numerically safe way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import ClassVar

import numpy as np
from scipy import special

from . import specfun
from .ald import ALParams, _log_norm_const, _rng, al_logpdf, al_sample, delta
from .errors import MomentDoesNotExist
from .specfun import QuadratureConfig, adaptive_quadrature

__all__ = [
    "MixingLaw", "TwoPoint", "ShiftedExp", "UnimodalGamma", "InverseGaussian",
    "PowerFunction", "Pareto", "UniformTail", "GammaApp", "ALSMParams",
    "MIXING_LAWS", "MODEL_TAGS", "make_mixing", "p_r", "inv_w_moment",
    "alsm_pdf", "alsm_logpdf", "alsm_pdf_numeric", "alsm_moments",
    "alsm_abs_moment", "mixing_sample", "alsm_sample", "alsm_mode",
    "tp_posterior_good", "alsm_loglik", "params_to_dict", "params_from_dict",
]


def p_r(r: int, kappa: float) -> float:
    """p_r(kappa) = [1 + (-1)^r kappa^(2(r+1))] / (1 + kappa^2).

    Equal to the alternating sum sum_{j=0}^r (-kappa^2)^j.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    k2 = kappa * kappa
    return (1.0 + (-1) ** r * k2 ** (r + 1)) / (1.0 + k2)


# ---------------------------------------------------------------------------
# mixing laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixingLaw:
    """Base class for the distribution of the scale divisor W."""

    tag: ClassVar[str] = ""
    support: ClassVar[tuple] = (0.0, math.inf)

    @property
    def thetas(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    # hooks -----------------------------------------------------------------
    def bounds(self) -> tuple:
        lo, hi = self.support
        return float(lo), float(hi)

    def log_density(self, w):
        """log h(w); only defined for continuous laws."""
        raise NotImplementedError

    def log_kernel(self, d):
        """log E[W exp(-W d)] for an array of d >= 0."""
        raise NotImplementedError

    def moment_exists(self, a: float) -> bool:
        """Whether E(W^-a) is finite."""
        return True

    def _inv_moment(self, r: int) -> float:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def inv_moment(self, r: int) -> float:
        """E(1/W^r) for integer r >= 0."""
        r = int(r)
        if r == 0:
            return 1.0
        if not self.moment_exists(r):
            raise MomentDoesNotExist(self.tag, r, self.thetas)
        return float(self._inv_moment(r))


def _check_pos(name, v):
    if not (math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class TwoPoint(MixingLaw):
    """W = 1 with probability theta1, else 1/theta2 (contaminated AL)."""

    theta1: float
    theta2: float
    tag: ClassVar[str] = "tp-al"

    def __post_init__(self):
        if not 0.5 < self.theta1 < 1.0:
            raise ValueError("theta1 must lie in (1/2, 1)")
        if not (math.isfinite(self.theta2) and self.theta2 > 1.0):
            raise ValueError("theta2 must exceed 1")

    def bounds(self):
        return 1.0 / self.theta2, 1.0

    def log_kernel(self, d):
        d = np.asarray(d, dtype=float)
        return np.logaddexp(math.log(self.theta1) - d,
                            math.log1p(-self.theta1) - math.log(self.theta2) - d / self.theta2)

    def _inv_moment(self, r):
        return self.theta1 + (1.0 - self.theta1) * self.theta2 ** r

    def abs_moment_factor(self, a):
        return self.theta1 + (1.0 - self.theta1) * self.theta2 ** a

    def sample(self, n, rng):
        good = rng.random(n) < self.theta1
        return np.where(good, 1.0, 1.0 / self.theta2)


@dataclass(frozen=True)
class ShiftedExp(MixingLaw):
    """W = 1 + Exp(rate theta)."""

    theta: float
    tag: ClassVar[str] = "se-al"
    support: ClassVar[tuple] = (1.0, math.inf)

    def __post_init__(self):
        _check_pos("theta", self.theta)

    def log_density(self, w):
        return math.log(self.theta) - self.theta * (np.asarray(w) - 1.0)

    def log_kernel(self, d):
        d = np.asarray(d, dtype=float)
        t = self.theta
        return math.log(t) + np.log1p(t + d) - 2.0 * np.log(t + d) - d

    def _inv_moment(self, r):
        # theta e^theta E_r(theta)
        return self.theta * math.exp(specfun._log_expint(float(r), self.theta)[0] + self.theta)

    def sample(self, n, rng):
        return 1.0 + rng.standard_exponential(n) / self.theta


@dataclass(frozen=True)
class UnimodalGamma(MixingLaw):
    """W ~ gamma(shape 1/theta + 1, rate 1/theta), mode at 1."""

    theta: float
    tag: ClassVar[str] = "ug-al"

    def __post_init__(self):
        _check_pos("theta", self.theta)

    def log_density(self, w):
        t = self.theta
        w = np.asarray(w, dtype=float)
        return (np.log(w) - w) / t - (1.0 / t + 1.0) * math.log(t) - special.gammaln(1.0 / t + 1.0)

    def log_kernel(self, d):
        t = self.theta
        return math.log1p(t) - (1.0 / t + 2.0) * np.log1p(t * np.asarray(d, dtype=float))

    def moment_exists(self, a):
        return a < 1.0 / self.theta + 1.0

    def _inv_moment(self, r):
        t = self.theta
        return 1.0 / math.prod(1.0 + t - j * t for j in range(1, r + 1))

    def sample(self, n, rng):
        return rng.gamma(1.0 / self.theta + 1.0, self.theta, n)


@dataclass(frozen=True)
class InverseGaussian(MixingLaw):
    """W ~ inverse Gaussian with mean sqrt(1 + 3 theta) and shape (1 + 3 theta)/theta."""

    theta: float
    tag: ClassVar[str] = "ig-al"

    def __post_init__(self):
        _check_pos("theta", self.theta)

    @property
    def s(self):
        return math.sqrt(1.0 + 3.0 * self.theta)

    def log_density(self, w):
        t, s = self.theta, self.s
        w = np.asarray(w, dtype=float)
        return 0.5 * np.log(s * s / (2.0 * math.pi * t * w**3)) - (w - s) ** 2 / (2.0 * t * w)

    def log_kernel(self, d):
        t, s = self.theta, self.s
        q = 1.0 + 2.0 * t * np.asarray(d, dtype=float)
        sq = np.sqrt(q)
        # (s/t)(1 - sqrt(q)) rewritten to avoid cancellation for small t
        return math.log(s) - 2.0 * s * np.asarray(d, dtype=float) / (1.0 + sq) - 0.5 * np.log(q)

    def _inv_moment(self, r):
        t, s = self.theta, self.s
        z = s / t
        # sqrt(2/(theta pi)) s^((1-2r)/2) e^z K_{r+1/2}(z), with kve = e^z K
        return math.sqrt(2.0 / (t * math.pi)) * s ** ((1.0 - 2.0 * r) / 2.0) * special.kve(r + 0.5, z)

    def sample(self, n, rng):
        s = self.s
        return rng.wald(s, s * s / self.theta, n)


@dataclass(frozen=True)
class PowerFunction(MixingLaw):
    """W on (0, 1) with density theta w^(theta - 1)."""

    theta: float
    tag: ClassVar[str] = "pf-al"
    support: ClassVar[tuple] = (0.0, 1.0)

    def __post_init__(self):
        _check_pos("theta", self.theta)

    def log_density(self, w):
        return math.log(self.theta) + (self.theta - 1.0) * np.log(np.asarray(w, dtype=float))

    def log_kernel(self, d):
        # theta * int_0^1 w^theta e^{-w d} dw
        return math.log(self.theta) + specfun._log_lower_gamma_scaled(self.theta + 1.0, d)

    def moment_exists(self, a):
        return self.theta > a

    def _inv_moment(self, r):
        return self.theta / (self.theta - r)

    def sample(self, n, rng):
        return rng.random(n) ** (1.0 / self.theta)


@dataclass(frozen=True)
class Pareto(MixingLaw):
    """W on (1, inf) with density theta w^-(theta + 1)."""

    theta: float
    tag: ClassVar[str] = "p-al"
    support: ClassVar[tuple] = (1.0, math.inf)

    def __post_init__(self):
        _check_pos("theta", self.theta)

    def log_density(self, w):
        return math.log(self.theta) - (self.theta + 1.0) * np.log(np.asarray(w, dtype=float))

    def log_kernel(self, d):
        # theta * E_theta(d); infinite at d = 0 when theta <= 1
        return math.log(self.theta) + specfun._log_expint(self.theta, d)

    def moment_exists(self, a):
        return self.theta + a > 0

    def _inv_moment(self, r):
        return self.theta / (self.theta + r)

    def sample(self, n, rng):
        return 1.0 + rng.pareto(self.theta, n)


@dataclass(frozen=True)
class UniformTail(MixingLaw):
    """W ~ Uniform(1 - theta, 1)."""

    theta: float
    tag: ClassVar[str] = "u-al"

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")

    def bounds(self):
        return 1.0 - self.theta, 1.0

    def log_density(self, w):
        return np.full(np.shape(w), -math.log(self.theta))

    def log_kernel(self, d):
        # (1/theta) int_l^1 w e^{-w d} dw with l = 1 - theta, written as
        # e^{-l d} [l theta L(1, d theta) + theta^2 L(2, d theta)],
        # L(s, y) = int_0^1 t^(s-1) e^{-y t} dt.  Both terms are positive, so
        # the removable singularity of the textbook form at d = 0 never arises.
        t = self.theta
        l = 1.0 - t
        d = np.asarray(d, dtype=float)
        y = d * t
        l1 = specfun._log_lower_gamma_scaled(1.0, y)
        l2 = specfun._log_lower_gamma_scaled(2.0, y)
        return -math.log(t) - l * d + np.logaddexp(math.log(l * t) + l1, 2.0 * math.log(t) + l2)

    def _inv_moment(self, r):
        t = self.theta
        if r == 1:
            return -math.log1p(-t) / t
        return math.expm1((1.0 - r) * math.log1p(-t)) / (t * (r - 1.0))

    def sample(self, n, rng):
        return 1.0 - self.theta * rng.random(n)


@dataclass(frozen=True)
class GammaApp(MixingLaw):
    """W ~ gamma(shape theta/2, rate theta/2), mean 1."""

    theta: float
    tag: ClassVar[str] = "g-al"

    def __post_init__(self):
        _check_pos("theta", self.theta)

    def log_density(self, w):
        h = 0.5 * self.theta
        w = np.asarray(w, dtype=float)
        return h * math.log(h) - special.gammaln(h) + (h - 1.0) * np.log(w) - h * w

    def log_kernel(self, d):
        t = self.theta
        return -(0.5 * t + 1.0) * np.log1p(2.0 * np.asarray(d, dtype=float) / t)

    def moment_exists(self, a):
        return 0.5 * self.theta > a

    def _inv_moment(self, r):
        t = self.theta
        return t**r / math.prod(t - 2.0 * j for j in range(1, r + 1))

    def sample(self, n, rng):
        h = 0.5 * self.theta
        return rng.gamma(h, 1.0 / h, n)


MIXING_LAWS = {cls.tag: cls for cls in (TwoPoint, ShiftedExp, UnimodalGamma, InverseGaussian,
                                         PowerFunction, Pareto, UniformTail, GammaApp)}
MODEL_TAGS = tuple(MIXING_LAWS)


def make_mixing(tag: str, theta) -> MixingLaw:
    """Build a mixing law from its model tag and theta value(s)."""
    try:
        cls = MIXING_LAWS[tag]
    except KeyError:
        raise ValueError(f"unknown model tag {tag!r}") from None
    th = np.atleast_1d(np.asarray(theta, dtype=float)).tolist()
    n_expected = 2 if cls is TwoPoint else 1
    if len(th) != n_expected:
        raise ValueError(f"{tag} takes {n_expected} theta value(s), got {len(th)}")
    return cls(*th)


@dataclass(frozen=True)
class ALSMParams:
    """AL parameters plus a mixing law; ``mixing=None`` is the plain AL."""

    al: ALParams
    mixing: MixingLaw | None = field(default=None)

    @property
    def model(self) -> str:
        return "al" if self.mixing is None else self.mixing.tag


def inv_w_moment(m: MixingLaw, r: int) -> float:
    """E(1/W^r) under the mixing law ``m``.

    Raises
    ------
    MomentDoesNotExist
        If the moment is infinite for this theta.
    """
    return m.inv_moment(r)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def alsm_logpdf(x, p: ALSMParams):
    """Log-density of the ALSM (vectorized over ``x``)."""
    if p.mixing is None:
        return al_logpdf(x, p.al)
    d = np.atleast_1d(delta(x, p.al))
    out = _log_norm_const(p.al.kappa) - math.log(p.al.beta) + p.mixing.log_kernel(d)
    return float(out[0]) if np.ndim(x) == 0 else out


def alsm_pdf(x, p: ALSMParams):
    """Closed-form density of the ALSM (vectorized over ``x``)."""
    return np.exp(alsm_logpdf(x, p))


def alsm_loglik(data, p: ALSMParams) -> float:
    """Sum of log-densities over the sample."""
    return float(np.sum(alsm_logpdf(np.asarray(data, dtype=float), p)))


def alsm_pdf_numeric(x: float, p: ALSMParams, cfg: QuadratureConfig | None = None) -> float:
    """Density from its defining mixture integral int f_AL(x; mu, beta/w, kappa) h(w) dw."""
    m = p.mixing
    c = math.exp(_log_norm_const(p.al.kappa)) / p.al.beta
    d = float(delta(x, p.al))
    if m is None:
        return c * math.exp(-d)
    if isinstance(m, TwoPoint):
        w2 = 1.0 / m.theta2
        return c * (m.theta1 * math.exp(-d) + (1.0 - m.theta1) * w2 * math.exp(-w2 * d))
    cfg = cfg or QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=500)

    def integrand(w):
        return w * math.exp(-w * d + float(m.log_density(w)))

    lo, hi = m.bounds()
    if math.isfinite(hi):
        return c * adaptive_quadrature(integrand, lo, hi, cfg)
    # split the infinite range at a few scale points of the mixing law
    cuts = [v for v in (0.25, 1.0, 4.0, 16.0) if v > lo]
    edges = [lo] + cuts
    total = sum(adaptive_quadrature(integrand, a, b, cfg) for a, b in zip(edges[:-1], edges[1:]))
    total += adaptive_quadrature(integrand, edges[-1], math.inf, cfg)
    return c * total


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def _central_moment_terms(p: ALSMParams, rmax: int):
    """Raw moments of X - mu: r! (beta/kappa)^r p_r(kappa) E(1/W^r), or None."""
    k, b = p.al.kappa, p.al.beta
    out = []
    for r in range(1, rmax + 1):
        if p.mixing is None:
            e = 1.0
        else:
            try:
                e = p.mixing.inv_moment(r)
            except MomentDoesNotExist:
                break
        out.append(math.factorial(r) * (b / k) ** r * p_r(r, k) * e)
    return out


def alsm_moments(p: ALSMParams):
    """Mean, variance, skewness and raw kurtosis.

    Each entry is ``None`` when the mixing law lacks the needed E(1/W^r).
    Assembled from p_r(kappa) and E(1/W^r) for r = 1..4 via the central
    moments about mu; kurtosis is the raw fourth standardized moment.
    """
    m = _central_moment_terms(p, 4)
    mean = var = skew = kurt = None
    if len(m) >= 1:
        mean = p.al.mu + m[0]
    if len(m) >= 2:
        var = m[1] - m[0] ** 2
    if len(m) >= 3:
        c3 = m[2] - 3.0 * m[1] * m[0] + 2.0 * m[0] ** 3
        skew = c3 / var**1.5
    if len(m) >= 4:
        c4 = m[3] - 4.0 * m[2] * m[0] + 6.0 * m[1] * m[0] ** 2 - 3.0 * m[0] ** 4
        kurt = c4 / var**2
    return mean, var, skew, kurt


def alsm_abs_moment(p: ALSMParams, a: float):
    """E|X - mu|^a for a > -1, or ``None`` if infinite.

    Equals (beta/kappa)^a Gamma(a+1) [1 + kappa^(2(a+1))] / (1 + kappa^2) E(W^-a).
    Non-integer orders use quadrature of w^-a against the mixing density.
    """
    if not a > -1:
        raise ValueError("a must exceed -1")
    k, b = p.al.kappa, p.al.beta
    m = p.mixing
    if m is None:
        ew = 1.0
    elif not m.moment_exists(a):
        return None
    elif float(a).is_integer() and a >= 0:
        ew = m.inv_moment(int(a))
    elif isinstance(m, TwoPoint):
        ew = m.abs_moment_factor(a)
    else:
        lo, hi = m.bounds()
        cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=500)
        f = lambda w: math.exp(-a * math.log(w) + float(m.log_density(w)))  # noqa: E731
        if math.isfinite(hi):
            ew = adaptive_quadrature(f, lo, hi, cfg)
        else:
            mid = max(lo, 1.0) + 1.0
            ew = adaptive_quadrature(f, lo, mid, cfg) + adaptive_quadrature(f, mid, math.inf, cfg)
    return (b / k) ** a * math.gamma(a + 1.0) * (1.0 + k ** (2.0 * (a + 1.0))) / (1.0 + k * k) * ew


# ---------------------------------------------------------------------------
# sampling and miscellany
# ---------------------------------------------------------------------------

def mixing_sample(m: MixingLaw, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` values of W."""
    return m.sample(int(n), _rng(seed))


def alsm_sample(p: ALSMParams, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` variates as mu + beta * Y / W."""
    rng = _rng(seed)
    y = al_sample(ALParams(0.0, 1.0, p.al.kappa), int(n), rng)
    if p.mixing is None:
        return p.al.mu + p.al.beta * y
    w = p.mixing.sample(int(n), rng)
    return p.al.mu + p.al.beta * y / w


def alsm_mode(p: ALSMParams) -> float:
    """The mode, which is always mu."""
    return p.al.mu


def tp_posterior_good(x, p: ALSMParams):
    """Posterior probability that ``x`` came from the reference (W = 1) component."""
    m = p.mixing
    if not isinstance(m, TwoPoint):
        raise TypeError("tp_posterior_good requires a TwoPoint mixing law")
    d = np.asarray(delta(x, p.al), dtype=float)
    out = np.exp(math.log(m.theta1) - d - m.log_kernel(d))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def params_to_dict(p: ALSMParams) -> dict:
    """JSON-ready dict: {"model", "mu", "beta", "kappa", "theta": [...]}."""
    theta = [] if p.mixing is None else [float(v) for v in p.mixing.thetas]
    return {"model": p.model, "mu": float(p.al.mu), "beta": float(p.al.beta),
            "kappa": float(p.al.kappa), "theta": theta}


def params_from_dict(d: dict) -> ALSMParams:
    """Inverse of :func:`params_to_dict`."""
    al = ALParams(float(d["mu"]), float(d["beta"]), float(d["kappa"]))
    tag = d["model"]
    if tag == "al":
        if d.get("theta"):
            raise ValueError("the AL model has no theta")
        return ALSMParams(al)
    return ALSMParams(al, make_mixing(tag, d["theta"]))
