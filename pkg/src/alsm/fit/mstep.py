"""Updates of the mixing parameter(s) theta."""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special

from ..ald import ALParams
from ..errors import BracketFailure
from ..family import (ALSMParams, GammaApp, InverseGaussian, Pareto, PowerFunction,
                      ShiftedExp, TwoPoint, UniformTail, UnimodalGamma, alsm_loglik)
from .estep import EStepWeights

__all__ = ["THETA_BOUNDS", "mstep_theta", "q2_ug", "q2_g", "q2_ig"]

# search intervals for theta; the Pareto floor keeps the density finite at mu
THETA_BOUNDS = {
    "tp-al": ((0.5 + 1e-9, 1.0 - 1e-9), (1.0 + 1e-9, 1e6)),
    "se-al": (1e-6, 1e6),
    "ug-al": (1e-6, 1e6),
    "ig-al": (1e-6, 1e6),
    "pf-al": (1e-6, 1e6),
    "p-al": (1.0 + 1e-6, 1e6),
    "u-al": (1e-9, 1.0 - 1e-9),
    "g-al": (1e-6, 1e6),
}


def q2_ug(theta, n, s_w, s_log):
    """Expected complete-data log-likelihood of theta, unimodal gamma mixing."""
    t = theta
    return (s_log - s_w) / t - n * (1.0 / t + 1.0) * math.log(t) - n * special.gammaln(1.0 / t + 1.0)


def q2_g(theta, n, s_w, s_log):
    """Same for gamma(theta/2, theta/2) mixing (terms free of theta dropped)."""
    h = 0.5 * theta
    return n * h * math.log(h) - n * special.gammaln(h) + h * (s_log - s_w)


def q2_ig(theta, n, s_w, s_inv):
    """Same for inverse Gaussian mixing."""
    s2 = 1.0 + 3.0 * theta
    s = math.sqrt(s2)
    return 0.5 * n * math.log(s2 / (2.0 * math.pi * theta)) - (s_w - 2.0 * n * s + s2 * s_inv) / (2.0 * theta)


def _argmax_scalar(f, lo, hi, log_scale=True, n_grid=81):
    """Global-then-local maximization of a scalar function on [lo, hi].

    A grid locates the best cell, bounded Brent refines it.  Returns
    ``(x, at_bound)``.
    """
    tr = (np.log, np.exp) if log_scale else (lambda v: v, lambda v: v)
    g = np.linspace(tr[0](lo), tr[0](hi), n_grid)
    vals = np.array([f(float(tr[1](u))) for u in g])
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    i = int(np.argmax(vals))
    a, b = g[max(i - 1, 0)], g[min(i + 1, n_grid - 1)]
    res = optimize.minimize_scalar(lambda u: -f(float(tr[1](u))), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-13, "maxiter": 500})
    best_u, best_v = (res.x, -res.fun) if -res.fun >= vals[i] else (g[i], vals[i])
    x = float(tr[1](best_u))
    at_bound = (i == 0 and best_u - g[0] < 1e-9) or (i == n_grid - 1 and g[-1] - best_u < 1e-9)
    return min(max(x, lo), hi), at_bound


def _keep_better(f, new, old):
    # generalized-EM safeguard: never accept a theta worse than the current one
    return new if f(new) >= f(old) else old


def mstep_theta(tag: str, weights: EStepWeights, data, current: ALSMParams,
                al_new: ALParams | None = None, bounds=None):
    """Updated mixing law for model ``tag``.

    Parameters
    ----------
    tag : str
        Model tag.
    weights : EStepWeights
        E-step output at ``current``.
    data : array_like
        The sample (used by the two-point and uniform updates).
    current : ALSMParams
        Parameters at which the E-step ran.
    al_new : ALParams, optional
        Location/scale/asymmetry already updated in this iteration; the
        two-point contamination factor and the uniform theta are
        conditional on it.  Defaults to ``current.al``.
    bounds : optional
        Override of :data:`THETA_BOUNDS` for this tag.

    Raises
    ------
    BracketFailure
        For the numerically updated laws (UG, G, IG) when the maximum sits
        on the edge of the search interval; ``err.theta`` holds that edge.
    """
    x = np.asarray(data, dtype=float)
    n = x.size
    al_new = al_new or current.al
    bnd = bounds or THETA_BOUNDS[tag]
    m = current.mixing
    clamp = lambda v: float(min(max(v, bnd[0]), bnd[1]))  # noqa: E731

    if tag == "tp-al":
        (l1, h1), (l2, h2) = bnd
        v = weights.v
        theta1 = float(min(max(np.mean(v), l1), h1))
        r = x - al_new.mu
        dist = al_new.kappa * np.maximum(r, 0.0) + np.maximum(-r, 0.0) / al_new.kappa
        bad = 1.0 - v
        sb = bad.sum()
        theta2 = np.sum(bad * dist) / (al_new.beta * sb) if sb > 0 else m.theta2
        return TwoPoint(theta1, float(min(max(theta2, l2), h2)))
    if tag == "se-al":
        return ShiftedExp(clamp(n / np.sum(weights.w - 1.0)))
    if tag == "pf-al":
        return PowerFunction(clamp(-n / np.sum(weights.log_w)))
    if tag == "p-al":
        return Pareto(clamp(n / np.sum(weights.log_w)))
    if tag == "u-al":
        f = lambda t: alsm_loglik(x, ALSMParams(al_new, UniformTail(t)))  # noqa: E731
        t, _ = _argmax_scalar(f, bnd[0], bnd[1], log_scale=False, n_grid=41)
        return UniformTail(_keep_better(f, t, m.theta))

    s_w = float(np.sum(weights.w))
    if tag == "ug-al":
        f = lambda t: q2_ug(t, n, s_w, float(np.sum(weights.log_w)))  # noqa: E731
        cls = UnimodalGamma
    elif tag == "g-al":
        f = lambda t: q2_g(t, n, s_w, float(np.sum(weights.log_w)))  # noqa: E731
        cls = GammaApp
    elif tag == "ig-al":
        f = lambda t: q2_ig(t, n, s_w, float(np.sum(weights.inv_w)))  # noqa: E731
        cls = InverseGaussian
    else:
        raise ValueError(f"unknown model tag {tag!r}")
    t, at_bound = _argmax_scalar(f, bnd[0], bnd[1])
    t = _keep_better(f, t, m.theta)
    if at_bound and t != m.theta:
        raise BracketFailure(f"{tag}: no interior maximum of the theta objective", t)
    return cls(t)
