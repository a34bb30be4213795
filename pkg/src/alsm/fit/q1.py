"""Maximization of the (mu, beta, kappa) part of the expected complete-data
log-likelihood.

With per-observation weights w_i, the objective per observation is

    Q1 = log kappa - log(1 + kappa^2) - log beta - (kappa a + b / kappa) / beta,

where a = mean(w (x - mu)^+) and b = mean(w (x - mu)^-).  For fixed mu the
maximizers are kappa = (b/a)^(1/4) and beta = kappa a + b/kappa.  The
profile is convex between consecutive order statistics, so mu is found by
scanning the sample.
"""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateSupport

__all__ = ["maximize_q1", "q1_objective"]


def q1_objective(data, weights, mu, beta, kappa) -> float:
    """Per-observation Q1 at the given parameters (constant terms dropped)."""
    x = np.asarray(data, dtype=float)
    w = np.asarray(weights, dtype=float)
    r = x - mu
    a = np.mean(w * np.maximum(r, 0.0))
    b = np.mean(w * np.maximum(-r, 0.0))
    return float(np.log(kappa) - np.log1p(kappa * kappa) - np.log(beta) - (kappa * a + b / kappa) / beta)


def maximize_q1(data, weights, order=None):
    """Weighted location/scale/asymmetry update.

    Parameters
    ----------
    data, weights : array_like
        Observations and positive weights of equal length (n >= 3).  An
        infinite weight pins mu at that observation (every other location
        has Q1 = -inf); its own term then contributes nothing.
    order : ndarray, optional
        Precomputed ``argsort(data)`` (stable), reused across iterations.

    Returns
    -------
    mu, beta, kappa : float

    Raises
    ------
    DegenerateSupport
        When no interior order statistic leaves weighted mass on both
        sides.  Only x_(2), ..., x_(n-1) are candidates: at the sample
        minimum or maximum kappa would be 0 or infinite.
    """
    x = np.asarray(data, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = x.size
    if n < 3 or w.shape != x.shape:
        raise ValueError("maximize_q1 needs n >= 3 and matching weights")
    pinned = np.isinf(w)
    if pinned.any():
        at = np.unique(x[pinned])
        if at.size > 1:
            raise ValueError("infinite weights at more than one location")
        return _q1_at(x, np.where(pinned, 0.0, w), float(at[0]))
    if order is None:
        order = np.argsort(x, kind="stable")
    xs, ws = x[order], w[order]
    if xs[0] == xs[-1]:
        raise DegenerateSupport("all observations are equal")
    c = np.median(xs)
    xc = xs - c
    # weighted sums strictly above / below each candidate, via prefix sums
    cw = np.concatenate(([0.0], np.cumsum(ws)))
    cwx = np.concatenate(([0.0], np.cumsum(ws * xc)))
    below_w, below_wx = cw[:-1], cwx[:-1]
    above_w, above_wx = cw[-1] - cw[1:], cwx[-1] - cwx[1:]
    a = np.maximum(above_wx - xc * above_w, 0.0) / n
    b = np.maximum(xc * below_w - below_wx, 0.0) / n
    # only interior candidates with mass on both sides are admissible; the
    # edge values correspond to exponential limits with no maximizer
    ok = (a > 0) & (b > 0)
    ok[0] = ok[-1] = False
    if not ok.any():
        raise DegenerateSupport("no interior location leaves mass on both sides")
    with np.errstate(divide="ignore", invalid="ignore"):
        kap = np.where(ok, (b / a) ** 0.25, 1.0)
        bet = kap * a + b / kap
        obj = np.where(ok, np.log(kap) - np.log1p(kap * kap) - np.log(bet), -np.inf)
    j = int(np.argmax(obj))
    return _q1_at(x, w, float(xs[j]))


def _q1_at(x, w, mu):
    # beta and kappa maximizing Q1 at a fixed location
    r = x - mu
    a = np.mean(w * np.maximum(r, 0.0))
    b = np.mean(w * np.maximum(-r, 0.0))
    if not (a > 0 and b > 0):
        raise DegenerateSupport("no weighted mass on one side of the location")
    kappa = float((b / a) ** 0.25)
    return mu, float(kappa * a + b / kappa), kappa
