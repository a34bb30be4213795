"""Posterior expectations of the mixing variable given the data.

Given x, the posterior density of W is proportional to w exp(-w d) h(w),
with d the standardized AL distance of x.  For each mixing law this is a
(possibly truncated) gamma or generalized inverse Gaussian law, or a
two-point law, so E(W | x) has a closed form.  E(log W | x) is closed for
the gamma posteriors and computed by quadrature for the truncated ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .. import specfun
from ..ald import delta
from ..errors import EStepUnderflow
from ..family import (ALSMParams, GammaApp, InverseGaussian, Pareto, PowerFunction,
                      ShiftedExp, TwoPoint, UniformTail, UnimodalGamma)

__all__ = ["EStepWeights", "estep"]


@dataclass(frozen=True)
class EStepWeights:
    """Per-observation posterior expectations.

    Attributes
    ----------
    w : ndarray
        E(W | x); these are also the weights of the location/scale update.
        For Pareto mixing it is +inf at an observation equal to mu when
        theta <= 2.
    log_w : ndarray or None
        E(log W | x), for models whose theta update needs it.
    inv_w : ndarray or None
        E(1/W | x) (inverse Gaussian mixing only).
    v : ndarray or None
        Posterior probability of the reference component (two-point mixing).
    """

    w: np.ndarray
    log_w: np.ndarray | None = None
    inv_w: np.ndarray | None = None
    v: np.ndarray | None = None


def _gamma_posterior(shape, rate):
    return shape / rate, special.digamma(shape) - np.log(rate)


def _estep_u(theta, d):
    # E(W | x) on (l, 1) with weight w e^{-w d}: expand (l + theta t)^k and
    # integrate termwise with L(s, y) = int_0^1 t^(s-1) e^{-y t} dt
    l = 1.0 - theta
    y = d * theta
    L = [specfun._log_lower_gamma_scaled(s, y) for s in (1.0, 2.0, 3.0)]
    lt = math.log(theta)
    with np.errstate(divide="ignore"):
        ll = math.log(l) if l > 0 else -np.inf
    num = np.logaddexp.reduce([2 * ll + lt + L[0], math.log(2.0) + ll + 2 * lt + L[1], 3 * lt + L[2]])
    den = np.logaddexp(ll + lt + L[0], 2 * lt + L[1])
    return np.exp(num - den)


def _estep_p(theta, d):
    # posterior w^-theta e^{-w d} on (1, inf).  At d = 0 it is a Pareto law
    # with index theta - 1: E(log W) = 1/(theta - 1), and E(W) is infinite
    # for theta <= 2, which pins mu at that observation in the next M-step.
    if theta <= 1.0 and np.any(d == 0):
        raise EStepUnderflow("posterior of W is improper at the mode for theta <= 1",
                             int(np.flatnonzero(d == 0)[0]))
    w = np.empty_like(d)
    log_w = np.empty_like(d)
    zero = d == 0
    w[zero] = (theta - 1.0) / (theta - 2.0) if theta > 2.0 else np.inf
    log_w[zero] = 1.0 / (theta - 1.0)
    pos = ~zero
    if pos.any():
        dp = d[pos]
        _, w_q, lw = specfun._log_gamma_kernel_moments(1.0 - theta, dp, 1.0, math.inf)
        with np.errstate(invalid="ignore"):
            wr = np.exp(specfun._log_expint(theta - 1.0, dp) - specfun._log_expint(theta, dp))
        w[pos] = np.where(np.isfinite(wr), wr, w_q)
        log_w[pos] = lw
    return w, log_w


def estep(p: ALSMParams, data) -> EStepWeights:
    """Posterior expectations of W (and log W, 1/W where needed).

    Raises
    ------
    EStepUnderflow
        If some posterior expectation is not finite; the first offending
        observation index is reported.
    """
    x = np.asarray(data, dtype=float)
    d = np.atleast_1d(delta(x, p.al))
    m = p.mixing
    log_w = inv_w = v = None
    if isinstance(m, TwoPoint):
        v = np.exp(math.log(m.theta1) - d - m.log_kernel(d))
        w = v + (1.0 - v) / m.theta2
    elif isinstance(m, ShiftedExp):
        # left-truncated gamma(2, d + theta) on (1, inf): phi_2(z)/phi_1(z)
        z = d + m.theta
        w = (z * z + 2.0 * z + 2.0) / (z * (z + 1.0))
    elif isinstance(m, UnimodalGamma):
        w, log_w = _gamma_posterior(1.0 / m.theta + 2.0, d + 1.0 / m.theta)
    elif isinstance(m, GammaApp):
        w, log_w = _gamma_posterior(0.5 * m.theta + 1.0, d + 0.5 * m.theta)
    elif isinstance(m, InverseGaussian):
        s = m.s
        q = 1.0 + 2.0 * m.theta * d
        w = s / np.sqrt(q) + m.theta / q
        inv_w = np.sqrt(q) / s
    elif isinstance(m, PowerFunction):
        a = m.theta + 1.0
        w = np.exp(specfun._log_lower_gamma_scaled(a + 1.0, d) - specfun._log_lower_gamma_scaled(a, d))
        _, _, log_w = specfun._log_gamma_kernel_moments(a, d, 0.0, 1.0)
    elif isinstance(m, Pareto):
        w, log_w = _estep_p(m.theta, d)
    elif isinstance(m, UniformTail):
        w = _estep_u(m.theta, d)
    else:
        raise TypeError(f"no E-step for {type(m).__name__}")
    if isinstance(m, Pareto):
        # the infinite posterior mean at d = 0 is legitimate (see _estep_p)
        w_chk = np.where(np.isposinf(w) & (d == 0), 1.0, w)
    else:
        w_chk = w
    for arr in (w_chk, log_w, inv_w, v):
        if arr is not None and not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise EStepUnderflow("non-finite posterior expectation", bad)
    return EStepWeights(w=w, log_w=log_w, inv_w=inv_w, v=v)
