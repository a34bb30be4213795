"""EM-type fitting loop shared by all eight mixture models.

Each iteration computes posterior expectations of W, updates
(mu, beta, kappa) by the weighted order-statistic scan and then theta:

* EM for the shifted exponential, unimodal gamma, gamma, inverse Gaussian,
  power-function and Pareto mixtures;
* ECM for the two-point mixture (theta1 with the first conditional step,
  the contamination factor theta2 conditional on the new mu, beta, kappa);
* ECME for the uniform mixture, whose theta maximizes the observed
  log-likelihood directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..ald import ALParams, al_fit
from ..errors import ALSMError, BracketFailure
from ..family import ALSMParams, MODEL_TAGS, alsm_loglik, params_to_dict
from .estep import estep
from .mm import default_init, method_of_moments
from .mstep import THETA_BOUNDS, mstep_theta
from .q1 import maximize_q1

__all__ = ["FitConfig", "FitResult", "fit", "fit_al"]


@dataclass(frozen=True)
class FitConfig:
    """Controls for :func:`fit`.

    Parameters
    ----------
    max_iter : int
        Iteration cap.
    loglik_rel_tol : float
        Stop when |l_t - l_{t-1}| / (1 + |l_t|) falls below this.
    init : {"default", "moments"} or ALSMParams
        Starting values.
    theta_bounds : dict, optional
        Per-tag overrides of the theta search intervals.
    accelerate : bool
        After each EM step, try moving further along the step direction
        (step doubling) and keep the move only if the observed
        log-likelihood improves.  The trace stays non-decreasing.
    """

    max_iter: int = 1000
    loglik_rel_tol: float = 1e-8
    init: object = "default"
    theta_bounds: dict | None = None
    accelerate: bool = True

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.loglik_rel_tol > 0:
            raise ValueError("loglik_rel_tol must be positive")


@dataclass
class FitResult:
    """Outcome of a fit; ``loglik`` equals the last trace entry."""

    params: ALSMParams
    loglik: float
    n_iter: int
    converged: bool
    loglik_trace: list = field(default_factory=list)

    @property
    def model(self) -> str:
        return self.params.model

    def to_dict(self) -> dict:
        return {"model": self.model, "params": params_to_dict(self.params), "loglik": float(self.loglik),
                "n_iter": int(self.n_iter), "converged": bool(self.converged),
                "trace": [float(v) for v in self.loglik_trace]}


def fit_al(data, cfg: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of the plain AL law (closed-form scan)."""
    p, ll = al_fit(data)
    return FitResult(ALSMParams(p), ll, 1, True, [ll])


def _to_vec(p, bnd):
    # unconstrained coordinates: mu, log beta, log kappa, then theta mapped
    # onto the real line according to its search interval
    z = [p.al.mu, math.log(p.al.beta), math.log(p.al.kappa)]
    ivals = bnd if isinstance(bnd[0], tuple) else (bnd,)
    for t, (lo, hi) in zip(p.mixing.thetas, ivals):
        z.append(_fwd(t, lo, hi))
    return np.array(z)


def _fwd(t, lo, hi):
    if hi <= 1.0:
        r = (t - lo) / (hi - lo)
        return math.log(r / (1.0 - r)) if 0 < r < 1 else (-40.0 if r <= 0 else 40.0)
    return math.log(t - lo) if t > lo else -40.0


def _back(z, lo, hi):
    if hi <= 1.0:
        t = lo + (hi - lo) / (1.0 + math.exp(-z))
    else:
        t = lo + math.exp(min(z, 700.0))
    return min(max(t, lo), hi)


def _from_vec(z, cls, bnd):
    ivals = bnd if isinstance(bnd[0], tuple) else (bnd,)
    th = [_back(v, lo, hi) for v, (lo, hi) in zip(z[3:], ivals)]
    return ALSMParams(ALParams(float(z[0]), math.exp(z[1]), math.exp(z[2])), cls(*th))


def _extrapolate(x, p_old, p_new, ll_new, bnd, max_doublings=10):
    """Step doubling along the last EM direction; returns the best (p, ll)."""
    cls = type(p_new.mixing)
    z0, z1 = _to_vec(p_old, bnd), _to_vec(p_new, bnd)
    step = z1 - z0
    best_p, best_ll = p_new, ll_new
    s = 1.0
    for _ in range(max_doublings):
        s *= 2.0
        try:
            cand = _from_vec(z0 + s * step, cls, bnd)
            ll = alsm_loglik(x, cand)
        except (ValueError, ArithmeticError, ALSMError):
            break
        if not (np.isfinite(ll) and ll > best_ll):
            break
        best_p, best_ll = cand, ll
    return best_p, best_ll


def _initial(tag, x, cfg):
    init = cfg.init
    if isinstance(init, ALSMParams):
        if init.model != tag:
            raise ValueError(f"initial parameters are for {init.model}, not {tag}")
        return init
    if init == "moments":
        return method_of_moments(tag, x)[0]
    if init == "default":
        return default_init(tag, x)
    raise ValueError(f"unknown init {init!r}")


def fit(tag: str, data, cfg: FitConfig | None = None) -> FitResult:
    """Maximum-likelihood fit of model ``tag`` by EM, ECM or ECME.

    Raises
    ------
    DegenerateSupport
        If the location scan finds no interior optimum.
    """
    cfg = cfg or FitConfig()
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size < 5:
        raise ValueError("fit needs a one-dimensional sample of size >= 5")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")
    if tag == "al":
        return fit_al(x, cfg)
    if tag not in MODEL_TAGS:
        raise ValueError(f"unknown model tag {tag!r}")
    bounds = (cfg.theta_bounds or {}).get(tag)
    order = np.argsort(x, kind="stable")
    p = _initial(tag, x, cfg)
    ll = alsm_loglik(x, p)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, int(cfg.max_iter) + 1):
        wts = estep(p, x)
        mu, beta, kappa = maximize_q1(x, wts.w, order)
        al_new = ALParams(mu, beta, kappa)
        try:
            mix = mstep_theta(tag, wts, x, p, al_new, bounds)
        except BracketFailure as err:
            mix = type(p.mixing)(err.theta)
        p_prev, p = p, ALSMParams(al_new, mix)
        ll_new = alsm_loglik(x, p)
        if cfg.accelerate and ll_new > ll:
            p, ll_new = _extrapolate(x, p_prev, p, ll_new, bounds or THETA_BOUNDS[tag])
        trace.append(ll_new)
        if abs(ll_new - ll) / (1.0 + abs(ll_new)) < cfg.loglik_rel_tol:
            converged = True
            break
        ll = ll_new
    return FitResult(p, trace[-1], it, converged, trace)
