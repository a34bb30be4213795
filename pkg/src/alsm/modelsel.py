"""Model comparison: information criteria, likelihood-ratio tests, rankings.

AIC and BIC are reported in their minimized forms, 2k - 2l and k ln n - 2l.
The maximized negatives give the same rankings.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ald import ALParams
from .errors import ALSMError, NestingViolation
from .family import MODEL_TAGS, ALSMParams, make_mixing, params_to_dict
from .fit import FitConfig, FitResult, fit, fit_al
from .specfun import regularized_gamma_q

__all__ = ["ModelScore", "BASELINES", "COLUMNS", "NEAR_AL_THETA", "WILKS_CAVEAT", "lr_test",
           "baseline_fit", "compare", "n_params", "scores_to_csv", "scores_to_json"]

BASELINES = ("normal", "laplace")
COLUMNS = ("model", "k", "loglik", "aic", "rank_aic", "bic", "rank_bic", "lr_stat", "lr_df", "lr_pvalue")
NESTING_SLACK = 1e-8

# theta values close to the limit in which each family reduces to the AL law,
# used to restart a fit that ended below the AL log-likelihood
NEAR_AL_THETA = {"tp-al": (1.0 - 1e-6, 1.01), "se-al": 1e4, "ug-al": 1e-4, "ig-al": 1e-4,
                 "pf-al": 1e4, "p-al": 1e4, "u-al": 1e-4, "g-al": 1e4}

WILKS_CAVEAT = ("note: LR p-values use the plain chi-square reference; several families "
                "reach the AL law on the boundary of theta, where this is only approximate")


@dataclass
class ModelScore:
    """One row of a comparison table.

    The LR fields are set only for models that nest the AL law.  A failed
    fit keeps ``error`` and has no likelihood or ranks.  ``note`` flags a
    mixture whose likelihood is maximized in its AL limit; its log-likelihood
    is then the AL value.
    """

    model: str
    k: int
    loglik: float | None = None
    aic: float | None = None
    bic: float | None = None
    lr_stat: float | None = None
    lr_df: int | None = None
    lr_pvalue: float | None = None
    rank_aic: int | None = None
    rank_bic: int | None = None
    error: str | None = None
    note: str | None = None
    converged: bool | None = None
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None


def n_params(tag: str) -> int:
    """Number of free parameters of a model or baseline."""
    if tag in BASELINES:
        return 2
    if tag == "al":
        return 3
    if tag == "tp-al":
        return 5
    if tag in MODEL_TAGS:
        return 4
    raise ValueError(f"unknown model tag {tag!r}")


def lr_test(null_loglik: float, alt_loglik: float, df: int):
    """Likelihood-ratio test of a nested null against its alternative.

    Parameters
    ----------
    null_loglik, alt_loglik : float
        Maximized log-likelihoods of the nested and the full model.
    df : int
        Number of extra parameters in the full model.

    Returns
    -------
    stat, pvalue : float
        ``stat = -2 (null - alt)`` (clamped at 0) and its chi-square(df)
        survival probability.

    Raises
    ------
    NestingViolation
        If ``alt_loglik`` is below ``null_loglik`` by more than 1e-8.
    """
    if int(df) < 1:
        raise ValueError("df must be >= 1")
    if alt_loglik < null_loglik - NESTING_SLACK:
        raise NestingViolation(f"alternative log-likelihood {alt_loglik!r} is below the null {null_loglik!r}")
    stat = max(0.0, -2.0 * (null_loglik - alt_loglik))
    return stat, regularized_gamma_q(0.5 * df, 0.5 * stat)


def baseline_fit(tag: str, data):
    """Closed-form ML fit of a two-parameter baseline.

    ``normal`` uses the mean and the ML (1/n) variance, ``laplace`` the
    median and the mean absolute deviation about it.

    Returns
    -------
    params : dict
    loglik : float
    k : int
    """
    x = np.asarray(data, dtype=float)
    n = x.size
    if tag == "normal":
        m = float(x.mean())
        var = float(np.mean((x - m) ** 2))
        ll = -0.5 * n * (math.log(2.0 * math.pi * var) + 1.0) if var > 0 else math.inf
        return {"mean": m, "variance": var}, ll, 2
    if tag == "laplace":
        m = float(np.median(x))
        b = float(np.mean(np.abs(x - m)))
        ll = -n * (math.log(2.0 * b) + 1.0) if b > 0 else math.inf
        return {"location": m, "scale": b}, ll, 2
    raise ValueError(f"unknown baseline {tag!r}")


def _dense_ranks(values):
    # dense ranking of finite values, ascending; ties share a rank
    uniq = sorted(set(values))
    pos = {v: i + 1 for i, v in enumerate(uniq)}
    return [pos[v] for v in values]


def _near_al_start(tag, al: ALParams) -> ALSMParams:
    return ALSMParams(al, make_mixing(tag, NEAR_AL_THETA[tag]))


def _fit_nested(tag, x, cfg, al_res: FitResult) -> FitResult:
    res = None
    try:
        res = fit(tag, x, cfg)
    except ALSMError:
        pass
    if res is None or res.loglik < al_res.loglik - NESTING_SLACK:
        # restart next to the AL law; EM cannot go below its starting value
        alt_cfg = FitConfig(max_iter=cfg.max_iter, loglik_rel_tol=cfg.loglik_rel_tol,
                            init=_near_al_start(tag, al_res.params.al),
                            theta_bounds=cfg.theta_bounds, accelerate=cfg.accelerate)
        res2 = fit(tag, x, alt_cfg)
        if res is None or res2.loglik > res.loglik:
            res = res2
    return res


def compare(data, models=None, cfg: FitConfig | None = None):
    """Fit each model and build a ranked comparison table.

    Parameters
    ----------
    data : array_like
        The sample.
    models : sequence of str, optional
        Model tags (ALSM tags, ``al``, ``normal``, ``laplace``).  Defaults to
        all eight mixtures, the AL law and both baselines.
    cfg : FitConfig, optional
        Passed to every EM fit.

    Returns
    -------
    list of ModelScore
        In the order of ``models``.  Ranks are dense over successful fits;
        LR statistics are computed against one shared AL fit.
    """
    x = np.asarray(data, dtype=float)
    n = x.size
    models = list(models) if models is not None else [*MODEL_TAGS, "al", *BASELINES]
    if not models:
        raise ValueError("at least one model is needed")
    cfg = cfg or FitConfig()
    al_res = None
    al_err = None
    if any(m == "al" or m in MODEL_TAGS for m in models):
        try:
            al_res = fit_al(x, cfg)
        except ALSMError as err:
            al_err = f"{type(err).__name__}: {err}"
    rows = []
    for tag in models:
        row = ModelScore(tag, n_params(tag))
        try:
            if tag in BASELINES:
                params, ll, _ = baseline_fit(tag, x)
                row.params, row.converged = {"model": tag, **params}, True
            elif al_res is None:
                raise ALSMError(al_err or "AL fit unavailable")
            elif tag == "al":
                ll, row.params, row.converged = al_res.loglik, params_to_dict(al_res.params), True
            else:
                res = _fit_nested(tag, x, cfg, al_res)
                ll, row.params, row.converged = res.loglik, params_to_dict(res.params), res.converged
                if ll < al_res.loglik:
                    # the AL law is the theta-limit of the family, so the
                    # supremum is at least the AL value; EM creeps towards a
                    # boundary optimum too slowly to reach it
                    ll = al_res.loglik
                    row.note = "supremum in the AL limit of theta; AL log-likelihood reported"
                row.lr_df = row.k - 3
                row.lr_stat, row.lr_pvalue = lr_test(al_res.loglik, ll, row.lr_df)
            if not math.isfinite(ll):
                raise ALSMError("non-finite log-likelihood")
        except (ALSMError, ValueError, ArithmeticError) as err:
            row = ModelScore(tag, row.k, error=f"{type(err).__name__}: {err}")
            rows.append(row)
            continue
        row.loglik = float(ll)
        row.aic = 2.0 * row.k - 2.0 * row.loglik
        row.bic = row.k * math.log(n) - 2.0 * row.loglik
        rows.append(row)
    good = [r for r in rows if r.ok]
    for r, ra, rb in zip(good, _dense_ranks([r.aic for r in good]), _dense_ranks([r.bic for r in good])):
        r.rank_aic, r.rank_bic = ra, rb
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def scores_to_csv(scores) -> str:
    """CSV text with the fixed column order of :data:`COLUMNS`."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for s in scores:
        w.writerow([_fmt(getattr(s, c)) for c in COLUMNS])
    return buf.getvalue()


def scores_to_json(scores, meta: dict | None = None) -> str:
    """JSON text: ``{"meta": ..., "columns": [...], "rows": [...]}``.

    Each row holds the table columns followed by ``converged``, ``error``,
    ``note`` and the fitted parameters.
    """
    rows = []
    for s in scores:
        d = asdict(s)
        rows.append({**{c: d[c] for c in COLUMNS}, "converged": d["converged"],
                     "error": d["error"], "note": d["note"], "params": d["params"]})
    doc = {"meta": {"criteria": "aic = 2k - 2 loglik, bic = k ln(n) - 2 loglik (smaller is better)",
                    "caveat": WILKS_CAVEAT, **(meta or {})},
           "columns": list(COLUMNS), "rows": rows}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
