"""Command-line front end.

    alsm describe --input F --column C [--kind prices|returns]
    alsm fit      --model M --input F --column C [--init moments|default] [--max-iter N] [--tol T] [--out PATH]
    alsm compare  --input F --column C [--models m1,m2,...] [--out PATH] [--format csv|json]
    alsm simulate --model M --mu X --beta X --kappa X --theta X[,X] -n N --seed S [--out PATH]

Exit codes: 0 success, 2 input error, 3 degenerate or non-convergent fit
(reports are still written).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .ald import ALParams
from .errors import ALSMError, DegenerateSupport, FewerThanTwoPrices, InputError, MissingColumn, NonPositivePrice
from .family import MODEL_TAGS, ALSMParams, alsm_sample, make_mixing
from .fit import FitConfig, fit, sample_moments
from .modelsel import BASELINES, WILKS_CAVEAT, compare, scores_to_csv, scores_to_json
from .specfun import regularized_gamma_q

__all__ = ["ReturnSeries", "DescriptiveStats", "ingest_csv", "describe", "main",
           "cmd_describe", "cmd_fit", "cmd_compare", "cmd_simulate", "DEFAULT_SEED"]

DEFAULT_SEED = 20240101
EXIT_OK, EXIT_INPUT, EXIT_FIT = 0, 2, 3
_MISSING = {"", "null", "na", "nan", "n/a", "none"}
YAHOO_COLUMNS = {"date_column": "Date", "column": "Adj Close"}


@dataclass
class ReturnSeries:
    """Log-returns read from a file.

    Attributes
    ----------
    values : ndarray
        Finite returns in file order.
    label : str
        Column name.
    source : str
        File path.
    dropped : int
        Number of rows skipped for a missing value.
    dates : list of str
        Date of each return (the later price's row) when a date column was given.
    """

    values: np.ndarray
    label: str
    source: str
    dropped: int = 0
    dates: list = field(default_factory=list)


@dataclass
class DescriptiveStats:
    """Summary statistics of a return series (kurtosis is raw, not excess)."""

    n: int
    mean: float
    median: float
    st_dev: float
    skewness: float
    kurtosis: float
    excess_kurtosis: float
    minimum: float
    maximum: float
    jarque_bera_stat: float
    jarque_bera_pvalue: float


def _parse_float(text, row, column):
    t = text.strip()
    if t.lower() in _MISSING:
        return None
    try:
        return float(t)
    except ValueError:
        raise InputError(f"row {row}: {column!r} value {text!r} is not a number") from None


def ingest_csv(path, column: str, kind: str = "prices", date_column: str | None = None) -> ReturnSeries:
    """Read one column of a header-bearing CSV file as a return series.

    Parameters
    ----------
    path : str
        UTF-8 comma-separated file with a header row.
    column : str
        Column holding prices or returns.
    kind : {"prices", "returns"}
        Prices become log-returns log(p[i+1] / p[i]) in file order; returns
        pass through.
    date_column : str, optional
        Column of row labels carried along as ``dates``.

    Rows whose value is blank (or ``null``/``NA``) are dropped and counted.

    Raises
    ------
    MissingColumn, NonPositivePrice, FewerThanTwoPrices, InputError
    """
    if kind not in ("prices", "returns"):
        raise InputError(f"unknown kind {kind!r}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise InputError(f"{path}: empty file")
            header = [h.strip() for h in header]
            for name in (column, date_column):
                if name is not None and name not in header:
                    raise MissingColumn(f"{path}: no column {name!r} (have {', '.join(header)})")
            ci = header.index(column)
            di = header.index(date_column) if date_column else None
            vals, dates, dropped = [], [], 0
            for row_no, row in enumerate(reader, start=1):
                if not row:
                    continue
                v = _parse_float(row[ci], row_no, column) if ci < len(row) else None
                if v is None:
                    dropped += 1
                    continue
                if kind == "prices" and not v > 0:
                    raise NonPositivePrice(f"row {row_no}: non-positive price {v!r}", row_no)
                if not math.isfinite(v):
                    raise InputError(f"row {row_no}: non-finite value")
                vals.append(v)
                dates.append(row[di].strip() if di is not None and di < len(row) else "")
    except OSError as err:
        raise InputError(f"cannot read {path}: {err}") from None
    x = np.array(vals, dtype=float)
    if kind == "prices":
        if x.size < 2:
            raise FewerThanTwoPrices(f"{path}: need at least two prices, found {x.size}")
        x = np.diff(np.log(x))
        dates = dates[1:]
    return ReturnSeries(x, column, str(path), dropped, dates if date_column else [])


def describe(s) -> DescriptiveStats:
    """Descriptive statistics with the Jarque-Bera normality test.

    Standard deviation uses the n-1 denominator; skewness and kurtosis are
    the moment ratios (1/n) sum (x - mean)^k / s^k with that s.  For a
    constant series skewness, kurtosis and the test are NaN.
    """
    x = np.asarray(getattr(s, "values", s), dtype=float)
    n = x.size
    if n < 2:
        raise InputError("describe needs at least two values")
    mean, s2, skew, kurt = sample_moments(x)
    if math.isfinite(kurt):
        jb = n * (skew * skew / 6.0 + (kurt - 3.0) ** 2 / 24.0)
        pv = regularized_gamma_q(1.0, 0.5 * jb)
    else:
        jb = pv = math.nan
    return DescriptiveStats(n=n, mean=mean, median=float(np.median(x)), st_dev=math.sqrt(s2),
                            skewness=skew, kurtosis=kurt, excess_kurtosis=kurt - 3.0,
                            minimum=float(x.min()), maximum=float(x.max()),
                            jarque_bera_stat=float(jb), jarque_bera_pvalue=float(pv))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _series(args) -> ReturnSeries:
    yahoo = getattr(args, "input_format", None) == "yahoo-csv"
    column = args.column or (YAHOO_COLUMNS["column"] if yahoo else None)
    if column is None:
        raise InputError("--column is required")
    date_col = args.date_column or (YAHOO_COLUMNS["date_column"] if yahoo else None)
    kind = args.kind or "prices"
    s = ingest_csv(args.input, column, kind, date_col)
    if s.dropped:
        print(f"dropped {s.dropped} row(s) with missing values", file=sys.stderr)
    return s


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def cmd_describe(args) -> int:
    """Print descriptive statistics as ``key: value`` lines."""
    s = _series(args)
    st = describe(s)
    lines = [f"source: {s.source}", f"column: {s.label}", f"dropped_rows: {s.dropped}"]
    lines += [f"{k}: {_fmt(v)}" for k, v in asdict(st).items()]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _fit_config(args) -> FitConfig:
    return FitConfig(max_iter=args.max_iter, loglik_rel_tol=args.tol, init=args.init)


def cmd_fit(args) -> int:
    """Fit one model and write the result as JSON."""
    s = _series(args)
    if s.values.size < 5:
        raise InputError("fitting needs at least 5 returns")
    try:
        res = fit(args.model, s.values, _fit_config(args))
    except DegenerateSupport as err:
        print(f"degenerate fit: {err}", file=sys.stderr)
        return EXIT_FIT
    doc = {"seed": args.seed, "source": s.source, "column": s.label, "n": int(s.values.size), **res.to_dict()}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if res.converged else EXIT_FIT


def cmd_compare(args) -> int:
    """Fit a set of models and write the ranked table as CSV or JSON."""
    s = _series(args)
    if s.values.size < 5:
        raise InputError("fitting needs at least 5 returns")
    models = [m.strip() for m in args.models.split(",")] if args.models else None
    allowed = {*MODEL_TAGS, "al", *BASELINES}
    for m in models or ():
        if m not in allowed:
            raise InputError(f"unknown model {m!r}")
    rows = compare(s.values, models, _fit_config(args))
    print(WILKS_CAVEAT, file=sys.stderr)
    if args.format == "json":
        meta = {"seed": args.seed, "source": s.source, "column": s.label, "n": int(s.values.size)}
        text = scores_to_json(rows, meta)
    else:
        text = scores_to_csv(rows)
    _emit(text, args.out)
    bad = [r.model for r in rows if not r.ok or r.converged is False]
    if bad:
        print(f"failed or non-convergent: {', '.join(bad)}", file=sys.stderr)
        return EXIT_FIT
    return EXIT_OK


def cmd_simulate(args) -> int:
    """Draw a sample and write it as a one-column CSV."""
    try:
        al = ALParams(args.mu, args.beta, args.kappa)
        if args.model == "al":
            p = ALSMParams(al)
        else:
            if args.theta is None:
                raise InputError(f"--theta is required for {args.model}")
            th = [float(t) for t in args.theta.split(",")]
            p = ALSMParams(al, make_mixing(args.model, th if len(th) > 1 else th[0]))
    except ValueError as err:
        raise InputError(str(err)) from None
    if args.n < 1:
        raise InputError("-n must be positive")
    x = alsm_sample(p, args.n, args.seed)
    _emit("x\n" + "".join(f"{v!r}\n" for v in x.tolist()), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_input(p, output_format: bool = False):
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--column", help="price or return column")
    p.add_argument("--kind", choices=("prices", "returns"), help="column content (default prices)")
    p.add_argument("--date-column", help="optional date column carried along")
    fmt = ("--input-format",) if output_format else ("--input-format", "--format")
    p.add_argument(*fmt, dest="input_format", choices=("plain", "yahoo-csv"), default="plain",
                   help="yahoo-csv maps the Date / Adj Close columns")


def _add_fit(p):
    p.add_argument("--init", choices=("default", "moments"), default="default")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-8, help="relative log-likelihood tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alsm", description="Asymmetric Laplace scale mixtures")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    tags = (*MODEL_TAGS,)

    p = sub.add_parser("describe", help="descriptive statistics of a return series")
    _add_input(p)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("fit", help="fit one model")
    p.add_argument("--model", required=True, choices=(*tags, "al"))
    _add_input(p)
    _add_fit(p)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="rank models by AIC, BIC and LR tests")
    _add_input(p, output_format=True)
    p.add_argument("--models", help="comma-separated tags (default: all mixtures, al, baselines)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_fit(p)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="draw from a model")
    p.add_argument("--model", required=True, choices=(*tags, "al"))
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--theta", help="theta value; two comma-separated values for tp-al")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "seed"):
        print(f"seed: {args.seed}", file=sys.stderr)
    try:
        return args.func(args)
    except InputError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ALSMError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
