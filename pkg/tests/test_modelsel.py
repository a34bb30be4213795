import csv
import io
import json
import math

import numpy as np
import pytest

from alsm import ALParams, MODEL_TAGS, al_sample, alsm_sample, modelsel
from alsm.errors import DegenerateSupport, NestingViolation
from alsm.modelsel import COLUMNS, WILKS_CAVEAT, baseline_fit, compare, lr_test, n_params, scores_to_csv, scores_to_json

from grids import params


# -- likelihood-ratio test ---------------------------------------------------

def test_lr_equal_logliks():
    assert lr_test(-100.0, -100.0, 1) == (0.0, 1.0)


def test_lr_chi_square_one():
    stat, p = lr_test(-102.0, -100.0, 1)
    assert stat == 4.0
    assert p == pytest.approx(0.0455002638963584, rel=1e-12)


def test_lr_chi_square_two():
    stat, p = lr_test(-103.0, -100.0, 2)
    assert stat == 6.0
    assert p == pytest.approx(math.exp(-3.0), rel=1e-14)


def test_lr_slack_is_clamped():
    assert lr_test(-100.0, -100.0 - 5e-9, 1) == (0.0, 1.0)


def test_lr_nesting_violation():
    with pytest.raises(NestingViolation):
        lr_test(-100.0, -100.001, 1)
    with pytest.raises(ValueError):
        lr_test(-100.0, -99.0, 0)


@pytest.mark.parametrize("df", [1, 2])
def test_lr_pvalue_non_increasing(df):
    ps = [lr_test(0.0, 0.5 * s, df)[1] for s in np.linspace(0.0, 40.0, 201)]
    assert all(b <= a for a, b in zip(ps, ps[1:]))


# -- baselines and parameter counts ------------------------------------------

def test_normal_baseline_example():
    p, ll, k = baseline_fit("normal", [-1.0, 1.0])
    assert p == {"mean": 0.0, "variance": 1.0} and k == 2
    assert ll == pytest.approx(-(math.log(2 * math.pi) + 1.0), rel=1e-15)


def test_laplace_baseline_example():
    p, ll, k = baseline_fit("laplace", [0.0, 0.0, 3.0])
    assert p == {"location": 0.0, "scale": 1.0} and k == 2
    assert ll == pytest.approx(-3.0 * (math.log(2.0) + 1.0), rel=1e-15)


def test_normal_loglik_expectation():
    n = 100_000
    _, ll, _ = baseline_fit("normal", np.random.default_rng(1).normal(size=n))
    # the ML log-likelihood is -n/2 (ln 2 pi + 1 + ln s2); ln s2 has sd about sqrt(2/n)
    ref = -0.5 * n * (math.log(2 * math.pi) + 1.0)
    assert abs(ll - ref) < 4.0 * 0.5 * n * math.sqrt(2.0 / n)


def test_baseline_unknown():
    with pytest.raises(ValueError):
        baseline_fit("cauchy", [1.0, 2.0])


def test_parameter_counts():
    assert [n_params(t) for t in ("normal", "laplace", "al", "tp-al", "se-al")] == [2, 2, 3, 5, 4]
    with pytest.raises(ValueError):
        n_params("nope")


# -- comparison tables -------------------------------------------------------

@pytest.fixture(scope="module")
def table():
    x = alsm_sample(params("ug-al", 0.3, kappa=0.8), 800, seed=5)
    return x, compare(x, ["ug-al", "se-al", "tp-al", "al", "normal", "laplace"])


def test_al_only():
    x = al_sample(ALParams(0.0, 1.0, 1.2), 300, seed=2)
    (row,) = compare(x, ["al"])
    assert row.model == "al" and row.k == 3
    assert row.lr_stat is None and row.lr_df is None and row.lr_pvalue is None
    assert row.rank_aic == row.rank_bic == 1


def test_rows_follow_input_order(table):
    _, rows = table
    assert [r.model for r in rows] == ["ug-al", "se-al", "tp-al", "al", "normal", "laplace"]
    assert all(r.ok for r in rows)


def test_information_criteria_identities(table):
    x, rows = table
    n = x.size
    for r in rows:
        assert r.aic == 2 * r.k - 2 * r.loglik
        assert r.bic == r.k * math.log(n) - 2 * r.loglik
        assert r.aic - r.bic == pytest.approx(2 * r.k - r.k * math.log(n), abs=1e-9)


def test_lr_fields_only_for_nesting_models(table):
    _, rows = table
    al = next(r for r in rows if r.model == "al")
    for r in rows:
        if r.model in MODEL_TAGS:
            assert r.lr_df == (2 if r.model == "tp-al" else 1)
            assert r.lr_stat == pytest.approx(2 * (r.loglik - al.loglik), abs=1e-9)
            assert r.loglik >= al.loglik - 1e-8
        else:
            assert r.lr_stat is r.lr_df is r.lr_pvalue is None


def test_ranks_sort_criteria(table):
    _, rows = table
    for key, rank in (("aic", "rank_aic"), ("bic", "rank_bic")):
        order = sorted(rows, key=lambda r: getattr(r, key))
        assert [getattr(r, rank) for r in order] == sorted(getattr(r, rank) for r in rows)
        assert min(getattr(r, rank) for r in rows) == 1


def test_ranks_invariant_under_permutation(table):
    x, rows = table
    perm = compare(x, ["laplace", "al", "tp-al", "normal", "se-al", "ug-al"])
    by = {r.model: (r.rank_aic, r.rank_bic, r.loglik) for r in perm}
    for r in rows:
        assert by[r.model] == (r.rank_aic, r.rank_bic, r.loglik)


def test_failed_fit_is_captured(monkeypatch):
    x = al_sample(ALParams(0.0, 1.0, 1.0), 200, seed=3)
    real_fit = modelsel.fit

    def broken(tag, data, cfg=None):
        if tag == "se-al":
            raise DegenerateSupport("forced")
        return real_fit(tag, data, cfg)

    monkeypatch.setattr(modelsel, "fit", broken)
    rows = compare(x, ["se-al", "al", "normal"])
    bad = rows[0]
    assert not bad.ok and "DegenerateSupport" in bad.error
    assert bad.rank_aic is None and bad.loglik is None
    assert sorted(r.rank_aic for r in rows[1:]) == [1, 2]


def test_boundary_supremum_reports_al_value():
    # on AL data several families peak in their AL limit
    x = al_sample(ALParams(0.0, 1.0, 0.9), 400, seed=4)
    rows = compare(x, ["al", *MODEL_TAGS])
    al = rows[0]
    for r in rows[1:]:
        assert r.ok and r.loglik >= al.loglik
        if r.note:
            assert r.loglik == al.loglik and r.lr_stat == 0.0 and r.lr_pvalue == 1.0


def test_empty_model_list():
    with pytest.raises(ValueError):
        compare([1.0, 2.0, 3.0, 4.0, 5.0], [])


# -- serialization -----------------------------------------------------------

def test_csv_columns(table):
    _, rows = table
    text = scores_to_csv(rows)
    rec = list(csv.reader(io.StringIO(text)))
    assert tuple(rec[0]) == COLUMNS == ("model", "k", "loglik", "aic", "rank_aic", "bic", "rank_bic",
                                        "lr_stat", "lr_df", "lr_pvalue")
    assert len(rec) == len(rows) + 1
    al = rec[[r[0] for r in rec].index("al")]
    assert al[7:] == ["", "", ""]
    assert float(rec[1][2]) == rows[0].loglik


def test_json_document(table):
    _, rows = table
    doc = json.loads(scores_to_json(rows, {"seed": 1}))
    assert doc["columns"] == list(COLUMNS)
    assert doc["meta"]["seed"] == 1 and doc["meta"]["caveat"] == WILKS_CAVEAT
    assert [r["model"] for r in doc["rows"]] == [r.model for r in rows]
    assert list(doc["rows"][0])[:len(COLUMNS)] == list(COLUMNS)
    assert doc["rows"][0]["params"]["model"] == "ug-al"


# -- simulation experiment ---------------------------------------------------

@pytest.mark.slow
def test_u_al_wins_on_its_own_data():
    models = ["al", "se-al", "ug-al", "ig-al", "pf-al", "p-al", "u-al"]
    wins = 0
    for seed in range(20):
        x = alsm_sample(params("u-al", 0.95, kappa=0.8), 5000, seed=1000 + seed)
        rows = compare(x, models)
        wins += next(r for r in rows if r.model == "u-al").rank_aic == 1
    assert wins >= 16
