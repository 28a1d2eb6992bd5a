import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdshuffle.baselines import MaskSpec, Method
from sdshuffle.core import InvalidInputError, InvalidParameterError
from sdshuffle.metrics import MetricBundle
from sdshuffle.scoring import (
    compute_scores,
    median_bundle,
    parse_grid,
    select_best_parameter,
    select_from_grid,
)

unit = st.floats(0, 1)


def bundle(dbrl, rid, sdid, ps, pil, brmae, brmse, mae=0.0, mse=0.0):
    return MetricBundle(dbrl, rid, sdid, ps, pil, mae, mse, brmae, brmse)


bundles = st.builds(bundle, unit, unit, unit, unit, unit, unit, unit, st.floats(0, 1e6), st.floats(0, 1e6))


def test_all_ones_and_zeros():
    s = compute_scores(bundle(*[1.0] * 7))
    assert (s.avg_il, s.avg_dr, s.overall) == pytest.approx((1, 1, 1), abs=1e-15)
    assert compute_scores(bundle(*[0.0] * 7)) == compute_scores(bundle(*[0.0] * 7, mae=5, mse=9))
    s = compute_scores(bundle(*[0.0] * 7))
    assert (s.avg_il, s.avg_dr, s.overall) == (0, 0, 0)


def test_worked_bundle():
    s = compute_scores(bundle(0.2, 0.04, 0.02, 0.1, 0.3, 0.5, 0.4))
    assert round(s.avg_dr, 4) == 0.0867
    assert round(s.avg_il, 4) == 0.2833
    assert round(s.overall, 4) == 0.1850


@settings(max_examples=300)
@given(bundles)
def test_overall_is_mean_of_groups(b):
    s = compute_scores(b)
    assert s.overall == pytest.approx((s.avg_il + s.avg_dr) / 2, abs=1e-12)
    assert 0 <= s.overall <= 1


@pytest.mark.parametrize("name", MetricBundle.BOUNDED)
def test_out_of_range_rejected(name):
    values = dict(dbrl=0.1, rid=0.1, sdid=0.1, ps_scaled=0.1, pil=0.1, mae=1, mse=1, brmae=0.1, brmse=0.1)
    values[name] = 1.5
    with pytest.raises(InvalidInputError):
        compute_scores(MetricBundle(**values))


def test_median_bundle():
    bs = [bundle(*[v] * 7) for v in (0.1, 0.9, 0.3)]
    assert median_bundle(bs).dbrl == 0.3


def test_select_three_point_example():
    rows = [(1, 0.5, 0.1, 0.0), (2, 0.15, 0.3, 0.0), (3, 0.18, 0.25, 0.0)]
    feasible, selected = select_from_grid(rows, 0.2)
    assert feasible == [2, 3] and selected == 3
    assert select_from_grid(rows, 1.0)[1] == 1


def test_select_ties_prefer_lower_risk_then_smaller_param():
    rows = [(30, 0.1, 0.2, 0.3), (20, 0.1, 0.2, 0.1), (10, 0.1, 0.2, 0.1)]
    assert select_from_grid(rows, 0.2)[1] == 10
    rows = [(30, 0.1, 0.2, 0.05), (10, 0.1, 0.2, 0.1)]
    assert select_from_grid(rows, 0.2)[1] == 30


def test_select_infeasible():
    assert select_from_grid([(1, 0.5, 0.1, 0.0)], 0.2) == ([], None)


@settings(max_examples=200)
@given(
    st.lists(st.tuples(unit, unit, unit), min_size=1, max_size=15),
    st.floats(0.01, 1),
    st.floats(0.01, 1),
)
def test_raising_threshold_never_worsens_selection(rows, t1, t2):
    lo, hi = sorted((t1, t2))
    grid = [(i, d, o, r) for i, (d, o, r) in enumerate(rows)]
    overall = {i: o for i, _, o, _ in grid}
    _, a = select_from_grid(grid, lo)
    _, b = select_from_grid(grid, hi)
    if a is not None:
        assert b is not None and overall[b] <= overall[a]


def _small_data():
    rng = np.random.default_rng(0)
    cov = 0.6 ** np.abs(np.subtract.outer(np.arange(3), np.arange(3)))
    return rng.multivariate_normal(np.zeros(3), cov, size=60)


def test_select_best_parameter_small_run():
    x = _small_data()
    grid = [MaskSpec(Method.SJPPDS_SIMPLIFIED, c) for c in (2, 5, 20)]
    res = select_best_parameter(x, grid, threshold=0.5, replications=3, seed=7)
    assert [g.param for g in res.grid] == [2, 5, 20]
    assert all(len(g.replications) == 3 for g in res.grid)
    assert res.feasible and res.selected in res.feasible_set
    # re-scan the serialized report independently
    report = json.loads(json.dumps(res.as_dict()))
    feasible = [g for g in report["grid"] if g["median"]["dbrl"] < report["threshold"]]
    assert [g["param"] for g in feasible] == report["feasible_set"]
    best = min(g["scores"]["overall"] for g in feasible)
    assert report["selected"] in [g["param"] for g in feasible if g["scores"]["overall"] == best]
    for g in report["grid"]:
        med = np.median([r["dbrl"] for r in g["replications"]])
        assert g["median"]["dbrl"] == med


def test_select_best_parameter_reproducible_and_parallel():
    x = _small_data()
    grid = [MaskSpec(Method.SJPPDS_SIMPLIFIED, c) for c in (3, 10)]
    a = select_best_parameter(x, grid, replications=2, seed=1).as_dict()
    b = select_best_parameter(x, grid, replications=2, seed=1, workers=2).as_dict()
    assert a == b


def test_deterministic_methods_run_once():
    x = _small_data()
    res = select_best_parameter(x, [MaskSpec(Method.MDAV, 3)], threshold=1.0, replications=5)
    assert len(res.grid[0].replications) == 1


def test_infeasible_grid_is_reported():
    x = _small_data()
    res = select_best_parameter(x, [MaskSpec(Method.MDAV, 2)], threshold=1e-9, replications=1)
    assert not res.feasible and res.selected is None and res.feasible_set == []
    assert len(res.grid) == 1
    assert res.as_dict()["feasible"] is False


@pytest.mark.parametrize(
    "kwargs",
    [dict(spec_grid=[]), dict(replications=0), dict(threshold=0.0), dict(threshold=1.5)],
)
def test_select_best_parameter_validation(kwargs):
    args = dict(original=_small_data(), spec_grid=[MaskSpec(Method.MDAV, 2)])
    args.update(kwargs)
    with pytest.raises(InvalidParameterError):
        select_best_parameter(**args)


def test_parse_grid():
    assert parse_grid("10:10:300") == list(range(10, 301, 10))
    assert parse_grid("1:4:117")[-1] == 117
    assert parse_grid("2,3,5") == [2, 3, 5]
    assert parse_grid("0.5,1") == [0.5, 1]
    for bad in ("a:b:c", "5:0:10", "10:1:5", "", "x,y"):
        with pytest.raises(InvalidParameterError):
            parse_grid(bad)
