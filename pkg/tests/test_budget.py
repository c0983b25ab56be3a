import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from silentqec.budget import BudgetParams, failure_budget, optimal_nc, required_ps, sweep

logs = lambda lo, hi: st.floats(lo, hi).map(lambda e: 10.0**e)


def _direct(bp):
    return bp.n_ops * bp.n_logical * ((bp.p / bp.p_th) ** bp.exponent() + bp.p_s * bp.n_code)


@given(logs(0, 6), logs(0, 3), st.floats(1, 400), logs(-4, -2.5), logs(-30, -2))
def test_log_space_matches_direct(n_ops, n_l, n_c, p, p_s):
    bp = BudgetParams(n_ops, n_l, n_c, p, 1e-2, p_s)
    direct = _direct(bp)
    assert math.isclose(failure_budget(bp).p_total, direct, rel_tol=1e-12)


@given(logs(5, 20), logs(0, 3), st.floats(4, 5000), logs(-6, -2.2), logs(-1, 0))
def test_required_ps_roundtrip(n_ops, n_l, n_c, p, target):
    bp = BudgetParams(n_ops, n_l, n_c, p, 1e-2)
    r = required_ps(bp, target)
    if r.feasible:
        back = failure_budget(BudgetParams(n_ops, n_l, n_c, p, 1e-2, r.p_s)).p_total
        assert math.isclose(back, target, rel_tol=1e-12)


def test_monotone_on_grids():
    base = BudgetParams(1e10, 10, 100, 1e-3, 1e-2, 1e-12)
    for name, vals in [("p", [1e-4, 1e-3, 5e-3]), ("p_s", [1e-14, 1e-12, 1e-10]),
                       ("n_ops", [1e8, 1e10, 1e12]), ("n_logical", [1, 10, 100])]:
        col = [r["p_total"] for r in sweep(base, **{name: vals})]
        assert np.all(np.diff(col) > 0), name
    no_silent = BudgetParams(1e10, 10, 100, 1e-3, 1e-2, 0.0)
    col = [r["p_total"] for r in sweep(no_silent, n_code=[9, 25, 49, 81])]
    assert np.all(np.diff(col) < 0)


def test_no_underflow():
    res = failure_budget(BudgetParams(1e15, 100, 1e7, 1e-8, 1e-2))
    assert res.qec_term == 0.0 and res.log_qec_term < -3000


def test_optimal_nc_shapes():
    base = BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, 1e-12)
    assert optimal_nc(base, range(4, 5000)).interior
    flat = optimal_nc(BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, 0.0), range(4, 5000))
    assert flat.n_code == 4999
    worse = optimal_nc(BudgetParams(1e15, 100, 1000, 1e-4, 1e-2, 1e-9), range(4, 5000))
    assert worse.n_code <= optimal_nc(base, range(4, 5000)).n_code


def test_infeasible_target():
    r = required_ps(BudgetParams(1e15, 100, 9, 5e-3, 1e-2), 1e-3)
    assert not r.feasible and r.p_s == 0.0


def test_repetition_form():
    bp = BudgetParams(1, 1, 10, 1e-3, 1e-2, form="repetition")
    assert math.isclose(failure_budget(bp).p_total, 1e-5, rel_tol=1e-12)


@pytest.mark.parametrize("kw", [dict(p=0.0), dict(p_s=2.0), dict(n_ops=0.5), dict(form="x")])
def test_validation(kw):
    args = dict(n_ops=1, n_logical=1, n_code=1, p=1e-3, p_th=1e-2)
    args.update(kw)
    with pytest.raises(ValueError):
        BudgetParams(**args)
