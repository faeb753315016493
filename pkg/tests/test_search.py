from fractions import Fraction as F

import pytest

from oracles import abs_p, qabs_lt
from sapairs.exact import ARCHIMEDEAN, ExtReal
from sapairs.forms import LinForm, PairInstance, QuadForm
from sapairs.instance import load_instance
from sapairs.local import check_hypotheses
from sapairs.search import (
    EXHAUSTED,
    PreconditionError,
    SearchBudget,
    Violation,
    Witness,
    epsilon_experiment,
    obstruction_scan,
    precision_for,
    reduce_dimension,
    scaling_law_holds,
    search_witness,
    verify_witness,
)

R2 = ExtReal.sqrt(2)


@pytest.fixture(scope="module")
def i1():
    return load_instance("builtin:i1")


@pytest.fixture(scope="module")
def control():
    return load_instance("builtin:control")


def independent_check(x, eps_inf, eps5):
    """I1 forms re-evaluated as (a, b) pairs without the package."""
    x1, x2, x3, x4 = (F(c) for c in x)
    a, b = x1 * x2 - x4 * x4, x3 * x3
    q5 = x1 * x2 + x3 * x3 - x4 * x4
    return (
        qabs_lt(a, b, 2, F(eps_inf))
        and qabs_lt(x4, F(0), 2, F(eps_inf))
        and abs_p(q5, 5) < eps5
        and abs_p(x4, 5) < eps5
    )


@pytest.mark.parametrize("eps,m", [(F(1, 5), 2), (F(1, 25), 3), (F(1, 10), 2), (1, 1), (5, 0), (F(26), -2)])
def test_precision_for(eps, m):
    assert precision_for(eps, 5) == m
    assert F(1, 5) ** m < eps <= F(1, 5) ** (m - 1)


def test_verify_documented_witness(i1):
    w = verify_witness(i1, (1, -1, 1, 0), {ARCHIMEDEAN: 1, 5: F(1, 5)})
    assert isinstance(w, Witness)
    assert w.values[ARCHIMEDEAN][0] == -1 + R2
    assert w.values[5] == (0, 0)
    assert (5, "Q") in w.exact_zero and not w.null


def test_verify_rejects_zero_and_bad_denominators(i1):
    with pytest.raises(ValueError):
        verify_witness(i1, (0, 0, 0, 0), {ARCHIMEDEAN: 1, 5: 1})
    with pytest.raises(ValueError):
        verify_witness(i1, (F(1, 3), 0, 0, 0), {ARCHIMEDEAN: 1, 5: 1})
    assert isinstance(verify_witness(i1, (F(1, 5), 0, 0, 0), {ARCHIMEDEAN: 1, 5: 1}), Witness)


def test_verify_reports_violation(control):
    out = verify_witness(control, (3, 1, 0, 0), {ARCHIMEDEAN: 1, 5: 1})
    assert isinstance(out, list) and out
    v = out[0]
    assert isinstance(v, Violation) and v.place == ARCHIMEDEAN and v.form == "Q"
    assert v.magnitude == 3 and v.margin == 2


def test_verify_strictness(i1):
    # |L| = 1 is not < 1
    out = verify_witness(i1, (0, 0, 0, 1), {ARCHIMEDEAN: 1, 5: 2})
    assert any(v.form == "L" and v.place == ARCHIMEDEAN for v in out)


def test_search_small_eps(i1):
    eps = {ARCHIMEDEAN: F(1, 2), 5: F(1, 5)}
    res = search_witness(i1, eps, SearchBudget(max_steps=10**4))
    assert res.found and res.steps <= 10**4
    assert independent_check(res.witness.x, F(1, 2), F(1, 5))


def test_search_thousandth(i1):
    eps = {ARCHIMEDEAN: F(1, 1000), 5: F(1, 25)}
    res = search_witness(i1, eps, SearchBudget(max_steps=10**6))
    assert res.found
    x = res.witness.x
    assert independent_check(x, F(1, 1000), F(1, 25))
    assert x[3] == 0 and x[2] != 0


def test_search_budget_one(i1):
    res = search_witness(i1, {ARCHIMEDEAN: F(1, 1000), 5: F(1, 125)}, SearchBudget(max_steps=1))
    assert res.status == EXHAUSTED and res.steps <= 1


def test_search_refuses_failing_instance(control):
    with pytest.raises(PreconditionError):
        search_witness(control, {ARCHIMEDEAN: 1, 5: 1})


def test_search_is_deterministic(i1):
    eps = {ARCHIMEDEAN: F(1, 100), 5: F(1, 25)}
    a = search_witness(i1, eps, SearchBudget(seed=3))
    b = search_witness(i1, eps, SearchBudget(seed=3))
    assert a.witness.x == b.witness.x and a.steps == b.steps and a.strategy == b.strategy


def test_experiment_empty_schedule(i1):
    assert epsilon_experiment(i1, []) == []


def test_experiment_rows_found_and_reused(i1):
    sched = [{ARCHIMEDEAN: e, 5: e5} for e in (1, F(1, 2), F(1, 10)) for e5 in (F(1, 5), F(1, 25))]
    rows = epsilon_experiment(i1, sched)
    assert len(rows) == 6
    for row in rows:
        assert row.result.found
        w = row.result.witness
        assert independent_check(w.x, row.eps[ARCHIMEDEAN], row.eps[5])
    assert any(r.reused for r in rows)


def test_experiment_control_all_exhausted(control):
    sched = [{ARCHIMEDEAN: F(1, 2), 5: F(1, 5)}, {ARCHIMEDEAN: F(1, 10), 5: F(1, 25)}]
    rows = epsilon_experiment(control, sched, SearchBudget(max_steps=5000), override=True)
    assert [r.result.status for r in rows] == [EXHAUSTED, EXHAUSTED]


def test_control_null_witness_is_flagged(control):
    # (1, 0, 0, 0) zeroes Q and L.  Verification is literal; search skips it.
    w = verify_witness(control, (1, 0, 0, 0), {ARCHIMEDEAN: F(1, 2), 5: F(1, 5)})
    assert isinstance(w, Witness) and w.null


def test_scaling_law(i1):
    eps = {ARCHIMEDEAN: F(1, 10), 5: F(1, 25)}
    w = search_witness(i1, eps).witness
    assert scaling_law_holds(i1, w, 5)
    scaled = {ARCHIMEDEAN: (F(25, 10), F(5, 10)), 5: (F(1, 625), F(1, 125))}
    assert isinstance(verify_witness(i1, tuple(5 * c for c in w.x), scaled), Witness)


def test_reduce_extension():
    inst = load_instance("builtin:i1_ext5")
    res = reduce_dimension(inst)
    assert res != EXHAUSTED
    assert res.instance.n == 4 and check_hypotheses(res.instance).passed
    assert res.samples <= 10**4


def test_reduce_budget_zero():
    assert reduce_dimension(load_instance("builtin:i1_ext5"), max_samples=0) == EXHAUSTED


def test_reduce_rejects_failing_instance():
    L = LinForm((0, 0, 0, 0, 1))
    Qd = QuadForm.diagonal([1, 1, 1, 1, -1])
    inst = PairInstance(5, 2, (5,), {ARCHIMEDEAN: (Qd, L), 5: (Qd, L)})
    with pytest.raises(PreconditionError):
        reduce_dimension(inst)
    with pytest.raises(PreconditionError):
        reduce_dimension(load_instance("builtin:i1"))


def test_obstruction_control(control):
    res = obstruction_scan(control, 6)
    assert res.status == "OK" and res.holds
    assert res.minimum == 1 and res.product_formula_ok
    assert res.zero_values > 0


def test_obstruction_empty_height(control):
    res = obstruction_scan(control, 0)
    assert res.status == "EMPTY" and res.vectors == 0


def test_obstruction_refused_for_irrational_pencil(i1):
    with pytest.raises(PreconditionError):
        obstruction_scan(i1, 5)
