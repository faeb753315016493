import itertools
import random
from fractions import Fraction as F

import pytest

from oracles import hilbert_oracle, isotropy_oracle, poly_eval
from sapairs.exact import ARCHIMEDEAN, ExtReal
from sapairs.forms import DegenerateFormError, LinForm, PairInstance, QuadForm, eval_quad
from sapairs.instance import load_instance
from sapairs.local import (
    check_hypotheses,
    hasse_invariant,
    hilbert_symbol,
    is_isotropic_local,
    pencil_coordinates,
    pencil_rationality,
    rational_locus,
    signature,
)
from sapairs.padic_zeros import satisfies

R2 = ExtReal.sqrt(2)
UNITS = [1, -1, 2, -2, 3, -3, 5, -5, 7, -7, 10, -10]
PRIMES = [2, 3, 5, 7]


def test_signature_examples():
    assert signature(QuadForm.from_terms(2, {(0, 1): 1})) == (1, 1, 0)
    assert signature(QuadForm.from_terms(3, {(0, 1): 1, (2, 2): R2})) == (2, 1, 0)
    assert signature(QuadForm.from_terms(2, {(0, 0): 1, (0, 1): 2, (1, 1): 1})) == (1, 0, 1)


def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, ARCHIMEDEAN) == -1
    for b, p in itertools.product(UNITS, PRIMES):
        assert hilbert_symbol(1, b, p) == 1
    assert hilbert_symbol(-1, -1, 2) == -1 == hilbert_oracle(-1, -1, 2)
    with pytest.raises(ValueError):
        hilbert_symbol(0, 3, 5)


def test_hilbert_symbol_identities():
    for p in PRIMES + [ARCHIMEDEAN]:
        for a, b in itertools.product(UNITS, UNITS):
            assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
            assert hilbert_symbol(a, -a, p) == 1
            for c in UNITS:
                assert hilbert_symbol(a, b * c, p) == hilbert_symbol(a, b, p) * hilbert_symbol(a, c, p)


def test_hilbert_rational_arguments():
    # square classes: 3/4 ~ 3, 50/9 ~ 2
    for p in PRIMES:
        assert hilbert_symbol(F(3, 4), F(50, 9), p) == hilbert_symbol(3, 2, p)


def test_hilbert_product_formula():
    for a, b in itertools.product(UNITS, UNITS):
        primes = [2, 3, 5, 7]
        prod = hilbert_symbol(a, b, ARCHIMEDEAN)
        for p in primes:
            prod *= hilbert_symbol(a, b, p)
        assert prod == 1


def test_hasse_examples():
    for p in PRIMES:
        assert hasse_invariant([1, 1, 1], p) == 1
        assert hasse_invariant([7], p) == 1
    assert hasse_invariant([-1, -1], 2) == -1 == hilbert_symbol(-1, -1, 2)
    with pytest.raises(ValueError):
        hasse_invariant([1, 0], 3)


def test_isotropy_examples():
    v = is_isotropic_local(QuadForm.diagonal([1, 1, -1]), ARCHIMEDEAN)
    assert v.isotropic and v.vector is not None
    assert eval_quad(QuadForm.diagonal([1, 1, -1]), v.vector) == 0
    Q = QuadForm.from_terms(3, {(0, 1): 1, (2, 2): 1})
    v = is_isotropic_local(Q, 5)
    assert v.isotropic and eval_quad(Q, v.vector) == 0 and any(v.vector)
    assert eval_quad(Q, (1, 0, 0)) == 0
    assert not is_isotropic_local(QuadForm.diagonal([1, 1]), ARCHIMEDEAN).isotropic
    with pytest.raises(DegenerateFormError):
        is_isotropic_local(QuadForm.diagonal([1, 0, -1]), 3)


def test_isotropy_certificates_verify():
    for diag, p in [([1, 1, 1], 2), ([1, 2, -5], 5), ([1, 1, 1, 1], 2), ([3, -2, 5, 7, 1], 3), ([1, 1], 5)]:
        v = is_isotropic_local(QuadForm.diagonal(diag), p)
        if v.isotropic:
            h = v.hensel
            assert 2 * h.delta < h.m and satisfies(h.quad, None, p, h.z, h.m)
            if v.vector is not None:
                assert eval_quad(QuadForm.diagonal(diag), v.vector) == 0
        else:
            assert v.hensel is None and v.vector is None


def test_anisotropic_classics():
    assert not is_isotropic_local(QuadForm.diagonal([1, 1, 1]), 2).isotropic
    assert not is_isotropic_local(QuadForm.diagonal([1, 1]), 3).isotropic
    assert is_isotropic_local(QuadForm.diagonal([1, 1]), 5).isotropic
    # the norm form of the quaternion algebra ramified at 2: anisotropic in dim 4
    assert not is_isotropic_local(QuadForm.diagonal([1, 1, 1, 1]), 2).isotropic


def test_dimension_five_always_isotropic():
    rng = random.Random(2)
    for _ in range(20):
        p = rng.choice([2, 3, 5])
        diag = [rng.choice([1, -1, 2, -2, 3, -3, 5, -5, p, -p]) for _ in range(5)]
        assert isotropy_oracle(diag, p)
        assert is_isotropic_local(QuadForm.diagonal(diag), p).isotropic


def test_isotropy_matches_oracle_small_sweep():
    for p in (3, 5):
        for diag in itertools.product([1, -1, 2, p], repeat=3):
            assert is_isotropic_local(QuadForm.diagonal(list(diag)), p).isotropic == isotropy_oracle(diag, p)


def _inst(qinf, q5, linf=None, l5=None):
    L = LinForm((0, 0, 0, 1))
    return PairInstance(4, 2, (5,), {ARCHIMEDEAN: (qinf, linf or L), 5: (q5, l5 or L)})


def hyp(a3=1, a4=-1):
    return QuadForm.from_terms(4, {(0, 1): 1, (2, 2): a3, (3, 3): a4})


def test_check_i1_passes():
    rep = check_hypotheses(load_instance("builtin:i1"))
    assert rep.cond1 and rep.cond2 and rep.cond3_pencil_irrational and rep.passed
    assert rep.cond2_restriction[ARCHIMEDEAN].isotropic.trace["signature"] == [2, 1, 0]
    assert rep.pencil_detail.common_Q0 is None


def test_check_rational_pair_fails_condition_three():
    rep = check_hypotheses(_inst(hyp(), hyp()))
    assert rep.cond1 and rep.cond2 and not rep.cond3_pencil_irrational
    assert rep.pencil_detail.common_Q0 == hyp()


def test_check_definite_restriction_fails_condition_two():
    rep = check_hypotheses(_inst(QuadForm.diagonal([1, 1, 1, -1]), hyp()))
    assert not rep.cond2_restriction[ARCHIMEDEAN].passed
    assert rep.cond2_restriction[5].passed
    assert not rep.passed


def test_check_invariant_under_unimodular_change():
    rng = random.Random(11)
    base = load_instance("builtin:i1")
    ctl = load_instance("builtin:control")
    for inst in (base, ctl):
        want = check_hypotheses(inst).to_dict()
        for _ in range(3):
            # product of elementary integer matrices
            g = [[int(i == j) for j in range(4)] for i in range(4)]
            for _ in range(4):
                i, j = rng.sample(range(4), 2)
                c = rng.choice([-2, -1, 1, 2])
                for r in range(4):
                    g[r][j] += c * g[r][i]
            got = check_hypotheses(inst.transformed(g))
            d = got.to_dict()
            for key in ("cond1_nondegenerate", "cond2_restriction_nondegenerate_isotropic",
                        "cond3_pencil_irrational", "overall"):
                assert d[key] == want[key]


def test_pencil_i1():
    pr = pencil_rationality(load_instance("builtin:i1"))
    assert pr.irrational and pr.common_Q0 is None
    assert pr.locus_dim == {ARCHIMEDEAN: 1, 5: 2}
    # the only rational member at infinity is L^2 (alpha = 0)
    assert pr.common_not_both_zero is not None and pr.common_both_units is None
    cand = pr.candidates[0]
    assert cand.s_prime == (5,) and cand.t == (ARCHIMEDEAN,)


def test_pencil_rational_pair():
    pr = pencil_rationality(_inst(hyp(), hyp()))
    assert pr.common_Q0 == hyp()
    assert any(c.s_prime == (ARCHIMEDEAN, 5) for c in pr.candidates)


def test_pencil_cancellation_by_square():
    Q = hyp(R2)
    L = LinForm((0, 0, 1, 0))
    target = QuadForm.from_terms(4, {(0, 1): 1, (3, 3): -1}).vector()
    combo = (Q + L.square().scaled(-R2)).vector()
    assert combo == target and all(not isinstance(c, ExtReal) for c in combo)
    locus = rational_locus(Q, L, ARCHIMEDEAN)
    assert len(locus) == 2
    assert pencil_coordinates(Q, L, target) == (1, -R2)
