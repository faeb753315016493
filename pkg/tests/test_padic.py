import itertools
from fractions import Fraction as F

import pytest

from oracles import poly_eval
from sapairs.exact import ARCHIMEDEAN
from sapairs.forms import LinForm, PairInstance, QuadForm
from sapairs.instance import load_instance
from sapairs.padic_zeros import (
    NoLocalZerosError,
    SingularZeroError,
    certify,
    congruence_classes,
    hensel_lift,
    local_classes,
    zeros_mod_p,
)

L4 = LinForm((0, 0, 0, 1))


def hyp(a3=1, a4=-1):
    return QuadForm.from_terms(4, {(0, 1): 1, (2, 2): a3, (3, 3): a4})


def _lin(L, x):
    return sum(F(c) * xi for c, xi in zip(L.coeffs, x))


def test_zeros_mod_p_examples():
    zs = zeros_mod_p(hyp(), L4, 5)
    assert (1, 0, 0, 0) in zs and (0, 1, 0, 0) in zs
    assert zeros_mod_p(QuadForm.diagonal([1, 1]), LinForm((0, 1)), 3) == []
    Q = QuadForm.from_terms(4, {(0, 1): 1, (2, 2): 1})
    assert (1, 4, 1, 0) in zeros_mod_p(Q, L4, 5)  # (1, -1, 1, 0)


def test_zeros_mod_p_exhaustive():
    Q = hyp()
    got = set(zeros_mod_p(Q, L4, 3))
    want = set()
    for x in itertools.product(range(3), repeat=4):
        if any(x) and poly_eval(Q.coeffs, x) % 3 == 0 and x[3] % 3 == 0:
            lead = next(c for c in x if c)
            if lead == 1:
                want.add(x)
    assert got == want


def test_zeros_mod_p_rejects_denominators():
    with pytest.raises(ValueError):
        zeros_mod_p(QuadForm.diagonal([F(1, 5), 1]), None, 5)
    with pytest.raises(ValueError):
        zeros_mod_p(QuadForm.diagonal([1, 1]), LinForm((F(2, 5), 1)), 5)


def test_hensel_exact_zero_unchanged():
    cert = certify(hyp(), L4, 5, (1, 0, 0, 0), 1)
    assert hensel_lift(cert, 2) == (1, 0, 0, 0)


def test_hensel_lift_examples():
    Q = hyp()
    cert = certify(Q, L4, 5, (1, -1, 1, 0), 1)
    v = hensel_lift(cert, 3)
    assert all((a - b) % 5 == 0 for a, b in zip(v, (1, -1, 1, 0)))
    assert poly_eval(Q.coeffs, v) % 125 == 0
    assert _lin(L4, v) % 125 == 0


def test_hensel_lifts_agree_to_higher_precision():
    Q = QuadForm.diagonal([1, 1, 1])  # x^2 + y^2 + z^2 at 7
    for z in zeros_mod_p(Q, None, 7):
        cert = certify(Q, None, 7, z, 1)
        for target in (2, 4, 7):
            v = hensel_lift(cert, target)
            assert poly_eval(Q.coeffs, v) % 7**target == 0
            assert all((a - b) % 7 == 0 for a, b in zip(v, z))


def test_hensel_singular_raises():
    # x^2 + 5 y^2: at (0, 1) the gradient (0, 10) is divisible by 5
    with pytest.raises(SingularZeroError):
        certify(QuadForm.diagonal([1, 5]), None, 5, (0, 1), 1)
    # x^2 - 2 y^2 at p = 2: every zero mod 2 is singular to first order
    with pytest.raises(SingularZeroError):
        certify(QuadForm.diagonal([1, -2]), None, 2, (0, 1), 1)


def test_congruence_classes_i1():
    inst = load_instance("builtin:i1")
    classes = list(congruence_classes(inst, {5: 2}, 10**6))
    assert classes and all(c.modulus == 25 for c in classes)
    Q5, L5 = inst.forms[5]
    hit = [c for c in classes if tuple(r % 5 for r in c.residue) == (1, 4, 1, 0)]
    assert hit
    for c in classes:
        assert poly_eval(Q5.coeffs, c.residue) % 25 == 0 and _lin(L5, c.residue) % 25 == 0
    assert classes == sorted(classes, key=lambda c: c.residue)


def test_congruence_classes_limit():
    inst = load_instance("builtin:i1")
    assert len(list(congruence_classes(inst, {5: 1}, 1))) == 1


def test_congruence_classes_two_places():
    L = L4
    inst = PairInstance(4, None, (5, 7), {ARCHIMEDEAN: (hyp(), L), 5: (hyp(), L), 7: (hyp(), L)})
    classes = list(congruence_classes(inst, {5: 1, 7: 1}, 10**6))
    z5 = set(zeros_mod_p(hyp(), L, 5))
    z7 = set(zeros_mod_p(hyp(), L, 7))

    def proj(x, p):
        lead = next(c for c in x if c % p)
        inv = pow(lead, -1, p)
        return tuple(c * inv % p for c in x)

    assert len(classes) == len(z5) * len(z7)
    for c in classes:
        assert c.modulus == 35
        assert proj(c.residue, 5) in z5 and proj(c.residue, 7) in z7


def _exhaustive_classes(Q, L, p, m):
    mod = p**m
    out = set()
    for x in itertools.product(range(mod), repeat=Q.n):
        if all(c % p == 0 for c in x):
            continue
        if poly_eval(Q.coeffs, x) % mod == 0 and _lin(L, x) % mod == 0:
            out.add(x)
    return out


@pytest.mark.parametrize("p,m", [(3, 1), (3, 2), (5, 1), (2, 2)])
def test_local_classes_match_exhaustive_search(p, m):
    Q = QuadForm.from_terms(3, {(0, 1): 1, (2, 2): -1, (1, 2): 1})
    L = LinForm((1, 1, 1))
    got = set(local_classes(Q, L, p, m))
    want = _exhaustive_classes(Q, L, p, m)
    assert got <= want

    def proj(x):
        lead = next(c for c in x if c % p)
        inv = pow(lead, -1, p)
        return tuple(c * inv % p for c in x)

    assert {proj(x) for x in got} == {proj(x) for x in want}


def test_classes_closed_under_unit_multiples():
    inst = load_instance("builtin:i1")
    Q5, L5 = inst.forms[5]
    for c in congruence_classes(inst, {5: 2}, 50):
        for u in (2, 3, 7, 11):
            y = [u * r for r in c.residue]
            assert poly_eval(Q5.coeffs, y) % 25 == 0 and _lin(L5, y) % 25 == 0


def test_no_local_zeros_is_distinct_from_exhaustion():
    # x1^2 + x2^2 with L = x2: every zero mod 3 vanishes identically
    Q = QuadForm.diagonal([1, 1])
    L = LinForm((0, 1))
    inst = PairInstance(2, None, (3,), {ARCHIMEDEAN: (Q, L), 3: (Q, L)})
    with pytest.raises(NoLocalZerosError):
        list(congruence_classes(inst, {3: 1}, 10))
