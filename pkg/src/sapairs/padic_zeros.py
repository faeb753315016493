"""Primitive zeros of (Q, L) modulo prime powers: enumeration, Hensel lifting, CRT.

All forms here have rational coefficients.  Internally a form is scaled by a
rational constant to an integral form whose content is prime to ``p``; the
scaling shift is tracked so that congruences refer to the original form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .exact import INFINITE, as_fraction, padic_valuation, residue
from .forms import LinForm, QuadForm, eval_quad


class SingularZeroError(ValueError):
    """No gradient minor is small enough for Hensel's lemma."""


class NoLocalZerosError(ValueError):
    """Some finite place has no primitive zero of (Q, L) modulo p."""


def _vint(n: int, p: int, cap: int):
    """Valuation of an integer, with 0 (or anything divisible by p**cap) mapped to cap."""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _scale_integral(coeffs, p):
    """Return ``(ints, shift)`` with ``coeffs = p**shift * ints / D``, D a p-unit, ints p-primitive."""
    fr = [as_fraction(c) for c in coeffs]
    den = math.lcm(*(c.denominator for c in fr)) if fr else 1
    ints = [int(c * den) for c in fr]
    nz = [x for x in ints if x != 0]
    if not nz:
        raise ValueError("zero form")
    cont = min(_vint(x, p, 10**9) for x in nz)
    ints = [x // p**cont for x in ints]
    # remaining denominator part: strip its p-power into the shift
    dv = _vint(den, p, 10**9)
    return ints, cont - dv


@dataclass(frozen=True)
class IntegralQuad:
    """Integer upper-triangular coefficients of ``p**(-shift) * unit * Q``."""

    c: tuple
    shift: int

    @classmethod
    def of(cls, Q: QuadForm, p: int) -> "IntegralQuad":
        n = Q.n
        flat = [Q.coeffs[i][j] for i in range(n) for j in range(i, n)]
        ints, shift = _scale_integral(flat, p)
        it = iter(ints)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = next(it)
        return cls(tuple(map(tuple, rows)), shift)

    @property
    def n(self):
        return len(self.c)

    def value(self, x) -> int:
        c = self.c
        n = len(c)
        return sum(c[i][j] * x[i] * x[j] for i in range(n) for j in range(i, n) if c[i][j])

    def grad(self, x) -> list:
        c = self.c
        n = len(c)
        g = [0] * n
        for i in range(n):
            for j in range(i, n):
                cij = c[i][j]
                if not cij:
                    continue
                if i == j:
                    g[i] += 2 * cij * x[i]
                else:
                    g[i] += cij * x[j]
                    g[j] += cij * x[i]
        return g

    def hessian(self) -> list:
        n = self.n
        h = [[0] * n for _ in range(n)]
        for i in range(n):
            h[i][i] = 2 * self.c[i][i]
            for j in range(i + 1, n):
                h[i][j] = h[j][i] = self.c[i][j]
        return h


@dataclass(frozen=True)
class IntegralLin:
    c: tuple
    shift: int

    @classmethod
    def of(cls, L: LinForm, p: int) -> "IntegralLin":
        ints, shift = _scale_integral(L.coeffs, p)
        return cls(tuple(ints), shift)

    def value(self, x) -> int:
        return sum(a * b for a, b in zip(self.c, x))

    def pivot(self, p: int) -> int:
        return next(i for i, a in enumerate(self.c) if a % p)


def _check_p_integral(coeffs, p, what):
    for c in coeffs:
        if as_fraction(c).denominator % p == 0:
            raise ValueError(f"{what} has a coefficient with denominator divisible by {p}")


def _quad_flat(Q):
    return [Q.coeffs[i][j] for i in range(Q.n) for j in range(i, Q.n)]


def projective_points(n: int, p: int) -> Iterator[tuple]:
    """Representatives of P^{n-1}(F_p): first nonzero coordinate is 1, lexicographic."""
    for lead in range(n):
        for tail in itertools.product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def zeros_mod_p(Q: QuadForm, L: Optional[LinForm], p: int) -> list:
    """All projective primitive solutions of ``Q = L = 0`` mod p, by exhaustive enumeration."""
    _check_p_integral(_quad_flat(Q), p, "Q")
    qc = [[residue(Q.coeffs[i][j], p) for j in range(Q.n)] for i in range(Q.n)]
    lc = None
    if L is not None:
        _check_p_integral(L.coeffs, p, "L")
        lc = [residue(c, p) for c in L.coeffs]
    n = Q.n
    out = []
    for x in projective_points(n, p):
        if lc is not None and sum(a * b for a, b in zip(lc, x)) % p:
            continue
        q = 0
        for i in range(n):
            if x[i]:
                for j in range(i, n):
                    if qc[i][j] and x[j]:
                        q += qc[i][j] * x[i] * x[j]
        if q % p == 0:
            out.append(x)
    return out


@dataclass(frozen=True)
class ZeroCertificate:
    """A residue ``z`` mod ``p**m`` with ``Q(z) = L(z) = 0`` mod ``p**m`` that Hensel-lifts.

    ``index`` is the coordinate Newton moves, ``pivot`` the coordinate solved
    from ``L`` (``None`` without a linear form).  ``delta`` is the valuation of
    the gradient minor; lifting is guaranteed because ``2*delta < m``.
    """

    p: int
    m: int
    z: tuple
    index: int
    pivot: Optional[int]
    delta: int
    quad: QuadForm
    lin: Optional[LinForm] = None

    def verify(self) -> bool:
        return satisfies(self.quad, self.lin, self.p, self.z, self.m)


def satisfies(Q: QuadForm, L: Optional[LinForm], p: int, x, m: int) -> bool:
    """``v_p(Q(x)) >= m`` and ``v_p(L(x)) >= m`` for a rational/integer vector x."""
    xs = [Fraction(c) for c in x]
    if padic_valuation(eval_quad(Q, xs), p) < m:
        return False
    if L is not None and padic_valuation(L(xs), p) < m:
        return False
    return True


def _minors(fq: IntegralQuad, fl: Optional[IntegralLin], z, p):
    grad = fq.grad(z)
    if fl is None:
        return None, grad
    j = fl.pivot(p)
    lj = fl.c[j]
    return j, [grad[i] * lj - grad[j] * fl.c[i] if i != j else 0 for i in range(len(z))]


def certify(Q: QuadForm, L: Optional[LinForm], p: int, z, m: int) -> ZeroCertificate:
    """Wrap a residue of the p-primitive rescaled pair as a :class:`ZeroCertificate`.

    ``z`` must satisfy both congruences mod ``p**m`` for the rescaled forms
    (identical to ``Q``, ``L`` when those are already p-primitive integral).
    Among coordinates with minimal minor valuation, the first one that is not
    the leading unit coordinate of ``z`` is taken, so projective normalization
    survives lifting.
    """
    Qn, Ln, _, _ = primitive_pair(Q, L, p)
    z = tuple(int(c) % p**m for c in z)
    if all(c % p == 0 for c in z):
        raise ValueError("residue is not primitive")
    if not satisfies(Qn, Ln, p, z, m):
        raise ValueError(f"residue does not satisfy the congruences mod {p}^{m}")
    fq = IntegralQuad.of(Qn, p)
    fl = IntegralLin.of(Ln, p) if Ln is not None else None
    j, minors = _minors(fq, fl, z, p)
    lead = next(i for i, c in enumerate(z) if c % p)
    vals = [(_vint(d, p, m) if i != j else m, i) for i, d in enumerate(minors)]
    best = min(v for v, _ in vals)
    if 2 * best >= m:
        raise SingularZeroError(f"no gradient minor of valuation < {m}/2 at {z}")
    choices = [i for v, i in vals if v == best]
    idx = next((i for i in choices if i != lead), choices[0])
    return ZeroCertificate(p=p, m=m, z=z, index=idx, pivot=j, delta=best, quad=Qn, lin=Ln)


def hensel_lift(cert: ZeroCertificate, target_m: int) -> tuple:
    """Lift to a residue mod ``p**target_m`` satisfying both congruences (Newton on one coordinate).

    The result agrees with ``cert.z`` modulo ``p**(cert.m - cert.delta)``.
    """
    p = cert.p
    if target_m <= cert.m:
        return tuple(c % p**target_m for c in cert.z)
    fq = IntegralQuad.of(cert.quad, p)
    fl = IntegralLin.of(cert.lin, p) if cert.lin is not None else None
    K = target_m + 2 * cert.delta + 2
    mod = p**K
    x0 = list(cert.z)
    e = [0] * len(x0)
    e[cert.index] = 1
    if fl is not None:
        j = cert.pivot
        inv = pow(fl.c[j], -1, mod)
        rest = sum(fl.c[k] * x0[k] for k in range(len(x0)) if k != j)
        x0[j] = -rest * inv % mod
        e[j] = -fl.c[cert.index] * inv % mod
    # Q(x0 + t e) = c0 + pol t + qe t^2
    c0 = fq.value(x0)
    qe = fq.value(e)
    pol = fq.value([a + b for a, b in zip(x0, e)]) - c0 - qe
    t = 0
    for _ in range(4 * K + 8):
        val = (c0 + pol * t + qe * t * t) % mod
        if _vint(val, p, K) >= target_m:
            break
        der = (pol + 2 * qe * t) % mod
        dv = _vint(der, p, K)
        if dv != cert.delta or _vint(val, p, K) <= 2 * dv:
            raise SingularZeroError("Newton iteration left the nonsingular basin")
        u = der // p**dv
        w = val // p**dv
        t = (t - w * pow(u, -1, mod)) % mod
    else:
        raise SingularZeroError("Newton iteration did not converge")
    out_mod = p**target_m
    x = tuple((a + t * b) % out_mod for a, b in zip(x0, e))
    if not satisfies(cert.quad, cert.lin, p, x, target_m):
        raise AssertionError("Hensel lift failed exact re-check")
    return x


def primitive_pair(Q: QuadForm, L: Optional[LinForm], p: int):
    """p-primitive integral rescalings of ``Q`` and ``L`` with their valuation shifts.

    ``v_p(Q(x)) = v_p(Qn(x)) + sq`` and likewise for ``L`` on every vector.
    """
    fq = IntegralQuad.of(Q, p)
    Qn = QuadForm(tuple(tuple(Fraction(c) for c in row) for row in fq.c))
    if L is None:
        return Qn, None, fq.shift, 0
    fl = IntegralLin.of(L, p)
    return Qn, LinForm(tuple(Fraction(c) for c in fl.c)), fq.shift, fl.shift


def find_local_zero(Q: QuadForm, p: int, max_level: Optional[int] = None) -> Optional[ZeroCertificate]:
    """Decide whether ``Q`` has a nontrivial zero over Q_p, returning a certificate.

    Depth-first search over primitive residues (projectively normalized) mod
    ``p**j`` of the p-primitive integral rescaling ``Qn``.  A node certifies
    once ``Qn(x) = 0 mod p**j`` and some partial derivative has valuation
    ``delta`` with ``2*delta + 1 <= j``.  Any p-adic zero has
    ``delta <= v_p(det H)`` for the Hessian ``H`` of ``Qn``, so the default
    ``max_level = 2*v_p(det H) + 1`` makes the search complete.  The returned
    certificate refers to ``Qn``.
    """
    from ._linalg import det

    Qn, _, _, _ = primitive_pair(Q, None, p)
    fq = IntegralQuad.of(Qn, p)
    dh = det([[Fraction(x) for x in row] for row in fq.hessian()])
    if dh == 0:
        raise ValueError("degenerate form")
    if max_level is None:
        max_level = 2 * padic_valuation(dh, p) + 1
    n = fq.n

    def node_minor(x, j):
        vals = [_vint(g % p**j, p, j) for g in fq.grad(x)]
        d = min(vals)
        return (d, vals.index(d)) if 2 * d + 1 <= j else None

    def dfs(x, j, lead):
        hit = node_minor(x, j)
        if hit is not None:
            return x, j, hit
        if j >= max_level:
            return None
        step, nxt = p**j, p ** (j + 1)
        free = [i for i in range(n) if i != lead]
        for t in itertools.product(range(p), repeat=len(free)):
            y = list(x)
            for i, ti in zip(free, t):
                y[i] += ti * step
            if fq.value(y) % nxt == 0:
                found = dfs(y, j + 1, lead)
                if found is not None:
                    return found
        return None

    for x in projective_points(n, p):
        if fq.value(x) % p:
            continue
        found = dfs(list(x), 1, x.index(1))
        if found is not None:
            z, j, (d, idx) = found
            return ZeroCertificate(p=p, m=j, z=tuple(c % p**j for c in z), index=idx,
                                   pivot=None, delta=d, quad=Qn)
    return None


@dataclass(frozen=True)
class CongruenceClass:
    """Residue vector mod ``modulus`` with ``Q_p, L_p = 0 mod p**m_p`` for every finite p."""

    modulus: int
    residue: tuple
    precision: tuple  # ((p, m_p), ...)

    def members(self, y):
        return tuple(r + self.modulus * c for r, c in zip(self.residue, y))


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple:
    """Combine ``x = r1 mod m1`` and ``x = r2 mod m2`` for coprime moduli."""
    inv = pow(m1, -1, m2)
    x = (r1 + (r2 - r1) * inv % m2 * m1) % (m1 * m2)
    return x, m1 * m2


def _lift_tree(Q, L, p, roots, target, cap=20000):
    """Brute-force lifting of residues level by level (used at singular zeros)."""
    level = [(tuple(r), 1) for r in roots]
    out = []
    n = Q.n
    while level:
        nxt = []
        for x, j in level:
            if j >= target:
                out.append(x)
                continue
            step = p**j
            lead = next(i for i, c in enumerate(x) if c % p)
            free = [i for i in range(n) if i != lead]
            for t in itertools.product(range(p), repeat=len(free)):
                y = list(x)
                for i, ti in zip(free, t):
                    y[i] += ti * step
                if satisfies(Q, L, p, y, j + 1):
                    nxt.append((tuple(y), j + 1))
                    if len(nxt) > cap:
                        break
        level = nxt[:cap]
    return out


def local_classes(Q: QuadForm, L: LinForm, p: int, m: int) -> list:
    """Residues mod ``p**m`` of primitive zeros of the pair with ``v_p(Q), v_p(L) >= m``.

    One Hensel lift per nonsingular projective zero mod p; singular zeros are
    lifted by brute force instead.  Sorted lexicographically.
    """
    Qn, Ln, sq, sl = primitive_pair(Q, L, p)
    need = max(m - sq, m - sl, 1)
    lifted, singular = [], []
    for z in zeros_mod_p(Qn, Ln, p):
        try:
            cert = certify(Qn, Ln, p, z, 1)
        except SingularZeroError:
            singular.append(z)
            continue
        lifted.append(hensel_lift(cert, need))
    if singular:
        lifted.extend(_lift_tree(Qn, Ln, p, singular, need))
    modulus = p**m
    return sorted({tuple(c % modulus for c in x) for x in lifted if satisfies(Q, L, p, x, m)})


def congruence_classes(inst, m: dict, limit: int) -> Iterator[CongruenceClass]:
    """CRT-combined classes across the finite places, in lexicographic residue order.

    Raises :class:`NoLocalZerosError` (distinct from simple exhaustion) when some
    place has no primitive zero mod p.
    """
    primes = inst.primes
    per_place = []
    for p in primes:
        Q, L = inst.forms[p]
        mp = m.get(p, 1)
        cls = local_classes(Q, L, p, mp)
        if not cls:
            raise NoLocalZerosError(f"no primitive zero of (Q, L) modulo {p}")
        per_place.append((p, mp, cls))
    if not per_place:
        yield CongruenceClass(modulus=1, residue=(0,) * inst.n, precision=())
        return
    combos = []
    for choice in itertools.product(*(c for _, _, c in per_place)):
        res = list(choice[0])
        mod = per_place[0][0] ** per_place[0][1]
        for (p, mp, _), r in zip(per_place[1:], choice[1:]):
            mm = p**mp
            res_new = []
            for a, b in zip(res, r):
                x, _ = crt_pair(a, mod, b, mm)
                res_new.append(x)
            res = res_new
            mod *= mm
        combos.append(tuple(res))
    combos.sort()
    modulus = math.prod(p**mp for p, mp, _ in per_place)
    precision = tuple((p, mp) for p, mp, _ in per_place)
    for res in combos[:limit]:
        for p, mp, _ in per_place:
            Q, L = inst.forms[p]
            if not satisfies(Q, L, p, res, mp):
                raise AssertionError(f"class {res} fails its congruences at {p}")
        yield CongruenceClass(modulus=modulus, residue=res, precision=precision)
