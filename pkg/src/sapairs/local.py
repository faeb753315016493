"""Per-place decisions for the three hypotheses on a pair (Q, L).

Conventions: the Hasse invariant is ``prod_{i<j} (d_i, d_j)_p`` on a diagonal
form, and the local isotropy criteria are stated for that convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import _linalg as la
from .exact import (
    ARCHIMEDEAN,
    ExtReal,
    as_fraction,
    format_scalar,
    padic_valuation,
    sign,
)
from .forms import (
    DegenerateFormError,
    LinForm,
    PairInstance,
    QuadForm,
    congruence_diagonal,
    diagonalize,
    eval_quad,
    exact_isotropic_vector,
    is_nondegenerate,
    kernel_basis,
    restrict,
)
from .padic_zeros import ZeroCertificate, find_local_zero


class CriterionMismatchError(RuntimeError):
    """The isotropy criterion and the certificate search disagree."""


# --- signature and Hilbert symbols -------------------------------------------


def signature(Q: QuadForm) -> tuple:
    """Sylvester signature ``(pos, neg, zero)``."""
    _, diag = congruence_diagonal(Q)
    pos = sum(1 for x in diag if sign(x) > 0)
    neg = sum(1 for x in diag if sign(x) < 0)
    return pos, neg, Q.n - pos - neg


def _int_class(t) -> int:
    """Integer in the same square class as the nonzero rational ``t``."""
    t = as_fraction(t)
    return t.numerator * t.denominator


def _split(a: int, p: int):
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a, b, place) -> int:
    """Hilbert symbol ``(a, b)_v`` for nonzero rationals at a real or p-adic place."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place == ARCHIMEDEAN:
        return -1 if a < 0 and b < 0 else 1
    p = int(place)
    alpha, u = _split(_int_class(a), p)
    beta, v = _split(_int_class(b), p)
    if p != 2:
        e = (p - 1) // 2
        s = (-1) ** (alpha * beta * e)
        return s * legendre(u, p) ** beta * legendre(v, p) ** alpha

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    expo = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if expo % 2 else 1


def is_square_local(t, place) -> bool:
    """Whether the nonzero rational ``t`` is a square in the completion."""
    t = as_fraction(t)
    if t == 0:
        return True
    if place == ARCHIMEDEAN:
        return t > 0
    p = int(place)
    v, u = _split(_int_class(t), p)
    if v % 2:
        return False
    if p == 2:
        return u % 8 == 1
    return legendre(u, p) == 1


def hasse_invariant(diag, p) -> int:
    diag = [as_fraction(x) for x in diag]
    if any(x == 0 for x in diag):
        raise ValueError("Hasse invariant needs nonzero diagonal entries")
    out = 1
    for i, j in itertools.combinations(range(len(diag)), 2):
        out *= hilbert_symbol(diag[i], diag[j], p)
    return out


# --- local isotropy ----------------------------------------------------------


@dataclass(frozen=True)
class IsotropyVerdict:
    """Isotropy decision with its evidence.

    ``vector`` is an exact zero of ``Q`` (when one was found); ``hensel`` is a
    residue certificate that lifts to a p-adic zero; ``trace`` records the
    criterion data (signature, or discriminant and Hasse invariant).
    """

    isotropic: bool
    place: object
    vector: Optional[tuple] = None
    hensel: Optional[ZeroCertificate] = None
    trace: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"isotropic": self.isotropic, "place": str(self.place), "trace": self.trace}
        if self.vector is not None:
            out["vector"] = [format_scalar(c) for c in self.vector]
        if self.hensel is not None:
            h = self.hensel
            out["hensel"] = {"p": h.p, "m": h.m, "z": list(h.z), "index": h.index, "delta": h.delta}
        return out


def _small_exact_zero(Q: QuadForm, bound: int = 2):
    """Lexicographically first primitive integer zero with entries in [-bound, bound]."""
    rng = range(-bound, bound + 1)
    for x in itertools.product(rng, repeat=Q.n):
        if any(x) and next(c for c in x if c) > 0 and eval_quad(Q, x) == 0:
            return tuple(Fraction(c) for c in x)
    return None


def local_criterion(diag, p) -> tuple:
    """(isotropic, trace) from the classical criteria on a nondegenerate diagonal form."""
    n = len(diag)
    disc = Fraction(1)
    for x in diag:
        disc *= as_fraction(x)
    eps = hasse_invariant(diag, p)
    trace = {"dim": n, "discriminant": format_scalar(disc), "hasse": eps}
    if n == 1:
        iso = False
    elif n == 2:
        iso = is_square_local(-disc, p)
    elif n == 3:
        iso = hilbert_symbol(-1, -disc, p) == eps
    elif n == 4:
        iso = (not is_square_local(disc, p)) or eps == hilbert_symbol(-1, -1, p)
    else:
        iso = True
    return iso, trace


def is_isotropic_local(Q: QuadForm, place) -> IsotropyVerdict:
    """Decide isotropy of a nondegenerate form over R or Q_p.

    At a finite place the criterion is confirmed by a complete certificate
    search (a Hensel-certified residue, or exhaustion proving anisotropy);
    a disagreement raises :class:`CriterionMismatchError`.
    """
    if not is_nondegenerate(Q):
        raise DegenerateFormError("isotropy is only decided for nondegenerate forms")
    if place == ARCHIMEDEAN:
        pos, neg, _ = signature(Q)
        iso = pos >= 1 and neg >= 1
        vec = None
        if iso:
            v = exact_isotropic_vector(Q)
            vec = tuple(v) if v is not None else None
        return IsotropyVerdict(iso, place, vector=vec, trace={"signature": [pos, neg, 0]})

    if not Q.is_rational():
        raise ValueError("finite-place forms must have rational coefficients")
    p = int(place)
    Qr = QuadForm(tuple(tuple(as_fraction(c) for c in row) for row in Q.coeffs))
    _, diag = diagonalize(Qr)
    iso, trace = local_criterion(diag, p)
    cert = find_local_zero(Qr, p)
    if (cert is not None) != iso:
        raise CriterionMismatchError(
            f"criterion says {'isotropic' if iso else 'anisotropic'} at {p} but the search disagrees"
        )
    vec = _small_exact_zero(Qr) if iso else None
    if not iso and vec is not None:
        raise CriterionMismatchError(f"exact rational zero found for a form declared anisotropic at {p}")
    return IsotropyVerdict(iso, p, vector=vec, hensel=cert, trace=trace)


# --- pencil rationality --------------------------------------------------------


def _conj(x):
    return x.conjugate() if isinstance(x, ExtReal) else x


def _rational(x) -> Fraction:
    if isinstance(x, ExtReal):
        if x.b != 0:
            raise ValueError("irrational entry")
        return x.a
    return as_fraction(x)


def normalize_rational_form(vec) -> tuple:
    """Primitive integral representative with positive leading coefficient."""
    import math

    fr = [_rational(x) for x in vec]
    den = math.lcm(*(f.denominator for f in fr))
    ints = [int(f * den) for f in fr]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def rational_locus(Q: QuadForm, L: LinForm, place) -> list:
    """Rational basis of the rational forms inside ``span(Q, L^2)`` at one place.

    At a finite place (rational coefficients) this is the whole pencil; at the
    real place it is the Galois descent of ``W`` intersected with its conjugate.
    """
    q = Q.vector()
    l2 = L.square().vector()
    if Q.is_rational() and L.is_rational():
        vecs = [[_rational(x) for x in q], [_rational(x) for x in l2]]
        return la.independent_rows(vecs)
    W = [q, l2]
    sW = [[_conj(x) for x in v] for v in W]
    rat = []
    for u in la.intersect(W, sW, len(q)):
        # u + sigma(u) and (u - sigma(u)) / sqrt(d) are rational
        rat.append([2 * _re(x) for x in u])
        rat.append([2 * _im(x) for x in u])
    rat = [v for v in rat if any(x != 0 for x in v)]
    return la.independent_rows(rat) if rat else []


def _re(x) -> Fraction:
    return x.a if isinstance(x, ExtReal) else as_fraction(x)


def _im(x) -> Fraction:
    return x.b if isinstance(x, ExtReal) else Fraction(0)


def pencil_coordinates(Q: QuadForm, L: LinForm, r) -> Optional[tuple]:
    """``(alpha, beta)`` with ``alpha Q + beta L^2 = r``, or None when r is outside the pencil."""
    q = Q.vector()
    l2 = L.square().vector()
    system = [[a, b] for a, b in zip(q, l2)]
    aug = [row + [c] for row, c in zip(system, r)]
    m, pivots = la.rref(aug)
    if 2 in pivots:
        return None
    # q and L^2 are independent for nondegenerate Q with n >= 2
    if pivots != [0, 1]:
        return None
    return m[0][2], m[1][2]


@dataclass(frozen=True)
class CandidateQ0:
    q0: tuple  # flattened coefficients
    coordinates: dict  # place -> (alpha, beta) or None
    s_prime: tuple
    t: tuple

    def to_dict(self, n: int) -> dict:
        return {
            "Q0": str(QuadForm.from_vector(n, self.q0)),
            "S_prime": [str(s) for s in self.s_prime],
            "T": [str(s) for s in self.t],
            "coordinates": {
                str(s): (None if c is None else [format_scalar(c[0]), format_scalar(c[1])])
                for s, c in self.coordinates.items()
            },
        }


@dataclass(frozen=True)
class PencilReport:
    """Rationality data of the pencils ``alpha_s Q_s + beta_s L_s^2``.

    ``locus_dim[s]`` is 0 (no rational member), 1 (a single class) or 2 (every
    class).  ``common_*`` is the first rational form found in every place's locus
    under three admissibility readings: ``alpha_nonzero`` (the verdict),
    ``not_both_zero`` and ``both_units``.
    """

    n: int
    locus: dict
    locus_dim: dict
    candidates: tuple
    common_alpha_nonzero: Optional[tuple]
    common_not_both_zero: Optional[tuple]
    common_both_units: Optional[tuple]

    @property
    def common_Q0(self) -> Optional[QuadForm]:
        c = self.common_alpha_nonzero
        return QuadForm.from_vector(self.n, c) if c is not None else None

    @property
    def irrational(self) -> bool:
        return self.common_alpha_nonzero is None

    def to_dict(self) -> dict:
        def fmt(c):
            return None if c is None else str(QuadForm.from_vector(self.n, c))

        return {
            "locus_dim": {str(s): k for s, k in self.locus_dim.items()},
            "common_Q0": fmt(self.common_alpha_nonzero),
            "readings": {
                "alpha_nonzero": fmt(self.common_alpha_nonzero),
                "not_both_zero": fmt(self.common_not_both_zero),
                "both_units": fmt(self.common_both_units),
            },
            "candidates": [c.to_dict(self.n) for c in self.candidates],
        }


def _span_combos(basis, limit=64):
    """r1, r2, r1 + r2, r1 + 2 r2, 2 r1 + r2, ... (deterministic)."""
    if not basis:
        return
    for v in basis:
        yield v
    if len(basis) == 2:
        r1, r2 = basis
        for s in range(2, limit):
            for a in range(1, s):
                b = s - a
                yield [a * x + b * y for x, y in zip(r1, r2)]
                yield [a * x - b * y for x, y in zip(r1, r2)]


def _first_admissible(inst, basis, pred):
    if not basis:
        return None
    # the places' own rational forms come first, so a rational pair reports itself
    own = [[_rational(x) for x in inst.forms[s][0].vector()] for s in reversed(inst.places)
           if inst.forms[s][0].is_rational()]
    for r in itertools.chain(own, _span_combos(basis)):
        coords = {s: pencil_coordinates(*inst.forms[s], r) for s in inst.places}
        if all(c is not None and pred(c) for c in coords.values()):
            return normalize_rational_form(r)
    return None


def pencil_rationality(inst: PairInstance) -> PencilReport:
    places = inst.places
    locus = {s: rational_locus(*inst.forms[s], s) for s in places}
    dims = {s: len(v) for s, v in locus.items()}
    N = inst.n * (inst.n + 1) // 2

    common = None
    for s in places:
        common = locus[s] if common is None else la.intersect(common, locus[s], N)
        if not common:
            break

    # candidates: each place's own Q_s when rational, else members of its locus with alpha != 0
    candidates = []
    for s in reversed(places):
        Q, L = inst.forms[s]
        options = [[_rational(x) for x in Q.vector()]] if Q.is_rational() else []
        options.extend(_span_combos(locus[s], limit=4))
        for r in options:
            c = pencil_coordinates(Q, L, r)
            if c is None or c[0] == 0:
                continue
            key = normalize_rational_form(r)
            if all(k.q0 != key for k in candidates):
                coords = {t: pencil_coordinates(*inst.forms[t], list(key)) for t in places}
                sp = tuple(t for t in places if coords[t] is not None and coords[t][0] != 0)
                candidates.append(CandidateQ0(key, coords, sp, tuple(t for t in places if t not in sp)))
            break

    common = common or []
    alpha_nz = _first_admissible(inst, common, lambda c: c[0] != 0)
    nbz = _first_admissible(inst, common, lambda c: True)
    both = _first_admissible(inst, common, lambda c: c[0] != 0 and c[1] != 0)
    if alpha_nz is not None and not any(c.q0 == alpha_nz for c in candidates):
        coords = {t: pencil_coordinates(*inst.forms[t], list(alpha_nz)) for t in places}
        candidates.insert(0, CandidateQ0(alpha_nz, coords, tuple(places), ()))
    return PencilReport(
        n=inst.n,
        locus=locus,
        locus_dim=dims,
        candidates=tuple(candidates),
        common_alpha_nonzero=alpha_nz,
        common_not_both_zero=nbz,
        common_both_units=both,
    )


# --- the three hypotheses ------------------------------------------------------


@dataclass(frozen=True)
class RestrictionVerdict:
    nondegenerate: bool
    isotropic: Optional[IsotropyVerdict]

    @property
    def passed(self) -> bool:
        return self.nondegenerate and self.isotropic is not None and self.isotropic.isotropic


@dataclass(frozen=True)
class HypothesisReport:
    n: int
    cond1_nondegenerate: dict
    cond2_restriction: dict
    pencil_detail: PencilReport

    @property
    def dimension_ok(self) -> bool:
        return self.n >= 4

    @property
    def cond1(self) -> bool:
        return all(self.cond1_nondegenerate.values())

    @property
    def cond2(self) -> bool:
        return all(v.passed for v in self.cond2_restriction.values())

    @property
    def cond3_pencil_irrational(self) -> bool:
        return self.pencil_detail.irrational

    @property
    def passed(self) -> bool:
        return self.dimension_ok and self.cond1 and self.cond2 and self.cond3_pencil_irrational

    def to_dict(self) -> dict:
        verdict = {True: "PASS", False: "FAIL"}
        return {
            "n": self.n,
            "dimension_at_least_4": verdict[self.dimension_ok],
            "cond1_nondegenerate": verdict[self.cond1],
            "cond2_restriction_nondegenerate_isotropic": verdict[self.cond2],
            "cond3_pencil_irrational": verdict[self.cond3_pencil_irrational],
            "per_place": {
                str(s): {
                    "Q_nondegenerate": self.cond1_nondegenerate[s],
                    "restriction_nondegenerate": r.nondegenerate,
                    "restriction_isotropy": None if r.isotropic is None else r.isotropic.to_dict(),
                }
                for s, r in self.cond2_restriction.items()
            },
            "pencil": self.pencil_detail.to_dict(),
            "overall": verdict[self.passed],
        }


def check_hypotheses(inst: PairInstance) -> HypothesisReport:
    cond1 = {}
    cond2 = {}
    for s in inst.places:
        Q, L = inst.forms[s]
        cond1[s] = is_nondegenerate(Q)
        QV = restrict(Q, kernel_basis(L))
        nd = is_nondegenerate(QV)
        cond2[s] = RestrictionVerdict(nd, is_isotropic_local(QV, s) if nd else None)
    return HypothesisReport(
        n=inst.n, cond1_nondegenerate=cond1, cond2_restriction=cond2, pencil_detail=pencil_rationality(inst)
    )
