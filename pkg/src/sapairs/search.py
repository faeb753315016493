"""Witness verification and search, epsilon experiments, dimension reduction
and the rational-pencil obstruction scan.

A witness is a nonzero S-integral vector ``x`` with ``|Q_s(x)|_s < eps_s`` and
``|L_s(x)|_s < eps_s`` at every place.  Search strategies only propose
candidates; acceptance always goes through :func:`verify_witness`.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from . import _linalg as la
from .exact import (
    ARCHIMEDEAN,
    ExtReal,
    as_fraction,
    ext_abs_lt,
    ext_sign,
    format_scalar,
    padic_abs,
    padic_valuation,
    scalar_floor,
    scalar_float,
)
from .forms import LinForm, PairInstance, QuadForm, eval_quad, kernel_basis, normal_form_pair
from .local import check_hypotheses
from .padic_zeros import NoLocalZerosError, congruence_classes

EXHAUSTED = "EXHAUSTED"
FOUND = "FOUND"


class PreconditionError(ValueError):
    """The instance does not meet the operation's hypotheses."""


# --- epsilons and precision ---------------------------------------------------


def precision_for(eps, p: int) -> int:
    """Least ``m`` with ``p**-m < eps``; then ``v_p(t) >= m`` implies ``|t|_p < eps``."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    m = 0
    while Fraction(p) ** (m - 1) * eps > 1:
        m -= 1
    while Fraction(p) ** m * eps <= 1:
        m += 1
    return m


def normalize_eps(inst: PairInstance, eps: dict) -> dict:
    """Map each place to a pair ``(eps_Q, eps_L)`` of positive rationals."""
    out = {}
    for s in inst.places:
        if s not in eps:
            raise ValueError(f"no epsilon for place {s}")
        e = eps[s]
        pair = tuple(as_fraction(x) for x in e) if isinstance(e, (tuple, list)) else (as_fraction(e),) * 2
        if any(x <= 0 for x in pair):
            raise ValueError(f"epsilon at {s} must be positive")
        out[s] = pair
    return out


# --- S-vectors and verification ----------------------------------------------


def as_svector(inst: PairInstance, x) -> tuple:
    """Validate membership in O_S^n minus zero and return Fractions."""
    if len(x) != inst.n:
        raise ValueError(f"vector has {len(x)} coordinates, instance has n = {inst.n}")
    xs = tuple(as_fraction(c) for c in x)
    if all(c == 0 for c in xs):
        raise ValueError("the zero vector is not admissible")
    for c in xs:
        den = c.denominator
        for p in inst.primes:
            while den % p == 0:
                den //= p
        if den != 1:
            raise ValueError(f"coordinate {c} has a denominator outside the place set")
    return xs


@dataclass(frozen=True)
class Violation:
    place: object
    form: str
    magnitude: object
    eps: Fraction
    margin: object  # magnitude - eps, >= 0

    def to_dict(self) -> dict:
        return {
            "place": str(self.place),
            "form": self.form,
            "magnitude": format_scalar(self.magnitude),
            "eps": format_scalar(self.eps),
            "margin": format_scalar(self.margin),
        }


@dataclass(frozen=True)
class Witness:
    """Verified witness.  ``values`` are the exact ``Q_s(x), L_s(x)``; ``magnitudes``
    their absolute values at each place.  ``exact_zero`` lists (place, form)
    pairs whose value vanishes exactly."""

    x: tuple
    values: dict
    magnitudes: dict
    eps: dict
    transcript: tuple
    exact_zero: tuple

    @property
    def null(self) -> bool:
        """Every value at every place is exactly zero."""
        return len(self.exact_zero) == 2 * len(self.values)

    def to_dict(self) -> dict:
        return {
            "x": [format_scalar(c) for c in self.x],
            "magnitudes": {
                str(s): {"Q": format_scalar(q), "L": format_scalar(l)} for s, (q, l) in self.magnitudes.items()
            },
            "exact_zero": [f"{s}:{f}" for s, f in self.exact_zero],
            "transcript": list(self.transcript),
        }


def _abs(x):
    return -x if ext_sign(x) < 0 else x


def verify_witness(inst: PairInstance, x, eps: dict):
    """Exact check of all strict inequalities; a Witness or a list of Violations."""
    xs = as_svector(inst, x)
    eps = normalize_eps(inst, eps)
    values, mags, transcript, zeros, viol = {}, {}, [], [], []
    for s in inst.places:
        Q, L = inst.forms[s]
        qv, lv = eval_quad(Q, xs), L(xs)
        values[s] = (qv, lv)
        pair = []
        for name, val, e in (("Q", qv, eps[s][0]), ("L", lv, eps[s][1])):
            if val == 0:
                zeros.append((s, name))
            if s == ARCHIMEDEAN:
                mag = _abs(val)
                ok = ext_abs_lt(val, e)
                transcript.append(
                    f"inf {name}: value={format_scalar(val)} eps={format_scalar(e)} "
                    f"sign(eps-value)={ext_sign(e - val):+d} sign(eps+value)={ext_sign(e + val):+d}"
                )
            else:
                mag = padic_abs(_rational_value(val), s)
                ok = mag < e
                v = padic_valuation(_rational_value(val), s)
                transcript.append(
                    f"{s} {name}: value={format_scalar(val)} v={'inf' if val == 0 else v} "
                    f"abs={format_scalar(mag)} eps={format_scalar(e)}"
                )
            pair.append(mag)
            if not ok:
                viol.append(Violation(s, name, mag, e, mag - e))
        mags[s] = tuple(pair)
    if viol:
        return viol
    return Witness(
        x=xs, values=values, magnitudes=mags, eps=eps, transcript=tuple(transcript), exact_zero=tuple(zeros)
    )


def _rational_value(v) -> Fraction:
    if isinstance(v, ExtReal):
        if v.b != 0:
            raise ValueError("finite-place value is irrational")
        return v.a
    return as_fraction(v)


# --- budgets and results --------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 10**7
    max_classes: int = 64
    wall_clock: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.max_steps < 0 or self.max_classes < 1:
            raise ValueError("budget fields must be positive")
        if self.wall_clock is not None and self.wall_clock <= 0:
            raise ValueError("wall-clock cap must be positive")


@dataclass
class SearchResult:
    status: str
    steps: int
    witness: Optional[Witness] = None
    strategy: Optional[str] = None
    strategy_steps: dict = field(default_factory=dict)
    elapsed: float = 0.0
    note: str = ""

    @property
    def found(self) -> bool:
        return self.status == FOUND


# --- strategy helpers ------------------------------------------------------------


def _integral_primitive(v) -> list:
    fr = [as_fraction(c) for c in v]
    den = math.lcm(*(c.denominator for c in fr))
    ints = [int(c * den) for c in fr]
    g = math.gcd(*ints) or 1
    return [Fraction(c // g) for c in ints]


def _split_rows(coeffs) -> list:
    """Rational rows whose common kernel is the kernel of a Q(sqrt d)-row."""
    re = [c.a if isinstance(c, ExtReal) else as_fraction(c) for c in coeffs]
    im = [c.b if isinstance(c, ExtReal) else Fraction(0) for c in coeffs]
    return [re] + ([im] if any(im) else [])


def common_rational_kernel(inst: PairInstance) -> list:
    """Integral basis of the rational vectors killed by every ``L_s``."""
    rows = []
    for s in inst.places:
        rows.extend(_split_rows(inst.forms[s][1].coeffs))
    return [_integral_primitive(v) for v in la.nullspace(rows, inst.n)]


def _small_combos(basis, height: int = 2) -> Iterator[list]:
    k = len(basis)
    yield from (list(b) for b in basis)
    for h in range(1, height + 1):
        for t in itertools.product(range(-h, h + 1), repeat=k):
            if max(abs(c) for c in t) != h or sum(1 for c in t if c) < 2:
                continue
            if next(c for c in t if c) < 0:
                continue
            yield _integral_primitive([sum(ti * b[j] for ti, b in zip(t, basis)) for j in range(len(basis[0]))])


@dataclass(frozen=True)
class HyperbolicFrame:
    """Rational vectors ``E1, E2, E3`` in the common kernel of all ``L_s`` with
    ``Q_s(E2) = 0``, ``B_s(E2, E3) = 0`` and ``h_s = 2 B_s(E1, E2) != 0``.

    On ``x = E1 + b E2 + c E3`` every ``L_s`` vanishes and
    ``Q_s(x) = A_s(c) + b h_s`` is linear in ``b``.
    """

    e1: tuple
    e2: tuple
    e3: tuple
    h: dict
    a0: dict  # Q_s(E1)
    a1: dict  # 2 B_s(E1, E3)
    a2: dict  # Q_s(E3)

    def point(self, b, c) -> tuple:
        return tuple(x + b * y + c * z for x, y, z in zip(self.e1, self.e2, self.e3))

    def A(self, s, c):
        return self.a0[s] + c * self.a1[s] + c * c * self.a2[s]


def hyperbolic_frame(inst: PairInstance) -> Optional[HyperbolicFrame]:
    K = common_rational_kernel(inst)
    if len(K) < 3:
        return None
    places = inst.places
    Qs = {s: inst.forms[s][0] for s in places}

    e2 = next((v for v in _small_combos(list(reversed(K))) if all(Qs[s](v) == 0 for s in places)), None)
    if e2 is None:
        return None
    e1 = next((v for v in _small_combos(K) if all(Qs[s].polar(v, e2) != 0 for s in places)), None)
    if e1 is None:
        return None
    # vectors of K orthogonal to e2 at every place
    rows = []
    for s in places:
        rows.extend(_split_rows([Qs[s].polar(k, e2) for k in K]))
    sub = [_integral_primitive(la.matvec(la.transpose(K), t)) for t in la.nullspace(rows, len(K))]
    e3 = next((v for v in sub if la.rank([e1, e2, v]) == 3), None)
    if e3 is None:
        return None
    return HyperbolicFrame(
        e1=tuple(e1),
        e2=tuple(e2),
        e3=tuple(e3),
        h={s: 2 * Qs[s].polar(e1, e2) for s in places},
        a0={s: Qs[s](e1) for s in places},
        a1={s: 2 * Qs[s].polar(e1, e3) for s in places},
        a2={s: Qs[s](e3) for s in places},
    )


def solve_linear_congruence(a, h, p: int, m: int):
    """Integers ``b`` with ``v_p(a + b h) >= m``, as ``(r, k)`` meaning ``b = r mod p**k``.

    Returns None when there is no solution; ``k = 0`` means every integer works.
    """
    a, h = as_fraction(a), as_fraction(h)
    va = padic_valuation(a, p)
    vh = padic_valuation(h, p)
    if vh >= m:
        return (0, 0) if va >= m else None
    if va < vh:
        return None
    k = m - vh
    mod = p**k
    a_red = a / Fraction(p) ** vh
    h_red = h / Fraction(p) ** vh
    from .exact import residue

    r = -residue(a_red, mod) * pow(residue(h_red, mod), -1, mod) % mod
    return r, k


def _crt(parts):
    r, mod = 0, 1
    for ri, ki_mod in parts:
        if ki_mod == 1:
            continue
        inv = pow(mod, -1, ki_mod)
        r = (r + (ri - r) * inv % ki_mod * mod) % (mod * ki_mod)
        mod *= ki_mod
    return r, mod


def _cycle_ints() -> Iterator[int]:
    yield 0
    c = 1
    while True:
        yield c
        yield -c
        c += 1


def _frame_candidates(inst, frame, m: dict, eps_inf: Fraction, c_iter) -> Iterator:
    """Per value of ``c``: ``None`` if infeasible, else the best nearby ``b`` vectors."""
    for c in c_iter:
        parts = []
        ok = True
        for p in inst.primes:
            sol = solve_linear_congruence(frame.A(p, c), frame.h[p], p, m[p])
            if sol is None:
                ok = False
                break
            parts.append((sol[0], p ** sol[1]))
        if not ok:
            yield c, []
            continue
        b0, M = _crt(parts)
        A = frame.A(ARCHIMEDEAN, c)
        h = frame.h[ARCHIMEDEAN]
        # Q_inf(x) = A + (b0 + M k) h; closest k around the real root
        kstar = -(A + b0 * h) / (M * h)
        k0 = scalar_floor(kstar)
        out = []
        for k in (k0, k0 + 1):
            b = b0 + M * k
            if ext_abs_lt(A + b * h, eps_inf):
                out.append(frame.point(b, c))
        yield c, sorted(out)


def _strategy_frame(inst, frame, eps, m, verify) -> Iterator:
    """S2: hyperbolic parametrization with exact congruences at the finite places."""
    for _, cands in _frame_candidates(inst, frame, m, eps[ARCHIMEDEAN][0], _cycle_ints()):
        hit = None
        for x in cands:
            w = verify(x)
            if w is not None:
                hit = w
                break
        yield hit


def _strategy_multiplier(inst, frame, eps, m, verify) -> Iterator:
    """S3: archimedean-only search with tightened epsilon, then scale by ``a = prod p**m_p``."""
    a = math.prod(p ** max(m[p], 0) for p in inst.primes)
    eq, el = eps[ARCHIMEDEAN]
    tight_q = min(eq, el * a) / (a * a)  # |Q(ay)| = a^2|Q(y)|
    if frame is not None:
        for _, cands in _frame_candidates(inst, frame, _no_congruence(inst), tight_q, _cycle_ints()):
            hit = None
            for y in cands:
                w = verify(tuple(a * c for c in y))
                if w is not None:
                    hit = w
                    break
            yield hit
        return
    Q, L = inst.forms[ARCHIMEDEAN]
    for y in _shell_vectors(inst.n):
        qv, lv = eval_quad(Q, y), L(y)
        if abs(scalar_float(qv)) <= float(tight_q) * 1.001 + 1e-12 and abs(scalar_float(lv)) <= float(el / a) * 1.001 + 1e-12:
            yield verify(tuple(a * c for c in y))
        else:
            yield None


def _no_congruence(inst):
    class _All(dict):
        def __missing__(self, key):
            return -(10**9)

    return _All()


def _shell_vectors(n: int, start: int = 1) -> Iterator[tuple]:
    """Integer vectors by increasing max-norm R (R = 1, 2, ...), lexicographic within a shell."""
    R = start
    while True:
        for y in itertools.product(range(-R, R + 1), repeat=n):
            if max(abs(c) for c in y) == R:
                yield tuple(Fraction(c) for c in y)
        R += 1


def _strategy_classes(inst, eps, m, budget, verify) -> Iterator:
    """S1: coset enumeration ``x = z + M y`` over congruence classes, growing real boxes."""
    try:
        classes = list(congruence_classes(inst, {p: max(m[p], 1) for p in inst.primes}, budget.max_classes))
    except NoLocalZerosError:
        return
    Q, L = inst.forms[ARCHIMEDEAN]
    eq, el = (float(e) for e in eps[ARCHIMEDEAN])
    R = 0
    while True:
        ys = [tuple([0] * inst.n)] if R == 0 else (
            y for y in itertools.product(range(-R, R + 1), repeat=inst.n) if max(abs(c) for c in y) == R
        )
        for y in ys:
            for cl in classes:
                x = tuple(Fraction(r + cl.modulus * c) for r, c in zip(cl.residue, y))
                if not any(x):
                    yield None
                    continue
                qv, lv = eval_quad(Q, x), L(x)
                if abs(scalar_float(qv)) <= eq * 1.001 + 1e-12 and abs(scalar_float(lv)) <= el * 1.001 + 1e-12:
                    yield verify(x)
                else:
                    yield None
        R += 1


def search_witness(inst: PairInstance, eps: dict, budget: SearchBudget = SearchBudget(), override: bool = False,
                   allow_null: bool = False, hypotheses=None) -> SearchResult:
    """Search for a witness, strategies S1, S2, S3 interleaved round-robin.

    Round r gives every live strategy ``64 * 2**r`` steps; a step is one
    proposed candidate (or one infeasible parameter value).  Candidates whose
    values vanish at every place are skipped unless ``allow_null``.
    """
    t0 = time.perf_counter()
    if not override:
        rep = hypotheses or check_hypotheses(inst)
        if not rep.passed:
            raise PreconditionError("instance fails the hypotheses (use override to search anyway)")
    eps_n = normalize_eps(inst, eps)
    m = {p: max(precision_for(min(eps_n[p]), p), 0) for p in inst.primes}

    def verify(x):
        if not any(x):
            return None
        w = verify_witness(inst, x, eps_n)
        if isinstance(w, Witness) and (allow_null or not w.null):
            return w
        return None

    frame = hyperbolic_frame(inst)
    strategies = [("S1", _strategy_classes(inst, eps_n, m, budget, verify))]
    if frame is not None:
        strategies.append(("S2", _strategy_frame(inst, frame, eps_n, m, verify)))
    strategies.append(("S3", _strategy_multiplier(inst, frame, eps_n, m, verify)))
    used = {name: 0 for name, _ in strategies}
    steps = 0
    live = list(strategies)
    r = 0
    while live and steps < budget.max_steps:
        slice_ = 64 * 2**r
        for name, gen in list(live):
            for _ in range(slice_):
                if steps >= budget.max_steps:
                    break
                if budget.wall_clock is not None and time.perf_counter() - t0 > budget.wall_clock:
                    return SearchResult(EXHAUSTED, steps, strategy_steps=used,
                                        elapsed=time.perf_counter() - t0, note="wall-clock cap reached")
                try:
                    hit = next(gen)
                except StopIteration:
                    live.remove((name, gen))
                    break
                steps += 1
                used[name] += 1
                if hit is not None:
                    return SearchResult(FOUND, steps, hit, name, used, time.perf_counter() - t0)
        r += 1
    return SearchResult(EXHAUSTED, steps, strategy_steps=used, elapsed=time.perf_counter() - t0)


# --- experiments ---------------------------------------------------------------------


@dataclass
class ExperimentRow:
    eps: dict
    result: SearchResult
    reused: bool


def epsilon_experiment(inst: PairInstance, schedule: list, budget: SearchBudget = SearchBudget(),
                       override: bool = False) -> list:
    """One search per schedule entry, in the given order.

    A witness already found for an earlier entry is re-emitted without search
    when it re-verifies exactly for the current entry.
    """
    rows = []
    found = []
    rep = None if override else check_hypotheses(inst)
    for eps in schedule:
        reuse = None
        for w in found:
            again = verify_witness(inst, w.x, eps)
            if isinstance(again, Witness):
                reuse = again
                break
        if reuse is not None:
            rows.append(ExperimentRow(eps, SearchResult(FOUND, 0, reuse, "reuse", {}), True))
            continue
        res = search_witness(inst, eps, budget, override=override, hypotheses=rep)
        if res.witness is not None:
            found.append(res.witness)
        rows.append(ExperimentRow(eps, res, False))
    return rows


# --- scaling law --------------------------------------------------------------------------


def scaled_eps(inst: PairInstance, eps: dict, p: int) -> dict:
    """Thresholds for ``p x`` given thresholds for ``x``: (p^2, p) at infinity,
    (p^-2, p^-1) at p, unchanged elsewhere."""
    e = normalize_eps(inst, eps)
    out = dict(e)
    out[ARCHIMEDEAN] = (e[ARCHIMEDEAN][0] * p * p, e[ARCHIMEDEAN][1] * p)
    out[p] = (e[p][0] / (p * p), e[p][1] / p)
    return out


def scaling_law_holds(inst: PairInstance, w: Witness, p: int) -> bool:
    """Exact check that scaling by p rescales every magnitude as predicted and keeps a witness."""
    x2 = tuple(p * c for c in w.x)
    w2 = verify_witness(inst, x2, scaled_eps(inst, w.eps, p))
    if not isinstance(w2, Witness):
        return False
    for s in inst.places:
        (q, l), (q2, l2) = w.magnitudes[s], w2.magnitudes[s]
        if s == ARCHIMEDEAN:
            fq, fl = p * p, p
        elif s == p:
            fq, fl = Fraction(1, p * p), Fraction(1, p)
        else:
            fq, fl = 1, 1
        if q2 != q * fq or l2 != l * fl:
            return False
    return True


# --- dimension reduction ------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionResult:
    hyperplane: tuple  # integer coefficients of M
    basis: tuple  # columns span ker M (integral)
    instance: PairInstance
    samples: int

    def to_dict(self) -> dict:
        return {
            "hyperplane": [str(c) for c in self.hyperplane],
            "basis": [[str(c) for c in v] for v in self.basis],
            "samples": self.samples,
        }


def _functionals(n: int, seed: int) -> Iterator[tuple]:
    """Primitive integer functionals by increasing height, seeded shuffle within a height."""
    rng = random.Random(seed)
    h = 1
    while True:
        batch = [
            t
            for t in itertools.product(range(-h, h + 1), repeat=n)
            if max(abs(c) for c in t) == h and next(c for c in t if c) > 0 and math.gcd(*t) == 1
        ]
        rng.shuffle(batch)
        # coordinate functionals first: they keep the restricted forms simple
        batch.sort(key=lambda t: sum(1 for c in t if c))
        yield from batch
        h += 1


def restrict_instance(inst: PairInstance, basis) -> PairInstance:
    g = la.transpose([list(v) for v in basis])
    return inst.transformed(g)


def reduce_dimension(inst: PairInstance, max_samples: int = 10**4, seed: int = 0,
                     check: bool = True) -> ReductionResult | str:
    """Restrict to a rational hyperplane ``M = 0`` keeping all three conditions."""
    if inst.n < 5:
        raise PreconditionError("reduction needs n >= 5")
    if check and not check_hypotheses(inst).passed:
        raise PreconditionError("instance fails the hypotheses")
    gen = _functionals(inst.n, seed)
    for k in range(1, max_samples + 1):
        M = next(gen)
        basis = [tuple(_integral_primitive(v)) for v in kernel_basis(LinForm(tuple(M)))]
        try:
            sub = restrict_instance(inst, basis)
        except ValueError:
            continue
        rep = check_hypotheses(sub)
        if rep.passed:
            return ReductionResult(tuple(M), tuple(basis), sub, k)
    return EXHAUSTED


# --- obstruction scan ------------------------------------------------------------------


@dataclass(frozen=True)
class ObstructionResult:
    status: str  # "OK" or "EMPTY"
    height: int
    q0: Optional[QuadForm]
    vectors: int
    zero_values: int
    distinct_nonzero: int
    minimum: Optional[Fraction]
    argmin: Optional[tuple]
    floor: Fraction
    product_formula_ok: bool
    smallest: tuple = ()

    @property
    def holds(self) -> bool:
        return self.status == "EMPTY" or (self.minimum is not None and self.minimum >= self.floor
                                          and self.product_formula_ok)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "height": self.height,
            "Q0": None if self.q0 is None else str(self.q0),
            "vectors": self.vectors,
            "zero_values": self.zero_values,
            "distinct_nonzero_values": self.distinct_nonzero,
            "min_max_magnitude": None if self.minimum is None else format_scalar(self.minimum),
            "argmin": None if self.argmin is None else [format_scalar(c) for c in self.argmin],
            "floor": format_scalar(self.floor),
            "product_formula_ok": self.product_formula_ok,
            "holds": self.holds,
            "smallest": [format_scalar(v) for v in self.smallest],
        }


def _int_matrix(Q: QuadForm):
    return [[int(c) for c in row] for row in Q.coeffs]


def obstruction_scan(inst: PairInstance, height: int, pencil=None) -> ObstructionResult:
    """Smallest max-place magnitude of ``Q0`` over S-vectors of height <= H.

    Domain: ``x = y / prod p**e_p`` with ``max |y_i| <= H`` and
    ``p**e_p <= H``.  ``Q0`` is the common rational form (primitive integral),
    so its values lie in O_S and the product formula gives the floor 1.
    """
    if pencil is None:
        from .local import pencil_rationality

        pencil = pencil_rationality(inst)
    Q0 = pencil.common_Q0
    if Q0 is None:
        raise PreconditionError("no common rational form: the pencil is irrational")
    if height <= 0:
        return ObstructionResult("EMPTY", height, Q0, 0, 0, 0, None, None, Fraction(1), True)
    n = inst.n
    C = _int_matrix(Q0)
    grid = np.arange(-height, height + 1, dtype=np.int64)
    values = {}  # integer value -> lexicographically first y
    zero = 0
    total = 0
    rest = np.array(np.meshgrid(*([grid] * (n - 1)), indexing="ij")).reshape(n - 1, -1)
    for y0 in grid:
        ys = np.vstack([np.full(rest.shape[1], y0, dtype=np.int64), rest])
        val = np.zeros(ys.shape[1], dtype=np.int64)
        for i in range(n):
            for j in range(i, n):
                if C[i][j]:
                    val += C[i][j] * ys[i] * ys[j]
        nonzero_vec = np.any(ys != 0, axis=0)
        total += int(nonzero_vec.sum())
        zero += int(((val == 0) & nonzero_vec).sum())
        uniq, first = np.unique(val, return_index=True)
        for u, f in zip(uniq.tolist(), first.tolist()):
            if u != 0 and u not in values:
                values[u] = tuple(int(c) for c in ys[:, f])
    exps = [range(0, int(math.floor(math.log(height, p) + 1e-12)) + 1) for p in inst.primes]
    dens = []
    for e in itertools.product(*exps):
        dens.append((math.prod(p**k for p, k in zip(inst.primes, e)), e))
    best, arg, pf_ok = None, None, True
    maxima = set()
    for t in sorted(values):
        for D, _ in dens:
            val = Fraction(t, D * D)
            mags = [abs(val)] + [padic_abs(val, p) for p in inst.primes]
            prod = math.prod(mags, start=Fraction(1))
            if prod < 1:
                pf_ok = False
            mx = max(mags)
            maxima.add(mx)
            if best is None or mx < best:
                best, arg = mx, tuple(Fraction(c, D) for c in values[t])
    total *= len(dens)
    zero *= len(dens)
    return ObstructionResult("OK", height, Q0, total, zero, len(values), best, arg, Fraction(1), pf_ok,
                             tuple(sorted(maxima)[:40]))
