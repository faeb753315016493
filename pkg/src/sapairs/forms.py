"""Quadratic and linear forms with exact coefficients.

A :class:`QuadForm` stores polynomial coefficients in an upper-triangular
matrix: entry ``(i, j)`` with ``i <= j`` multiplies ``x_i x_j``.  The Gram
matrix ``G = (C + C^T) / 2`` is derived on demand, so instance files stay
integral.  Coefficients may be ``Fraction`` or :class:`~sapairs.exact.ExtReal`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _linalg as la
from .exact import ExtReal, field_sqrt, format_scalar, sign


class DegenerateFormError(ValueError):
    pass


class NoIsotropicVectorError(ValueError):
    """No isotropic vector is available over the coefficient field."""


def _coerce(c):
    if isinstance(c, ExtReal):
        return c.a if c.b == 0 else c
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


@dataclass(frozen=True)
class QuadForm:
    coeffs: tuple

    def __post_init__(self):
        rows = tuple(tuple(_coerce(c) for c in row) for row in self.coeffs)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("coefficient matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != 0:
                    raise ValueError(f"entry ({i},{j}) below the diagonal must be zero")
        object.__setattr__(self, "coeffs", rows)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_terms(cls, n: int, terms: dict) -> "QuadForm":
        """Build from ``{(i, j): c}`` with 0-based indices; (j, i) folds onto (i, j)."""
        rows = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), c in terms.items():
            i, j = min(i, j), max(i, j)
            rows[i][j] = rows[i][j] + _coerce(c)
        return cls(tuple(map(tuple, rows)))

    @classmethod
    def from_gram(cls, gram) -> "QuadForm":
        n = len(gram)
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = _coerce(gram[i][i])
            for j in range(i + 1, n):
                rows[i][j] = 2 * _coerce(gram[i][j])
        return cls(tuple(map(tuple, rows)))

    @classmethod
    def diagonal(cls, entries) -> "QuadForm":
        return cls.from_terms(len(entries), {(i, i): c for i, c in enumerate(entries)})

    def gram(self):
        n = self.n
        c = self.coeffs
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            g[i][i] = c[i][i]
            for j in range(i + 1, n):
                g[i][j] = g[j][i] = c[i][j] / 2
        return g

    def __call__(self, x):
        return eval_quad(self, x)

    def polar(self, x, y):
        """The bilinear form B(x, y) with B(x, x) = Q(x)."""
        return la.dot(x, la.matvec(self.gram(), y))

    def vector(self):
        """Coefficients flattened in (i <= j) order."""
        return [self.coeffs[i][j] for i in range(self.n) for j in range(i, self.n)]

    @classmethod
    def from_vector(cls, n: int, vec) -> "QuadForm":
        it = iter(vec)
        return cls.from_terms(n, {(i, j): next(it) for i in range(n) for j in range(i, n)})

    def scaled(self, c) -> "QuadForm":
        return QuadForm(tuple(tuple(c * x for x in row) for row in self.coeffs))

    def __add__(self, other: "QuadForm") -> "QuadForm":
        return QuadForm(tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(self.coeffs, other.coeffs)))

    def compose(self, g) -> "QuadForm":
        """``y -> Q(g y)`` for an n x m matrix ``g`` (rows indexed by x)."""
        return QuadForm.from_gram(la.matmul(la.matmul(la.transpose(g), self.gram()), g))

    def is_rational(self) -> bool:
        return all(not isinstance(c, ExtReal) or c.b == 0 for row in self.coeffs for c in row)

    def __str__(self):
        terms = []
        for i in range(self.n):
            for j in range(i, self.n):
                c = self.coeffs[i][j]
                if c != 0:
                    mono = f"x{i + 1}^2" if i == j else f"x{i + 1}x{j + 1}"
                    terms.append(f"({format_scalar(c)})*{mono}")
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class LinForm:
    coeffs: tuple

    def __post_init__(self):
        c = tuple(_coerce(x) for x in self.coeffs)
        if not c:
            raise ValueError("empty linear form")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, x):
        if len(x) != self.n:
            raise ValueError(f"dimension mismatch: form has {self.n} variables, vector has {len(x)}")
        return la.dot(self.coeffs, x)

    def square(self) -> QuadForm:
        c = self.coeffs
        n = self.n
        return QuadForm.from_terms(
            n, {(i, j): (c[i] * c[i] if i == j else 2 * c[i] * c[j]) for i in range(n) for j in range(i, n)}
        )

    def compose(self, g) -> "LinForm":
        return LinForm(tuple(la.matvec(la.transpose(g), list(self.coeffs))))

    def is_rational(self) -> bool:
        return all(not isinstance(c, ExtReal) or c.b == 0 for c in self.coeffs)

    def __str__(self):
        terms = [f"({format_scalar(c)})*x{i + 1}" for i, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms) or "0"


def eval_quad(Q: QuadForm, x: Sequence):
    if len(x) != Q.n:
        raise ValueError(f"dimension mismatch: form has {Q.n} variables, vector has {len(x)}")
    total = Fraction(0)
    c = Q.coeffs
    for i in range(Q.n):
        xi = x[i]
        if xi == 0:
            continue
        row = c[i]
        acc = Fraction(0)
        for j in range(i, Q.n):
            if row[j] != 0 and x[j] != 0:
                acc = acc + row[j] * x[j]
        total = total + acc * xi
    return total


def kernel_basis(L: LinForm) -> list:
    """Basis ``e_j - (l_j / l_k) e_k`` (j != k) of ``{L = 0}``, k the first nonzero index."""
    if L.is_zero():
        raise ValueError("zero linear form has no hyperplane kernel")
    c = L.coeffs
    k = next(i for i, x in enumerate(c) if x != 0)
    basis = []
    for j in range(L.n):
        if j == k:
            continue
        v = [Fraction(0)] * L.n
        v[j] = Fraction(1)
        if c[j] != 0:
            v[k] = -c[j] / c[k]
        basis.append(v)
    return basis


def basis_matrix(basis) -> list:
    """Columns are the given vectors."""
    return la.transpose([list(v) for v in basis])


def restrict(Q: QuadForm, basis) -> QuadForm:
    if not basis:
        raise ValueError("empty basis")
    if la.rank([list(v) for v in basis]) != len(basis):
        raise ValueError("basis vectors are linearly dependent")
    return Q.compose(basis_matrix(basis))


def radical(Q: QuadForm) -> list:
    return la.nullspace(Q.gram(), Q.n)


def is_nondegenerate(Q: QuadForm) -> bool:
    return la.det(Q.gram()) != 0


def _congruence(gram):
    """Symmetric Gaussian congruence; returns (B, diag) with B^T G B = diag(diag).

    Zero rows contribute a zero diagonal entry instead of failing.
    """
    n = len(gram)
    g = [list(r) for r in gram]
    b = la.identity(n)

    def add_col(k, j, f):  # e_k <- e_k + f e_j
        for r in range(n):
            b[r][k] = b[r][k] + f * b[r][j]
        for c in range(n):
            g[k][c] = g[k][c] + f * g[j][c]
        for r in range(n):
            g[r][k] = g[r][k] + f * g[r][j]

    for k in range(n):
        if g[k][k] == 0:
            # first nonzero entry of row k: e_k <- e_k +- e_j makes the pivot nonzero
            j = next((j for j in range(k + 1, n) if g[k][j] != 0), None)
            if j is None:
                continue
            f = Fraction(1) if 2 * g[k][j] + g[j][j] != 0 else Fraction(-1)
            add_col(k, j, f)
        for j in range(k + 1, n):
            if g[k][j] != 0:
                add_col(j, k, -g[k][j] / g[k][k])
    return b, [g[i][i] for i in range(n)]


def diagonalize(Q: QuadForm):
    """Return ``(B, diag)`` with ``B^T G B`` diagonal, for nondegenerate ``Q``."""
    b, diag = _congruence(Q.gram())
    if any(x == 0 for x in diag):
        raise DegenerateFormError("form is degenerate; compute its radical first")
    return b, diag


def congruence_diagonal(Q: QuadForm):
    """Like :func:`diagonalize` but tolerates a radical (zero entries)."""
    return _congruence(Q.gram())


def exact_isotropic_vector(Q: QuadForm):
    """An exact nonzero zero of ``Q`` over its coefficient field, when one is visible.

    Tries coordinate vectors and pairs of diagonal entries ``d_i, d_j`` with
    ``-d_i/d_j`` a square in the field.  Returns ``None`` when neither applies.
    """
    n = Q.n
    for i in range(n):
        if Q.coeffs[i][i] == 0:
            v = [Fraction(0)] * n
            v[i] = Fraction(1)
            return v
    b, diag = congruence_diagonal(Q)
    for i in range(n):
        if diag[i] == 0:
            return [b[r][i] for r in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if sign(diag[i]) == sign(diag[j]):
                continue
            r = field_sqrt(-diag[i] / diag[j])
            if r is None:
                continue
            # Q(e_i + r e_j) = d_i + r^2 d_j = 0 in the diagonal basis
            return [b[k][i] + r * b[k][j] for k in range(n)]
    return None


@dataclass(frozen=True)
class NormalForm:
    """``L(g y) = y4`` and ``Q(g y) = y1 y2 + a3 y3^2 + a4 y4^2``; columns of g are w1..w4."""

    g: tuple
    a3: object
    a4: object

    def columns(self):
        return [[row[k] for row in self.g] for k in range(4)]


def normal_form_pair(Q: QuadForm, L: LinForm, isotropic=None) -> NormalForm:
    """Adapted basis of the stabilizer lemma for a pair in dimension 4.

    ``isotropic`` is a nonzero vector with ``L(u) = 0`` and ``Q(u) = 0`` over the
    coefficient field; when omitted an exact one is looked up with
    :func:`exact_isotropic_vector` and :class:`NoIsotropicVectorError` is raised
    if none is visible.
    """
    if Q.n != 4 or L.n != 4:
        raise ValueError("normal_form_pair needs n = 4")
    if not is_nondegenerate(Q):
        raise DegenerateFormError("Q is degenerate")
    kb = kernel_basis(L)
    QV = restrict(Q, kb)
    if not is_nondegenerate(QV):
        raise DegenerateFormError("Q restricted to {L = 0} is degenerate")
    G = Q.gram()
    ell = list(L.coeffs)

    if isotropic is None:
        y = exact_isotropic_vector(QV)
        if y is None:
            raise NoIsotropicVectorError("no isotropic vector of Q|{L=0} over the coefficient field")
        u = la.matvec(basis_matrix(kb), y)
    else:
        u = [_coerce(c) for c in isotropic]
        if all(c == 0 for c in u):
            raise ValueError("isotropic vector must be nonzero")
        if L(u) != 0 or Q(u) != 0:
            raise ValueError("supplied vector is not an isotropic vector of Q on {L = 0}")

    # w4 spans the orthogonal complement of V = ker L, scaled so L(w4) = 1
    w = la.solve(G, ell)
    w4 = [x / L(w) for x in w]
    a4 = Q(w4)

    # partner of u inside V with B(u, v) = 1/2, then make it isotropic
    v = next((list(k) for k in kb if Q.polar(u, k) != 0), None)
    if v is None:
        raise DegenerateFormError("isotropic vector lies in the radical of Q|{L=0}")
    c = Q.polar(u, v)
    v = [x / (2 * c) for x in v]
    qv = Q(v)
    w2 = [x - qv * y for x, y in zip(v, u)]
    w1 = u

    # w3: the line of V orthogonal to w1 and w2
    rows = [la.matvec(G, w1), la.matvec(G, w2)]
    rows = [[la.dot(r, k) for k in kb] for r in rows]
    coords = la.nullspace(rows, len(kb))
    if len(coords) != 1:
        raise DegenerateFormError("hyperbolic plane does not split off V")
    w3 = la.matvec(basis_matrix(kb), coords[0])
    a3 = Q(w3)
    if a3 == 0 or a4 == 0:
        raise DegenerateFormError("degenerate normal form")
    g = tuple(tuple(col[r] for col in (w1, w2, w3, w4)) for r in range(4))
    return NormalForm(g=g, a3=a3, a4=a4)


@dataclass(frozen=True)
class PairInstance:
    """A pair ``(Q_s, L_s)`` for every place: ``"inf"`` first, then the primes.

    ``forms`` maps each place to ``(QuadForm, LinForm)``.  Archimedean
    coefficients may lie in Q(sqrt d); finite-place coefficients are rational.
    """

    n: int
    d: int
    primes: tuple
    forms: dict
    labels: dict = None

    def __post_init__(self):
        from .exact import ARCHIMEDEAN, is_prime

        errors = []
        if self.n < 2:
            errors.append("dimension must be at least 2")
        if len(set(self.primes)) != len(self.primes):
            errors.append("duplicate place")
        for p in self.primes:
            if not isinstance(p, int) or not is_prime(p):
                errors.append(f"place {p!r} is not a prime")
        expected = [ARCHIMEDEAN, *self.primes]
        if set(self.forms) != set(expected):
            errors.append(f"forms must be given exactly for places {expected}")
        for place, (Q, L) in self.forms.items():
            if Q.n != self.n or L.n != self.n:
                errors.append(f"dimension mismatch at place {place}")
            if L.is_zero():
                errors.append(f"zero linear form at place {place}")
            coeffs = [c for row in Q.coeffs for c in row] + list(L.coeffs)
            for c in coeffs:
                if isinstance(c, ExtReal):
                    if place != ARCHIMEDEAN and c.b != 0:
                        errors.append(f"irrational coefficient at finite place {place}")
                        break
                    if c.d != self.d and c.b != 0:
                        errors.append(f"coefficient field sqrt({c.d}) differs from d = {self.d}")
                        break
        if errors:
            raise ValueError("; ".join(dict.fromkeys(errors)))

    @property
    def places(self) -> tuple:
        from .exact import ARCHIMEDEAN

        return (ARCHIMEDEAN, *self.primes)

    def pair(self, place):
        return self.forms[place]

    def transformed(self, g) -> "PairInstance":
        """Apply the same change of variables ``x = g y`` at every place."""
        forms = {s: (Q.compose(g), L.compose(g)) for s, (Q, L) in self.forms.items()}
        return PairInstance(n=len(g[0]), d=self.d, primes=self.primes, forms=forms, labels=self.labels)
