"""Brute-force reference implementations used as ground truth in tests.

Nothing here imports the package under test.  Rationals are Fractions;
elements of Q(sqrt d) are plain ``(a, b)`` pairs.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# --- valuations ---------------------------------------------------------------


def val_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val(t: Fraction, p: int):
    if t == 0:
        return None
    return val_int(t.numerator, p) - val_int(t.denominator, p)


def abs_p(t: Fraction, p: int) -> Fraction:
    v = val(Fraction(t), p)
    return Fraction(0) if v is None else Fraction(1, p) ** v


# --- real quadratic field as pairs ----------------------------------------------


def qsign(a: Fraction, b: Fraction, d: int) -> int:
    """Sign of a + b sqrt(d) by squaring."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # opposite signs: compare a^2 with b^2 d
    big_a = a * a > b * b * d
    if a > 0:
        return 1 if big_a else -1
    return -1 if big_a else 1


def qabs_lt(a: Fraction, b: Fraction, d: int, eps: Fraction) -> bool:
    return qsign(eps - a, -b, d) > 0 and qsign(eps + a, b, d) > 0


# --- local solubility by tree search -------------------------------------------


def _tree_search(f, grad, n: int, p: int, k: int, need_hensel: bool) -> bool:
    """Search primitive residues (first unit coordinate fixed to 1) mod p**j, j <= k.

    With ``need_hensel`` a node at level j counts only if some gradient entry
    has valuation delta with 2*delta + 1 <= j; otherwise reaching level k is
    enough.
    """

    def certified(x, j):
        g = [c % p**j for c in grad(x)]
        vals = [val_int(c, p) if c else j for c in g]
        return 2 * min(vals) + 1 <= j

    def dfs(x, j, lead):
        if need_hensel and certified(x, j):
            return True
        if j == k:
            return not need_hensel
        step = p**j
        free = [i for i in range(n) if i != lead]
        for t in itertools.product(range(p), repeat=len(free)):
            y = list(x)
            for i, ti in zip(free, t):
                y[i] += ti * step
            if f(y) % p ** (j + 1) == 0 and dfs(y, j + 1, lead):
                return True
        return False

    for lead in range(n):
        for tail in itertools.product(range(p), repeat=n - lead - 1):
            x = [0] * lead + [1] + list(tail)
            if f(x) % p == 0 and dfs(x, 1, lead):
                return True
    return False


def _int_square_class(t: Fraction) -> int:
    return t.numerator * t.denominator


def hilbert_oracle(a, b, p: int) -> int:
    """+1 iff a x^2 + b y^2 = z^2 has a Hensel-certified primitive solution mod p**k."""
    a, b = Fraction(a), Fraction(b)
    A, B = _int_square_class(a), _int_square_class(b)
    k = 2 * max(abs(val(a, p)), abs(val(b, p))) + 3 + (2 if p == 2 else 0)

    def f(x):
        return A * x[0] ** 2 + B * x[1] ** 2 - x[2] ** 2

    def grad(x):
        return [2 * A * x[0], 2 * B * x[1], -2 * x[2]]

    return 1 if _tree_search(f, grad, 3, p, k, need_hensel=True) else -1


def isotropy_oracle(diag, p: int) -> bool:
    """Primitive zero of sum d_i x_i^2 mod p^3 (mod 2^5 at p = 2)."""
    D = [_int_square_class(Fraction(c)) for c in diag]
    k = 5 if p == 2 else 3

    def f(x):
        return sum(c * xi * xi for c, xi in zip(D, x))

    return _tree_search(f, lambda x: [0] * len(D), len(D), p, k, need_hensel=False)


def real_hilbert(a, b) -> int:
    return -1 if a < 0 and b < 0 else 1


# --- exact matrices -----------------------------------------------------------------


def gram_of(coeffs):
    n = len(coeffs)
    return [[Fraction(coeffs[i][i]) if i == j else Fraction(coeffs[min(i, j)][max(i, j)]) / 2
             for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


def transpose(a):
    return [list(r) for r in zip(*a)]


def poly_eval(coeffs, x):
    n = len(coeffs)
    return sum((coeffs[i][j] * x[i] * x[j] for i in range(n) for j in range(i, n)), Fraction(0))
