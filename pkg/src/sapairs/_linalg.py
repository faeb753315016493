# Small exact linear algebra over Q or Q(sqrt d); matrices are lists of rows.
# Pivoting always picks the first nonzero entry by index.

from fractions import Fraction


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def dot(u, v):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def rref(a):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a):
    if not a:
        return 0
    return len(rref(a)[1])


def nullspace(a, ncols=None):
    """Basis of {x : a x = 0}, one vector per free column (that entry set to 1)."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    m, pivots = rref(a)
    n = len(a[0])
    basis = []
    for free in range(n):
        if free in pivots:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, pc in zip(m, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def det(a):
    m = [list(row) for row in a]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out = out * m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


def solve(a, b):
    """Solve the square system a x = b (a invertible)."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) != n:
        raise ZeroDivisionError("singular system")
    return [m[i][n] for i in range(n)]


def inverse(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def independent_rows(vectors):
    """Rational-basis reduction: rref nonzero rows of the given vectors."""
    if not vectors:
        return []
    m, pivots = rref(vectors)
    return [m[i] for i in range(len(pivots))]


def intersect(a_basis, b_basis, dim):
    """Basis of span(a) ∩ span(b) for lists of row vectors of length dim."""
    if not a_basis or not b_basis:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    cols = [list(v) for v in a_basis] + [[-x for x in v] for v in b_basis]
    system = transpose(cols)
    out = []
    for sol in nullspace(system, len(cols)):
        vec = [sum((sol[i] * a_basis[i][k] for i in range(len(a_basis))), Fraction(0)) for k in range(dim)]
        out.append(vec)
    return independent_rows(out) if out else []
