"""Exact linear algebra over the rationals.

Matrices are plain lists of rows whose entries are :class:`fractions.Fraction`
(integers are accepted on input and promoted).  Nothing here touches floating
point: ranks, kernels and generalized inverses are integer/rational facts.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def zeros(n_rows: int, n_cols: int) -> Matrix:
    return [[Fraction(0)] * n_cols for _ in range(n_rows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def transpose(m: Sequence[Sequence], n_cols: Optional[int] = None) -> Matrix:
    n_rows = len(m)
    if n_cols is None:
        n_cols = len(m[0]) if m else 0
    return [[Fraction(m[i][j]) for i in range(n_rows)] for j in range(n_cols)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence], inner: Optional[int] = None) -> Matrix:
    """Product ``a @ b``.  ``inner`` is needed only when both operands are empty-ish."""
    n = len(a)
    k = inner if inner is not None else (len(a[0]) if a else len(b))
    p = len(b[0]) if b else 0
    out = zeros(n, p)
    for i in range(n):
        row = a[i]
        out_row = out[i]
        for t in range(k):
            v = row[t]
            if v == 0:
                continue
            b_row = b[t]
            for j in range(p):
                if b_row[j] != 0:
                    out_row[j] += v * b_row[j]
    return out


def is_zero(m: Sequence[Sequence]) -> bool:
    return all(v == 0 for row in m for v in row)


def rref(m: Sequence[Sequence], column_order: Optional[Sequence[int]] = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form with pivots searched in ``column_order``.

    Returns the reduced matrix (rows in pivot order, zero rows dropped) and the
    list of pivot columns, in the order they were found.
    """
    a = to_fraction_matrix(m)
    n_rows, n_cols = shape(a)
    order = list(range(n_cols)) if column_order is None else list(column_order)
    pivots: List[int] = []
    r = 0
    for c in order:
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        if p != 1:
            a[r] = [v / p for v in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def exact_rank(m: Sequence[Sequence]) -> int:
    """Rank over the rationals via fraction-free (Bareiss) elimination."""
    a = [[int(v) if Fraction(v).denominator == 1 else Fraction(v) for v in row] for row in m]
    if any(isinstance(v, Fraction) for row in a for v in row):
        # clear denominators row by row; rank is unchanged
        cleared = []
        for row in a:
            den = 1
            for v in row:
                den = den * Fraction(v).denominator // _gcd(den, Fraction(v).denominator)
            cleared.append([int(Fraction(v) * den) for v in row])
        a = cleared
    n_rows, n_cols = shape(a)
    rank = 0
    prev = 1
    for c in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, n_rows):
            a[i] = [(a[rank][c] * a[i][j] - a[i][c] * a[rank][j]) // prev for j in range(n_cols)]
        prev = a[rank][c]
        rank += 1
        if rank == n_rows:
            break
    return rank


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def independent_rows(m: Sequence[Sequence]) -> List[int]:
    """Indices of a maximal set of linearly independent rows, chosen greedily top-down."""
    return independent_columns(transpose(m, len(m[0]) if m else 0))


def independent_columns(m: Sequence[Sequence], column_order: Optional[Sequence[int]] = None) -> List[int]:
    """Pivot columns of ``m`` (leftmost-first unless ``column_order`` says otherwise)."""
    _, pivots = rref(m, column_order)
    return pivots


def solve_in_basis(basis_cols: Sequence[Sequence], target: Sequence) -> List[Fraction]:
    """Coordinates of ``target`` over linearly independent columns ``basis_cols``.

    Raises ValueError if ``target`` is outside their span.
    """
    k = len(basis_cols)
    n = len(target)
    aug = [[Fraction(basis_cols[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    red, pivots = rref(aug)
    if k in pivots:
        raise ValueError("vector not in span of basis")
    coords = [Fraction(0)] * k
    for row, c in zip(red, pivots):
        coords[c] = row[k]
    return coords


def inverse(m: Sequence[Sequence]) -> Matrix:
    n, n_cols = shape(m)
    if n != n_cols:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + e for row, e in zip(to_fraction_matrix(m), identity(n))]
    red, pivots = rref(aug, column_order=range(n))
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def kernel_basis(m: Sequence[Sequence], n_cols: Optional[int] = None,
                 column_order: Optional[Sequence[int]] = None) -> Matrix:
    """Basis of ``ker m`` as the columns of an ``n_cols x (n_cols - rank)`` matrix.

    Each basis vector has a 1 in one non-pivot column and 0 in the others, so the
    basis has trivial kernel by construction.
    """
    if n_cols is None:
        n_cols = len(m[0]) if m else 0
    if not m:
        return identity(n_cols)
    red, pivots = rref(m, column_order)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = zeros(n_cols, len(free))
    for j, f in enumerate(free):
        basis[f][j] = Fraction(1)
        for row, p in zip(red, pivots):
            basis[p][j] = -row[f]
    return basis


def rank_factorization(m: Sequence[Sequence]) -> Tuple[Matrix, Matrix]:
    """``m = C @ R`` with ``C`` of full column rank and ``R`` of full row rank."""
    n_rows, n_cols = shape(m)
    red, pivots = rref(m)
    c = [[Fraction(m[i][p]) for p in pivots] for i in range(n_rows)]
    return c, red


def generalized_inverse(m: Sequence[Sequence]) -> Matrix:
    """Moore-Penrose inverse from a rank factorization, exact.

    ``H = R^T (R R^T)^-1 (C^T C)^-1 C^T``; satisfies ``m H m = m`` and the
    remaining Penrose identities.  For an ``n x k`` input the result is ``k x n``.
    """
    n_rows, n_cols = shape(m)
    if is_zero(m):
        return zeros(n_cols, n_rows)
    c, r = rank_factorization(m)
    ct = transpose(c)
    rt = transpose(r)
    left = inverse(matmul(r, rt))
    right = inverse(matmul(ct, c))
    return matmul(matmul(rt, left), matmul(right, ct))


def pivot_generalized_inverse(m: Sequence[Sequence],
                              column_order: Optional[Sequence[int]] = None) -> Tuple[Matrix, List[int], List[int]]:
    """Block generalized inverse supported on a nonsingular submatrix.

    Picks independent rows ``I`` and pivot columns ``P`` (searched in
    ``column_order``) and returns ``H`` with ``H[P, I] = m[I, P]^-1`` and zeros
    elsewhere, together with ``I`` and ``P``.  Rows of ``H`` outside ``P`` vanish,
    which keeps exponents in the parametrization integral whenever the chosen
    block is unimodular.
    """
    n_rows, n_cols = shape(m)
    h = zeros(n_cols, n_rows)
    if n_rows == 0 or is_zero(m):
        return h, [], []
    rows = independent_rows(m)
    sub = [m[i] for i in rows]
    cols = independent_columns(sub, column_order)
    block = [[Fraction(m[i][p]) for p in cols] for i in rows]
    inv = inverse(block)
    for a, p in enumerate(cols):
        for b, i in enumerate(rows):
            h[p][i] = inv[a][b]
    return h, rows, cols
