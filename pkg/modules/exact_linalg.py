"""
Exact linear algebra over Fraction.

Vectors and matrices are plain tuples so that they can be hashed and shared
between immutable dataclasses. Matrices are tuples of rows.
"""

from collections.abc import Iterable, Sequence
from fractions import Fraction

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]


def to_fraction(value: int | str | Fraction | float) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        msg = "Booleans are not rational numbers."
        raise TypeError(msg)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    # floats are converted exactly, never rounded
    return Fraction(value)


def vec(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


def mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(vec(row) for row in rows)


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def add(v1: Sequence[Fraction], v2: Sequence[Fraction]) -> Vector:
    if len(v1) != len(v2):
        msg = "Cannot add vectors of different dimensions."
        raise ValueError(msg)
    return tuple(x1 + x2 for x1, x2 in zip(v1, v2, strict=True))


def sub(v1: Sequence[Fraction], v2: Sequence[Fraction]) -> Vector:
    if len(v1) != len(v2):
        msg = "Cannot subtract vectors of different dimensions."
        raise ValueError(msg)
    return tuple(x1 - x2 for x1, x2 in zip(v1, v2, strict=True))


def scale(v: Sequence[Fraction], s: Fraction | int) -> Vector:
    return tuple(x * s for x in v)


def dot(v1: Sequence[Fraction], v2: Sequence[Fraction]) -> Fraction:
    if len(v1) != len(v2):
        msg = "Cannot dot product vectors of different dimensions."
        raise ValueError(msg)
    return sum((x1 * x2 for x1, x2 in zip(v1, v2, strict=True)), Fraction(0))


def linear_combination(coefficients: Sequence[Fraction], vectors: Sequence[Vector]) -> Vector:
    if not vectors:
        msg = "Cannot combine an empty list of vectors."
        raise ValueError(msg)
    result = zeros(len(vectors[0]))
    for c, v in zip(coefficients, vectors, strict=True):
        if c:
            result = add(result, scale(v, c))
    return result


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m, strict=True)) if m else ()


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def gram_matrix(vectors: Sequence[Vector]) -> Matrix:
    return tuple(tuple(dot(u, v) for v in vectors) for u in vectors)


def _row_echelon(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int], int]:
    """Gauss-Jordan elimination in place. Returns (rows, pivot columns, row swaps)."""

    pivots: list[int] = []
    swaps = 0
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    r = 0

    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
            swaps += 1

        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r], strict=True)]

        pivots.append(c)
        r += 1
        if r == n_rows:
            break

    return rows, pivots, swaps


def rank(vectors: Iterable[Sequence]) -> int:
    rows = [list(vec(v)) for v in vectors]
    if not rows:
        return 0
    _, pivots, _ = _row_echelon(rows)
    return len(pivots)


def solve(a: Matrix, b: Sequence[Fraction]) -> Vector:
    """Solve a x = b for square nonsingular a."""

    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        msg = "solve() expects a square system."
        raise ValueError(msg)

    augmented = [[*row, to_fraction(rhs)] for row, rhs in zip(a, b, strict=True)]
    reduced, pivots, _ = _row_echelon(augmented)
    if pivots[:n] != list(range(n)):
        msg = "Matrix is singular."
        raise ZeroDivisionError(msg)

    return tuple(reduced[i][n] for i in range(n))


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    augmented = [[*row, *unit(n, i)] for i, row in enumerate(a)]
    reduced, pivots, _ = _row_echelon(augmented)
    if pivots[:n] != list(range(n)):
        msg = "Matrix is singular."
        raise ZeroDivisionError(msg)

    return tuple(tuple(reduced[i][n:]) for i in range(n))


def determinant(a: Sequence[Sequence]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)

    rows = [list(vec(row)) for row in a]
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                factor = rows[i][c] / rows[c][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[c], strict=True)]

    return det


def int_determinant(a: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant for integer matrices of any size."""

    n = len(a)
    if n == 0:
        return 1

    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]

    return sign * m[n - 1][n - 1]


def format_fraction(x: Fraction | int) -> str:
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        msg = f"Not an exact rational: {text!r}"
        raise ValueError(msg) from e
