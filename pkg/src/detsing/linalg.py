"""Exact rational linear algebra on small dense matrices (lists of rows)."""

from gmpy2 import mpq


def rref(rows):
    """Reduced row echelon form. Returns (non-zero rows, pivot columns)."""
    m = [[mpq(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on integers-or-rationals."""
    m = [[mpq(x) for x in row] for row in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    r = 0
    prev = mpq(1)
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, nrows):
            m[i] = [(m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev for j in range(ncols)]
        prev = m[r][c]
        r += 1
        if r == nrows:
            break
    return r


def inverse(rows):
    n = len(rows)
    aug = [list(row) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]
