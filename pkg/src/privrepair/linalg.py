"""Dense linear algebra over a ``FieldCtx``.

Matrices are lists of rows, entries are element indices.  All routines
also work when every entry lies in the designated subfield: the subfield
is closed under the field operations, so pivoting never leaves it.
"""

from __future__ import annotations


def rref(ctx, rows):
    """Reduced row echelon form.  Returns ``(new_rows, pivot_columns)``."""
    mat = [list(r) for r in rows]
    if not mat:
        return mat, []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = ctx.inv(mat[r][c])
        mat[r] = [ctx.mul(inv, v) for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [ctx.sub(v, ctx.mul(factor, w)) for v, w in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(ctx, rows):
    return len(rref(ctx, rows)[1])


def solve(ctx, a, b):
    """One solution of ``A x = b``, or ``None`` if inconsistent.

    Free variables are set to zero.
    """
    if not a:
        return [] if all(v == 0 for v in b) else None
    ncols = len(a[0])
    aug = [list(row) + [v] for row, v in zip(a, b)]
    red, pivots = rref(ctx, aug)
    if ncols in pivots:
        return None
    sol = [0] * ncols
    for r, c in enumerate(pivots):
        sol[c] = red[r][ncols]
    return sol


def solution_count(ctx, a, b, domain_order):
    """Number of solutions of ``A x = b`` with unknowns ranging over a
    field of ``domain_order`` elements."""
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [v] for row, v in zip(a, b)]
    red, pivots = rref(ctx, aug)
    if ncols in pivots:
        return 0
    return domain_order ** (ncols - len(pivots))


def unique_solution(ctx, a, b):
    """The solution of ``A x = b`` when it is unique, else ``None``."""
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [v] for row, v in zip(a, b)]
    red, pivots = rref(ctx, aug)
    if ncols in pivots or len(pivots) < ncols:
        return None
    sol = [0] * ncols
    for r, c in enumerate(pivots):
        sol[c] = red[r][ncols]
    return tuple(sol)


def invert(ctx, a):
    """Inverse of a square matrix, or ``None`` if singular."""
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(ctx, aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]
