"""B-linear subspaces of F and their subspace (linearized) polynomials.

A subspace is identified by the reduced row echelon form of its
generator matrix over B, written in the field's coordinate basis; the
enumeration order is lexicographic on pivot columns and then on the free
entries, so it is stable across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from privrepair import linalg
from privrepair.errors import (
    InternalInconsistencyError,
    NotInImageError,
    ValidationError,
)


def gaussian_binomial(ell, m, q):
    """Number of m-dimensional GF(q)-subspaces of GF(q)^ell."""
    if m < 0 or m > ell:
        return 0
    num = den = 1
    for i in range(m):
        num *= q ** (ell - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class LinSubspace:
    """An m-dimensional B-subspace of F with a canonical generator matrix."""

    dim: int
    gen_coords: tuple  # RREF rows over B, entries are field-element indices
    members: tuple = dc_field(compare=False, repr=False)

    def __contains__(self, x):
        return x in self.members


def _span_members(ctx, rows):
    """All B-combinations of the given coordinate rows, sorted by index."""
    dim = len(rows)
    ell = ctx.ell
    out = set()
    for combo in itertools.product(ctx.subfield, repeat=dim):
        vec = [0] * ell
        for c, row in zip(combo, rows):
            if c:
                for j in range(ell):
                    vec[j] = ctx.add(vec[j], ctx.mul(c, row[j]))
        out.add(ctx.from_subfield_coords(vec))
    return tuple(sorted(out))


def subspace_from_generators(ctx, gens):
    """Canonical subspace spanned by the given field elements."""
    rows = [list(ctx.subfield_coords(g)) for g in gens]
    red, pivots = linalg.rref(ctx, rows)
    red = [tuple(r) for r in red[: len(pivots)]]
    return LinSubspace(dim=len(pivots), gen_coords=tuple(red),
                       members=_span_members(ctx, red))


def subspace_from_members(ctx, elems):
    space = subspace_from_generators(ctx, list(elems))
    if set(elems) - set(space.members):
        raise InternalInconsistencyError("member set is not closed under span")
    return space


@lru_cache(maxsize=128)
def enumerate_subspaces(ctx, m):
    """All m-dimensional B-subspaces of F, in canonical order.

    The count equals the Gaussian binomial [ell choose m]_q.
    """
    ell = ctx.ell
    if not 0 < m < ell:
        raise ValidationError(f"subspace dimension must satisfy 0 < m < {ell}")
    sub = ctx.subfield
    out = []
    for pivots in itertools.combinations(range(ell), m):
        free_cells = [(i, j) for i in range(m) for j in range(ell)
                      if j > pivots[i] and j not in pivots]
        for values in itertools.product(sub, repeat=len(free_cells)):
            rows = [[0] * ell for _ in range(m)]
            for i, pcol in enumerate(pivots):
                rows[i][pcol] = 1
            for (i, j), v in zip(free_cells, values):
                rows[i][j] = v
            rows = tuple(tuple(r) for r in rows)
            out.append(LinSubspace(dim=m, gen_coords=rows,
                                   members=_span_members(ctx, rows)))
    return tuple(out)


@dataclass(frozen=True)
class LinearizedPoly:
    """Monic polynomial sum_j coeffs[j] * x^(q^j) whose root set is ``kernel``."""

    ctx: object = dc_field(compare=False, repr=False)
    coeffs: tuple = ()
    kernel: LinSubspace = None

    def eval(self, x):
        ctx = self.ctx
        acc = ctx.mul(self.coeffs[0], x)
        y = x
        for c in self.coeffs[1:]:
            y = ctx.pow(y, ctx.q)
            acc = ctx.add(acc, ctx.mul(c, y))
        return acc

    @property
    def constant_coeff(self):
        return self.coeffs[0]


def subspace_poly(ctx, space):
    """Product of (x - w) over all members of the subspace, collapsed to
    q-power form.  The constant coefficient is nonzero."""
    from privrepair.field import poly_mul

    coeffs = [1]
    for w in space.members:
        coeffs = poly_mul(ctx, coeffs, [ctx.neg(w), 1])
    qpow = {ctx.q ** j: j for j in range(space.dim + 1)}
    collapsed = [0] * (space.dim + 1)
    for d, c in enumerate(coeffs):
        if c == 0:
            continue
        if d not in qpow:
            raise InternalInconsistencyError(
                "subspace product has a non-q-power term; the input is not a subspace")
        collapsed[qpow[d]] = c
    if collapsed[-1] != 1 or collapsed[0] == 0:
        raise InternalInconsistencyError("subspace polynomial is not monic with l0 != 0")
    return LinearizedPoly(ctx=ctx, coeffs=tuple(collapsed), kernel=space)


def image_basis(ctx, poly):
    """A deterministic basis of the image of a subspace polynomial.

    Gaussian elimination over the images of the coordinate basis,
    without back-substitution; rows come out ordered by pivot position.
    """
    rows = {}
    for b in ctx.coordinate_basis:
        vec = list(ctx.subfield_coords(poly.eval(b)))
        while True:
            lead = next((i for i, v in enumerate(vec) if v != 0), None)
            if lead is None:
                break
            if lead in rows:
                factor = vec[lead]
                vec = [ctx.sub(v, ctx.mul(factor, w)) for v, w in zip(vec, rows[lead])]
            else:
                inv = ctx.inv(vec[lead])
                rows[lead] = [ctx.mul(inv, v) for v in vec]
                break
    basis = tuple(ctx.from_subfield_coords(rows[piv]) for piv in sorted(rows))
    expected = ctx.ell - poly.kernel.dim
    if len(basis) != expected:
        raise InternalInconsistencyError(
            f"image has rank {len(basis)}, expected {expected}")
    return basis


def image_space(ctx, poly):
    """The image of a subspace polynomial as a canonical subspace."""
    return subspace_from_generators(ctx, [poly.eval(b) for b in ctx.coordinate_basis])


def ordered_bases(ctx, space):
    """All ordered bases of a subspace, in deterministic order."""
    from privrepair.linalg import rank

    coords = {v: list(ctx.subfield_coords(v)) for v in space.members}
    for combo in itertools.product(space.members, repeat=space.dim):
        if rank(ctx, [coords[v] for v in combo]) == space.dim:
            yield combo


def random_ordered_basis(ctx, space, rng):
    """Uniformly random ordered basis of a subspace (seeded rng)."""
    chosen = []
    span = {0}
    for _ in range(space.dim):
        pool = [v for v in space.members if v not in span]
        v = pool[rng.randrange(len(pool))]
        chosen.append(v)
        span = {ctx.add(s, ctx.mul(c, v)) for s in span for c in ctx.subfield}
    return tuple(chosen)


class ImageExpander:
    """Repeated expansion of elements in the span of a fixed basis.

    Precomputes the inverse of an invertible row-submatrix once, so each
    expansion is a small matrix-vector product plus a membership check.
    """

    def __init__(self, ctx, basis):
        self.ctx = ctx
        self.basis = tuple(basis)
        d = len(self.basis)
        cols = [list(ctx.subfield_coords(b)) for b in self.basis]
        full = [[cols[c][r] for c in range(d)] for r in range(ctx.ell)]
        pivot_rows = []
        probe = []
        for r in range(ctx.ell):
            if len(pivot_rows) == d:
                break
            if linalg.rank(ctx, probe + [full[r]]) > len(probe):
                probe.append(full[r])
                pivot_rows.append(r)
        if len(pivot_rows) < d:
            raise ValidationError("basis elements are B-dependent")
        square = [full[r] for r in pivot_rows]
        self._rows = full
        self._pivot_rows = pivot_rows
        self._inv = linalg.invert(ctx, square)

    def expand(self, y):
        ctx = self.ctx
        yc = ctx.subfield_coords(y)
        rhs = [yc[r] for r in self._pivot_rows]
        sol = []
        for row in self._inv:
            acc = 0
            for a, b in zip(row, rhs):
                acc = ctx.add(acc, ctx.mul(a, b))
            sol.append(acc)
        for r, row in enumerate(self._rows):
            acc = 0
            for a, b in zip(row, sol):
                acc = ctx.add(acc, ctx.mul(a, b))
            if acc != yc[r]:
                raise NotInImageError("element is outside the span of the basis")
        return tuple(sol)


def expand_in_image(ctx, basis, y):
    """Coefficients of y in the given basis; rejects y outside the span."""
    return ImageExpander(ctx, basis).expand(y)


def _rref_bits(masks):
    """RREF over GF(2) of coordinate bitmasks (pivot = lowest set bit)."""
    rows = []
    for v in masks:
        for r in rows:
            if v & (r & -r):
                v ^= r
        if v:
            low = v & -v
            for i, r in enumerate(rows):
                if r & low:
                    rows[i] = r ^ v
            rows.append(v)
    return tuple(sorted(rows))


def span_key(ctx, elems):
    """Canonical hashable identity of the B-span of the given elements.

    The number of rows in the key is the span's dimension.
    """
    if ctx.p == 2 and ctx.subfield_degree == 1:
        return _rref_bits(list(elems))
    rows = [list(ctx.subfield_coords(g)) for g in elems]
    red, pivots = linalg.rref(ctx, rows)
    return tuple(tuple(r) for r in red[: len(pivots)])


@lru_cache(maxsize=32)
def kernel_by_image(ctx, m):
    """Span key of each (ell-m)-dimensional image -> its unique kernel.

    Built by brute force over all m-dimensional subspaces; duplicate or
    missing images would falsify the audit and are surfaced loudly.
    """
    mapping = {}
    for space in enumerate_subspaces(ctx, m):
        poly = subspace_poly(ctx, space)
        key = span_key(ctx, [poly.eval(b) for b in ctx.coordinate_basis])
        if key in mapping:
            raise InternalInconsistencyError("two subspaces share one image")
        mapping[key] = space
    if len(mapping) != gaussian_binomial(ctx.ell, ctx.ell - m, ctx.q):
        raise InternalInconsistencyError("image map does not cover all subspaces")
    return mapping


def preimage_subspace(ctx, image):
    """The unique subspace W with im(L_W) equal to the given subspace."""
    mapping = kernel_by_image(ctx, ctx.ell - image.dim)
    key = span_key(ctx, image.members)
    if key not in mapping:
        raise InternalInconsistencyError("no kernel subspace maps onto the given image")
    return mapping[key]
