"""Exact arithmetic in F = GF(q^ell) viewed over the subfield B = GF(q).

Elements are integers below ``q**ell`` encoding coefficient vectors over
the prime field GF(p), little-endian with respect to the defining
modulus.  The subfield B (q a power of p) is identified as the fixed set
of ``x -> x**q``; traces, coordinates and dual bases are taken relative
to B, so one representation covers non-prime subfields too.

For ``|F| <= 2**16`` multiplication goes through log/antilog tables;
above that it falls back to polynomial multiplication.
"""

from __future__ import annotations

import json
from functools import lru_cache

from privrepair import linalg
from privrepair.errors import (
    InternalInconsistencyError,
    ReducibleModulusError,
    ValidationError,
)

_TABLE_LIMIT = 1 << 16


# ----------------------------------------------------------------------
# Polynomial helpers over the prime field (coefficient lists mod p)
# ----------------------------------------------------------------------

def _ptrim(a):
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _pmul(p, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pmod(p, a, m):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    for d in range(len(a) - 1, dm - 1, -1):
        c = a[d]
        if c:
            factor = (c * inv_lead) % p
            for i, mc in enumerate(m):
                a[d - dm + i] = (a[d - dm + i] - factor * mc) % p
    del a[dm:]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _ppowmod(p, base, exp, m):
    result = [1]
    base = _pmod(p, base, m)
    while exp:
        if exp & 1:
            result = _pmod(p, _pmul(p, result, base), m)
        base = _pmod(p, _pmul(p, base, base), m)
        exp >>= 1
    return result


def _pgcd(p, a, b):
    a, b = list(a), list(b)
    while b != [0]:
        # a mod b, done with full division since b need not be monic
        r = list(a)
        db = len(b) - 1
        inv_lead = pow(b[-1], p - 2, p)
        while len(r) - 1 >= db and r != [0]:
            d = len(r) - 1
            factor = (r[-1] * inv_lead) % p
            for i, bc in enumerate(b):
                r[d - db + i] = (r[d - db + i] - factor * bc) % p
            _ptrim(r)
            if len(r) - 1 < db:
                break
        a, b = b, _ptrim(r)
    return a


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(n):
    if n < 2:
        return False
    return _prime_factors(n) == [n]


def _check_irreducible(p, modulus):
    """Raise ReducibleModulusError unless ``modulus`` is irreducible over GF(p)."""
    deg = len(modulus) - 1
    for root in range(p):
        if sum(c * pow(root, i, p) for i, c in enumerate(modulus)) % p == 0:
            raise ReducibleModulusError(f"modulus is reducible (root {root})")
    if deg <= 1:
        return
    x = [0, 1]
    # Rabin test: x^(p^deg) == x mod m, and gcd(x^(p^(deg/r)) - x, m) = 1
    # for every prime divisor r of deg.
    top = _ppowmod(p, x, p ** deg, modulus)
    if _ptrim(list(top)) != [0, 1]:
        raise ReducibleModulusError("modulus is reducible")
    for r in _prime_factors(deg):
        h = _ppowmod(p, x, p ** (deg // r), modulus)
        diff = [0] * max(len(h), 2)
        for i, c in enumerate(h):
            diff[i] = c
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(p, modulus, _ptrim(diff))
        if len(g) - 1 >= 1:
            raise ReducibleModulusError("modulus is reducible")


# ----------------------------------------------------------------------
# Field context
# ----------------------------------------------------------------------

class FieldCtx:
    """Immutable description of GF(q^ell) over B = GF(q).

    Use :func:`make_field` rather than constructing directly; it caches
    contexts so table building happens once per configuration.
    """

    def __init__(self, p, q, ell, modulus):
        if not _is_prime(p):
            raise ValidationError(f"p={p} is not prime")
        s = 0
        qq = q
        while qq > 1 and qq % p == 0:
            qq //= p
            s += 1
        if qq != 1 or s == 0:
            raise ValidationError(f"q={q} is not a power of p={p}")
        if ell < 2:
            raise ValidationError("extension degree over the subfield must be >= 2")
        modulus = tuple(int(c) % p for c in modulus)
        if modulus[-1] != 1:
            raise ValidationError("modulus must be monic")
        deg = len(modulus) - 1
        if deg != s * ell:
            raise ValidationError(
                f"modulus degree {deg} does not match q^ell = {p}^{s * ell}")
        _check_irreducible(p, modulus)

        self.p = p
        self.q = q
        self.ell = ell
        self.modulus = modulus
        self.prime_degree = deg
        self.subfield_degree = s
        self.order = p ** deg

        self._exp = None
        self._log = None
        if self.order <= _TABLE_LIMIT:
            self._build_tables()
        self._trace_table = None
        self._subfield = None
        self._coord_basis = None
        self._coord_dual = None

    # -- representation ------------------------------------------------

    def _digits(self, x):
        p, out = self.p, []
        for _ in range(self.prime_degree):
            x, d = divmod(x, p)
            out.append(d)
        return out

    def _undigits(self, vec):
        x = 0
        for d in reversed(vec):
            x = x * self.p + d
        return x

    def elements(self):
        return range(self.order)

    # -- raw arithmetic (no tables) -------------------------------------

    def _mul_raw(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self.p == 2:
            mod_mask = self._undigits(list(self.modulus[:-1]))
            top = 1 << self.prime_degree
            acc = 0
            while b:
                if b & 1:
                    acc ^= a
                b >>= 1
                a <<= 1
                if a & top:
                    a = (a ^ top) ^ mod_mask
            return acc
        va, vb = self._digits(a), self._digits(b)
        prod = _pmod(self.p, _pmul(self.p, va, vb), list(self.modulus))
        prod += [0] * (self.prime_degree - len(prod))
        return self._undigits(prod)

    def _pow_raw(self, a, e):
        result = 1
        while e:
            if e & 1:
                result = self._mul_raw(result, a)
            a = self._mul_raw(a, a)
            e >>= 1
        return result

    def _build_tables(self):
        n = self.order - 1
        factors = _prime_factors(n)
        gen = None
        for cand in range(2, self.order):
            if all(self._pow_raw(cand, n // r) != 1 for r in factors):
                gen = cand
                break
        if gen is None:
            raise InternalInconsistencyError("no multiplicative generator found")
        exp = [0] * (2 * n)
        log = [0] * self.order
        v = 1
        for i in range(n):
            exp[i] = v
            log[v] = i
            v = self._mul_raw(v, gen)
        for i in range(n, 2 * n):
            exp[i] = exp[i - n]
        self._exp, self._log = exp, log

    # -- public arithmetic ----------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        return self._undigits([(x + y) % self.p
                               for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a):
        if self.p == 2:
            return a
        return self._undigits([(-x) % self.p for x in self._digits(a)])

    def sub(self, a, b):
        if self.p == 2:
            return a ^ b
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_raw(a, b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        if self._exp is not None:
            return self._exp[self.order - 1 - self._log[a]]
        return self._pow_raw(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        if self._exp is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        return self._pow_raw(a, e)

    # -- subfield, trace, bases -------------------------------------------

    def trace(self, x):
        """Relative trace onto B: sum of x^(q^j) for j = 0..ell-1."""
        if self._trace_table is None:
            self._trace_table = [self._trace_slow(v) for v in range(self.order)] \
                if self.order <= _TABLE_LIMIT else {}
        if isinstance(self._trace_table, dict):
            if x not in self._trace_table:
                self._trace_table[x] = self._trace_slow(x)
            return self._trace_table[x]
        return self._trace_table[x]

    def _trace_slow(self, x):
        acc = x
        y = x
        for _ in range(self.ell - 1):
            y = self.pow(y, self.q)
            acc = self.add(acc, y)
        return acc

    @property
    def subfield(self):
        """Elements of B, sorted by index.  ``x in B  iff  x**q == x``."""
        if self._subfield is None:
            sub = tuple(x for x in self.elements() if self.pow(x, self.q) == x)
            if len(sub) != self.q:
                raise InternalInconsistencyError("subfield has the wrong size")
            self._subfield = sub
        return self._subfield

    def in_subfield(self, x):
        return self.pow(x, self.q) == x

    @property
    def coordinate_basis(self):
        """The default B-basis (1, g, g^2, ..., g^(ell-1)), g the modulus root."""
        if self._coord_basis is None:
            g = self.p  # index of the class of the variable
            self._coord_basis = tuple(self.pow(g, j) for j in range(self.ell))
        return self._coord_basis

    def trace_dual_basis(self, basis):
        """The basis (d_1..d_ell) with trace(basis_i * d_j) = 1 iff i == j.

        Computed by inverting the Gram matrix of pairwise traces over B.
        """
        basis = tuple(basis)
        if len(basis) != self.ell:
            raise ValidationError(f"basis must have {self.ell} elements")
        gram = [[self.trace(self.mul(u, v)) for v in basis] for u in basis]
        if linalg.rank(self, gram) < self.ell:
            raise ValidationError("elements do not form a B-basis (singular Gram matrix)")
        ginv = linalg.invert(self, gram)
        if ginv is None:
            raise InternalInconsistencyError("Gram matrix inversion failed")
        dual = []
        for j in range(self.ell):
            acc = 0
            for k in range(self.ell):
                acc = self.add(acc, self.mul(ginv[j][k], basis[k]))
            dual.append(acc)
        return tuple(dual)

    def coords(self, x, basis, dual=None):
        """Coordinates of x over B in the given basis (via trace duality)."""
        if dual is None:
            dual = self.trace_dual_basis(basis)
        return tuple(self.trace(self.mul(d, x)) for d in dual)

    def from_coords(self, coeffs, basis):
        acc = 0
        for c, u in zip(coeffs, basis):
            acc = self.add(acc, self.mul(c, u))
        return acc

    def subfield_coords(self, x):
        """Coordinates of x in the coordinate basis.

        When B is the prime field these are just the base-p digits.
        """
        if self.subfield_degree == 1:
            return tuple(self._digits(x))
        if self._coord_dual is None:
            self._coord_dual = self.trace_dual_basis(self.coordinate_basis)
        return self.coords(x, self.coordinate_basis, self._coord_dual)

    def from_subfield_coords(self, coeffs):
        if self.subfield_degree == 1:
            return self._undigits(list(coeffs))
        return self.from_coords(coeffs, self.coordinate_basis)

    # -- rendering / config ------------------------------------------------

    def format_element(self, x):
        """Readable polynomial rendering of an element, e.g. ``x^2+x``."""
        if x == 0:
            return "0"
        terms = []
        for i, d in enumerate(self._digits(x)):
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            else:
                coeff = "" if d == 1 else str(d) + "*"
                terms.append(f"{coeff}x" if i == 1 else f"{coeff}x^{i}")
        return "+".join(reversed(terms))

    def to_config(self):
        return {"p": self.p, "q": self.q, "ell": self.ell, "modulus": list(self.modulus)}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, q={self.q}, ell={self.ell}, order={self.order})"


@lru_cache(maxsize=64)
def _make_field_cached(p, q, ell, modulus):
    return FieldCtx(p, q, ell, modulus)


def make_field(p, q, ell, modulus):
    """Build (or fetch from cache) the field GF(q^ell) with the given modulus."""
    return _make_field_cached(int(p), int(q), int(ell), tuple(int(c) for c in modulus))


def field_from_config(cfg):
    try:
        return make_field(cfg["p"], cfg["q"], cfg["ell"], cfg["modulus"])
    except KeyError as exc:
        raise ValidationError(f"field config is missing {exc}") from exc


def load_field(path):
    with open(path, "r", encoding="utf-8") as fh:
        return field_from_config(json.load(fh))


# ----------------------------------------------------------------------
# Polynomials with coefficients in F (little-endian index lists)
# ----------------------------------------------------------------------

def poly_trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def poly_deg(coeffs):
    coeffs = poly_trim(coeffs)
    return -1 if coeffs == [0] else len(coeffs) - 1


def poly_eval(ctx, coeffs, x):
    acc = 0
    for c in reversed(list(coeffs)):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def poly_add(ctx, a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(ctx.add(x, y))
    return poly_trim(out)


def poly_mul(ctx, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return poly_trim(out)


def poly_divmod(ctx, a, b):
    a = poly_trim(a)
    b = poly_trim(b)
    if b == [0]:
        raise ZeroDivisionError("polynomial division by zero")
    if poly_deg(a) < poly_deg(b):
        return [0], a
    rem = list(a)
    quot = [0] * (len(a) - len(b) + 1)
    inv_lead = ctx.inv(b[-1])
    for d in range(len(a) - len(b), -1, -1):
        c = rem[d + len(b) - 1]
        if c == 0:
            continue
        factor = ctx.mul(c, inv_lead)
        quot[d] = factor
        for i, bc in enumerate(b):
            rem[d + i] = ctx.sub(rem[d + i], ctx.mul(factor, bc))
    return poly_trim(quot), poly_trim(rem)
