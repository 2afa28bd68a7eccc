"""Reed-Solomon codes: encoding, dual multipliers, parity checks, and the
naive k-symbol decoder used as the bandwidth baseline."""

from __future__ import annotations

import json
from dataclasses import dataclass

from privrepair.errors import ValidationError
from privrepair.field import (
    field_from_config,
    poly_add,
    poly_deg,
    poly_eval,
    poly_mul,
    poly_trim,
)


@dataclass(frozen=True)
class CodeSpec:
    """An RS(A, k) code together with the multipliers of its GRS dual."""

    ctx: object
    alphas: tuple
    k: int
    multipliers: tuple

    @property
    def n(self):
        return len(self.alphas)

    def multiplier(self, alpha):
        return self.multipliers[self.alphas.index(alpha)]


@dataclass(frozen=True)
class Codeword:
    values: tuple
    poly: tuple = None


def dual_multipliers(ctx, alphas):
    """Column scalings of the dual code: the inverse of each multiplier is
    the product of differences to all other evaluation points."""
    alphas = tuple(alphas)
    if len(set(alphas)) != len(alphas):
        raise ValidationError("evaluation points must be distinct")
    out = []
    for i, ai in enumerate(alphas):
        prod = 1
        for j, aj in enumerate(alphas):
            if i != j:
                prod = ctx.mul(prod, ctx.sub(ai, aj))
        out.append(ctx.inv(prod))
    return tuple(out)


def make_code(ctx, k, alphas=None):
    """Build a CodeSpec.  With no explicit evaluation points the code is
    full length: all field elements in index order."""
    if alphas is None:
        alphas = tuple(ctx.elements())
    alphas = tuple(int(a) for a in alphas)
    n = len(alphas)
    for a in alphas:
        if not 0 <= a < ctx.order:
            raise ValidationError(f"evaluation point {a} outside the field")
    if len(set(alphas)) != n:
        raise ValidationError("evaluation points must be distinct")
    if not 1 <= k < n:
        raise ValidationError(f"dimension k={k} must satisfy 1 <= k < n={n}")
    return CodeSpec(ctx=ctx, alphas=alphas, k=k,
                    multipliers=dual_multipliers(ctx, alphas))


def encode(spec, message):
    """Evaluate the message, read as polynomial coefficients, at all points."""
    message = tuple(message)
    if len(message) != spec.k:
        raise ValidationError(f"message must have exactly k={spec.k} coefficients")
    values = tuple(poly_eval(spec.ctx, message, a) for a in spec.alphas)
    return Codeword(values=values, poly=message)


def interpolate(ctx, xs, ys):
    """Coefficients of the unique polynomial of degree < len(xs) through
    the given points (Lagrange)."""
    if len(set(xs)) != len(xs):
        raise ValidationError("interpolation points must be distinct")
    result = [0]
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = [1]
        den = 1
        for j, xj in enumerate(xs):
            if j != i:
                num = poly_mul(ctx, num, [ctx.neg(xj), 1])
                den = ctx.mul(den, ctx.sub(xi, xj))
        scale = ctx.mul(yi, ctx.inv(den))
        result = poly_add(ctx, result, [ctx.mul(scale, c) for c in num])
    return tuple(poly_trim(result))


def encode_systematic(spec, data):
    """Place the message on the first k evaluation points and extend."""
    data = tuple(data)
    if len(data) != spec.k:
        raise ValidationError(f"systematic message must have exactly k={spec.k} symbols")
    coeffs = interpolate(spec.ctx, spec.alphas[: spec.k], data)
    coeffs = tuple(coeffs) + (0,) * (spec.k - len(coeffs))
    return encode(spec, coeffs[: spec.k])


def dual_inner_product(spec, values, r_coeffs):
    """sum_j multiplier_j * c_j * r(alpha_j); zero exactly on parity checks."""
    ctx = spec.ctx
    acc = 0
    for lam, a, v in zip(spec.multipliers, spec.alphas, values):
        acc = ctx.add(acc, ctx.mul(lam, ctx.mul(v, poly_eval(ctx, r_coeffs, a))))
    return acc


def verify_parity(spec, codeword, r_coeffs):
    """True iff the dual inner product with r vanishes.

    Polynomials of degree >= n-k are not dual codewords and are rejected.
    """
    values = codeword.values if isinstance(codeword, Codeword) else tuple(codeword)
    if poly_deg(r_coeffs) >= spec.n - spec.k:
        raise ValidationError(
            f"degree {poly_deg(r_coeffs)} >= n-k = {spec.n - spec.k}: not a dual codeword")
    return dual_inner_product(spec, values, r_coeffs) == 0


def naive_decode(spec, positions, values):
    """Lagrange interpolation from any k symbols; recovers the whole codeword."""
    positions = tuple(positions)
    values = tuple(values)
    if len(positions) != spec.k or len(set(positions)) != spec.k:
        raise ValidationError(f"need exactly k={spec.k} distinct positions")
    for a in positions:
        if a not in spec.alphas:
            raise ValidationError(f"{a} is not an evaluation point of the code")
    coeffs = interpolate(spec.ctx, positions, values)
    coeffs = tuple(coeffs) + (0,) * (spec.k - len(coeffs))
    return encode(spec, coeffs[: spec.k])


def naive_retrieval_bandwidth(spec):
    """Downloading k full symbols costs k*ell sub-symbols."""
    return spec.k * spec.ctx.ell


def is_codeword(spec, values):
    values = tuple(values)
    if len(values) != spec.n:
        return False
    rebuilt = naive_decode(spec, spec.alphas[: spec.k], values[: spec.k])
    return rebuilt.values == values


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------

def code_to_config(spec):
    return {"field": spec.ctx.to_config(), "alphas": list(spec.alphas), "k": spec.k}


def code_from_config(cfg):
    ctx = field_from_config(cfg["field"])
    return make_code(ctx, k=cfg["k"], alphas=cfg.get("alphas"))


def codeword_to_jsonl(spec, codeword):
    lines = [json.dumps({"alpha": a, "value": v}, separators=(", ", ": "))
             for a, v in zip(spec.alphas, codeword.values)]
    return "\n".join(lines) + "\n"


def codeword_from_jsonl(text):
    """Parse one {alpha, value} object per line; returns (alphas, values)."""
    alphas, values = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        alphas.append(int(obj["alpha"]))
        values.append(int(obj["value"]))
    if not alphas:
        raise ValidationError("empty codeword file")
    return tuple(alphas), tuple(values)
