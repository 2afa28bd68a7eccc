"""The four repair/retrieval protocols, split into client-side query
generation, node-side response computation, and client-side recovery.

* ``plain``: fixed public subspace, no privacy (the query reveals the
  target).
* ``hidden-subspace``: the client draws the repair subspace, and an
  ordered basis of its image, uniformly at random; 1-private.
* ``secret-sharing``: fixed public subspace, queries masked by a random
  polynomial of degree t-1; t-private.
* ``retrieval``: the secret-sharing scheme extended to contact all n
  nodes, hiding the target among all of them.

Node-side computation only ever sees (alpha, stored symbol, public
parameters, received query); the functions structurally cannot read the
target.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from privrepair.errors import (
    InfeasibleParameters,
    InternalInconsistencyError,
    MaskPolicyError,
    ValidationError,
)
from privrepair.field import poly_eval
from privrepair.subspaces import (
    ImageExpander,
    enumerate_subspaces,
    image_basis,
    image_space,
    random_ordered_basis,
    subspace_poly,
)

SCHEME_PLAIN = "plain"
SCHEME_HIDDEN = "hidden-subspace"
SCHEME_MASKED = "secret-sharing"
SCHEME_RETRIEVAL = "retrieval"
ALL_SCHEMES = (SCHEME_PLAIN, SCHEME_HIDDEN, SCHEME_MASKED, SCHEME_RETRIEVAL)


def best_subspace_dim(spec, scheme, t):
    """Largest feasible subspace dimension for the scheme (None if none)."""
    ctx = spec.ctx
    headroom = spec.n - spec.k - max(t, 1) + 1
    m = 0
    while ctx.q ** (m + 1) <= headroom and m + 1 < ctx.ell:
        m += 1
    return m if m >= 1 else None


class SchemeParams:
    """Public parameters shared by the client and every node."""

    def __init__(self, spec, scheme, t=None, m=None, kernel_space=None,
                 image_basis_elems=None, symbol_basis=None):
        if scheme not in ALL_SCHEMES:
            raise ValidationError(f"unknown scheme {scheme!r}")
        ctx = spec.ctx
        if t is None:
            t = 0 if scheme == SCHEME_PLAIN else 1
        if scheme == SCHEME_PLAIN and t != 0:
            raise InfeasibleParameters("the plain scheme is not private; use t=0")
        if scheme == SCHEME_HIDDEN and t != 1:
            raise InfeasibleParameters(
                "the hidden-subspace scheme is private against one node only (t=1)")
        if scheme in (SCHEME_MASKED, SCHEME_RETRIEVAL) and t < 1:
            raise InfeasibleParameters(f"{scheme} needs a collusion threshold t >= 1")

        if m is None:
            m = best_subspace_dim(spec, scheme, t)
            if m is None:
                raise InfeasibleParameters(
                    f"no feasible subspace dimension for n={spec.n}, k={spec.k}, t={t}")
        if not 0 < m < ctx.ell:
            raise InfeasibleParameters(f"need 0 < m < ell, got m={m}")

        need = ctx.q ** m + max(t, 1) - 1
        if spec.n - spec.k < need:
            if scheme == SCHEME_RETRIEVAL:
                raise InfeasibleParameters(
                    f"retrieval needs n >= q^m + k + t - 1 = {need + spec.k}, have n={spec.n}")
            raise InfeasibleParameters(
                f"{scheme} needs n - k >= {need}, have {spec.n - spec.k}")

        self.spec = spec
        self.scheme = scheme
        self.t = t
        self.m = m
        self.symbol_basis = tuple(symbol_basis) if symbol_basis else ctx.coordinate_basis
        self.dual_basis = ctx.trace_dual_basis(self.symbol_basis)

        if scheme == SCHEME_HIDDEN:
            # the subspace is per-session private state
            self.kernel_space = None
            self.poly = None
            self.image_basis_elems = None
            self.expander = None
        else:
            if kernel_space is None:
                kernel_space = enumerate_subspaces(ctx, m)[0]
            if kernel_space.dim != m:
                raise ValidationError(
                    f"public subspace has dimension {kernel_space.dim}, expected {m}")
            self.kernel_space = kernel_space
            self.poly = subspace_poly(ctx, kernel_space)
            if image_basis_elems is None:
                image_basis_elems = image_basis(ctx, self.poly)
            else:
                image_basis_elems = tuple(image_basis_elems)
                given = set(image_basis_elems)
                if not given <= set(image_space(ctx, self.poly).members):
                    raise ValidationError("image basis elements outside the image")
            self.image_basis_elems = image_basis_elems
            self.expander = ImageExpander(ctx, image_basis_elems)

    @property
    def ctx(self):
        return self.spec.ctx

    @property
    def response_len(self):
        return self.ctx.ell - self.m

    def helper_alphas(self, target):
        if target not in self.spec.alphas:
            raise ValidationError(f"target {target} is not an evaluation point")
        return tuple(a for a in self.spec.alphas if a != target)


# ----------------------------------------------------------------------
# Node side
# ----------------------------------------------------------------------

def traced_response(ctx, stored, query_vec):
    """The universal node operation: one trace per query component."""
    return tuple(ctx.trace(ctx.mul(qh, stored)) for qh in query_vec)


def masked_node_response(params, alpha, stored, query_value):
    """Secret-sharing / retrieval node: derives the effective query vector
    from the single received symbol and the public image basis."""
    ctx = params.ctx
    lam = params.spec.multiplier(alpha)
    derived = tuple(ctx.mul(ctx.mul(query_value, chi), lam)
                    for chi in params.image_basis_elems)
    return traced_response(ctx, stored, derived)


# ----------------------------------------------------------------------
# Shared recovery core
# ----------------------------------------------------------------------

def _expansion_rows(params, poly, expander, target, helpers):
    """For each symbol-basis element and helper, the image-basis expansion
    of poly(u * (alpha - target))."""
    ctx = params.ctx
    rows = {}
    for i, u in enumerate(params.symbol_basis):
        for alpha in helpers:
            z = poly.eval(ctx.mul(u, ctx.sub(alpha, target)))
            rows[i, alpha] = expander.expand(z)
    return rows

def _recover(params, rows, responses, helpers, divisor):
    ctx = params.ctx
    acc_symbol = 0
    for i, dual in enumerate(params.dual_basis):
        acc = 0
        for alpha in helpers:
            resp = responses[alpha]
            if len(resp) != params.response_len:
                raise ValidationError(
                    f"response from node {alpha} has length {len(resp)}, "
                    f"expected {params.response_len}")
            for s, r in zip(rows[i, alpha], resp):
                if s and r:
                    acc = ctx.add(acc, ctx.mul(s, r))
        acc_symbol = ctx.add(acc_symbol, ctx.mul(ctx.neg(acc), dual))
    return ctx.div(acc_symbol, divisor)


# ----------------------------------------------------------------------
# Plain (non-private) scheme
# ----------------------------------------------------------------------

def plain_queries(params, target):
    ctx = params.ctx
    out = {}
    for alpha in params.helper_alphas(target):
        c = ctx.mul(params.spec.multiplier(alpha), ctx.inv(ctx.sub(alpha, target)))
        out[alpha] = tuple(ctx.mul(c, chi) for chi in params.image_basis_elems)
    return out


def plain_recover(params, target, responses):
    ctx = params.ctx
    helpers = params.helper_alphas(target)
    rows = _expansion_rows(params, params.poly, params.expander, target, helpers)
    divisor = ctx.mul(params.poly.constant_coeff, params.spec.multiplier(target))
    return _recover(params, rows, responses, helpers, divisor)


# ----------------------------------------------------------------------
# Hidden-subspace scheme (1-private)
# ----------------------------------------------------------------------

@dataclass
class HiddenState:
    """Client-private randomness of one hidden-subspace session."""

    target: int
    kernel_space: object
    image_basis_elems: tuple
    poly: object = dc_field(repr=False, default=None)
    expander: object = dc_field(repr=False, default=None)


def hidden_queries(params, target, rng):
    """Draw the repair subspace uniformly at random, then an ordered basis
    of its image uniformly at random, and build the per-helper queries."""
    ctx = params.ctx
    spaces = enumerate_subspaces(ctx, params.m)
    kernel = spaces[rng.randrange(len(spaces))]
    poly = subspace_poly(ctx, kernel)
    chi = random_ordered_basis(ctx, image_space(ctx, poly), rng)
    state = HiddenState(target=target, kernel_space=kernel, image_basis_elems=chi,
                        poly=poly, expander=ImageExpander(ctx, chi))
    queries = {}
    for alpha in params.helper_alphas(target):
        c = ctx.mul(params.spec.multiplier(alpha), ctx.inv(ctx.sub(alpha, target)))
        queries[alpha] = tuple(ctx.mul(c, x) for x in chi)
    return state, queries


def hidden_recover(params, state, responses):
    ctx = params.ctx
    helpers = params.helper_alphas(state.target)
    rows = _expansion_rows(params, state.poly, state.expander, state.target, helpers)
    divisor = ctx.mul(state.poly.constant_coeff,
                      params.spec.multiplier(state.target))
    return _recover(params, rows, responses, helpers, divisor)


# ----------------------------------------------------------------------
# Secret-sharing scheme (t-private) and the retrieval transform
# ----------------------------------------------------------------------

@dataclass
class MaskedState:
    """Client-private randomness of one secret-sharing session."""

    target: int
    mask_coeffs: tuple
    mask_at_target: int
    resamples: int = 0


def _draw_mask(params, target, rng, mask_coeffs):
    ctx = params.ctx
    if mask_coeffs is not None:
        mask_coeffs = tuple(int(c) for c in mask_coeffs)
        if len(mask_coeffs) != params.t:
            raise ValidationError(f"mask needs exactly t={params.t} coefficients")
        at_target = poly_eval(ctx, mask_coeffs, target)
        if at_target == 0:
            raise ValidationError("supplied mask vanishes at the target")
        return MaskedState(target, mask_coeffs, at_target)
    resamples = 0
    while True:
        coeffs = tuple(rng.randrange(ctx.order) for _ in range(params.t))
        at_target = poly_eval(ctx, coeffs, target)
        if at_target != 0:
            return MaskedState(target, coeffs, at_target, resamples)
        resamples += 1


def masked_queries(params, target, rng, mask_coeffs=None):
    """One masked symbol per helper: mask(alpha) / (alpha - target).

    Masks vanishing at the target are resampled; recovery divides by the
    mask value there, so correctness must be unconditional.  The auditor
    reports the posterior perturbation this policy induces.
    """
    ctx = params.ctx
    state = _draw_mask(params, target, rng, mask_coeffs)
    queries = {}
    for alpha in params.helper_alphas(target):
        queries[alpha] = ctx.mul(poly_eval(ctx, state.mask_coeffs, alpha),
                                 ctx.inv(ctx.sub(alpha, target)))
    return state, queries


def masked_recover(params, state, responses):
    ctx = params.ctx
    if state.mask_at_target == 0:
        raise MaskPolicyError("mask vanishes at the target; the query step "
                              "should have resampled")
    helpers = params.helper_alphas(state.target)
    rows = _expansion_rows(params, params.poly, params.expander,
                           state.target, helpers)
    divisor = ctx.mul(ctx.mul(params.poly.constant_coeff,
                              params.spec.multiplier(state.target)),
                      state.mask_at_target)
    return _recover(params, rows, responses, helpers, divisor)


def retrieval_queries(params, target, rng, mask_coeffs=None):
    """Like the masked scheme but every node is contacted; the target node
    receives the mask's value there, indistinguishable in form from the
    other queries."""
    state, queries = masked_queries(params, target, rng, mask_coeffs)
    queries = dict(queries)
    queries[target] = state.mask_at_target
    return state, queries


def retrieval_recover(params, state, responses):
    """Recover from the n-1 helper responses, then check the target node's
    own traces against the recovered value."""
    ctx = params.ctx
    helper_responses = {a: r for a, r in responses.items() if a != state.target}
    recovered = masked_recover(params, state, helper_responses)
    if state.target in responses:
        expected = masked_node_response(params, state.target, recovered,
                                        state.mask_at_target)
        if tuple(responses[state.target]) != expected:
            raise InternalInconsistencyError(
                "target node responses disagree with the recovered symbol")
    return recovered


# ----------------------------------------------------------------------
# Transcripts
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RepairTranscript:
    """One protocol run as seen by the client."""

    scheme: str
    seed: object
    target: int
    entries: tuple  # (alpha, query tuple of F-symbols, response tuple of B-symbols)
    recovered: int
    bandwidth_down_subsymbols: int
    bandwidth_up_symbols: int

    def to_json_dict(self):
        return {
            "scheme": self.scheme,
            "seed": self.seed,
            "beta": self.target,
            "nodes": [
                {"alpha": a, "query": list(q), "response": list(r)}
                for a, q, r in self.entries
            ],
            "recovered": self.recovered,
            "bandwidth_down_subsymbols": self.bandwidth_down_subsymbols,
            "bandwidth_up_symbols": self.bandwidth_up_symbols,
        }


def make_transcript(scheme, seed, target, queries, responses, recovered):
    entries = []
    down = up = 0
    for alpha in sorted(queries):
        q = queries[alpha]
        qvec = (q,) if isinstance(q, int) else tuple(q)
        resp = tuple(responses[alpha])
        entries.append((alpha, qvec, resp))
        up += len(qvec)
        down += len(resp)
    return RepairTranscript(scheme=scheme, seed=seed, target=target,
                            entries=tuple(entries), recovered=recovered,
                            bandwidth_down_subsymbols=down,
                            bandwidth_up_symbols=up)
