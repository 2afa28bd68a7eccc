"""Deterministic in-process simulation of a storage cluster.

Messages between the client and the nodes travel through an explicit
mailbox, so the adversary coalition is a pure observer of the query leg.
A node only ever sees its own evaluation point, its stored symbol, the
public parameters, and the query addressed to it.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from dataclasses import dataclass, field as dc_field

from privrepair.audit import audit_view, view_from_queries
from privrepair.errors import ValidationError
from privrepair.field import poly_eval
from privrepair.protocols import (
    SCHEME_HIDDEN,
    SCHEME_MASKED,
    SCHEME_PLAIN,
    SCHEME_RETRIEVAL,
    SchemeParams,
    hidden_queries,
    hidden_recover,
    make_transcript,
    masked_node_response,
    masked_queries,
    masked_recover,
    plain_queries,
    plain_recover,
    retrieval_queries,
    retrieval_recover,
    traced_response,
)
from privrepair.rs import encode, encode_systematic
from privrepair.subspaces import enumerate_subspaces, image_space, ordered_bases, subspace_poly


def child_seed(seed, *labels):
    """Deterministically derive an independent seed for a sub-task."""
    digest = hashlib.sha256(repr((seed,) + labels).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def append_session_log(path, result):
    """Append one session transcript as a JSON line."""
    import json

    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(result.transcript.to_json_dict(), sort_keys=True) + "\n")


@dataclass(frozen=True)
class Cluster:
    """One node per evaluation point; nodes never hold the target or any
    client randomness."""

    spec: object
    values: tuple

    def stored(self, alpha):
        return self.values[self.spec.alphas.index(alpha)]


def build_cluster(spec, message=None, *, systematic=False, values=None):
    if (message is None) == (values is None):
        raise ValidationError("supply exactly one of message= or values=")
    if values is not None:
        values = tuple(int(v) for v in values)
        if len(values) != spec.n:
            raise ValidationError(f"need one stored symbol per node ({spec.n})")
        return Cluster(spec=spec, values=values)
    message = tuple(message)
    if not message:
        raise ValidationError("empty message")
    cw = encode_systematic(spec, message) if systematic else encode(spec, message)
    return Cluster(spec=spec, values=cw.values)


@dataclass(frozen=True)
class MailboxEntry:
    sender: object
    receiver: object
    kind: str  # "query" | "response"
    payload: tuple


class Mailbox:
    """Append-only record of every message exchanged in a session."""

    def __init__(self):
        self.log = []

    def send(self, sender, receiver, kind, payload):
        self.log.append(MailboxEntry(sender, receiver, kind, payload))

    def queries_to(self, coalition):
        return {e.receiver: e.payload for e in self.log
                if e.kind == "query" and e.receiver in coalition}


@dataclass
class SessionResult:
    transcript: object
    view: object
    audit: object = None
    client_state: object = dc_field(default=None, repr=False)


def run_session(cluster, scheme, target, seed, coalition=(), params=None,
                t=None, m=None, audit=False, conditioned=False,
                mask_coeffs=None):
    """Execute one full protocol session against the cluster.

    Fully reproducible from (cluster, scheme, target, seed); the optional
    coalition only taps queries, it never alters the run.
    """
    spec = cluster.spec
    if params is None:
        params = SchemeParams(spec, scheme, t=t, m=m)
    if target not in spec.alphas:
        raise ValidationError(f"target {target} is not an evaluation point")
    coalition = tuple(sorted(coalition))
    allowed = spec.alphas if scheme == SCHEME_RETRIEVAL else params.helper_alphas(target)
    for a in coalition:
        if a not in allowed:
            raise ValidationError(f"coalition member {a} takes no part in this session")

    rng = random.Random(seed)
    state = None
    if scheme == SCHEME_PLAIN:
        queries = plain_queries(params, target)
    elif scheme == SCHEME_HIDDEN:
        state, queries = hidden_queries(params, target, rng)
    elif scheme == SCHEME_MASKED:
        state, queries = masked_queries(params, target, rng, mask_coeffs=mask_coeffs)
    elif scheme == SCHEME_RETRIEVAL:
        state, queries = retrieval_queries(params, target, rng, mask_coeffs=mask_coeffs)
    else:
        raise ValidationError(f"unknown scheme {scheme!r}")

    mailbox = Mailbox()
    responses = {}
    for alpha in sorted(queries):
        q = queries[alpha]
        mailbox.send("client", alpha, "query", q)
        stored = cluster.stored(alpha)
        if scheme in (SCHEME_MASKED, SCHEME_RETRIEVAL):
            resp = masked_node_response(params, alpha, stored, q)
        else:
            resp = traced_response(spec.ctx, stored, q)
        mailbox.send(alpha, "client", "response", resp)
        responses[alpha] = resp

    if scheme == SCHEME_PLAIN:
        recovered = plain_recover(params, target, responses)
    elif scheme == SCHEME_HIDDEN:
        recovered = hidden_recover(params, state, responses)
    elif scheme == SCHEME_MASKED:
        recovered = masked_recover(params, state, responses)
    else:
        recovered = retrieval_recover(params, state, responses)

    transcript = make_transcript(scheme, seed, target, queries, responses, recovered)
    view = view_from_queries(scheme, params, mailbox.queries_to(coalition), coalition) \
        if coalition else None
    report = audit_view(view, conditioned=conditioned) if (audit and view) else None
    return SessionResult(transcript=transcript, view=view, audit=report,
                         client_state=state)


# ----------------------------------------------------------------------
# Exhaustive batch audit
# ----------------------------------------------------------------------

def hidden_states(params):
    """Every (subspace, ordered image basis) the hidden-subspace client can
    draw."""
    ctx = params.ctx
    for kernel in enumerate_subspaces(ctx, params.m):
        img = image_space(ctx, subspace_poly(ctx, kernel))
        for basis in ordered_bases(ctx, img):
            yield kernel, basis


def masked_states(params, target):
    """Every mask coefficient tuple the client can end up using for the
    given target (the resampling policy excludes masks vanishing there)."""
    ctx = params.ctx
    for coeffs in itertools.product(range(ctx.order), repeat=params.t):
        if poly_eval(ctx, coeffs, target) != 0:
            yield coeffs


def _queries_for_state(params, scheme, target, state):
    ctx = params.ctx
    spec = params.spec
    if scheme == SCHEME_HIDDEN:
        _, chi = state
        out = {}
        for alpha in params.helper_alphas(target):
            c = ctx.mul(spec.multiplier(alpha), ctx.inv(ctx.sub(alpha, target)))
            out[alpha] = tuple(ctx.mul(c, x) for x in chi)
        return out
    out = {}
    for alpha in params.helper_alphas(target):
        out[alpha] = ctx.mul(poly_eval(ctx, state, alpha),
                             ctx.inv(ctx.sub(alpha, target)))
    if scheme == SCHEME_RETRIEVAL:
        out[target] = poly_eval(ctx, state, target)
    return out


@dataclass
class BatchAuditSummary:
    scheme: str
    passed: bool
    views_checked: int
    worst_ratio: float
    witness: object = None  # (target, coalition, view, report) of the first failure


def batch_audit(params, scheme, coalition_size, state_limit=200_000,
                sample_states=64, seed=0):
    """Audit every (target, coalition) pair under every reachable private
    state, asserting integer-uniform posteriors.

    States are enumerated exhaustively when their number stays below
    ``state_limit`` and sampled with a derived seed otherwise.  Audits
    depend only on (coalition, observed payloads), so repeated views are
    memoised.
    """
    spec = params.spec
    if scheme == SCHEME_PLAIN:
        states_for = lambda target: [None]
        queries_fn = lambda target, state: plain_queries(params, target)
    elif scheme == SCHEME_HIDDEN:
        all_states = list(hidden_states(params))
        states_for = lambda target: all_states
        queries_fn = lambda target, state: _queries_for_state(params, scheme, target, state)
    else:
        def states_for(target):
            total = params.ctx.order ** params.t
            if total <= state_limit:
                return list(masked_states(params, target))
            rng = random.Random(child_seed(seed, "states", target))
            out = []
            while len(out) < sample_states:
                coeffs = tuple(rng.randrange(params.ctx.order) for _ in range(params.t))
                if poly_eval(params.ctx, coeffs, target) != 0:
                    out.append(coeffs)
            return out

        queries_fn = lambda target, state: _queries_for_state(params, scheme, target, state)

    memo = {}
    checked = 0
    worst = 1.0
    witness = None
    passed = True
    for target in spec.alphas:
        pool = spec.alphas if scheme == SCHEME_RETRIEVAL \
            else tuple(a for a in spec.alphas if a != target)
        coalitions = [c for size in range(1, coalition_size + 1)
                      for c in itertools.combinations(pool, size)]
        for state in states_for(target):
            queries = queries_fn(target, state)
            for coalition in coalitions:
                key = (coalition,
                       tuple(queries[a] if isinstance(queries[a], int)
                             else tuple(queries[a]) for a in coalition))
                if key in memo:
                    continue
                view = view_from_queries(scheme, params, queries, coalition)
                report = audit_view(view)
                memo[key] = report
                checked += 1
                ratio = report.ideal.ratio
                worst = max(worst, ratio) if ratio != math.inf else math.inf
                if not report.uniform and passed:
                    passed = False
                    witness = (target, coalition, view, report)
    return BatchAuditSummary(scheme=scheme, passed=passed, views_checked=checked,
                             worst_ratio=worst, witness=witness)
