"""Exact adversary-posterior computation.

Given what a coalition of curious nodes observes, count the private
client states consistent with each candidate target.  Counts are exact
integers, never probabilities: uniformity is integer equality, immune to
float noise.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

from privrepair import linalg
from privrepair.errors import (
    InternalInconsistencyError,
    MalformedViewError,
    ValidationError,
)
from privrepair.protocols import (
    SCHEME_HIDDEN,
    SCHEME_MASKED,
    SCHEME_PLAIN,
    SCHEME_RETRIEVAL,
    hidden_queries,
    masked_queries,
    plain_queries,
    retrieval_queries,
)
from privrepair.subspaces import kernel_by_image, span_key


@dataclass(frozen=True)
class CoalitionView:
    """Queries observed by a set of colluding nodes.

    ``entries`` maps each observing node to its received payload: a tuple
    of field elements for plain / hidden-subspace queries, a single field
    element for secret-sharing / retrieval queries.
    """

    scheme: str
    params: object
    entries: tuple  # ((alpha, payload), ...) sorted by alpha

    @property
    def coalition(self):
        return tuple(a for a, _ in self.entries)


def view_from_queries(scheme, params, queries, coalition):
    entries = []
    for alpha in sorted(coalition):
        if alpha not in queries:
            raise ValidationError(f"node {alpha} received no query this session")
        q = queries[alpha]
        entries.append((alpha, tuple(q) if not isinstance(q, int) else q))
    return CoalitionView(scheme=scheme, params=params, entries=tuple(entries))


@dataclass
class PosteriorTable:
    """Candidate target -> number of consistent private states."""

    counts: dict

    @property
    def uniform(self):
        return len(set(self.counts.values())) == 1

    @property
    def ratio(self):
        lo, hi = min(self.counts.values()), max(self.counts.values())
        if hi == 0:
            return math.inf
        return math.inf if lo == 0 else hi / lo

    def to_json_dict(self):
        return {str(b): c for b, c in sorted(self.counts.items())}


@dataclass
class AuditReport:
    scheme: str
    coalition: tuple
    ideal: PosteriorTable
    conditioned: PosteriorTable = None

    @property
    def uniform(self):
        return self.ideal.uniform


# ----------------------------------------------------------------------
# Hidden-subspace audit
# ----------------------------------------------------------------------

def audit_hidden_subspace(view):
    """For each candidate, count (subspace, ordered image basis) pairs that
    reproduce the observed query vectors.

    A single observer always sees exactly one consistent pair per
    candidate (the rescaled query vector spans an image, and every image
    has a unique kernel); coalitions larger than one generically
    concentrate the table, which is the leak this audit demonstrates.
    """
    params = view.params
    ctx = params.ctx
    spec = params.spec
    dim = params.response_len
    alpha0, q0 = view.entries[0]
    if len(q0) != dim:
        raise MalformedViewError(f"query vector has length {len(q0)}, expected {dim}")
    seen = tuple(a for a, _ in view.entries)
    mapping = kernel_by_image(ctx, params.m)

    counts = {}
    for cand in spec.alphas:
        if cand in seen:
            continue
        scale = ctx.mul(ctx.sub(alpha0, cand), ctx.inv(spec.multiplier(alpha0)))
        chi = tuple(ctx.mul(qh, scale) for qh in q0)
        key = span_key(ctx, chi)
        if len(key) != dim:
            raise MalformedViewError("observed query vector is B-dependent")
        if key not in mapping:
            raise InternalInconsistencyError("image span without a kernel subspace")
        consistent = True
        for alpha, q in view.entries[1:]:
            c = ctx.mul(spec.multiplier(alpha), ctx.inv(ctx.sub(alpha, cand)))
            if tuple(ctx.mul(c, x) for x in chi) != q:
                consistent = False
                break
        counts[cand] = 1 if consistent else 0
    return AuditReport(scheme=view.scheme, coalition=seen,
                       ideal=PosteriorTable(counts))


def audit_plain(view):
    """The non-private scheme: the public parameters pin the expected query
    for each candidate, so the table concentrates on the true target."""
    params = view.params
    ctx = params.ctx
    spec = params.spec
    seen = tuple(a for a, _ in view.entries)
    counts = {}
    for cand in spec.alphas:
        if cand in seen:
            continue
        consistent = True
        for alpha, q in view.entries:
            c = ctx.mul(spec.multiplier(alpha), ctx.inv(ctx.sub(alpha, cand)))
            expected = tuple(ctx.mul(c, chi) for chi in params.image_basis_elems)
            if expected != q:
                consistent = False
                break
        counts[cand] = 1 if consistent else 0
    return AuditReport(scheme=view.scheme, coalition=seen,
                       ideal=PosteriorTable(counts))


# ----------------------------------------------------------------------
# Secret-sharing / retrieval audits
# ----------------------------------------------------------------------

def _mask_equations(view, cand):
    """Evaluation constraints the mask polynomial must satisfy under the
    hypothesis that ``cand`` is the target."""
    ctx = view.params.ctx
    eqs = []
    for alpha, q in view.entries:
        if alpha == cand:
            eqs.append((alpha, q))  # the target node receives mask(target)
        else:
            eqs.append((alpha, ctx.mul(q, ctx.sub(alpha, cand))))
    return eqs


def _mask_solution_count(ctx, t, eqs):
    rows = [[ctx.pow(pt, s) for s in range(t)] for pt, _ in eqs]
    rhs = [v for _, v in eqs]
    return linalg.solution_count(ctx, rows, rhs, ctx.order)


def _solve_mask(ctx, t, eqs):
    rows = [[ctx.pow(pt, s) for s in range(t)] for pt, _ in eqs]
    rhs = [v for _, v in eqs]
    return linalg.unique_solution(ctx, rows, rhs)


def audit_secret_sharing(view, conditioned=False):
    """Count mask polynomials consistent with the observed queries, for
    every candidate outside the coalition.

    With the full threshold observed the count is 1 per candidate; below
    it, a power of |F|.  The conditioned table additionally discards
    masks vanishing at the candidate, mirroring the client's resampling
    policy, and is reported side by side rather than silently applied.
    """
    params = view.params
    ctx = params.ctx
    seen = tuple(a for a, _ in view.entries)
    counts, cond_counts = {}, {}
    for cand in params.spec.alphas:
        if cand in seen:
            continue
        eqs = _mask_equations(view, cand)
        total = _mask_solution_count(ctx, params.t, eqs)
        counts[cand] = total
        if conditioned:
            vanishing = _mask_solution_count(ctx, params.t, eqs + [(cand, 0)])
            cond_counts[cand] = total - vanishing
    return AuditReport(
        scheme=view.scheme, coalition=seen, ideal=PosteriorTable(counts),
        conditioned=PosteriorTable(cond_counts) if conditioned else None)


def audit_retrieval(view, conditioned=False):
    """Retrieval audit over all n candidates, including coalition members:
    a coalition node hypothesised to be the target explains its own query
    as the mask's value there."""
    params = view.params
    ctx = params.ctx
    seen = tuple(a for a, _ in view.entries)
    counts, cond_counts = {}, {}
    for cand in params.spec.alphas:
        eqs = _mask_equations(view, cand)
        total = _mask_solution_count(ctx, params.t, eqs)
        counts[cand] = total
        if conditioned:
            vanishing = _mask_solution_count(ctx, params.t, eqs + [(cand, 0)])
            cond_counts[cand] = total - vanishing
    return AuditReport(
        scheme=view.scheme, coalition=seen, ideal=PosteriorTable(counts),
        conditioned=PosteriorTable(cond_counts) if conditioned else None)


def mask_solutions(view):
    """Per-candidate unique mask solving the view (None when the system is
    under- or over-determined).  Diagnostic companion to the audits."""
    params = view.params
    ctx = params.ctx
    seen = tuple(a for a, _ in view.entries)
    out = {}
    for cand in params.spec.alphas:
        if view.scheme != SCHEME_RETRIEVAL and cand in seen:
            continue
        out[cand] = _solve_mask(ctx, params.t, _mask_equations(view, cand))
    return out


def audit_view(view, conditioned=False):
    if view.scheme == SCHEME_HIDDEN:
        return audit_hidden_subspace(view)
    if view.scheme == SCHEME_PLAIN:
        return audit_plain(view)
    if view.scheme == SCHEME_MASKED:
        return audit_secret_sharing(view, conditioned=conditioned)
    if view.scheme == SCHEME_RETRIEVAL:
        return audit_retrieval(view, conditioned=conditioned)
    raise ValidationError(f"unknown scheme {view.scheme!r}")


def report_to_json_dict(report, view=None):
    out = {
        "scheme": report.scheme,
        "coalition": list(report.coalition),
        "candidates": report.ideal.to_json_dict(),
        "uniform": report.uniform,
    }
    if view is not None:
        out["view"] = [
            {"alpha": a, "query": list(q) if isinstance(q, tuple) else [q]}
            for a, q in view.entries
        ]
    if report.conditioned is not None:
        out["conditioned"] = report.conditioned.to_json_dict()
        out["conditioned_uniform"] = report.conditioned.uniform
    return out


# ----------------------------------------------------------------------
# Empirical cross-check of the exact audit
# ----------------------------------------------------------------------

def _session_queries(params, scheme, target, seed):
    rng = random.Random(seed)
    if scheme == SCHEME_PLAIN:
        return plain_queries(params, target)
    if scheme == SCHEME_HIDDEN:
        return hidden_queries(params, target, rng)[1]
    if scheme == SCHEME_MASKED:
        return masked_queries(params, target, rng)[1]
    if scheme == SCHEME_RETRIEVAL:
        return retrieval_queries(params, target, rng)[1]
    raise ValidationError(f"unknown scheme {scheme!r}")


def empirical_distribution(params, scheme, target, coalition, seeds):
    """Frequency table of the coalition's observed query tuples over many
    seeded runs.  Queries never depend on the stored data, so no cluster
    is needed."""
    coalition = tuple(sorted(coalition))
    counter = Counter()
    for seed in seeds:
        queries = _session_queries(params, scheme, target, seed)
        key = tuple((a, queries[a] if isinstance(queries[a], int)
                     else tuple(queries[a])) for a in coalition)
        counter[key] += 1
    return counter


def total_variation(counter_a, counter_b):
    """TV distance between two empirical distributions."""
    na, nb = sum(counter_a.values()), sum(counter_b.values())
    keys = set(counter_a) | set(counter_b)
    return 0.5 * sum(abs(counter_a.get(k, 0) / na - counter_b.get(k, 0) / nb)
                     for k in keys)
