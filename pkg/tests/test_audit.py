import itertools
import random

import pytest

from privrepair.audit import (
    CoalitionView,
    audit_hidden_subspace,
    audit_plain,
    audit_retrieval,
    audit_secret_sharing,
    audit_view,
    empirical_distribution,
    mask_solutions,
    report_to_json_dict,
    total_variation,
    view_from_queries,
)
from privrepair.errors import MalformedViewError
from privrepair.field import poly_eval
from privrepair.protocols import SchemeParams, hidden_queries, masked_queries
from privrepair.sim import hidden_states, _queries_for_state


def _view(scheme, params, queries, coalition):
    return view_from_queries(scheme, params, queries, coalition)


# ---------------------------------------------------------------------
# Hidden-subspace audits
# ---------------------------------------------------------------------

def test_toy_example_single_node_posterior(code4):
    """A query value xi at node xi is explained by exactly one subspace for
    each of the targets 0, 1, xi^2."""
    params = SchemeParams(code4, "hidden-subspace")
    report = audit_hidden_subspace(_view("hidden-subspace", params, {2: (2,)}, (2,)))
    assert report.ideal.counts == {0: 1, 1: 1, 3: 1}
    assert report.uniform


def test_hidden_audit_matches_state_enumeration(code8):
    """Brute-force oracle: count (subspace, ordered basis) states whose query
    to the observer equals the observed vector, per candidate target."""
    params = SchemeParams(code8, "hidden-subspace", m=1)
    ctx = code8.ctx
    states = list(hidden_states(params))
    rng = random.Random(4)
    for _ in range(12):
        beta = code8.alphas[rng.randrange(8)]
        state, queries = hidden_queries(params, beta, rng)
        observer = next(a for a in code8.alphas if a != beta)
        observed = queries[observer]
        report = audit_hidden_subspace(
            _view("hidden-subspace", params, queries, (observer,)))
        for cand, count in report.ideal.counts.items():
            brute = 0
            for st in states:
                q = _queries_for_state(params, "hidden-subspace", cand, st)
                brute += q[observer] == observed
            assert brute == count == 1
        assert report.uniform


def test_hidden_two_node_view_concentrates(code8_k3):
    """With a one-dimensional image the ratio of two observed queries pins
    the target: the posterior collapses onto it."""
    params = SchemeParams(code8_k3, "hidden-subspace", m=2)
    rng = random.Random(9)
    for beta in code8_k3.alphas:
        state, queries = hidden_queries(params, beta, rng)
        coalition = tuple(sorted(a for a in code8_k3.alphas if a != beta))[:2]
        report = audit_hidden_subspace(
            _view("hidden-subspace", params, queries, coalition))
        assert not report.uniform
        assert report.ideal.counts[beta] == 1
        assert sum(report.ideal.counts.values()) == 1
        assert report.ideal.ratio == float("inf")


def test_dependent_view_rejected(code8_k3):
    params = SchemeParams(code8_k3, "hidden-subspace", m=1)
    view = CoalitionView("hidden-subspace", params, ((2, (3, 3)),))
    with pytest.raises(MalformedViewError):
        audit_hidden_subspace(view)


def test_plain_view_identifies_target(code4):
    from privrepair.protocols import plain_queries

    params = SchemeParams(code4, "plain", m=1)
    queries = plain_queries(params, 0)
    report = audit_plain(_view("plain", params, queries, (2,)))
    assert report.ideal.counts == {0: 1, 1: 0, 3: 0}
    assert not report.uniform


# ---------------------------------------------------------------------
# Secret-sharing audits
# ---------------------------------------------------------------------

def test_example_coalition_view_counts_and_solutions(code8):
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    view = _view("secret-sharing", params, {0: 6, 1: 1}, (0, 1))
    report = audit_secret_sharing(view)
    assert report.ideal.counts == {b: 1 for b in (2, 3, 4, 5, 6, 7)}
    assert report.uniform
    sols = mask_solutions(view)
    assert sols[2] == (1, 2)  # target xi:   mask 1 + xi x
    assert sols[4] == (2, 7)  # target xi^2: mask xi + (xi^2+xi+1) x


def test_single_observer_counts_are_field_powers(code8):
    """One observed query under t=2 leaves one free mask coefficient, so
    every candidate is explained by exactly |F| masks."""
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    report = audit_secret_sharing(_view("secret-sharing", params, {3: 5}, (3,)))
    assert set(report.ideal.counts.values()) == {8}
    assert report.uniform


def test_audit_counts_match_mask_enumeration(code8):
    """Completeness oracle: for every candidate, enumerating all |F|^t masks
    and grouping by induced view reproduces the audit's count."""
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    ctx = code8.ctx
    coalition = (0, 1)
    observed = {0: 6, 1: 1}
    view = _view("secret-sharing", params, observed, coalition)
    report = audit_secret_sharing(view)
    for cand in report.ideal.counts:
        brute = 0
        for coeffs in itertools.product(range(8), repeat=2):
            q = {a: ctx.mul(poly_eval(ctx, coeffs, a), ctx.inv(ctx.sub(a, cand)))
                 for a in coalition}
            brute += q == observed
        assert brute == report.ideal.counts[cand]
        # and summed over all views the candidate explains every mask
        total_views = {}
        for coeffs in itertools.product(range(8), repeat=2):
            key = tuple(ctx.mul(poly_eval(ctx, coeffs, a),
                                ctx.inv(ctx.sub(a, cand))) for a in coalition)
            total_views[key] = total_views.get(key, 0) + 1
        assert sum(total_views.values()) == 64


def test_oversized_coalition_leaks(code16):
    """Three colluders against t=2 overdetermine the mask: only some
    candidates stay consistent."""
    params = SchemeParams(code16, "secret-sharing", t=2, m=1)
    rng = random.Random(2)
    leaked = 0
    for beta in code16.alphas:
        state, queries = masked_queries(params, beta, rng)
        coalition = tuple(sorted(a for a in code16.alphas if a != beta))[:3]
        report = audit_secret_sharing(
            _view("secret-sharing", params, queries, coalition))
        assert report.ideal.counts[beta] >= 1
        leaked += not report.uniform
    assert leaked == len(code16.alphas)


def test_conditioned_table_below_threshold_stays_uniform(code8):
    """Conditioning on the resampling policy removes |F|^(t-|J|-1) states per
    candidate when |J| < t, so uniformity survives."""
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    report = audit_secret_sharing(_view("secret-sharing", params, {3: 5}, (3,)),
                                  conditioned=True)
    assert set(report.ideal.counts.values()) == {8}
    assert set(report.conditioned.counts.values()) == {7}
    assert report.conditioned.uniform


def test_conditioned_table_at_threshold(code8):
    """At |J| = t = 2 the unique mask explaining a candidate vanishes there
    only when both observed queries are equal -- and such a view can only
    come from a true mask vanishing at the true target, which resampling
    forbids.  So honest threshold views stay uniform even conditioned,
    while the unreachable equal-query view zeroes every candidate."""
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    ctx = code8.ctx
    for coeffs in itertools.product(range(8), repeat=2):
        for beta in code8.alphas:
            if poly_eval(ctx, coeffs, beta) == 0:
                continue
            queries = {a: ctx.mul(poly_eval(ctx, coeffs, a),
                                  ctx.inv(ctx.sub(a, beta)))
                       for a in code8.alphas if a != beta}
            for coalition in [tuple(sorted(queries))[:2], tuple(sorted(queries))[-2:]]:
                report = audit_secret_sharing(
                    _view("secret-sharing", params, queries, coalition),
                    conditioned=True)
                assert report.uniform
                assert report.conditioned.uniform
                assert set(report.conditioned.counts.values()) == {1}
    synthetic = _view("secret-sharing", params, {0: 5, 1: 5}, (0, 1))
    report = audit_secret_sharing(synthetic, conditioned=True)
    assert report.uniform  # the idealized count ignores the policy
    assert set(report.conditioned.counts.values()) == {0}


# ---------------------------------------------------------------------
# Retrieval audit
# ---------------------------------------------------------------------

def test_retrieval_posterior_uniform_over_all_nodes(code8):
    from privrepair.protocols import retrieval_queries

    params = SchemeParams(code8, "retrieval", t=2, m=1)
    rng = random.Random(3)
    for beta in code8.alphas:
        state, queries = retrieval_queries(params, beta, rng)
        for coalition in [(beta,), (0, 1), tuple(sorted((beta, (beta + 1) % 8)))]:
            coalition = tuple(sorted(set(coalition)))
            report = audit_retrieval(_view("retrieval", params, queries, coalition))
            assert len(report.ideal.counts) == 8  # every node is a candidate
            assert report.uniform
            assert set(report.ideal.counts.values()) == {8 ** (2 - len(coalition))}


def test_retrieval_views_do_not_depend_on_data(code8):
    """Queries are generated before any node responds, so the coalition view
    is a function of (target, randomness) only."""
    from privrepair.protocols import retrieval_queries

    params = SchemeParams(code8, "retrieval", t=2, m=1)
    _, q1 = retrieval_queries(params, 5, random.Random(77))
    _, q2 = retrieval_queries(params, 5, random.Random(77))
    assert q1 == q2


# ---------------------------------------------------------------------
# Dispatcher and serialization
# ---------------------------------------------------------------------

def test_audit_view_dispatch(code4, code8):
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    view = _view("secret-sharing", params, {0: 6, 1: 1}, (0, 1))
    report = audit_view(view)
    data = report_to_json_dict(report, view)
    assert data["uniform"] is True
    assert data["coalition"] == [0, 1]
    assert data["candidates"] == {str(b): 1 for b in (2, 3, 4, 5, 6, 7)}
    assert data["view"] == [{"alpha": 0, "query": [6]}, {"alpha": 1, "query": [1]}]


# ---------------------------------------------------------------------
# Empirical cross-checks of the exact audit
# ---------------------------------------------------------------------

def test_hidden_toy_queries_equidistributed(code4):
    """Each of the three possible query values shows up about a third of the
    time, regardless of the repaired target."""
    params = SchemeParams(code4, "hidden-subspace")
    for beta in (0, 1):
        dist = empirical_distribution(params, "hidden-subspace", beta, (2,),
                                      seeds=range(3000))
        assert len(dist) == 3
        for count in dist.values():
            assert abs(count / 3000 - 1 / 3) < 0.04


def test_masked_views_statistically_target_independent(code8):
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    seeds = range(10_000)
    d6 = empirical_distribution(params, "secret-sharing", 6, (2, 3), seeds)
    d7 = empirical_distribution(params, "secret-sharing", 7, (2, 3), seeds)
    assert total_variation(d6, d7) < 0.05


def test_plain_views_fully_separate_targets(code8):
    params = SchemeParams(code8, "plain", m=1)
    d5 = empirical_distribution(params, "plain", 5, (2,), seeds=range(50))
    d6 = empirical_distribution(params, "plain", 6, (2,), seeds=range(50))
    assert total_variation(d5, d6) == 1.0
