import json
import math
import random

import pytest

from privrepair.errors import ValidationError
from privrepair.field import poly_eval
from privrepair.protocols import SchemeParams
from privrepair.rs import encode_systematic
from privrepair.sim import (
    Cluster,
    append_session_log,
    batch_audit,
    build_cluster,
    child_seed,
    hidden_states,
    masked_states,
    run_session,
)


# ---------------------------------------------------------------------
# Cluster construction
# ---------------------------------------------------------------------

def test_build_cluster_places_systematic_symbols(code4):
    cluster = build_cluster(code4, message=(2, 1), systematic=True)
    assert cluster.values == encode_systematic(code4, (2, 1)).values
    assert cluster.stored(0) == 2 and cluster.stored(1) == 1


def test_empty_message_rejected(code4):
    with pytest.raises(ValidationError):
        build_cluster(code4, message=())
    with pytest.raises(ValidationError):
        build_cluster(code4)


def test_raw_values_cluster(gf8, code8):
    # eight nodes holding the evaluations of x^5 + 1
    values = tuple(poly_eval(gf8, (1, 0, 0, 0, 0, 1), a) for a in code8.alphas)
    cluster = build_cluster(code8, values=values)
    assert cluster.stored(0) == 1 and cluster.stored(1) == 0


# ---------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------

def test_session_replay_is_byte_identical(code8):
    cluster = build_cluster(code8, message=(1, 2, 3, 4, 5))
    a = run_session(cluster, "secret-sharing", 6, seed=11, t=2, coalition=(0, 1))
    b = run_session(cluster, "secret-sharing", 6, seed=11, t=2, coalition=(0, 1))
    assert a.transcript == b.transcript
    assert json.dumps(a.transcript.to_json_dict()) == json.dumps(b.transcript.to_json_dict())


def test_session_recovers_and_meters(code8):
    cluster = build_cluster(code8, message=(1, 0, 0, 0, 1))
    res = run_session(cluster, "secret-sharing", 6, seed=7, t=2,
                      coalition=(0, 1), audit=True)
    tr = res.transcript
    assert tr.recovered == cluster.stored(6)
    assert tr.bandwidth_down_subsymbols == sum(len(r) for _, _, r in tr.entries) == 14
    assert tr.bandwidth_up_symbols == sum(len(q) for _, q, _ in tr.entries) == 7
    assert res.audit.uniform


def test_coalition_view_matches_sent_queries(code8):
    cluster = build_cluster(code8, message=(1, 0, 0, 0, 1))
    res = run_session(cluster, "secret-sharing", 6, seed=3, t=2, coalition=(2, 5))
    by_alpha = {a: q for a, q, _ in res.transcript.entries}
    assert res.view.entries == ((2, by_alpha[2][0]), (5, by_alpha[5][0]))


def test_retrieval_session_contacts_target(code8):
    cluster = build_cluster(code8, message=(4, 0, 2, 0, 1))
    res = run_session(cluster, "retrieval", 3, seed=5, t=2, coalition=(3,), audit=True)
    assert res.transcript.recovered == cluster.stored(3)
    assert res.transcript.bandwidth_down_subsymbols == 16
    assert any(a == 3 for a, _, _ in res.transcript.entries)
    assert res.audit.uniform and len(res.audit.ideal.counts) == 8


def test_plain_session_leaks_target(code4):
    cluster = build_cluster(code4, message=(1, 2))
    res = run_session(cluster, "plain", 0, seed=0, coalition=(2,), audit=True)
    assert not res.audit.uniform
    assert res.audit.ideal.counts[0] == 1


def test_coalition_must_participate(code8):
    cluster = build_cluster(code8, message=(1, 0, 0, 0, 1))
    with pytest.raises(ValidationError):
        run_session(cluster, "secret-sharing", 6, seed=0, t=2, coalition=(6,))


def test_information_firewall(code8):
    """A node's response is a pure function of (alpha, stored symbol, public
    parameters, query): sessions with different targets that deliver the
    same query value to a node elicit the same response."""
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    cluster = build_cluster(code8, message=(1, 2, 3, 4, 5))
    seen = {}
    rng = random.Random(0)
    for _ in range(300):
        beta = code8.alphas[rng.randrange(8)]
        res = run_session(cluster, "secret-sharing", beta, seed=rng.randrange(10**6),
                          params=params)
        for alpha, q, resp in res.transcript.entries:
            key = (alpha, q)
            if key in seen:
                assert seen[key] == resp
            seen[key] = resp
    assert len(seen) < 300 * 7  # collisions across targets did occur


def test_session_log_jsonl(tmp_path, code8):
    cluster = build_cluster(code8, message=(1, 0, 0, 0, 1))
    path = tmp_path / "sessions.jsonl"
    for seed in (1, 2):
        append_session_log(path, run_session(cluster, "secret-sharing", 6,
                                             seed=seed, t=2))
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["seed"] == 1


# ---------------------------------------------------------------------
# State enumeration and batch audits
# ---------------------------------------------------------------------

def test_hidden_state_count(code8, code8_k3):
    # 7 one-dimensional subspaces, 6 ordered bases of each 2-dim image
    assert sum(1 for _ in hidden_states(SchemeParams(code8, "hidden-subspace", m=1))) == 42
    # 7 two-dimensional subspaces, unique basis of each 1-dim image
    assert sum(1 for _ in hidden_states(SchemeParams(code8_k3, "hidden-subspace", m=2))) == 7


def test_masked_state_count(code8):
    params = SchemeParams(code8, "secret-sharing", t=2, m=1)
    states = list(masked_states(params, 6))
    assert len(states) == 64 - 8  # masks vanishing at the target excluded
    assert all(poly_eval(code8.ctx, c, 6) != 0 for c in states)


def test_batch_audit_passes_for_private_schemes(code4, code8):
    summary = batch_audit(SchemeParams(code4, "hidden-subspace"), "hidden-subspace", 1)
    assert summary.passed and summary.worst_ratio == 1.0
    summary = batch_audit(SchemeParams(code8, "secret-sharing", t=2, m=1),
                          "secret-sharing", 2)
    assert summary.passed and summary.worst_ratio == 1.0


def test_batch_audit_finds_hidden_subspace_coalition_leak(code8_k3):
    summary = batch_audit(SchemeParams(code8_k3, "hidden-subspace", m=2),
                          "hidden-subspace", 2)
    assert not summary.passed
    assert summary.worst_ratio == math.inf
    beta, coalition, view, report = summary.witness
    assert len(coalition) == 2
    assert report.ideal.counts[beta] == 1
    assert sum(report.ideal.counts.values()) == 1


def test_batch_audit_flags_plain_scheme(code4):
    summary = batch_audit(SchemeParams(code4, "plain", m=1), "plain", 1)
    assert not summary.passed


def test_child_seed_deterministic():
    assert child_seed(5, "states", 3) == child_seed(5, "states", 3)
    assert child_seed(5, "states", 3) != child_seed(5, "states", 4)
