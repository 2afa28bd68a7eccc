import json
import subprocess
import sys

import pytest

GF8 = {"p": 2, "q": 2, "ell": 3, "modulus": [1, 0, 1, 1]}
GF4 = {"p": 2, "q": 2, "ell": 2, "modulus": [1, 1, 1]}


def run_cli(args, cwd=None):
    return subprocess.run([sys.executable, "-m", "privrepair.cli"] + args,
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def field8(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "gf8.json"
    path.write_text(json.dumps(GF8))
    return str(path)


@pytest.fixture(scope="module")
def field4(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "gf4.json"
    path.write_text(json.dumps(GF4))
    return str(path)


@pytest.fixture(scope="module")
def codeword8(field8, tmp_path_factory):
    path = tmp_path_factory.mktemp("cw") / "cw.jsonl"
    res = run_cli(["encode", "--field", field8, "--k", "5",
                   "--message", "1,0,0,0,1", "--out", str(path)])
    assert res.returncode == 0
    return str(path)


def test_encode_writes_expected_file(codeword8):
    lines = open(codeword8).read().splitlines()
    assert len(lines) == 8
    assert json.loads(lines[0]) == {"alpha": 0, "value": 1}
    assert json.loads(lines[6]) == {"alpha": 6, "value": 4}


def test_encode_zero_message(field4, tmp_path):
    out = tmp_path / "zero.jsonl"
    res = run_cli(["encode", "--field", field4, "--k", "2",
                   "--message", "0,0", "--out", str(out)])
    assert res.returncode == 0
    assert all(json.loads(l)["value"] == 0 for l in out.read_text().splitlines())


def test_encode_k_too_large_exits_2(field4):
    res = run_cli(["encode", "--field", field4, "--k", "9", "--message", "1,2"])
    assert res.returncode == 2
    assert "k=9" in res.stderr


def test_repair_secret_sharing(field8, codeword8):
    res = run_cli(["repair", "--field", field8, "--k", "5",
                   "--codeword", codeword8, "--scheme", "secret-sharing",
                   "--beta", "6", "--t", "2", "--seed", "7",
                   "--coalition", "0,1", "--audit", "--expect", "4"])
    assert res.returncode == 0, res.stderr
    assert "recovered=4" in res.stdout
    assert "download_subsymbols=14" in res.stdout
    assert "naive_subsymbols=15" in res.stdout
    assert "posterior uniform over 6 candidates" in res.stdout


def test_repair_wrong_expectation_exits_3(field8, codeword8):
    res = run_cli(["repair", "--field", field8, "--k", "5",
                   "--codeword", codeword8, "--scheme", "secret-sharing",
                   "--beta", "6", "--t", "2", "--seed", "7", "--expect", "0"])
    assert res.returncode == 3


def test_repair_infeasible_exits_2(field8, codeword8):
    res = run_cli(["repair", "--field", field8, "--k", "5",
                   "--codeword", codeword8, "--scheme", "hidden-subspace",
                   "--beta", "6", "--t", "2", "--seed", "1"])
    assert res.returncode == 2
    assert "t=1" in res.stderr


def test_repair_leaky_audit_exits_4(field8, codeword8):
    # auditing a 1-private run against a coalition of two must fail
    res = run_cli(["repair", "--field", field8, "--k", "5",
                   "--codeword", codeword8, "--scheme", "secret-sharing",
                   "--beta", "6", "--t", "1", "--seed", "7",
                   "--coalition", "0,1", "--audit"])
    assert res.returncode == 4
    assert "NOT uniform" in res.stdout


def test_retrieve(field8, codeword8):
    res = run_cli(["retrieve", "--field", field8, "--k", "5",
                   "--codeword", codeword8, "--beta", "6", "--t", "2",
                   "--seed", "3", "--coalition", "6", "--audit"])
    assert res.returncode == 0, res.stderr
    assert "download_subsymbols=16" in res.stdout
    assert "posterior uniform over 8 candidates" in res.stdout


def test_bounds_line_format():
    res = run_cli(["bounds", "--n", "8", "--k", "5", "--t", "2",
                   "--q", "2", "--ell", "3"])
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == \
        "scheme=14 fractional=14.000 integer=14 attained=true"


def test_sweep_writes_csv(tmp_path):
    out = tmp_path / "fig.csv"
    res = run_cli(["sweep", "--k", "99", "--t", "30", "--q", "2", "--ell", "8",
                   "--d", "253..255", "--out", str(out)])
    assert res.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("d,bw_private")
    assert lines[-1].split(",")[0] == "255"


def test_sweep_malformed_range_exits_2():
    res = run_cli(["sweep", "--k", "99", "--t", "30", "--q", "2", "--ell", "8",
                   "--d", "129-255"])
    assert res.returncode == 2


def test_audit_command_pass_and_fail(field4, field8):
    res = run_cli(["audit", "--field", field4, "--k", "2",
                   "--scheme", "hidden-subspace", "--coalition-size", "1"])
    assert res.returncode == 0
    assert "passed=true" in res.stdout
    res = run_cli(["audit", "--field", field8, "--k", "3",
                   "--scheme", "hidden-subspace", "--m", "2",
                   "--coalition-size", "2"])
    assert res.returncode == 4
    assert "witness" in res.stdout


def test_missing_field_file_exits_2():
    res = run_cli(["encode", "--field", "/nonexistent.json", "--k", "2",
                   "--message", "1,2"])
    assert res.returncode == 2


def test_reruns_are_byte_identical(field8, codeword8, tmp_path):
    args = ["repair", "--field", field8, "--k", "5", "--codeword", codeword8,
            "--scheme", "hidden-subspace", "--beta", "2", "--t", "1",
            "--seed", "99", "--coalition", "5", "--audit"]
    first, second = run_cli(args), run_cli(args)
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode == 0
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        assert run_cli(["sweep", "--k", "99", "--t", "30", "--q", "2",
                        "--ell", "8", "--d", "254..255",
                        "--out", str(out)]).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
