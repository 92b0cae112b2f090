import csv
import io
import json
import subprocess
import sys

import pytest

from matula_asym.cli import ComparisonRow, parse_int, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_count():
    assert call("count", "--m", "2", "--x", "100") == (0, "34\n", "")


def test_count_json():
    code, out, _ = call("count", "--m", "2", "--x", "100", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"m": 2, "x": 100, "count": 34}


def test_global_flags_before_subcommand():
    code, out, _ = call("--format", "json", "--sieve-limit", "1e6", "count", "--m", "3", "--x", "10")
    assert code == 0 and json.loads(out)["count"] == 5


def test_matula():
    assert call("matula", "decode", "3")[1] == "((()))\n"
    assert call("matula", "encode", "(()())")[1] == "4\n"
    code, out, _ = call("matula", "decode", "18", "--format", "json")
    # 18 = p_1 * p_2^2
    assert json.loads(out) == {"code": 18, "tree": "(()(())(()))"}


def test_verify_hr():
    code, out, _ = call("verify", "hr", "--u", "10")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["exact"] == "139"
    assert float(rows[0]["ratio"]) == pytest.approx(139 / 2.718281828 ** float(rows[0]["log_asym"]), rel=1e-6)


def test_verify_laplace_toy():
    code, out, _ = call("verify", "lemma31", "--integers", "--sigmas", "0.1,0.02")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["sigma"] for r in rows] == ["0.1", "0.02"]
    assert float(rows[1]["gap"]) < 0.02


def test_verify_averaged():
    code, out, _ = call("verify", "lemma44", "--m", "2", "--us", "20,50")
    assert code == 0
    assert out.splitlines()[0] == "u,residual,D,gap"
    assert len(out.splitlines()) == 3


def test_compare_csv_and_json():
    code, out, _ = call("compare", "--m", "2", "--xs", "1e6,1e4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(ComparisonRow.__dataclass_fields__)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["x"]) for r in rows] == [10**4, 10**6]
    for r in rows:
        assert float(r["abs_log_residual"]) == pytest.approx(abs(float(r["log_exact"]) - float(r["log_asym"])), abs=1e-13)
    code, out, _ = call("compare", "--m", "2", "--xs", "1e4", "--format", "json")
    doc = json.loads(out)
    assert isinstance(doc, list) and set(doc[0]) == set(ComparisonRow.__dataclass_fields__)


def test_constants_json_array():
    code, out, _ = call("constants", "--m", "2", "--tol", "1e-8")
    doc = json.loads(out)
    assert code == 0 and isinstance(doc, list)
    assert {"name", "value", "error_bound", "method"} <= set(doc[0])


def test_primes():
    assert call("primes", "nth", "1000")[1] == "7919\n"
    assert call("primes", "pi", "1e6")[1] == "78498\n"


def test_enumerate():
    assert call("enumerate", "--m", "5", "--x", "12")[1] == "n\n2\n4\n8\n11\n"


def test_asym():
    code, out, _ = call("asym", "--m", "2", "--x", "1e9")
    assert code == 0 and out.startswith("m,x,log_asym,log_weak")


def test_deterministic_output():
    argv = ("compare", "--m", "3", "--xs", "1e5,1e7")
    assert call(*argv) == call(*argv)


@pytest.mark.parametrize(
    "argv",
    [
        ("count", "--m", "2"),
        ("count", "--m", "2", "--x", "1.5"),
        ("count", "--m", "2", "--x", "abc"),
        ("count", "--m", "2", "--x", "10", "--bogus"),
        ("frobnicate",),
        ("matula", "encode", "(()"),
        ("constants", "--tol", "0"),
    ],
)
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("primes", "nth", "1e6", "--sieve-limit", "1000"),
        ("count", "--m", "1", "--x", "10"),
        ("matula", "decode", "0"),
        ("enumerate", "--m", "2", "--x", "1e8"),
    ],
)
def test_computation_errors(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == ""
    assert len(err.strip().splitlines()) == 1


def test_parse_int():
    assert parse_int("1e9") == 10**9
    assert parse_int("2.5e3") == 2500
    assert parse_int("123456789012345678901234567890") == 123456789012345678901234567890


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "matula_asym", "count", "--m", "2", "--x", "10"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "7\n"
