import json

import pytest

from disfermion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_count_example(capsys):
    code, out, _ = run(capsys, "count", "--domain", "rect(0,0,2,2)", "--sink", "0,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["covers"] == 4
    assert doc["manifest"]["command"] == "count"


def test_output_is_deterministic(capsys):
    argv = ("twopoint", "--domain", "rect(-2,-2,2,2)", "--sink=-2,-2", "--pairs", "1,0:0,0")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    a, b = json.loads(a), json.loads(b)
    a["manifest"].pop("runtime_ms")
    b["manifest"].pop("runtime_ms")
    assert a == b


def test_manifest_hash_ignores_out_and_jobs(capsys, tmp_path):
    _, a, _ = run(capsys, "count", "--domain", "rect(0,0,3,3)", "--sink", "0,0")
    run(capsys, "count", "--domain", "rect(0,0,3,3)", "--sink", "0,0", "--jobs", "2",
        "--out", str(tmp_path / "c.json"))
    b = json.loads((tmp_path / "c.json").read_text())
    assert json.loads(a)["manifest"]["config_hash"] == b["manifest"]["config_hash"]


def test_observable_matches_berezin(capsys):
    common = ("--domain", "rect(-2,-2,2,2)", "--sink=-2,-2", "--pairs", "1,0:0,0;0,1:1,1")
    _, a, _ = run(capsys, "observable", *common)
    _, b, _ = run(capsys, "berezin", *common)
    assert json.loads(a)["expectation"] == json.loads(b)["correlator"]


def test_converge_csv(capsys):
    code, out, _ = run(capsys, "converge", "--nmax", "6", "--pairs", "1,0:0,0")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# manifest ")
    json.loads(lines[0][len("# manifest "):])
    assert len(lines) > 3


def test_nullcheck(capsys):
    code, out, _ = run(capsys, "nullcheck", "--field", "eta(1,0)*dbarxi(-1,0)")
    assert code == 0 and json.loads(out)["verdict"] == "NULL-CONSISTENT"
    # a nonnull verdict is an answer, not a failed check
    code, out, _ = run(capsys, "nullcheck", "--field", "eta(1,0)*xi(0,0)")
    assert code == 0 and json.loads(out)["verdict"] == "WITNESSED-NONNULL"


def test_backend_defaults(capsys):
    _, out, _ = run(capsys, "count", "--domain", "rect(0,0,2,2)", "--sink", "0,0")
    assert json.loads(out)["manifest"]["backend"] == "exact"
    _, out, _ = run(capsys, "converge", "--nmax", "4", "--pairs", "1,0:0,0")
    assert '"backend": "float"' in out.splitlines()[0]


@pytest.mark.parametrize("argv", [
    ("count", "--domain", "rect(0,0,1)"),
    ("count", "--domain", "rect(0,0,1,1)", "--sink", "0,1"),
    ("nullcheck", "--field", "eta(0,0)*xi(0,0)"),
])
def test_input_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_suite_single_criteria(capsys):
    code, out, err = run(capsys, "suite", "--only", "1,5")
    assert code == 0
    assert "criterion  1" in err and "PASS" in err
    code, out, err = run(capsys, "suite", "--only", "4")
    assert code == 1
    assert "FAIL" in err
