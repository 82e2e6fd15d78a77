import json

from click.testing import CliRunner

from fsbasis.cli import Job, cli, suite_jobs
from fsbasis.schemas import JobConfig


def _run(*args):
    return CliRunner().invoke(cli, list(args))


def test_enumerate_csv(tmp_path):
    out = tmp_path / "chars.csv"
    result = _run("enumerate", "--rank", "4", "--weight", "L0", "--max-degree", "2", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert out.read_text() == "degree,weight,count\n0,,1\n1,,6\n2,,7\n"


def test_enumerate_json(tmp_path):
    out = tmp_path / "chars.json"
    result = _run("enumerate", "--weight", "L0+L0", "--degree", "2", "--format", "json", "--out", str(out))
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text()) == [{"count": 27, "degree": 2, "weight": None}]


def test_unsupported_weight_exits_2():
    result = _run("enumerate", "--weight", "L2", "--rank", "5")
    assert result.exit_code == 2
    assert "unsupported: level-2 verification requires rank 4" in result.output


def test_invalid_configuration_exits_2():
    result = _run("enumerate", "--rank", "3")
    assert result.exit_code == 2
    assert "invalid configuration" in result.output


def test_verify_span(tmp_path):
    report = tmp_path / "span.json"
    result = _run("verify", "span", "--weight", "L0", "--max-degree", "1", "--threads", "1", "--json", str(report))
    assert result.exit_code == 0, result.output
    rows = json.loads(report.read_text())
    assert [(r["degree"], r["pass"]) for r in rows] == [(0, True), (1, True)]


def test_verify_results_are_cached(tmp_path, monkeypatch):
    monkeypatch.setenv("FS_CACHE_DIR", str(tmp_path / "cache"))
    args = ("verify", "ic", "--weight", "L3", "--threads", "1", "--json", str(tmp_path / "ic.json"))
    assert _run(*args).exit_code == 0
    assert list((tmp_path / "cache").glob("*.json"))
    assert _run(*args).exit_code == 0
    assert json.loads((tmp_path / "ic.json").read_text())[0]["name"] == "ic-identities"


def test_decompose(tmp_path):
    out = tmp_path / "dec.json"
    result = _run("decompose", "--pair", "L3,L4", "--json", str(out))
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert {s["weight"]: s["dimension"] for s in payload["summands"]} == {"w3+w4": 56, "w1": 8}
    assert payload["balanced"] is True


def test_hwv(tmp_path):
    out = tmp_path / "hwv.json"
    result = _run("hwv", "--weight", "L2", "--pair", "L4,L4", "--json", str(out))
    assert result.exit_code == 0, result.output
    payload = json.loads(out.read_text())
    assert payload["kernel_dimension"] == 1
    assert payload["killed_by_raising"] is True


def test_hwv_rejects_bad_pair():
    result = _run("hwv", "--weight", "L2", "--pair", "L0,L4")
    assert result.exit_code == 2
    assert "spinor" in result.output


def test_suite_jobs():
    jobs = suite_jobs("relations", JobConfig(rank=5))
    assert jobs == [Job("relations", 5, None, 4)]
    replay = suite_jobs("replay", JobConfig(weight="L4", degree=1))
    assert [j.kind for j in replay] == ["replay", "fock-consistency", "successive"]
    everything = suite_jobs("all", JobConfig(weight="L0", degree=1))
    assert everything[-1] == Job("cocycle", 4, "L0", 1)
