import pytest
from pydantic import ValidationError

from fsbasis.schemas import JobConfig, ReplayReport, SpanReport, default_threads


def test_rank_must_be_at_least_four():
    with pytest.raises(ValidationError):
        JobConfig(rank=3)


def test_weight_is_normalized():
    assert JobConfig(weight="2L4").weight == "L4+L4"
    assert JobConfig(weight="L4+L0", rank=4).weight_spec().indices == (0, 4)
    with pytest.raises(ValidationError):
        JobConfig(weight="L9")


def test_degrees():
    assert JobConfig().degrees() == [0, 1, 2, 3, 4]
    assert JobConfig(degree=2).degrees() == [2]
    assert JobConfig(max_degree=1).degrees() == [0, 1]


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("FS_THREADS", "3")
    assert default_threads() == 3
    assert JobConfig().threads == 3
    monkeypatch.setenv("FS_THREADS", "many")
    assert default_threads() >= 1


def test_reports_use_pass_alias():
    span = SpanReport(weight="L0", degree=1, pbw_count=6, pbw_rank=6, admissible_count=6, admissible_rank=6, passed=True)
    assert span.to_json()["pass"] is True
    replay = ReplayReport(weight="L0", degree=1, checked=6, kill_failures=0, unsupported=0, residual_failures=0, passed=True, samples=["g2(-1)"])
    assert "samples" not in replay.to_json()


def test_fundamental_level2_weight_needs_rank_four():
    with pytest.raises(ValidationError, match="unsupported: level-2 verification requires rank 4"):
        JobConfig(weight="L2", rank=5)
    assert JobConfig(weight="L2", rank=4).weight_spec().kind == "fundamental"
    assert JobConfig(weight="L0+L5", rank=5).weight == "L0+L5"
