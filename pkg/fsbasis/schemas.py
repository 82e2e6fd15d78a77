import os
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fsbasis.errors import FsBasisError, UnsupportedWeight
from fsbasis.lattice import WeightSpec, parse_weight


class CharacterRow(BaseModel):
    degree: int
    weight: Optional[str] = None
    count: int


class _Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    def to_json(self) -> dict:
        return self.model_dump(by_alias=True)


class SpanReport(_Report):
    weight: str
    degree: int
    pbw_count: int
    pbw_rank: int
    admissible_count: int
    admissible_rank: int
    passed: bool = Field(alias="pass")
    elapsed_ms: int = 0


class ReplayReport(_Report):
    weight: str
    degree: int
    checked: int
    kill_failures: int
    unsupported: int
    residual_failures: int
    passed: bool = Field(alias="pass")
    samples: List[str] = Field(default_factory=list, exclude=True)


class CheckReport(_Report):
    name: str
    weight: Optional[str] = None
    checked: int
    failures: int
    samples: List[str] = Field(default_factory=list)
    passed: bool = Field(alias="pass")


class HwvReport(_Report):
    weight: str
    pair: str
    kernel_dimension: int
    support: List[str]
    coefficients: List[str]
    all_nonzero: bool
    killed_by_raising: bool


class DecompositionRow(BaseModel):
    weight: str
    multiplicity: int
    dimension: int


class DecompositionReport(_Report):
    pair: str
    summands: List[DecompositionRow]
    total_dimension: int
    expected_dimension: int
    balanced: bool


def default_threads() -> int:
    raw = os.environ.get("FS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


class JobConfig(BaseModel):
    rank: int = Field(4, ge=4)
    weight: Optional[str] = None
    degree: Optional[int] = Field(None, ge=0)
    max_degree: Optional[int] = Field(None, ge=0)
    pair: Optional[str] = None
    out: Optional[str] = None
    json_out: Optional[str] = None
    format: Literal["json", "csv"] = "csv"
    threads: int = Field(default_factory=default_threads, ge=1)
    use_cache: bool = True

    @model_validator(mode="after")
    def normalize_weight(self) -> "JobConfig":
        if self.weight is not None:
            try:
                spec = parse_weight(self.weight, self.rank)
            except FsBasisError as exc:
                raise ValueError(exc.message) from exc
            # sums of level-1 weights still enumerate at any rank
            if spec.kind == "fundamental" and self.rank != 4:
                raise ValueError(UnsupportedWeight("level-2 verification requires rank 4").message)
            self.weight = spec.label
        return self

    def weight_spec(self) -> Optional[WeightSpec]:
        if self.weight is None:
            return None
        return parse_weight(self.weight, self.rank)

    def degrees(self) -> List[int]:
        if self.degree is not None:
            return [self.degree]
        top = self.max_degree if self.max_degree is not None else 4
        return list(range(top + 1))
