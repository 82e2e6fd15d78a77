import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import click
from pydantic import ValidationError

from fsbasis.enumeration import character_csv, graded_dimensions
from fsbasis.errors import FsBasisError, InvalidInput, UnsupportedWeight
from fsbasis.fock import build_cocycle
from fsbasis.lattice import WeightSpec, build_context, level1_weights, level2_weights, parse_weight
from fsbasis.schemas import JobConfig
from fsbasis.storage import cache, cache_key
from fsbasis.symcalc import check_successive_discrimination, replay_level1
from fsbasis.symcalc_pairs import replay_level2_D4
from fsbasis.tensor import decompose_top, hwv_report
from fsbasis.verify import (
    check_cocycle_invariance,
    check_fock_consistency,
    check_ic_identities,
    check_relations_level1,
    check_relations_level2,
    check_simple_current,
    span_report,
)

log = logging.getLogger(__name__)

SUITES = ("span", "relations", "ic", "current", "replay", "all")
SUITE_DEPTH = {"relations": 4, "current": 2, "fock-consistency": 6, "successive": 4}


@dataclass(frozen=True)
class Job:
    kind: str
    ell: int
    weight: Optional[str] = None
    degree: Optional[int] = None


def run_job(job: Job) -> List[dict]:
    ctx = build_context(job.ell)
    cocycle = build_cocycle(ctx)
    spec = parse_weight(job.weight, job.ell) if job.weight else None
    if job.kind == "span":
        return [span_report(ctx, cocycle, spec, job.degree).to_json()]
    if job.kind == "replay":
        if spec.level == 1:
            return [replay_level1(ctx, spec, job.degree).to_json()]
        return [replay_level2_D4(ctx, spec, job.degree).to_json()]
    if job.kind == "relations":
        return [r.to_json() for r in check_relations_level1(ctx, cocycle, job.degree)]
    if job.kind == "relations-level2":
        return [r.to_json() for r in check_relations_level2(ctx, cocycle, job.degree)]
    if job.kind == "ic":
        return [check_ic_identities(ctx, cocycle, spec).to_json()]
    if job.kind == "current":
        return [check_simple_current(ctx, cocycle, job.degree).to_json()]
    if job.kind == "fock-consistency":
        return [check_fock_consistency(ctx, cocycle, job.degree).to_json()]
    if job.kind == "successive":
        return [check_successive_discrimination(ctx, spec, job.degree).to_json()]
    if job.kind == "cocycle":
        return [check_cocycle_invariance(ctx, spec, job.degree).to_json()]
    raise InvalidInput(f"unknown job kind '{job.kind}'")


def run_jobs(jobs: List[Job], threads: int, use_cache: bool) -> List[dict]:
    """Run jobs in input order; cached payloads are reused and fresh ones stored."""
    results: List[Optional[List[dict]]] = [None] * len(jobs)
    keys = [cache_key(j.kind, j.ell, j.weight, j.degree) for j in jobs]
    pending = []
    for i, key in enumerate(keys):
        hit = cache.get(key) if use_cache else None
        if hit is not None:
            results[i] = hit["reports"]
        else:
            pending.append(i)
    log.info("%d jobs, %d cached, %d worker(s)", len(jobs), len(jobs) - len(pending), threads)
    todo = [jobs[i] for i in pending]
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            fresh = list(pool.map(run_job, todo))
    else:
        fresh = [run_job(job) for job in todo]
    for i, reports in zip(pending, fresh):
        results[i] = reports
        if use_cache:
            cache.put(keys[i], {"reports": reports})
    return [report for reports in results for report in reports]


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="[%(name)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _fail(message: str, code: int = 2) -> None:
    click.echo(message, err=True)
    raise SystemExit(code)


def _config(**kwargs) -> JobConfig:
    try:
        return JobConfig(**kwargs)
    except ValidationError as exc:
        errors = "; ".join(err["msg"] for err in exc.errors())
        _fail(f"invalid configuration: {errors}")


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        click.echo(text, nl=False)


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _parse_pair(text: Optional[str], ell: int) -> Tuple[int, int]:
    if not text:
        raise InvalidInput("--pair is required, e.g. L4,L4")
    parts = [parse_weight(part, ell) for part in text.split(",")]
    if len(parts) != 2 or any(p.kind != "level1" or p.indices[0] not in (ell - 1, ell) for p in parts):
        raise InvalidInput(f"pair '{text}' must name two spinor weights")
    return parts[0].indices[0], parts[1].indices[0]


def _guarded(body: Callable[[], int]) -> None:
    try:
        code = body()
    except FsBasisError as exc:
        _fail(exc.message, exc.exit_code)
    raise SystemExit(code)


def job_options(f):
    options = [
        click.option("--rank", "rank", default=4, type=int, show_default=True, help="Rank l of D_l."),
        click.option("--weight", default=None, help="L<i>, L<i>+L<j> or 2L<i>."),
        click.option("--degree", default=None, type=int, help="A single degree n."),
        click.option("--max-degree", "max_degree", default=None, type=int, help="Degrees 0..n."),
        click.option("--pair", default=None, help="Spinor pair realizing a level-2 weight, e.g. L4,L4."),
        click.option("--out", default=None, type=click.Path(), help="Output file (default stdout)."),
        click.option("--json", "json_out", default=None, type=click.Path(), help="JSON report file."),
        click.option("--format", "fmt", default="csv", type=click.Choice(["json", "csv"]), show_default=True),
        click.option("--threads", default=None, type=int, help="Worker processes (default FS_THREADS or CPU count)."),
        click.option("--no-cache", "no_cache", is_flag=True, help="Ignore and do not write cached results."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _build(rank, weight, degree, max_degree, pair, out, json_out, fmt, threads, no_cache) -> JobConfig:
    fields = dict(rank=rank, weight=weight, degree=degree, max_degree=max_degree, pair=pair, out=out, json_out=json_out, format=fmt, use_cache=not no_cache)
    if threads is not None:
        fields["threads"] = threads
    return _config(**fields)


@click.group(name="fs-basis")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging on stderr.")
def cli(verbose: bool):
    """Feigin-Stoyanovsky bases of D_l^(1) modules: enumeration and exact verification."""
    _configure_logging(verbose)


@cli.command("enumerate")
@job_options
def enumerate_command(**kwargs):
    """Graded dimensions of the admissible monomial sets."""
    cfg = _build(**kwargs)

    def body() -> int:
        ctx = build_context(cfg.rank)
        spec = cfg.weight_spec() or WeightSpec.level1(0)
        degrees = cfg.degrees()
        rows = [r for r in graded_dimensions(ctx, spec, max(degrees)) if r.degree in degrees]
        if cfg.format == "csv":
            text = character_csv(rows)
        else:
            text = _dump([r.model_dump() for r in rows])
        _emit(text, cfg.out or cfg.json_out)
        return 0

    _guarded(body)


def _weights(cfg: JobConfig) -> List[str]:
    if cfg.weight is not None:
        return [cfg.weight]
    specs = level1_weights(cfg.rank)
    if cfg.rank == 4:
        specs += level2_weights(cfg.rank)
    return [s.label for s in specs]


def suite_jobs(suite: str, cfg: JobConfig) -> List[Job]:
    ell = cfg.rank
    weights = _weights(cfg)
    spinors = (ell - 1, ell)
    depth = cfg.max_degree if cfg.max_degree is not None else cfg.degree
    jobs: List[Job] = []
    if suite in ("span", "all"):
        jobs += [Job("span", ell, w, n) for w in weights for n in cfg.degrees()]
    if suite in ("relations", "all"):
        n_max = depth if depth is not None else SUITE_DEPTH["relations"]
        jobs.append(Job("relations", ell, None, n_max))
        if ell == 4:
            jobs.append(Job("relations-level2", ell, None, n_max))
    if suite in ("ic", "all"):
        jobs += [Job("ic", ell, w) for w in weights]
    if suite in ("current", "all"):
        jobs.append(Job("current", ell, None, depth if depth is not None else SUITE_DEPTH["current"]))
    if suite in ("replay", "all"):
        jobs += [Job("replay", ell, w, n) for w in weights for n in cfg.degrees()]
        jobs.append(Job("fock-consistency", ell, None, SUITE_DEPTH["fock-consistency"]))
        for w in weights:
            spec = parse_weight(w, ell)
            if spec.kind == "level1" and spec.indices[0] in spinors:
                jobs.append(Job("successive", ell, w, SUITE_DEPTH["successive"]))
    if suite == "all" and cfg.weight is not None:
        jobs.append(Job("cocycle", ell, cfg.weight, max(cfg.degrees())))
    return jobs


def _describe(report: dict) -> str:
    name = report.get("name") or ("span" if "pbw_rank" in report else "replay")
    where = " ".join(str(report[k]) for k in ("weight", "degree") if report.get(k) is not None)
    return f"{name} {where}".strip()


@cli.command("verify")
@click.argument("suite", type=click.Choice(SUITES))
@job_options
def verify_command(suite: str, **kwargs):
    """Run a verification suite; exit 1 if any report fails."""
    cfg = _build(**kwargs)

    def body() -> int:
        reports = run_jobs(suite_jobs(suite, cfg), cfg.threads, cfg.use_cache)
        _emit(_dump(reports), cfg.json_out or cfg.out)
        failed = [r for r in reports if not r.get("pass", r.get("balanced", True))]
        for r in failed:
            click.echo(f"FAIL {_describe(r)}", err=True)
        return 1 if failed else 0

    _guarded(body)


@cli.command("hwv")
@job_options
def hwv_command(**kwargs):
    """Solved highest weight vector of a level-2 fundamental weight inside a spinor pair."""
    cfg = _build(**kwargs)

    def body() -> int:
        ctx = build_context(cfg.rank)
        spec = cfg.weight_spec() or WeightSpec.fundamental(2)
        if spec.kind != "fundamental":
            raise InvalidInput(f"{spec.label} is not a level-2 fundamental weight")
        if ctx.ell != 4:
            raise UnsupportedWeight("level-2 verification requires rank 4")
        report = hwv_report(ctx, build_cocycle(ctx), spec, _parse_pair(cfg.pair, ctx.ell))
        _emit(_dump(report.to_json()), cfg.json_out or cfg.out)
        return 0 if report.killed_by_raising else 1

    _guarded(body)


@cli.command("decompose")
@job_options
def decompose_command(**kwargs):
    """Decomposition of the top of a spinor tensor product."""
    cfg = _build(**kwargs)

    def body() -> int:
        ctx = build_context(cfg.rank)
        report = decompose_top(ctx, build_cocycle(ctx), _parse_pair(cfg.pair, ctx.ell))
        _emit(_dump(report.to_json()), cfg.json_out or cfg.out)
        return 0 if report.balanced else 1

    _guarded(body)


def main() -> None:
    cli(prog_name="fs-basis")
