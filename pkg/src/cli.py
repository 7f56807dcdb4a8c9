"""
Command-line front-end.

    heis-lab verify-group --n 1 --q 5
    heis-lab region-scan --q-list 3,5,7,11 --grid 0.1 --format csv
    heis-lab subgroups count --n 1 --p 3

Exit codes: 0 when every asserted check passes, 1 when at least one check is
violated (the report carries the witness), 2 for usage errors, capacity
guards and I/O errors.
"""
import argparse
import logging
import sys
from functools import partial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ValidationError, validator

from src.algebra.field import FieldCtx, field_create, field_from_order
from src.algebra.group import GroupCtx, heisenberg
from src.analysis.constants import SamplePlan
from src.analysis.functions import Exponent
from src.analysis.sets import IncidenceInstance, random_incidence_instance
from src.config.logging import setup_logging
from src.config.settings import settings
from src.exceptions import LabError
from src.experiments.base import (
    ExperimentPipeline,
    ExperimentPipelineBuilder,
    RunStatus,
)
from src.experiments.jobs.function_checks import (
    REGION_COLUMNS,
    ExtremizeEvaluator,
    ExtremizeItem,
    LWCheckEvaluator,
    RegionScanEvaluator,
)
from src.experiments.jobs.group_checks import GroupAxiomEvaluator
from src.experiments.jobs.set_checks import (
    SET_COLUMNS,
    ChenEvaluator,
    IncidenceEvaluator,
    SetLWEvaluator,
)
from src.experiments.jobs.subgroup_checks import (
    COUNT_COLUMNS,
    SubgroupCountEvaluator,
    SubgroupEnumerationEvaluator,
)
from src.experiments.samplers import ChainSampler, ListSampler, SeededSampler, SetCorpusSampler
from src.experiments.writers import make_writer

logger = logging.getLogger(__name__)

COMMANDS = (
    "verify-group",
    "region-scan",
    "lw-check",
    "extremize",
    "set-lw",
    "incidence",
    "chen",
    "subgroups",
)

DEFAULT_Q = {"region-scan": [3, 5, 7, 11]}


class RunConfig(BaseModel):
    """Validated flags of one run."""

    command: str
    action: Optional[str] = None
    n: int = 1
    q_list: List[int] = [3]
    p: Optional[int] = None
    seed: int = settings.DEFAULT_SEED
    samples: int = 200
    tol: float = settings.DEFAULT_TOLERANCE
    out: str = "-"
    format: str = "json"
    threads: int = settings.N_JOBS
    grid: float = 0.05
    exponents: Tuple[str, str] = ("3/2", "3/2")
    restarts: int = 8
    r_max: int = 8

    @validator("command")
    def known_command(cls, v: str) -> str:
        if v not in COMMANDS:
            raise ValueError(f"unknown command {v!r}")
        return v

    @validator("action", always=True)
    def subgroup_action(cls, v: Optional[str], values: dict) -> Optional[str]:
        if values.get("command") == "subgroups" and v not in ("enumerate", "count"):
            raise ValueError("subgroups needs an action: enumerate or count")
        return v

    @validator("n", "samples", "restarts", "r_max")
    def positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @validator("seed")
    def nonnegative_seed(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be >= 0")
        return v

    @validator("q_list", each_item=True)
    def odd_prime_power(cls, v: int) -> int:
        field_from_order(v)
        return v

    @validator("p")
    def odd_prime(cls, v: Optional[int]) -> Optional[int]:
        if v is not None:
            field_create(v)
        return v

    @validator("tol")
    def positive_tol(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("tolerance must be positive")
        return v

    @validator("format")
    def known_format(cls, v: str) -> str:
        if v not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        return v

    @validator("threads")
    def valid_threads(cls, v: int) -> int:
        if v == 0 or v < -1:
            raise ValueError("threads must be positive or -1")
        return v

    @validator("grid")
    def valid_grid(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("grid step must lie in (0, 1]")
        return v

    @validator("exponents")
    def valid_exponents(cls, v: Tuple[str, str]) -> Tuple[str, str]:
        for u in v:
            Exponent.parse(u)
        return v

    @property
    def groups(self) -> List[GroupCtx]:
        return [heisenberg(self.n, q) for q in self.q_list]


def _pipeline(config: RunConfig) -> ExperimentPipeline:
    builder = ExperimentPipelineBuilder().with_name(config.command).with_jobs(config.threads)
    columns: Sequence[str] = ()
    cmd = config.command

    if cmd == "verify-group":
        builder.with_sampler(ListSampler(config.groups)).with_evaluator(
            GroupAxiomEvaluator(samples=config.samples, seed=config.seed)
        )
    elif cmd == "region-scan":
        columns = REGION_COLUMNS
        builder.with_sampler(ListSampler(config.q_list)).with_evaluator(
            RegionScanEvaluator(step=config.grid, tol=config.tol)
        )
    elif cmd == "lw-check":
        plan = SamplePlan(
            random_tuples=config.samples,
            indicator_tuples=max(config.samples // 5, 1),
            seed=config.seed,
        )
        builder.with_sampler(ListSampler([(config.n, q) for q in config.q_list])).with_evaluator(
            LWCheckEvaluator(plan)
        )
    elif cmd == "extremize":
        u1, u2 = (Exponent.parse(u) for u in config.exponents)
        builder.with_sampler(ListSampler([ExtremizeItem(q, u1, u2) for q in config.q_list])).with_evaluator(
            ExtremizeEvaluator(restarts=config.restarts, seed=config.seed)
        )
    elif cmd == "set-lw":
        columns = SET_COLUMNS
        sampler = SetCorpusSampler(
            config.groups,
            config.samples,
            seed=config.seed,
            examples=("flat", "line_t0"),
            box_sizes=(1, 2),
        )
        builder.with_sampler(sampler).with_evaluator(SetLWEvaluator())
    elif cmd == "incidence":
        instances = [
            SeededSampler(
                config.samples,
                partial(_incidence_factory, field_from_order(q)),
                seed=config.seed + i,
            )
            for i, q in enumerate(config.q_list)
        ]
        sets = SetCorpusSampler(
            [heisenberg(1, q) for q in config.q_list],
            config.samples,
            seed=config.seed,
            examples=(),
            box_sizes=(1, 2),
        )
        builder.with_sampler(ChainSampler([*instances, sets])).with_evaluator(IncidenceEvaluator())
    elif cmd == "chen":
        sampler = SetCorpusSampler(config.groups, config.samples, seed=config.seed, examples=("flat", "line_t0"))
        builder.with_sampler(sampler).with_evaluator(ChenEvaluator(range(1, config.r_max + 1)))
    elif cmd == "subgroups" and config.action == "enumerate":
        builder.with_sampler(ListSampler(config.groups)).with_evaluator(SubgroupEnumerationEvaluator())
    else:
        columns = COUNT_COLUMNS
        primes = [config.p] if config.p is not None else config.q_list
        builder.with_sampler(ListSampler([(config.n, p) for p in primes])).with_evaluator(
            SubgroupCountEvaluator()
        )

    return builder.with_writer(make_writer(config.format, config.out, columns)).build()


def _incidence_factory(field: FieldCtx, index: int, rng: np.random.Generator) -> IncidenceInstance:
    return random_incidence_instance(field, rng, include_vertical=True)


def run(config: RunConfig) -> int:
    """Run one command and map its outcome to an exit code."""
    try:
        pipeline = _pipeline(config)
        status = pipeline.run()
    except LabError as e:
        # TooLarge messages carry the estimated cost and the limit
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    logger.info(f"Run statistics: {pipeline.get_stats()}")
    return 0 if status == RunStatus.PASSED else 1


def _q_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heis-lab", description=settings.PROJECT_NAME)
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1)
    group = common.add_mutually_exclusive_group()
    group.add_argument("--q", type=int, default=None)
    group.add_argument("--q-list", type=_q_list, default=None)
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--tol", type=float, default=settings.DEFAULT_TOLERANCE)
    common.add_argument("--out", type=str, default="-", help="report file (relative paths go under OUTPUT_DIR), '-' for stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--threads", type=int, default=settings.N_JOBS)

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify-group", parents=[common], help="group axioms, fibers, straightening")
    scan = sub.add_parser("region-scan", parents=[common], help="family ratios over an exponent grid")
    scan.add_argument("--grid", type=float, default=0.05)
    sub.add_parser("lw-check", parents=[common], help="uniform and mixed exponent ratio corpora")
    ext = sub.add_parser("extremize", parents=[common], help="sharp-constant lower bounds")
    ext.add_argument("--u", nargs=2, default=["3/2", "3/2"], metavar=("U1", "U2"))
    ext.add_argument("--restarts", type=int, default=8)
    sub.add_parser("set-lw", parents=[common], help="projection bound corpus")
    sub.add_parser("incidence", parents=[common], help="point-line incidence bounds")
    chen = sub.add_parser("chen", parents=[common], help="hyperplane covering family")
    chen.add_argument("--r-max", type=int, default=8)
    groups = sub.add_parser("subgroups", parents=[common], help="subgroup enumeration and counts")
    groups.add_argument("action", choices=["enumerate", "count"])
    groups.add_argument("--p", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.q is not None:
        q_list = [args.q]
    elif args.q_list:
        q_list = args.q_list
    else:
        q_list = DEFAULT_Q.get(args.command, [3])
    return RunConfig(
        command=args.command,
        action=getattr(args, "action", None),
        n=args.n,
        q_list=q_list,
        p=getattr(args, "p", None),
        seed=args.seed,
        samples=args.samples,
        tol=args.tol,
        out=args.out,
        format=args.format,
        threads=args.threads,
        grid=getattr(args, "grid", 0.05),
        exponents=tuple(getattr(args, "u", ("3/2", "3/2"))),
        restarts=getattr(args, "restarts", 8),
        r_max=getattr(args, "r_max", 8),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        config = config_from_args(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
