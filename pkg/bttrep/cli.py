"""
Command line front end: ``btt count|enumerate|branch|verify-paper|field-info``.

Exit codes: 0 ok, 1 regression failure, 2 invalid input, 3 unsupported
computation or exceeded bound, 4 count known only symbolically.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from bttrep.config import BttConfig
from bttrep.core.errors import BttError, SymbolicCountError
from bttrep.factory import BttStudioFactory, load_config
from bttrep.studio.schemas import JobSpec
from bttrep.studio.studio import BttStudio

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REGRESSION = 1
EXIT_SCHEMA = 2
EXIT_UNSUPPORTED = 3
EXIT_SYMBOLIC = 4

_JOB_OVERRIDES = ("class_data_path", "bfs_depth_bound", "group_order_bound")


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=str)


def _error_payload(error: Exception) -> dict:
    payload = {"type": type(error).__name__, "message": str(error)}
    if isinstance(error, BttError) and error.details:
        payload["details"] = error.details
    return {"error": payload}


def _config(args: argparse.Namespace, job: Optional[JobSpec] = None) -> BttConfig:
    overrides = {}
    if job is not None:
        overrides = {key: getattr(job.options, key) for key in _JOB_OVERRIDES if getattr(job.options, key)}
    if getattr(args, "config", None):
        overrides["class_data_path"] = args.config
    if args.verbose:
        overrides["log_level"] = "DEBUG"
    return load_config(args.settings, **overrides)


def _studio(args: argparse.Namespace, job: Optional[JobSpec] = None) -> BttStudio:
    config = _config(args, job)
    config.configure_logging()
    return BttStudioFactory.create(config)


# region Commands


def cmd_count(args: argparse.Namespace) -> int:
    job = BttStudio.load_job(args.job)
    report = _studio(args, job).count(job)
    print(_dumps(report.to_dict()))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    job = BttStudio.load_job(args.job)
    output = _studio(args, job).enumerate(job)
    print(_dumps(output.model_dump()))
    return EXIT_OK


def cmd_branch(args: argparse.Namespace) -> int:
    job = BttStudio.load_job(args.job)
    place = args.place or job.options.place
    if not place:
        raise ValueError("a place is required: pass --place or set options.place in the job")
    dot_path = args.dot or job.options.dot_path
    depth = args.depth if args.depth is not None else job.options.dot_depth
    source = _studio(args, job).branch(job, place, dot_path, depth)
    if dot_path:
        print(_dumps({"dot": str(Path(dot_path)), "place": place}))
    else:
        print(source, end="")
    return EXIT_OK


def cmd_verify_paper(args: argparse.Namespace) -> int:
    table = _studio(args).verify_paper(args.filter)
    print(table.to_string(index=False))
    failed = table.loc[~table["passed"], "case"].tolist()
    if failed:
        logger.error("Failing regression cases: %s", ", ".join(failed))
        return EXIT_REGRESSION
    return EXIT_OK


def cmd_field_info(args: argparse.Namespace) -> int:
    info = _studio(args).field_info(args.field)
    print(_dumps(info.model_dump()))
    return EXIT_OK


# endregion


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--settings", type=Path, help="bttrep configuration file (.toml, .yaml or .yml)")
    common.add_argument("--verbose", action="store_true", help="log at DEBUG level")

    job_options = argparse.ArgumentParser(add_help=False)
    job_options.add_argument("--job", type=Path, required=True, help="job specification (JSON)")
    job_options.add_argument("--config", type=str, help="class data table for degree-4 fields (JSON)")

    parser = argparse.ArgumentParser(
        prog="btt", description="Count and construct integral 2-dimensional representations."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    count = commands.add_parser("count", parents=[common, job_options], help="count conjugacy classes")
    count.set_defaults(handler=cmd_count)

    enumerate_ = commands.add_parser(
        "enumerate", parents=[common, job_options], help="list one representative per class"
    )
    enumerate_.set_defaults(handler=cmd_enumerate)

    branch = commands.add_parser("branch", parents=[common, job_options], help="export a branch as dot")
    branch.add_argument("--place", help="place label, e.g. 2_1")
    branch.add_argument("--dot", type=Path, help="output dot file")
    branch.add_argument("--depth", type=int, help="truncation depth of apartment tubes")
    branch.set_defaults(handler=cmd_branch)

    verify = commands.add_parser("verify-paper", parents=[common], help="run the regression corpus")
    verify.add_argument("--filter", help="run only cases with this tag or name fragment")
    verify.set_defaults(handler=cmd_verify_paper)

    field_info = commands.add_parser("field-info", parents=[common], help="describe a quadratic field")
    field_info.add_argument("field", help='field descriptor, e.g. "Q(sqrt(-5))"')
    field_info.set_defaults(handler=cmd_field_info)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SymbolicCountError as e:
        payload = _error_payload(e)
        if e.report is not None:
            payload["report"] = e.report.to_dict()
        print(_dumps(payload))
        return EXIT_SYMBOLIC
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as e:
        print(_dumps(_error_payload(e)))
        return EXIT_SCHEMA
    except BttError as e:
        print(_dumps(_error_payload(e)))
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
