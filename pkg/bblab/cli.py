"""
bblab/cli.py
-----------------------------------------------------------------------------
Command-line front end.

    bblab verify [--checks ID,ID|all] [--format json|md] [--out PATH]
                 [--glue-bound N] [--verbose]
    bblab lattice list
    bblab lattice show NAME [--format json|md]
    bblab h4 gram [--out PATH]
    bblab h4 class delta2|sigma
    bblab serve [--host HOST] [--port PORT]

Exit codes: 0 when every selected check passes, 1 when any check fails or is
blocked, 2 on usage errors (unknown check id, unknown lattice, bad flags).

Output goes to stdout unless ``--out`` is given; relative ``--out`` paths
resolve against ``BBLAB_REPORT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from bblab import config
from bblab.catalog import names
from bblab.hilb2_h4 import h4_gram
from bblab.pipeline import CheckId, run_checks
from bblab.reporting import (
    build_envelope,
    envelope_json,
    gram_model,
    h4_class_model,
    lattice_model,
    render_lattice_markdown,
    render_report_markdown,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command-line input; reported on stderr with exit code 2."""


def parse_check_ids(text: str) -> list[CheckId]:
    """
    ``"all"`` or a comma-separated list of check ids.

    Raises
    ------
    UsageError : an id is not a ``CheckId``.
    """
    if text.strip() == "all":
        return list(CheckId)
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            out.append(CheckId(part))
        except ValueError:
            known = ", ".join(c.value for c in CheckId)
            raise UsageError(f"unknown check id {part!r}; known: {known}") from None
    if not out:
        raise UsageError("no check ids given")
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = config.resolve_output_path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    checks = parse_check_ids(args.checks)
    reports = run_checks(checks, glue_bound=args.glue_bound)
    envelope = build_envelope(reports)
    if args.format == "md":
        _emit(render_report_markdown(envelope), args.out)
    else:
        _emit(envelope_json(envelope), args.out)
    summary = envelope.summary
    if summary["fail"] or summary["blocked"]:
        logger.warning("verification: %s", summary)
        return EXIT_FAILED
    return EXIT_OK


def cmd_lattice_list(args: argparse.Namespace) -> int:
    _emit("\n".join(names()) + "\n", None)
    return EXIT_OK


def cmd_lattice_show(args: argparse.Namespace) -> int:
    try:
        model = lattice_model(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.format == "md":
        _emit(render_lattice_markdown(model), args.out)
    else:
        _emit(json.dumps(model.model_dump(), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_h4_gram(args: argparse.Namespace) -> int:
    gram = gram_model(h4_gram())
    _emit(json.dumps(gram.model_dump()) + "\n", args.out)
    return EXIT_OK


def cmd_h4_class(args: argparse.Namespace) -> int:
    model = h4_class_model(args.name)
    _emit(json.dumps(model.model_dump(), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("bblab.main:app", host=args.host, port=args.port)
    return EXIT_OK


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bblab",
        description=(
            "Exact lattice checks for the Beauville-Bogomolov lattice of a quotient "
            "of the Hilbert square of a K3 surface."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {config.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run verification checks")
    verify.add_argument("--checks", default="all", help="comma-separated check ids, or 'all'")
    verify.add_argument("--format", choices=("json", "md"), default="json")
    verify.add_argument("--out", help="write the report here instead of stdout")
    verify.add_argument(
        "--glue-bound",
        type=int,
        default=None,
        help=f"candidate bound for the glue search (default {config.DEFAULT_GLUE_BOUND})",
    )
    verify.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    verify.set_defaults(handler=cmd_verify)

    lattice = sub.add_parser("lattice", help="inspect catalog lattices")
    lattice_sub = lattice.add_subparsers(dest="lattice_command", required=True)
    lattice_sub.add_parser("list", help="list catalog names").set_defaults(
        handler=cmd_lattice_list
    )
    show = lattice_sub.add_parser("show", help="print a catalog lattice")
    show.add_argument("name")
    show.add_argument("--format", choices=("json", "md"), default="json")
    show.add_argument("--out")
    show.set_defaults(handler=cmd_lattice_show)

    h4 = sub.add_parser("h4", help="degree-4 cohomology of the Hilbert square of K3")
    h4_sub = h4.add_subparsers(dest="h4_command", required=True)
    gram = h4_sub.add_parser("gram", help="the 276x276 Gram matrix as JSON")
    gram.add_argument("--out")
    gram.set_defaults(handler=cmd_h4_gram)
    cls = h4_sub.add_parser("class", help="coordinates of delta2 or sigma")
    cls.add_argument("name", choices=("delta2", "sigma"))
    cls.add_argument("--out")
    cls.set_defaults(handler=cmd_h4_class)

    serve = sub.add_parser("serve", help="serve the read-only HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8242)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    level = "INFO" if getattr(args, "verbose", False) else config.LOG_LEVEL
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.handler(args))
    except UsageError as exc:
        print(f"bblab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
