"""Command-line client.

Thin wrapper over the same handlers the HTTP service exposes; everything
runs in process, no server needed.  Results go to stdout as JSON (JSONL for
batch evaluation), warnings and errors to stderr, errors as one JSON object.
Exit codes: 0 success, 1 a verification-style check failed, 2 bad usage or
bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .expressions import ExpressionError
from .schemas import BatchPointModel, BatchEvalRequestModel, ComposeRequestModel, EvalRequestModel, SpecError
from .service import (
    compose_specs,
    eval_batch,
    eval_spec,
    example_detail,
    expand_spec,
    list_examples,
    verify_spec,
)
from .specfile import load_spec_file


def _print_error(kind: str, message: str, offset: Optional[int] = None) -> None:
    body = {"type": kind, "message": message}
    if offset is not None:
        body["offset"] = offset
    print(json.dumps({"error": body}), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        _print_error("usage", message)
        raise SystemExit(2)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="weylflow",
        description="Exact normal-ordered exponential flows on the Weyl-Heisenberg algebra.",
    )
    parser.add_argument("--version", action="version", version=f"weylflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    expand = sub.add_parser("expand", help="compute J, phi, h for a spec file")
    expand.add_argument("spec", help="path to a TOML realization file")
    expand.add_argument("--kmax", type=int, help="override the truncation order")
    expand.add_argument(
        "--pretty", action="store_true", help="human-readable series instead of JSON"
    )

    verify = sub.add_parser(
        "verify", help="check the flow against the operator-algebra oracle"
    )
    verify.add_argument("spec", help="path to a TOML realization file")
    verify.add_argument("--kmax", type=int, help="override the truncation order")

    compose = sub.add_parser("compose", help="compose two scalar-free flows")
    compose.add_argument("first", help="path to the first TOML realization file")
    compose.add_argument("second", help="path to the second TOML realization file")
    compose.add_argument("--kmax", type=int, help="truncation order for both flows")

    evaluate = sub.add_parser("eval", help="evaluate the flow on plane waves")
    evaluate.add_argument("spec", help="path to a TOML realization file")
    evaluate.add_argument(
        "--k",
        action="append",
        required=True,
        metavar="V0,V1,...",
        help="numeric k vector; repeat together with --q for a batch",
    )
    evaluate.add_argument(
        "--q",
        action="append",
        required=True,
        metavar="V0,V1,...",
        help="numeric plane-wave momentum; repeat together with --k for a batch",
    )
    evaluate.add_argument("--kmax", type=int, help="override the truncation order")

    examples = sub.add_parser("examples", help="list built-in realizations")
    examples.add_argument(
        "name", nargs="?", help="print this built-in spec as TOML, ready to use"
    )

    return parser


def _parse_vector(text: str, flag: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise SpecError("usage", f"{flag} expects comma-separated numbers, got {text!r}")


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _cmd_expand(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    result = expand_spec(spec, args.kmax)
    if args.pretty:
        from .series import GradedSeries

        for mu, model in enumerate(result.J):
            print(f"J[{mu}] = {GradedSeries.from_json_dict(model.model_dump()).pretty()}")
        for mu, model in enumerate(result.phi):
            print(f"phi[{mu}] = {GradedSeries.from_json_dict(model.model_dump()).pretty()}")
        print(f"h = {GradedSeries.from_json_dict(result.h.model_dump()).pretty()}")
    else:
        _emit(result.model_dump())
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    report = verify_spec(spec, args.kmax)
    _emit(report.model_dump())
    return 0 if report.equal else 1


def _cmd_compose(args: argparse.Namespace) -> int:
    request = ComposeRequestModel(
        first=load_spec_file(args.first),
        second=load_spec_file(args.second),
        kmax=args.kmax,
    )
    report = compose_specs(request)
    _emit(report.model_dump())
    return 0 if report.oracle_equal else 1


def _cmd_eval(args: argparse.Namespace) -> int:
    spec = load_spec_file(args.spec)
    kvecs = [_parse_vector(text, "--k") for text in args.k]
    qvecs = [_parse_vector(text, "--q") for text in args.q]
    if len(kvecs) != len(qvecs):
        raise SpecError("usage", "--k and --q must be given the same number of times")
    if len(kvecs) == 1:
        result = eval_spec(
            EvalRequestModel(spec=spec, k=kvecs[0], q=qvecs[0], kmax=args.kmax)
        )
        _emit(result.model_dump())
    else:
        points = [BatchPointModel(k=k, q=q) for k, q in zip(kvecs, qvecs)]
        rows = eval_batch(
            BatchEvalRequestModel(spec=spec, points=points, kmax=args.kmax)
        )
        for row in rows:
            print(json.dumps(row.model_dump()))
    return 0


def _cmd_examples(args: argparse.Namespace) -> int:
    if args.name is None:
        for item in list_examples().examples:
            print(f"{item.name}\t{item.summary}")
        return 0
    detail = example_detail(args.name)
    print(detail.toml, end="")
    return 0


def run_command(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "expand": _cmd_expand,
        "verify": _cmd_verify,
        "compose": _cmd_compose,
        "eval": _cmd_eval,
        "examples": _cmd_examples,
    }
    try:
        return handlers[args.command](args)
    except SpecError as exc:
        _print_error(exc.kind, exc.message, exc.offset)
        return 2
    except ExpressionError as exc:
        _print_error("expression", exc.message, exc.offset)
        return 2
    except ValidationError as exc:
        first = exc.errors()[0]
        _print_error("spec", f"{first.get('loc', ())}: {first['msg']}")
        return 2


def main() -> None:
    warnings.simplefilter("default")
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
