"""Command-line front end: ``contractil <subcommand> ...``.

Exit codes: 0 ok, 2 parse error (contract text or command line), 3 type
error, 4 unsupported construct, 5 evaluation, environment or I/O error,
6 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import serialize
from .codegen.functional import emit_functional
from .codegen.kernel import reindex
from .codegen.kernel_source import emit
from .compiler import from_contr
from .env import ExtEnv, check_tenv
from .errors import (
    CholeskyFailure,
    CompileError,
    ContractError,
    EvalError,
    KernelError,
    NonfiniteAccumulation,
    NotTemplateClosed,
    ParseError,
    TypeCheckError,
)
from .il.semantics import Discount, eval_at
from .il.syntax import show
from .il.transform import cut_payoff
from .instruments import instrument, instrument_names
from .pricing.engine import dumps_results, price_across_time, price_mc
from .pricing.model import ModelSpec
from .reduction import advance
from .semantics import instantiate, template_vars
from .syntax import Contr
from .text import parse_contract, print_contract
from .theorems import THEOREMS, run_suite, write_jsonl
from .typecheck import check_contract

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_TYPE = 3
EXIT_UNSUPPORTED = 4
EXIT_EVAL = 5
EXIT_VERIFY = 6


class VerificationFailed(Exception):
    pass


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, TypeCheckError):
        return EXIT_TYPE
    if isinstance(exc, CompileError):
        return EXIT_UNSUPPORTED
    if isinstance(exc, VerificationFailed):
        return EXIT_VERIFY
    if isinstance(exc, (EvalError, KernelError, NotTemplateClosed, NonfiniteAccumulation,
                        CholeskyFailure, ContractError, OSError, ValueError, KeyError)):
        return EXIT_EVAL
    raise exc


# --- inputs -------------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_node(source: str):
    if source.startswith("@"):
        return instrument(source[1:])
    text = _read(source)
    if text.lstrip().startswith("{"):
        try:
            return serialize.loads(text)
        except (ValueError, TypeError) as exc:
            raise ParseError(f"malformed JSON input: {exc}") from None
    return parse_contract(text)


def load_contract(source: str) -> Contr:
    """A contract from a file, ``-`` for stdin, or ``@name`` for a built-in instrument."""
    node = _load_node(source)
    if not isinstance(node, Contr.__args__):
        raise ParseError(f"expected a contract, got a {type(node).__name__}")
    return node


def load_checked(source: str) -> Contr:
    c = load_contract(source)
    check_contract(c)
    return c


def _json_file(path: str | None):
    return None if path is None else json.loads(_read(path))


def load_tenv(args) -> dict[str, int]:
    tenv = dict(_json_file(getattr(args, "tenv", None)) or {})
    for item in getattr(args, "t_bind", None) or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"template binding {item!r} is not of the form name=value")
        tenv[name.strip()] = int(value)
    return check_tenv(tenv)


def load_discount(path: str | None, default: Discount | None = None) -> Discount:
    obj = _json_file(path)
    if obj is None:
        return default or Discount.flat()
    return Discount.from_json(obj)


def load_env(path: str | None) -> ExtEnv:
    obj = _json_file(path)
    return ExtEnv.from_json(obj if obj is not None else {"labels": {}})


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


# --- subcommands ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    c = load_checked(args.contract)
    _emit_json({"ok": True, "template_vars": template_vars(c)})
    return EXIT_OK


def cmd_inst(args) -> int:
    c = instantiate(load_checked(args.contract), load_tenv(args))
    if args.format == "json":
        print(serialize.dumps(c))
    else:
        print(print_contract(c))
    return EXIT_OK


def _compile(args):
    il = from_contr(load_checked(args.contract))
    return cut_payoff(il) if args.cut else il


def cmd_compile(args) -> int:
    il = _compile(args)
    print(show(il) if args.format == "text" else serialize.dumps(il))
    return EXIT_OK


def cmd_eval(args) -> int:
    node = _load_node(args.contract)
    if isinstance(node, Contr.__args__):
        check_contract(node)
        il = from_contr(node)
    else:
        il = node
    if args.cut:
        il = cut_payoff(il)
    v = eval_at(args.t, il, load_env(args.env), load_discount(args.disc), args.p1, args.p2,
                load_tenv(args))
    _emit_json({"value": v})
    return EXIT_OK


def cmd_advance(args) -> int:
    c = load_checked(args.contract)
    residual, emitted = advance(c, load_env(args.env), args.steps)
    _emit_json({
        "contract": print_contract(residual, indent=None),
        "transfers": [{"day": d, "transfers": tr.to_json()} for d, tr in enumerate(emitted)],
    })
    return EXIT_OK


def cmd_emit(args) -> int:
    il = _compile(args)
    if args.format == "functional":
        sys.stdout.write(emit_functional(il))
        return EXIT_OK
    kernel = reindex(il, load_tenv(args))
    if args.format == "kernel":
        sys.stdout.write(emit(kernel))
    else:
        print(kernel.dumps())
    return EXIT_OK


def _parse_times(text: str) -> list[int]:
    try:
        times = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"--at expects comma-separated days, got {text!r}") from None
    if not times or any(t < 0 for t in times):
        raise ValueError("--at needs at least one non-negative day")
    return times


def cmd_price(args) -> int:
    if args.paths <= 0 or args.workers <= 0:
        raise ValueError("--paths and --workers must be positive")
    spec = ModelSpec.loads(_read(args.model))
    disc = load_discount(args.disc, Discount.from_rate(spec.rates[0], spec.day_count))
    tenv = load_tenv(args)
    il = from_contr(load_checked(args.contract))
    if args.at is None:
        kernel = reindex(il, tenv)
        res = price_mc(kernel, spec, disc, 0, args.paths, args.seed, args.p1, args.p2,
                       args.workers, tenv)
        print(dumps_results(res))
        return EXIT_OK
    kernel = reindex(cut_payoff(il), tenv)
    results = price_across_time(kernel, spec, disc, _parse_times(args.at), args.paths,
                                args.seed, args.p1, args.p2, args.workers, tenv)
    print(dumps_results(results))
    return EXIT_OK


def cmd_verify(args) -> int:
    rows = run_suite(args.theorem, args.cases, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            total, failures = write_jsonl(rows, fh)
    else:
        total, failures = write_jsonl(rows, sys.stdout)
    print(f"theorem {args.theorem}: {total} checks, {failures} failures", file=sys.stderr)
    if failures:
        raise VerificationFailed(f"{failures} of {total} checks failed")
    return EXIT_OK


# --- argument parsing -------------------------------------------------------------------


def _add_contract(p: argparse.ArgumentParser) -> None:
    p.add_argument("contract", help="contract file (text or JSON), '-' for stdin, "
                                    f"or @NAME for a built-in instrument ({', '.join(instrument_names())})")


def _add_tenv(p: argparse.ArgumentParser) -> None:
    p.add_argument("-t", dest="t_bind", action="append", metavar="NAME=VALUE",
                   help="bind a template variable (repeatable)")
    p.add_argument("--tenv", metavar="FILE", help="template environment JSON {name: days}")


def _add_parties(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p1", default="you", help="paying party counted positive (default: you)")
    p.add_argument("--p2", default="me", help="receiving party (default: me)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contractil",
        description="Compile, evaluate, generate code for and price financial contracts.",
        epilog="exit codes: 0 ok, 2 parse, 3 type, 4 unsupported construct, "
               "5 evaluation/environment/IO, 6 verification failure",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and typecheck a contract")
    _add_contract(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("inst", help="instantiate template variables")
    _add_contract(p)
    _add_tenv(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_inst)

    p = sub.add_parser("compile", help="compile to a payoff expression")
    _add_contract(p)
    p.add_argument("--cut", action="store_true", help="guard payoffs for pricing at later times")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="evaluate a contract or compiled payoff expression")
    _add_contract(p)
    _add_tenv(p)
    _add_parties(p)
    p.add_argument("--env", metavar="FILE", help="observable table JSON")
    p.add_argument("--disc", metavar="FILE", help="discount JSON (default: no discounting)")
    p.add_argument("--t", type=int, default=0, help="current time (default 0)")
    p.add_argument("--cut", action="store_true", help="apply payoff cutting before evaluating")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("advance", help="reduce a contract by some days")
    _add_contract(p)
    p.add_argument("--env", metavar="FILE", required=True, help="observable table JSON")
    p.add_argument("--steps", type=int, default=1, help="days to advance (default 1)")
    p.set_defaults(func=cmd_advance)

    p = sub.add_parser("emit", help="generate kernel or functional source")
    _add_contract(p)
    _add_tenv(p)
    p.add_argument("--format", choices=("kernel", "kernel-json", "functional"), default="kernel")
    p.add_argument("--cut", action="store_true")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("price", help="Monte Carlo price")
    _add_contract(p)
    _add_tenv(p)
    _add_parties(p)
    p.add_argument("--model", metavar="FILE", required=True, help="model JSON")
    p.add_argument("--disc", metavar="FILE",
                   help="discount JSON (default: the first label's rate, continuously compounded)")
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--at", metavar="T1,T2,...",
                   help="price the cut kernel at these current times from one simulation")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("verify", help="run a soundness suite on random contracts")
    p.add_argument("--theorem", choices=THEOREMS, required=True,
                   help="1: compilation, 4: cut versus reduction, 5: cut tail sums")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="FILE", help="write the JSON-lines report here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to documented exit codes
        code = exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
