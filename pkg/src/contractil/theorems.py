"""Executable soundness checks relating contract semantics, reduction and the
compiled payoff expressions, plus a JSON-lines harness over random cases.

Each check computes both sides independently and returns a :class:`CheckReport`;
evaluation errors are captured in the report rather than raised, so a suite
run doubles as a totality check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .compiler import count_compilations, from_contr
from .env import ExtEnv, TEnv
from .errors import ContractError
from .generators import GenConfig, random_case, random_contract, random_env, random_tenv
from .il.semantics import Discount, eval_at
from .il.transform import cut_payoff
from .reduction import advance
from .semantics import contract_trace, horizon, instantiate, is_template_closed
from .syntax import Contr
from .text import print_contract

REL_TOL = 1e-9
ABS_TOL = 1e-12


def close(a: float, b: float, rel: float = REL_TOL, abs_tol: float = ABS_TOL) -> bool:
    if not (math.isfinite(a) and math.isfinite(b)):
        return False
    return abs(a - b) <= max(abs_tol, rel * max(abs(a), abs(b)))


@dataclass(frozen=True)
class CheckReport:
    check: str
    lhs: float | None
    rhs: float | None
    n: int = 0
    error: str | None = None

    @property
    def absdiff(self) -> float | None:
        if self.lhs is None or self.rhs is None:
            return None
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.error is None and close(self.lhs, self.rhs)


def _failed(check: str, n: int, exc: Exception) -> CheckReport:
    return CheckReport(check, None, None, n, f"{type(exc).__name__}: {exc}")


def trace_sum(c: Contr, rho: ExtEnv, disc, p1: str, p2: str, tenv: TEnv | None = None,
              start: int = 0) -> float:
    """Discounted cashflow from ``p1`` to ``p2`` over days ``start..horizon``."""
    tenv = tenv or {}
    return contract_trace(c, rho, tenv).discounted_sum(disc, p1, p2, start, horizon(c, tenv))


def check_compile_soundness(c: Contr, rho: ExtEnv, tenv: TEnv, disc: Discount,
                            p1: str, p2: str) -> CheckReport:
    """Discounted trace sum against the compiled expression evaluated at time 0."""
    try:
        lhs = trace_sum(c, rho, disc, p1, p2, tenv)
        rhs = eval_at(0, from_contr(c), rho, disc, p1, p2, tenv)
    except ContractError as exc:
        return _failed("compile", 0, exc)
    return CheckReport("compile", lhs, rhs)


def check_cut_payoff_nstep(c: Contr, rho: ExtEnv, disc: Discount, n: int,
                           p1: str, p2: str, il_cut=None) -> CheckReport:
    """Tail of the discounted trace from day ``n`` against the cut expression at time ``n``."""
    try:
        lhs = trace_sum(c, rho, disc, p1, p2, start=n)
        if il_cut is None:
            il_cut = cut_payoff(from_contr(c))
        rhs = eval_at(n, il_cut, rho, disc, p1, p2)
    except ContractError as exc:
        return _failed("cut", n, exc)
    return CheckReport("cut", lhs, rhs, n)


def check_commuting_diagram(c: Contr, rho: ExtEnv, disc: Discount, n: int,
                            p1: str, p2: str, il_cut=None) -> CheckReport:
    """Cut expression at time ``n`` against recompiling the contract advanced ``n`` days."""
    try:
        if il_cut is None:
            il_cut = cut_payoff(from_contr(c))
        lhs = eval_at(n, il_cut, rho, disc, p1, p2)
        residual, _ = advance(c, rho, n)
        rhs = eval_at(0, from_contr(residual), rho.shift(n), disc.shift(n), p1, p2)
    except ContractError as exc:
        return _failed("diagram", n, exc)
    return CheckReport("diagram", lhs, rhs, n)


@dataclass(frozen=True)
class DiagramResult:
    reports: tuple[CheckReport, ...]
    cut_path_compilations: int


def commuting_diagram_at(c: Contr, rho: ExtEnv, disc: Discount, ns: Iterable[int],
                         p1: str, p2: str) -> DiagramResult:
    """Check several ``n`` with a single compilation on the cut path.

    The cut-path evaluations run first inside a compilation counter so the
    count excludes the recompilations done on the reduction path.
    """
    ns = list(ns)
    with count_compilations() as tally:
        try:
            il_cut = cut_payoff(from_contr(c))
            lhs = [eval_at(n, il_cut, rho, disc, p1, p2) for n in ns]
            err = None
        except ContractError as exc:
            lhs, err = [None] * len(ns), exc
    reports = []
    for n, left in zip(ns, lhs):
        if err is not None:
            reports.append(_failed("diagram", n, err))
            continue
        try:
            residual, _ = advance(c, rho, n)
            right = eval_at(0, from_contr(residual), rho.shift(n), disc.shift(n), p1, p2)
        except ContractError as exc:
            reports.append(_failed("diagram", n, exc))
            continue
        reports.append(CheckReport("diagram", left, right, n))
    return DiagramResult(tuple(reports), tally.calls)


def check_instantiation(c: Contr, rho: ExtEnv, tenv: TEnv) -> CheckReport:
    """Instantiation closes the contract and preserves its trace.

    ``lhs``/``rhs`` are 1.0/0.0 flags: closed-ness and trace equality.
    """
    try:
        inst = instantiate(c, tenv)
        closed = is_template_closed(inst)
        same = contract_trace(inst, rho) == contract_trace(c, rho, tenv)
    except ContractError as exc:
        return _failed("instantiate", 0, exc)
    ok = closed and same
    return CheckReport("instantiate", 1.0, 1.0 if ok else 0.0,
                       error=None if ok else f"closed={closed} trace_equal={same}")


# --- harness -----------------------------------------------------------------------

THEOREMS = ("1", "4", "5")


def case_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def _row(seed: int, c: Contr, r: CheckReport) -> dict:
    return {
        "seed": seed,
        "contract": print_contract(c, indent=None),
        "n": r.n,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "absdiff": r.absdiff,
        "pass": r.passed,
        **({"error": r.error} if r.error else {}),
    }


def run_case(theorem: str, seed: int, cfg: GenConfig | None = None) -> list[dict]:
    case = random_case(seed, cfg)
    c, rho, disc, p1, p2 = case.contract, case.rho, case.disc, case.p1, case.p2
    if theorem == "1":
        return [_row(seed, c, check_compile_soundness(c, rho, {}, disc, p1, p2))]
    hor = horizon(c)
    if theorem == "5":
        il_cut = cut_payoff(from_contr(c))
        return [_row(seed, c, check_cut_payoff_nstep(c, rho, disc, n, p1, p2, il_cut))
                for n in range(hor + 2)]
    if theorem == "4":
        ns = sorted({1, 2, hor})
        res = commuting_diagram_at(c, rho, disc, ns, p1, p2)
        rows = [_row(seed, c, r) for r in res.reports]
        for row in rows:
            row["cut_path_compilations"] = res.cut_path_compilations
            row["pass"] = row["pass"] and res.cut_path_compilations == 1
        return rows
    raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def run_suite(theorem: str, cases: int, seed: int = 0,
              cfg: GenConfig | None = None) -> Iterator[dict]:
    for i in range(cases):
        yield from run_case(theorem, case_seed(seed, i), cfg)


def instantiation_suite(cases: int, seed: int = 0, tenvs_per_case: int = 2,
                        cfg: GenConfig | None = None) -> Iterator[dict]:
    import random

    cfg = cfg or GenConfig(template_vars=("T1", "T2", "T3"), allow_let=True, allow_acc=True)
    for i in range(cases):
        s = case_seed(seed, i)
        rng = random.Random(s)
        c = random_contract(rng, cfg)
        rho = random_env(rng.randrange(2**31))
        for _ in range(tenvs_per_case):
            r = check_instantiation(c, rho, random_tenv(rng, cfg.template_vars))
            yield _row(s, c, r)


def write_jsonl(rows: Iterable[dict], stream) -> tuple[int, int]:
    """Write rows as JSON lines; returns ``(total, failures)``."""
    total = failures = 0
    for row in rows:
        stream.write(json.dumps(row, sort_keys=True) + "\n")
        total += 1
        failures += not row["pass"]
    return total, failures


def summarize(rows: Sequence[dict]) -> dict:
    diffs = [r["absdiff"] for r in rows if r["absdiff"] is not None]
    return {
        "cases": len(rows),
        "failures": sum(not r["pass"] for r in rows),
        "max_absdiff": max(diffs, default=0.0),
    }
