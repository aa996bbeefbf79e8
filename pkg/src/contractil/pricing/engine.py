"""Monte Carlo pricing of payoff kernels.

Paths are processed in fixed-size chunks; each chunk's payoffs land in a
preallocated array at fixed positions, and the price is a single numpy sum
over that array. The result is therefore the same for any number of workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..codegen.kernel import Kernel, discount_rows, eval_kernel, eval_kernel_batch, reindex, sample_input
from ..compiler import from_contr
from ..env import ExtEnv, TEnv
from ..errors import MissingObservable, NonfiniteAccumulation
from ..il.semantics import Discount
from ..il.transform import cut_payoff
from ..reduction import advance
from ..semantics import instantiate
from ..syntax import Contr
from .model import ModelSpec, simulate_paths

CHUNK = 4096


@dataclass(frozen=True)
class PriceResult:
    price: float
    std_error: float
    n_paths: int
    seed: int
    t: int | None = None

    def to_json(self) -> dict:
        out = {"price": self.price, "stdError": self.std_error, "nPaths": self.n_paths,
               "seed": self.seed}
        if self.t is not None:
            out["t"] = self.t
        return out


def dumps_results(results: "PriceResult | Sequence[PriceResult]") -> str:
    if isinstance(results, PriceResult):
        obj = results.to_json()
    else:
        obj = [r.to_json() for r in results]
    return json.dumps(obj, sort_keys=True)


def summarize(payoffs: np.ndarray, seed: int, t: int | None = None) -> PriceResult:
    if not np.all(np.isfinite(payoffs)):
        bad = int(np.flatnonzero(~np.isfinite(payoffs))[0])
        raise NonfiniteAccumulation(f"path {bad} produced a non-finite payoff {payoffs[bad]}")
    n = len(payoffs)
    if n == 0:
        raise ValueError("need at least one path")
    mean = float(np.sum(payoffs) / n)
    se = float(np.std(payoffs, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return PriceResult(mean, se, n, seed, t)


def _columns(kernel: Kernel, spec: ModelSpec) -> list[int]:
    missing = [c for c in kernel.cols if c not in spec.labels]
    if missing:
        raise MissingObservable(missing[0], 0)
    return [spec.labels.index(c) for c in kernel.cols]


def simulate_ext(kernel: Kernel, spec: ModelSpec, path_start: int, n_paths: int,
                 seed: int) -> np.ndarray:
    """Simulated kernel input ``ext``, shape ``(n_paths, rows, cols)``."""
    cols = _columns(kernel, spec)
    days = sorted(set(kernel.rows))
    where = {d: i for i, d in enumerate(days)}
    sim = simulate_paths(spec, days, path_start, n_paths, seed)
    rows = [where[d] for d in kernel.rows]
    return sim[:, rows, :][:, :, cols]


def path_payoffs(kernel: Kernel, spec: ModelSpec, disc: Discount, times: Sequence[int],
                 n_paths: int, seed: int, p1: str, p2: str, workers: int = 1,
                 tenv: TEnv | None = None, chunk: int = CHUNK) -> np.ndarray:
    """Per-path kernel values, shape ``(len(times), n_paths)``; one simulation serves all times."""
    if n_paths <= 0:
        raise ValueError("need at least one path")
    disc_rows = discount_rows(kernel, disc)
    tvals = kernel.tenv if tenv is None else tuple(int(tenv[v]) for v in kernel.tvars)
    out = np.empty((len(times), n_paths))

    def job(start: int) -> None:
        n = min(chunk, n_paths - start)
        ext = simulate_ext(kernel, spec, start, n, seed)
        for i, t in enumerate(times):
            out[i, start:start + n] = eval_kernel_batch(kernel, ext, disc_rows, tvals, t, p1, p2)

    starts = range(0, n_paths, chunk)
    if workers <= 1:
        for s in starts:
            job(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, starts))
    return out


def price_mc(kernel: Kernel, spec: ModelSpec, disc: Discount, t_now: int = 0,
             n_paths: int = 10_000, seed: int = 0, p1: str = "you", p2: str = "me",
             workers: int = 1, tenv: TEnv | None = None) -> PriceResult:
    pay = path_payoffs(kernel, spec, disc, [t_now], n_paths, seed, p1, p2, workers, tenv)
    return summarize(pay[0], seed)


def price_across_time(kernel: Kernel, spec: ModelSpec, disc: Discount, times: Sequence[int],
                      n_paths: int = 10_000, seed: int = 0, p1: str = "you", p2: str = "me",
                      workers: int = 1, tenv: TEnv | None = None) -> list[PriceResult]:
    """Price a cut kernel at several current times from one set of simulated paths.

    Nothing is compiled here: the same kernel is evaluated with each ``t``.
    """
    pay = path_payoffs(kernel, spec, disc, times, n_paths, seed, p1, p2, workers, tenv)
    return [summarize(row, seed, t) for row, t in zip(pay, times)]


# --- cut kernel versus advance-and-recompile ------------------------------------------------


def path_env(kernel: Kernel, ext_path: np.ndarray) -> ExtEnv:
    """The environment one simulated path defines on the kernel's cells."""
    table = {(kernel.cols[c], kernel.rows[r]): float(ext_path[r, c]) for r, c in kernel.cells}

    def lookup(label: str, day: int) -> float:
        try:
            return table[label, day]
        except KeyError:
            raise MissingObservable(label, day) from None

    return ExtEnv.total(lookup)


def reduction_payoff(contract: Contr, rho: ExtEnv, disc: Discount, t: int,
                     p1: str, p2: str) -> float:
    """Advance ``t`` days, recompile the residual contract and evaluate its kernel."""
    residual, _ = advance(contract, rho, t)
    k = reindex(from_contr(residual))
    return eval_kernel(k, sample_input(k, rho.shift(t), disc.shift(t)), p1, p2)


@dataclass(frozen=True)
class CutVersusReduction:
    times: tuple[int, ...]
    cut: np.ndarray
    reduced: np.ndarray

    def identical(self) -> bool:
        return bool(np.array_equal(self.cut, self.reduced))

    def prices(self) -> list[tuple[float, float]]:
        n = self.cut.shape[1]
        return [(float(np.sum(a) / n), float(np.sum(b) / n)) for a, b in zip(self.cut, self.reduced)]


def cut_versus_reduction(contract: Contr, spec: ModelSpec, disc: Discount, times: Sequence[int],
                         n_paths: int, seed: int, p1: str = "you", p2: str = "me",
                         tenv: Mapping[str, int] | None = None) -> CutVersusReduction:
    """Per-path payoffs from one cut kernel and from per-path reduction, on shared paths."""
    closed = instantiate(contract, dict(tenv or {}))
    kernel = reindex(cut_payoff(from_contr(closed)))
    ext = np.concatenate([simulate_ext(kernel, spec, s, min(CHUNK, n_paths - s), seed)
                          for s in range(0, n_paths, CHUNK)])
    disc_rows = discount_rows(kernel, disc)
    cut = np.stack([eval_kernel_batch(kernel, ext, disc_rows, kernel.tenv, t, p1, p2)
                    for t in times])
    reduced = np.empty_like(cut)
    for p in range(n_paths):
        rho = path_env(kernel, ext[p])
        for i, t in enumerate(times):
            reduced[i, p] = reduction_payoff(closed, rho, disc, t, p1, p2)
    return CutVersusReduction(tuple(times), cut, reduced)
