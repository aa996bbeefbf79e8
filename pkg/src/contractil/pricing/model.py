"""Correlated geometric Brownian motion with counter-based per-path random streams.

Path ``i`` under seed ``s`` always consumes the same slice of the Philox
stream keyed by ``s``, so simulated values never depend on how paths are
batched or scheduled across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

from ..errors import CholeskyFailure

_PSD_TOL = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    labels: tuple[str, ...]
    spots: tuple[float, ...]
    vols: tuple[float, ...]
    rates: tuple[float, ...]
    corr: tuple[tuple[float, ...], ...]
    day_count: float = 365.0

    def __post_init__(self):
        n = len(self.labels)
        if not n:
            raise ValueError("a model needs at least one label")
        if len(set(self.labels)) != n:
            raise ValueError("duplicate labels in model")
        if not (len(self.spots) == len(self.vols) == len(self.rates) == n):
            raise ValueError("spot, vol and rate are needed for every label")
        if any(not s > 0 for s in self.spots):
            raise ValueError("spots must be positive")
        if any(not v >= 0 for v in self.vols):
            raise ValueError("volatilities must be non-negative")
        if not self.day_count > 0:
            raise ValueError("dayCount must be positive")
        c = np.asarray(self.corr, dtype=float)
        if c.shape != (n, n):
            raise ValueError(f"correlation matrix must be {n}x{n}")
        if not np.array_equal(c, c.T):
            raise ValueError("correlation matrix must be symmetric")
        if not np.all(np.diag(c) == 1.0):
            raise ValueError("correlation matrix must have a unit diagonal")

    @classmethod
    def single(cls, label: str, spot: float, vol: float, rate: float,
               day_count: float = 365.0) -> "ModelSpec":
        return cls((label,), (float(spot),), (float(vol),), (float(rate),), ((1.0,),),
                   float(day_count))

    @classmethod
    def from_json(cls, obj: Mapping) -> "ModelSpec":
        labels = obj["labels"]
        names = tuple(labels)
        n = len(names)
        corr = obj.get("corr") or np.eye(n).tolist()
        return cls(
            names,
            tuple(float(labels[l]["spot"]) for l in names),
            tuple(float(labels[l]["vol"]) for l in names),
            tuple(float(labels[l]["rate"]) for l in names),
            tuple(tuple(float(x) for x in row) for row in corr),
            float(obj.get("dayCount", 365.0)),
        )

    @classmethod
    def loads(cls, text: str) -> "ModelSpec":
        return cls.from_json(json.loads(text))

    def to_json(self) -> dict:
        return {
            "labels": {l: {"spot": s, "vol": v, "rate": r}
                       for l, s, v, r in zip(self.labels, self.spots, self.vols, self.rates)},
            "corr": [list(row) for row in self.corr],
            "dayCount": self.day_count,
        }

    def cholesky(self) -> np.ndarray:
        return psd_cholesky(np.asarray(self.corr, dtype=float))


def psd_cholesky(a: np.ndarray) -> np.ndarray:
    """Lower factor ``L`` with ``L @ L.T == a`` for a positive semidefinite ``a``.

    Positive definite inputs go through numpy; singular but semidefinite ones
    (for example perfect correlation) use an outer-product factorization that
    accepts zero pivots.
    """
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if d < -_PSD_TOL:
            raise CholeskyFailure("correlation matrix is not positive semidefinite")
        low[j, j] = math.sqrt(max(d, 0.0))
        for i in range(j + 1, n):
            r = a[i, j] - low[i, :j] @ low[j, :j]
            if low[j, j] > 0.0:
                low[i, j] = r / low[j, j]
            elif abs(r) > 1e-9:
                raise CholeskyFailure("correlation matrix is not positive semidefinite")
    return low


def draws_per_path(spec: ModelSpec, n_steps: int) -> int:
    """Raw 64-bit words one path consumes, padded to whole Philox blocks of four."""
    m = n_steps * len(spec.labels)
    return -(-m // 4) * 4


def standard_normals(seed: int, path_start: int, n_paths: int, per_path: int,
                     used: int) -> np.ndarray:
    """Normals for paths ``path_start .. path_start+n_paths-1``, shape ``(n_paths, used)``."""
    bits = Philox(key=seed)
    bits.advance(path_start * per_path // 4)
    raw = bits.random_raw(n_paths * per_path).reshape(n_paths, per_path)[:, :used]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
    return ndtri(u)


def simulate_paths(spec: ModelSpec, days: Sequence[int], path_start: int, n_paths: int,
                   seed: int) -> np.ndarray:
    """Simulated values, shape ``(n_paths, len(days), len(labels))``.

    ``days`` must be ascending. Day 0 and earlier read the spot; later days
    use exact log-normal increments between consecutive requested days.
    """
    days = [int(d) for d in days]
    if any(b <= a for a, b in zip(days, days[1:])):
        raise ValueError("days must be strictly ascending")
    low = spec.cholesky()
    nl = len(spec.labels)
    spot = np.asarray(spec.spots)
    vol = np.asarray(spec.vols)
    rate = np.asarray(spec.rates)
    out = np.empty((n_paths, len(days), nl))
    past = [i for i, d in enumerate(days) if d <= 0]
    out[:, past, :] = spot
    future = np.asarray([d for d in days if d > 0], dtype=float)
    if not len(future):
        return out
    steps = len(future)
    z = standard_normals(seed, path_start, n_paths, draws_per_path(spec, steps), steps * nl)
    z = z.reshape(n_paths, steps, nl)
    # explicit products keep every path's arithmetic independent of batch shape
    zc = np.zeros_like(z)
    for i in range(nl):
        for j in range(i + 1):
            if low[i, j] != 0.0:
                zc[:, :, i] += low[i, j] * z[:, :, j]
    dt = np.diff(np.concatenate(([0.0], future))) / spec.day_count
    shocks = np.cumsum(np.sqrt(dt)[None, :, None] * zc * vol[None, None, :], axis=1)
    drift = (rate - 0.5 * vol * vol)[None, :] * (future / spec.day_count)[:, None]
    out[:, len(past):, :] = spot * np.exp(drift[None, :, :] + shocks)
    return out


def simulate_path(spec: ModelSpec, days: Sequence[int], path_index: int,
                  seed: int) -> dict[str, list[float]]:
    """One path as ``{label: [value per requested day]}``."""
    vals = simulate_paths(spec, days, path_index, 1, seed)[0]
    return {l: vals[:, i].tolist() for i, l in enumerate(spec.labels)}
