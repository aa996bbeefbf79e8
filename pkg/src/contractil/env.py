"""Environments and the semantic domain of contracts (transfers and traces)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence, Union

from .errors import MissingObservable, UnboundTemplateVar
from .syntax import TExpr, Tnum, Tvar

Value = Union[float, bool]
TEnv = Mapping[str, int]


def t_sem(t: TExpr, tenv: TEnv) -> int:
    """Evaluate a template expression; unmapped variables are always an error."""
    if isinstance(t, Tnum):
        return t.value
    if isinstance(t, Tvar):
        try:
            return tenv[t.name]
        except KeyError:
            raise UnboundTemplateVar(t.name) from None
    raise TypeError(f"not a template expression: {t!r}")


def check_tenv(tenv: Mapping[str, Any]) -> dict[str, int]:
    out = {}
    for name, value in tenv.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ValueError(f"template variable {name!r} must map to a natural, got {value!r}")
        out[str(name)] = value
    return out


# --- external environments -----------------------------------------------


@dataclass(frozen=True)
class _Table:
    labels: Mapping[str, tuple[int, tuple[Value, ...]]]

    def __call__(self, label: str, day: int) -> Value:
        try:
            base, values = self.labels[label]
        except KeyError:
            raise MissingObservable(label, day) from None
        idx = day - base
        if idx < 0 or idx >= len(values):
            raise MissingObservable(label, day)
        return values[idx]


@dataclass(frozen=True)
class ExtEnv:
    """Observable environment ``(label, day) -> value``.

    ``shift(n)`` gives the environment seen ``n`` days later, i.e.
    ``env.shift(n)(l, i) == env(l, i + n)``. Table-backed environments raise
    :class:`MissingObservable` outside their stored range; environments built
    with :meth:`total` are defined everywhere.
    """

    source: Callable[[str, int], Value]
    offset: int = 0

    @classmethod
    def from_table(cls, labels: Mapping[str, tuple[int, Sequence[Value]]]) -> "ExtEnv":
        frozen = {str(k): (int(base), tuple(vals)) for k, (base, vals) in labels.items()}
        return cls(_Table(frozen))

    @classmethod
    def total(cls, fn: Callable[[str, int], Value]) -> "ExtEnv":
        return cls(fn)

    @classmethod
    def constant(cls, values: Mapping[str, Value]) -> "ExtEnv":
        vals = dict(values)

        def lookup(label: str, day: int) -> Value:
            try:
                return vals[label]
            except KeyError:
                raise MissingObservable(label, day) from None

        return cls(lookup)

    def __call__(self, label: str, day: int) -> Value:
        return self.source(label, day + self.offset)

    def shift(self, n: int) -> "ExtEnv":
        if n == 0:
            return self
        return ExtEnv(self.source, self.offset + n)

    @property
    def is_table(self) -> bool:
        return isinstance(self.source, _Table)

    def to_json(self) -> dict:
        if not isinstance(self.source, _Table):
            raise TypeError("only table-backed environments are serializable")
        labels = {}
        for label, (base, values) in sorted(self.source.labels.items()):
            labels[label] = {"base": base - self.offset, "values": list(values)}
        return {"labels": labels}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ExtEnv":
        labels = {}
        for label, entry in obj["labels"].items():
            values = []
            for v in entry["values"]:
                values.append(v if isinstance(v, bool) else float(v))
            labels[label] = (int(entry["base"]), values)
        return cls.from_table(labels)


# --- transfers and traces -------------------------------------------------


class Trans:
    """Transfers due on one day: ``(from, to, asset) -> amount``.

    Stored with the party pair in sorted order so that antisymmetry
    ``amount(p, q, a) == -amount(q, p, a)`` holds by construction.
    """

    __slots__ = ("_amounts",)

    def __init__(self, amounts: Mapping[tuple[str, str, str], float] | None = None):
        norm: dict[tuple[str, str, str], float] = {}
        for (p, q, a), v in (amounts or {}).items():
            if p == q:
                continue
            key, sign = ((p, q, a), 1.0) if p < q else ((q, p, a), -1.0)
            norm[key] = norm.get(key, 0.0) + sign * v
        self._amounts = {k: v for k, v in norm.items() if not v == 0.0}

    @classmethod
    def unit(cls, src: str, dst: str, asset: str) -> "Trans":
        return cls({(src, dst, asset): 1.0})

    def amount(self, src: str, dst: str, asset: str) -> float:
        if src == dst:
            return 0.0
        if src < dst:
            return self._amounts.get((src, dst, asset), 0.0)
        return -self._amounts.get((dst, src, asset), 0.0)

    def amount_all_assets(self, src: str, dst: str) -> float:
        """Face-value sum over assets (the payoff language erases assets)."""
        total = 0.0
        for asset in sorted(self.assets()):
            total += self.amount(src, dst, asset)
        return total

    def assets(self) -> set[str]:
        return {a for (_, _, a) in self._amounts}

    def items(self) -> Iterator[tuple[tuple[str, str, str], float]]:
        return iter(sorted(self._amounts.items()))

    def scale(self, k: float) -> "Trans":
        out = Trans()
        out._amounts = {key: k * v for key, v in self._amounts.items() if not k * v == 0.0}
        return out

    def __add__(self, other: "Trans") -> "Trans":
        if not other._amounts:
            return self
        if not self._amounts:
            return other
        merged = dict(self._amounts)
        for key, v in other._amounts.items():
            merged[key] = merged.get(key, 0.0) + v
        out = Trans()
        out._amounts = {k: v for k, v in merged.items() if not v == 0.0}
        return out

    def is_zero(self) -> bool:
        return not self._amounts

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Trans) and self._amounts == other._amounts

    def __hash__(self) -> int:
        return hash(frozenset(self._amounts.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{p}->{q} {a}: {v!r}" for (p, q, a), v in self.items())
        return f"Trans({{{inner}}})"

    def to_json(self) -> list:
        return [{"from": p, "to": q, "asset": a, "amount": v} for (p, q, a), v in self.items()]


EMPTY = Trans()


@dataclass(frozen=True)
class Trace:
    """Day-indexed transfers; days past the stored support carry no transfers.

    Trailing empty days are stripped so that equal traces compare equal.
    """

    days: tuple[Trans, ...] = field(default=())

    def __post_init__(self):
        days = tuple(self.days)
        end = len(days)
        while end and days[end - 1].is_zero():
            end -= 1
        object.__setattr__(self, "days", days[:end])

    def __getitem__(self, t: int) -> Trans:
        if 0 <= t < len(self.days):
            return self.days[t]
        return EMPTY

    def __len__(self) -> int:
        return len(self.days)

    def scale(self, k: float) -> "Trace":
        return Trace(tuple(tr.scale(k) for tr in self.days))

    def __add__(self, other: "Trace") -> "Trace":
        n = max(len(self.days), len(other.days))
        return Trace(tuple(self[t] + other[t] for t in range(n)))

    def delay(self, n: int) -> "Trace":
        if n < 0:
            raise ValueError("cannot delay by a negative amount")
        if not self.days or n == 0:
            return self
        return Trace((EMPTY,) * n + self.days)

    def amounts(self, src: str, dst: str, upto: int | None = None) -> list[float]:
        n = len(self.days) if upto is None else upto
        return [self[t].amount_all_assets(src, dst) for t in range(n)]

    def discounted_sum(self, disc: Callable[[int], float], src: str, dst: str,
                       start: int = 0, stop: int | None = None) -> float:
        """``sum_{t=start}^{stop} disc(t) * trace(t)(src, dst)``, ``stop`` inclusive."""
        stop = len(self.days) if stop is None else stop
        total = 0.0
        for t in range(start, stop + 1):
            amt = self[t].amount_all_assets(src, dst)
            if amt != 0.0:
                total += disc(t) * amt
        return total


def delay(n: int, trace: Trace) -> Trace:
    return trace.delay(n)


def zero_trace() -> Trace:
    return Trace()

