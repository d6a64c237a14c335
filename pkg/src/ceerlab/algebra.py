"""Ceer combinators and finite-fragment verdicts.

Views are lazy: a :class:`CeerView` answers ``related(x, y)`` by consulting
whatever it wraps, so a view over a growing :class:`~ceerlab.kernel.StageCeer`
always reflects the current stage (or the stage passed as ``at``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .kernel import Parity, TimePoint

HOLDS = "holds"
FAILS = "fails"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: Any = None
    reason: str = ""
    checked_domain: frozenset = frozenset()
    warnings: tuple[str, ...] = ()

    @classmethod
    def holds(cls, domain: Iterable = (), warnings: Iterable[str] = ()) -> "Verdict":
        return cls(HOLDS, None, "", frozenset(domain), tuple(warnings))

    @classmethod
    def fails(cls, witness: Any, reason: str, domain: Iterable = ()) -> "Verdict":
        return cls(FAILS, witness, reason, frozenset(domain))

    @classmethod
    def undetermined(cls, witness: Any, reason: str, domain: Iterable = ()) -> "Verdict":
        return cls(UNDETERMINED, witness, reason, frozenset(domain))

    @property
    def ok(self) -> bool:
        return self.status == HOLDS

    @property
    def failed(self) -> bool:
        return self.status == FAILS


class CeerView:
    def related(self, x: int, y: int, at: TimePoint | None = None) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class Direct(CeerView):
    """Any object with ``related(x, y, at=None)`` (usually a StageCeer)."""

    base: Any

    def related(self, x, y, at=None):
        return self.base.related(x, y, at)


@dataclass(frozen=True)
class Half(CeerView):
    inner: CeerView
    parity: Parity

    def related(self, x, y, at=None):
        off = self.parity.value
        return self.inner.related(2 * x + off, 2 * y + off, at)


@dataclass(frozen=True)
class Join(CeerView):
    left: CeerView
    right: CeerView

    def related(self, x, y, at=None):
        if x % 2 != y % 2:
            return False
        side = self.left if x % 2 == 0 else self.right
        return side.related(x // 2, y // 2, at)


@dataclass(frozen=True)
class FiniteK(CeerView):
    k: int

    def related(self, x, y, at=None):
        return x % self.k == y % self.k


@dataclass(frozen=True)
class Relation(CeerView):
    """A view backed by a plain predicate; handy for fixtures and oracles."""

    pred: Any

    def related(self, x, y, at=None):
        return x == y or bool(self.pred(x, y))


def as_view(c) -> CeerView:
    return c if isinstance(c, CeerView) else Direct(c)


def uniform_join(r, s) -> CeerView:
    return Join(as_view(r), as_view(s))


def restrict_half(z, parity: Parity) -> CeerView:
    if parity is Parity.ANY:
        raise ValueError("restrict_half needs EVEN or ODD")
    z = as_view(z)
    if isinstance(z, Join):
        return z.left if parity is Parity.EVEN else z.right
    return Half(z, parity)


def id_k(k: int) -> CeerView:
    if k < 1:
        raise ValueError("id_k needs k >= 1; pass the ceer itself for the k = 0 case")
    return FiniteK(k)


class ReductionTable:
    """Partial map on the naturals whose entries never change once defined."""

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> None:
        self._value: dict[int, int] = {}
        self._defined_at: dict[int, Any] = {}
        self._last_time = None
        items = entries.items() if isinstance(entries, Mapping) else entries
        for x, v in items:
            self.define(x, v)

    @classmethod
    def from_triples(cls, triples: Iterable[Iterable[int]]) -> "ReductionTable":
        table = cls()
        for x, v, t in sorted((tuple(r) for r in triples), key=lambda r: (r[2], r[0])):
            table.define(x, v, TimePoint(t))
        return table

    def define(self, x: int, v: int, at: Any = None) -> None:
        if x in self._value:
            if self._value[x] != v:
                raise ValueError(f"f({x}) already defined as {self._value[x]}, not {v}")
            return
        if at is not None:
            if self._last_time is not None and at < self._last_time:
                raise ValueError(f"definition time {at} precedes {self._last_time}")
            self._last_time = at
        self._value[x] = v
        self._defined_at[x] = at

    def get(self, x: int, default=None):
        return self._value.get(x, default)

    def defined_at(self, x: int):
        return self._defined_at.get(x)

    def __contains__(self, x: int) -> bool:
        return x in self._value

    def __len__(self) -> int:
        return len(self._value)

    def __getitem__(self, x: int) -> int:
        return self._value[x]

    def items(self):
        return self._value.items()

    def domain(self) -> set[int]:
        return set(self._value)

    def range(self) -> set[int]:
        return set(self._value.values())

    def orbit(self, x: int, steps: int) -> list[int]:
        """``[x, f(x), ..., f^(n)(x)]`` for as many steps (<= ``steps``) as are defined."""
        out = [x]
        while len(out) <= steps and out[-1] in self._value:
            out.append(self._value[out[-1]])
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, ReductionTable) and self._value == other._value

    def __repr__(self) -> str:
        return f"ReductionTable({dict(sorted(self._value.items()))})"


def check_reduction(f, r, s, domain: Iterable[int]) -> Verdict:
    """Test ``x R y <-> f(x) S f(y)`` on every pair of ``domain`` where f is defined."""
    r, s = as_view(r), as_view(s)
    dom = sorted(set(domain))
    defined = [x for x in dom if f.get(x) is not None]
    for x, y in itertools.combinations(defined, 2):
        fx, fy = f.get(x), f.get(y)
        if r.related(x, y) != s.related(fx, fy):
            return Verdict.fails((x, y), f"x R y is {r.related(x, y)} but f(x) S f(y) is {s.related(fx, fy)}", dom)
    missing = [x for x in dom if f.get(x) is None]
    if missing:
        return Verdict.undetermined(tuple(missing), "f undefined on part of the domain", dom)
    return Verdict.holds(dom)


def check_transversal(w: Iterable[int], r) -> Verdict:
    r = as_view(r)
    members = sorted(set(w))
    for x, y in itertools.combinations(members, 2):
        if r.related(x, y):
            return Verdict.fails((x, y), "two members of the set are related", members)
    return Verdict.holds(members)


@dataclass(frozen=True)
class HitReport:
    bound: int
    representatives: tuple[int, ...]
    missed: frozenset[int]
    hits: dict = field(default_factory=dict)


def class_hit_report(f, r, bound: int, domain: Iterable[int] | None = None) -> HitReport:
    """Which classes meeting ``{0..bound}`` contain some defined value of f.

    Missing a class here is evidence at this stage only; it proves nothing
    about later stages.
    """
    r = as_view(r)
    if domain is None:
        values = set(f.range()) if hasattr(f, "range") else set(f.values())
    else:
        values = {f.get(x) for x in domain if f.get(x) is not None}
    reps: list[int] = []
    for n in range(bound + 1):
        if not any(r.related(n, rep) for rep in reps):
            reps.append(n)
    hits = {}
    for rep in reps:
        hit = next((v for v in sorted(values) if r.related(v, rep)), None)
        if hit is not None:
            hits[rep] = hit
    missed = frozenset(rep for rep in reps if rep not in hits)
    return HitReport(bound, tuple(reps), missed, hits)
