"""Stage-indexed equivalence relations on the naturals.

A :class:`StageCeer` starts as the identity and only ever grows by
collapsing classes.  Every collapse is stamped with a :class:`TimePoint`
and kept in an append-only log, so the relation can be queried as it stood
at any earlier time.
"""
from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from typing import Iterable

TICK_MAX = 2**62


@dataclass(frozen=True, order=True)
class TimePoint:
    stage: int
    tick: int = 0

    @classmethod
    def end_of(cls, stage: int) -> "TimePoint":
        return cls(stage, TICK_MAX)

    def as_list(self) -> list[int]:
        return [self.stage, self.tick]


class Clock:
    """Monotone (stage, tick) counter, shareable between several ceers."""

    def __init__(self, stage: int = 0) -> None:
        self._now = TimePoint(stage, 0)

    def now(self) -> TimePoint:
        return self._now

    def begin_stage(self, stage: int) -> TimePoint:
        if stage < self._now.stage:
            raise ValueError(f"stage {stage} precedes clock {self._now}")
        self._now = TimePoint(stage, 0)
        return self._now

    def advance(self) -> TimePoint:
        self._now = TimePoint(self._now.stage, self._now.tick + 1)
        return self._now


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1
    ANY = 2

    def admits(self, n: int) -> bool:
        return self is Parity.ANY or n % 2 == self.value


@dataclass(frozen=True)
class CollapseEvent:
    time: TimePoint
    pairs: tuple[tuple[int, int], ...]
    cause: str


@dataclass(frozen=True)
class CollapseReport:
    time: TimePoint
    merges: tuple[tuple[int, int], ...]

    @property
    def changed(self) -> bool:
        return bool(self.merges)


class DisjointSet:
    """Union-find over the naturals; untouched numbers are implicit singletons.

    Member lists are kept per root so whole classes can be listed cheaply.
    """

    def __init__(self) -> None:
        self._parent: dict[int, int] = {}
        self._members: dict[int, list[int]] = {}

    def find(self, x: int) -> int:
        parent = self._parent
        if x not in parent:
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        ma = self._members.get(ra, [ra])
        mb = self._members.get(rb, [rb])
        # larger class keeps its root; ties go to the smaller root
        if (len(ma), -ra) < (len(mb), -rb):
            ra, rb, ma, mb = rb, ra, mb, ma
        self._parent.setdefault(ra, ra)
        self._parent[rb] = ra
        ma.extend(mb)
        self._members[ra] = ma
        self._members.pop(rb, None)
        return True

    def same(self, a: int, b: int) -> bool:
        return a == b or self.find(a) == self.find(b)

    def members(self, x: int) -> list[int]:
        return list(self._members.get(self.find(x), [x]))

    def nontrivial_classes(self) -> list[list[int]]:
        return sorted(sorted(m) for m in self._members.values())

    def copy(self) -> "DisjointSet":
        other = DisjointSet()
        other._parent = dict(self._parent)
        other._members = {r: list(m) for r, m in self._members.items()}
        return other


class StageCeer:
    """An equivalence relation built from the identity by timestamped collapses."""

    def __init__(self, clock: Clock | None = None) -> None:
        self.clock = clock if clock is not None else Clock()
        self.allocated_max = 0
        self.events: list[CollapseEvent] = []
        self._uf = DisjointSet()
        self._event_times: list[TimePoint] = []
        self._snapshot: tuple[int, DisjointSet] | None = None

    @classmethod
    def from_triples(cls, triples: Iterable[Iterable[int]], cause: str = "enumeration") -> "StageCeer":
        """Build a ceer from ``(x, y, stage)`` collapse triples, one event per stage."""
        by_stage: dict[int, list[tuple[int, int]]] = {}
        for x, y, s in triples:
            by_stage.setdefault(int(s), []).append((int(x), int(y)))
        ceer = cls()
        for s in sorted(by_stage):
            ceer.clock.begin_stage(max(s, ceer.clock.now().stage))
            ceer.collapse(by_stage[s], cause)
        return ceer

    def mention(self, *numbers: int) -> None:
        for n in numbers:
            if n > self.allocated_max:
                self.allocated_max = n

    def collapse(self, pairs: Iterable[tuple[int, int]], cause: str) -> CollapseReport:
        pairs = tuple(sorted({(int(a), int(b)) for a, b in pairs}))
        time = self.clock.advance()
        if not pairs:
            return CollapseReport(time, ())
        merges = []
        for a, b in pairs:
            if a < 0 or b < 0:
                raise ValueError(f"negative number in pair {(a, b)}")
            self.mention(a, b)
            if self._uf.union(a, b):
                merges.append((a, b))
        self.events.append(CollapseEvent(time, pairs, cause))
        self._event_times.append(time)
        return CollapseReport(time, tuple(merges))

    def _as_of(self, at: TimePoint | None) -> DisjointSet:
        if at is None:
            return self._uf
        n = bisect.bisect_right(self._event_times, at)
        if n == len(self.events):
            return self._uf
        if self._snapshot is None or self._snapshot[0] != n:
            uf = DisjointSet()
            for ev in self.events[:n]:
                for a, b in ev.pairs:
                    uf.union(a, b)
            self._snapshot = (n, uf)
        return self._snapshot[1]

    def related(self, x: int, y: int, at: TimePoint | None = None) -> bool:
        return x == y or self._as_of(at).same(x, y)

    def find(self, x: int) -> int:
        return self._uf.find(x)

    def class_members(self, x: int, at: TimePoint | None = None) -> set[int]:
        return set(self._as_of(at).members(x))

    def nontrivial_classes(self) -> list[list[int]]:
        return self._uf.nontrivial_classes()

    def snapshot(self, at: TimePoint | None = None) -> DisjointSet:
        """Frozen copy of the relation at ``at``; safe to hand to other readers."""
        return self._as_of(at).copy()


def create_identity(clock: Clock | None = None) -> StageCeer:
    return StageCeer(clock)


def collapse(c: StageCeer, pairs: Iterable[tuple[int, int]], cause: str) -> CollapseReport:
    return c.collapse(pairs, cause)


def related(c: StageCeer, x: int, y: int, at: TimePoint | None = None) -> bool:
    return c.related(x, y, at)


def class_members(c: StageCeer, x: int, at: TimePoint | None = None) -> set[int]:
    return c.class_members(x, at)


def fresh(c: StageCeer, parity: Parity, stage: int) -> int:
    """Least number of ``parity`` above both ``stage + 1`` and every mentioned number."""
    n = max(stage + 1, c.allocated_max) + 1
    while not parity.admits(n):
        n += 1
    c.mention(n)
    return n
