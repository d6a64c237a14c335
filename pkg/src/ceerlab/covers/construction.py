"""Finitely many pairwise incomparable ceers ``E_0..E_{L-1}`` above a base ceer ``A``.

Every ``E_l`` carries ``A`` on the even numbers (``2x ~ 2y`` iff ``x ~_A y``)
and adds odd numbers that three kinds of requirement push around:

``ccr(l,j)``
    copy a pair separated by ``V_j`` (the complement of ``W_j``) into a collapse
    of ``E_l``, so ``E_l`` refines no co-c.e. relation with two or more classes.
``sf(i,k,l)``
    if ``W_i`` meets odd classes of ``E_l`` without evens, pull one into ``[k]``.
``diag(j,l,l2)``
    keep ``phi_j`` from reducing ``E_l`` to ``E_l2``, copying a stand-in ceer
    ``T`` onto witnesses ``a_0, a_1, ...`` while waiting.

Requirements are scanned in priority order each stage; the first one to act
stops the stage and initializes everything below it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from ..kernel import Clock, Parity, StageCeer, TimePoint, fresh
from ..oracles import OracleFamily, pair, phi_at, unpair
from ..trace import TraceDocument

KIND_RANK = {"ccr": 0, "sf": 1, "diag": 2}


@dataclass
class CoverReq:
    kind: str
    idx: tuple[int, ...]
    phase: str = "initialized"
    params: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return f"{self.kind}({','.join(map(str, self.idx))})"

    @property
    def ceer(self) -> int:
        # the E_l this requirement collapses in
        return self.idx[0] if self.kind == "ccr" else self.idx[-1] if self.kind == "sf" else self.idx[1]

    def key(self) -> int:
        if self.kind == "ccr":
            inner = pair(*self.idx)
        elif self.kind == "sf":
            i, k, l = self.idx
            inner = pair(pair(i, k), l)
        else:
            j, l, l2 = self.idx
            inner = pair(pair(j, l), l2)
        return pair(KIND_RANK[self.kind], inner)


def default_requirements(num_phis: int, num_wes: int, L: int, k_max: int) -> list[CoverReq]:
    reqs = [CoverReq("ccr", (l, j)) for l in range(L) for j in range(num_wes)]
    reqs += [CoverReq("sf", (i, k, l)) for i in range(num_wes) for k in range(k_max + 1) for l in range(L)]
    reqs += [CoverReq("diag", (j, l, l2)) for j in range(num_phis) for l in range(L) for l2 in range(L) if l != l2]
    return sorted(reqs, key=CoverReq.key)


def parse_name(name: str) -> CoverReq:
    kind, rest = name.rstrip(")").split("(")
    return CoverReq(kind, tuple(int(v) for v in rest.split(",")))


class CoversConstruction:
    def __init__(
        self,
        a_triples: Iterable[Iterable[int]],
        t_triples: Iterable[Iterable[int]],
        family: OracleFamily,
        L: int,
        priority: Iterable[str] | None = None,
        *,
        k_max: int = 3,
    ) -> None:
        if L < 1:
            raise ValueError("need at least one ceer (L >= 1)")
        if k_max < 0:
            raise ValueError("k_max must be >= 0")
        self.family = family
        self.L = L
        self.k_max = k_max
        self.a_triples = sorted(tuple(map(int, t)) for t in a_triples)
        self.t_triples = sorted(tuple(map(int, t)) for t in t_triples)
        self.A = StageCeer.from_triples(self.a_triples)
        self.T = StageCeer.from_triples(self.t_triples)
        default = default_requirements(len(family.phis), len(family.wes), L, k_max)
        if priority is None:
            self.reqs = default
        else:
            names = list(priority)
            if sorted(names) != sorted(r.name for r in default):
                raise ValueError("priority must list each configured requirement exactly once")
            self.reqs = [parse_name(n) for n in names]
        self.rank = {r.name: n for n, r in enumerate(self.reqs)}
        self.clock = Clock()
        self.E = [StageCeer(self.clock) for _ in range(L)]
        self.restraints: dict[str, set[tuple[int, int]]] = {}
        self.trace: list[dict] = []
        self.stage = 0
        self.allocated = 0
        # the numbers k named by sf requirements count as mentioned from the start
        self._mention(2 * k_max)

    # -- plumbing -----------------------------------------------------------
    def _mention(self, *numbers: int) -> None:
        for n in numbers:
            if n > self.allocated:
                self.allocated = n
        for e in self.E:
            e.mention(self.allocated)

    def _observe(self, *numbers: int) -> None:
        """Mention numbers read from oracles, logging any that raise the bound."""
        raised = sorted({n for n in numbers if n > self.allocated})
        if raised:
            self._mention(*raised)
            self._emit("mention", numbers=raised)

    def _new_odd(self, s: int) -> int:
        self._mention()
        n = fresh(self.E[0], Parity.ODD, s)
        self._mention(n)
        return n

    def _emit(self, kind: str, **payload) -> dict:
        t = self.clock.advance()
        ev = {"time": t.as_list(), "kind": kind, **payload}
        self.trace.append(ev)
        return ev

    def _collapse(self, l: int, pairs: list[tuple[int, int]], cause: str) -> bool:
        report = self.E[l].collapse(pairs, cause)
        self._mention(*(n for p in pairs for n in p))
        self.trace.append({
            "time": report.time.as_list(), "kind": "collapse", "ceer": l, "cause": cause,
            "pairs": [list(p) for p in sorted(pairs)], "merged": [list(p) for p in report.merges],
        })
        return report.changed

    def _set(self, r: CoverReq, phase: str, **params) -> None:
        r.phase = phase
        r.params = params
        self._emit("phase-change", req=r.name, phase=phase, params=_jsonable(params))

    def _restrain(self, r: CoverReq, l: int, numbers: list[int], permanent: bool = False) -> None:
        self.restraints.setdefault(r.name, set()).update((l, n) for n in numbers)
        self._emit("restraint", req=r.name, action="place", ceer=l, numbers=numbers, permanent=permanent)

    def _drop(self, r: CoverReq, only: int | None = None) -> None:
        held = self.restraints.get(r.name, set())
        gone = sorted(p for p in held if only is None or p[0] == only)
        if not gone:
            return
        held.difference_update(gone)
        for l in sorted({p[0] for p in gone}):
            self._emit("restraint", req=r.name, action="drop", ceer=l,
                       numbers=[n for ll, n in gone if ll == l])

    def _restrained_above(self, r: CoverReq, l: int, x: int) -> bool:
        """Whether ``[x]`` in ``E_l`` holds a number restrained by a higher requirement."""
        mine = self.rank[r.name]
        e = self.E[l]
        for owner, held in self.restraints.items():
            if self.rank[owner] < mine and any(ll == l and e.related(x, n) for ll, n in held):
                return True
        return False

    def _meets_even(self, l: int, x: int) -> bool:
        return any(n % 2 == 0 for n in self.E[l].class_members(x))

    def _initialize_below(self, r: CoverReq) -> None:
        for low in self.reqs[self.rank[r.name] + 1:]:
            if low.kind == "sf" or low.phase == "initialized":
                continue
            self._emit("param-cancel", req=low.name, phase=low.phase, params=_jsonable(low.params))
            low.phase, low.params = "initialized", {}
            self._drop(low)

    def _act(self, r: CoverReq, how: str) -> None:
        self._emit("act", req=r.name, how=how)
        self._initialize_below(r)

    # -- strategies ---------------------------------------------------------
    def _w_pairs(self, j: int, s: int) -> list[tuple[int, int]]:
        return [unpair(c) for c in sorted(self.family.wes[j].at(s))]

    def _in_w(self, j: int, x: int, y: int, s: int) -> bool:
        w = self.family.wes[j]
        return w.contains(pair(x, y), s) or w.contains(pair(y, x), s)

    def _ccr(self, r: CoverReq, s: int) -> bool:
        l, j = r.idx
        e = self.E[l]
        pairs = self._w_pairs(j, s)
        if any(e.related(a, b) for a, b in pairs):
            if r.phase == "waiting":
                self._set(r, "done", **r.params)
                self._drop(r)
            return False
        if r.phase == "done":
            return False
        chose = False
        if r.phase == "initialized":
            pick = next(((x, y) for x, y in pairs
                         if not self._restrained_above(r, l, x) and not self._restrained_above(r, l, y)), None)
            if pick is None:
                return False
            x, y = pick
            self._observe(x, y)
            self._act(r, "witness")
            z = self._new_odd(s)
            self._emit("param-assign", req=r.name, name="z", value=z, ceer=l)
            self._set(r, "waiting", x=x, y=y, z=z)
            self._restrain(r, l, [z])
            chose = True
        x, y, z = r.params["x"], r.params["y"], r.params["z"]
        target = None
        for t in (x, y):
            if self._in_w(j, t, z, s) and not self._restrained_above(r, l, t):
                target = t
                break
        if target is None:
            return chose
        if not chose:
            self._act(r, "collapse")
        self._set(r, "done", x=x, y=y, z=z, target=target)
        self._drop(r)
        self._collapse(l, [(z, target)], r.name)
        return True

    def _sf(self, r: CoverReq, s: int) -> bool:
        i, k, l = r.idx
        e = self.E[l]
        members = sorted(self.family.wes[i].at(s))
        if any(e.related(x, k) for x in members):
            return False
        if self._restrained_above(r, l, k):
            return False
        for x in members:
            if x % 2 == 1 and not self._restrained_above(r, l, x) and not self._meets_even(l, x):
                self._observe(x)
                self._act(r, "collapse")
                self._emit("param-assign", req=r.name, name="x", value=x, ceer=l)
                self._set(r, "done", x=x)
                self._collapse(l, [(x, k)], r.name)
                return True
        return False

    def _free_image(self, r: CoverReq, l2: int, v: int) -> bool:
        return not self._meets_even(l2, v) and not self._restrained_above(r, l2, v)

    def _diag(self, r: CoverReq, s: int) -> bool:
        j, l, l2 = r.idx
        if r.phase == "satisfied":
            return False
        if r.phase == "initialized":
            self._act(r, "witness")
            a = [self._new_odd(s), self._new_odd(s)]
            for n, v in enumerate(a):
                self._emit("param-assign", req=r.name, name=f"a{n}", value=v, ceer=l)
            self._set(r, "running", a=a)
            self._restrain(r, l, a)
            return True
        a = r.params["a"]
        el, el2 = self.E[l], self.E[l2]
        tnow = TimePoint.end_of(s)
        mirror = [(a[i], a[k]) for i, k in itertools.combinations(range(len(a)), 2)
                  if self.T.related(i, k, tnow) and not el.related(a[i], a[k])]
        caused = bool(mirror) and self._collapse(l, mirror, r.name)
        images = [phi_at(self.family, j, v, s) for v in a]
        self._observe(*(v for v in images if v is not None))
        for i, k in itertools.combinations(range(len(a)), 2):
            c, d = images[i], images[k]
            if c is None or d is None or el2.related(c, d):
                continue
            if self._free_image(r, l2, c) and self._free_image(r, l2, d):
                self._act(r, "diagonalize")
                self._set(r, "satisfied", a=a, i=i, k=k, c=c, d=d)
                self._drop(r)
                self._restrain(r, l2, [c, d], permanent=True)
                self._collapse(l, [(a[i], a[k])], r.name)
                return True
        # images compared in E_l2: reading the target ceer of the attempted reduction
        if all(v is not None for v in images) and all(
            el.related(a[i], a[k]) == el2.related(images[i], images[k])
            for i, k in itertools.combinations(range(len(a)), 2)
        ):
            self._act(r, "extend")
            new = self._new_odd(s)
            self._emit("param-assign", req=r.name, name=f"a{len(a)}", value=new, ceer=l)
            self._set(r, "running", a=a + [new])
            self._restrain(r, l, [new])
            return True
        if caused:
            self._act(r, "mirror")
            return True
        return False

    # -- stages -------------------------------------------------------------
    def _inject_a(self, s: int) -> None:
        for l, e in enumerate(self.E):
            pairs = [(2 * x, 2 * y) for x, y, t in self.a_triples
                     if t <= s and not e.related(2 * x, 2 * y)]
            if pairs:
                self._collapse(l, pairs, "A-injection")

    def step(self) -> "CoversConstruction":
        s = self.stage + 1
        self.clock.begin_stage(s)
        self.trace.append({"time": [s, 0], "kind": "stage", "stage": s})
        self._inject_a(s)
        handlers = {"ccr": self._ccr, "sf": self._sf, "diag": self._diag}
        for r in self.reqs:
            if handlers[r.kind](r, s):
                break
        self.stage = s
        return self

    def run(self, stages: int) -> "CoversConstruction":
        for _ in range(stages):
            self.step()
        return self

    # -- output -------------------------------------------------------------
    def header(self) -> dict:
        return {
            "scenario": "covers",
            "family": self.family.to_dict(),
            "base": [list(t) for t in self.a_triples],
            "standin": [list(t) for t in self.t_triples],
            "config": {
                "L": self.L,
                "k_max": self.k_max,
                "initial_bound": 2 * self.k_max,
                "priority": [r.name for r in self.reqs],
                "standin_note": "T is a supplied stand-in, not a universal ceer",
            },
        }

    def summary(self) -> dict:
        return {
            "stage": self.stage,
            "allocated_max": self.allocated,
            "requirements": [{"req": r.name, "phase": r.phase, "params": _jsonable(r.params)} for r in self.reqs],
            "restraints": sorted([o, l, n] for o, held in self.restraints.items() for l, n in held),
            "classes": [e.nontrivial_classes() for e in self.E],
        }

    def document(self) -> TraceDocument:
        header = self.header()
        header["config"]["stages"] = self.stage
        return TraceDocument(header, [dict(ev) for ev in self.trace], self.summary())

    def requirement(self, name: str) -> CoverReq:
        return self.reqs[self.rank[name]]


def _jsonable(params: dict) -> dict:
    return {k: list(v) if isinstance(v, (list, tuple)) else v for k, v in params.items()}


def init(a_triples, t_triples, family: OracleFamily, L: int, priority=None, **kw) -> CoversConstruction:
    return CoversConstruction(a_triples, t_triples, family, L, priority, **kw)


def stage(state: CoversConstruction) -> CoversConstruction:
    return state.step()


def run(state: CoversConstruction, stages: int) -> CoversConstruction:
    return state.run(stages)
