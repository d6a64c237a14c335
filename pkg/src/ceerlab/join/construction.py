"""Stage-by-stage construction of ``Z = X (+) Y`` with a reduction ``f: Z -> Z``
whose range misses the class of 0, while keeping each half self-full against
the partial functions of an :class:`~ceerlab.oracles.OracleFamily`.

Each requirement ``(side, j, k)`` tries to make ``[k]`` on its side meet the
range of ``phi_j`` or else stop ``phi_j`` from being a self-reduction of that
side.  Numbers carry bound tags that decide the parity of their future
``f``-images; tags are never released once placed (see README, "Bound tags").
"""
from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..algebra import ReductionTable
from ..kernel import Clock, Parity, StageCeer, fresh
from ..oracles import OracleFamily, pair, phi_at
from ..trace import TraceDocument

OFFSET = {"X": 0, "Y": 1}
OTHER = {"X": "Y", "Y": "X"}
TAG_PARITY = {"X": Parity.EVEN, "Y": Parity.ODD}
FREE_PARITY = {"odd": Parity.ODD, "even": Parity.EVEN}


def code(side: str, u: int) -> int:
    return 2 * u + OFFSET[side]


def half(side: str, c: int) -> int | None:
    if c % 2 != OFFSET[side]:
        return None
    return c // 2


class Phase(str, enum.Enum):
    INITIALIZED = "initialized"
    AWAIT_K = "await-k"                # phi_j(k) not yet seen off [k]
    AWAIT_KPRIME = "await-kprime"      # substitute k' waiting for phi_j(k')
    AWAIT_ORBIT = "await-orbit"        # waiting on phi_j along the orbit of x
    AWAIT_PARTNER = "await-partner"    # partner w waiting for phi_j(w)
    SATISFIED = "satisfied"


@dataclass
class Requirement:
    side: str
    j: int
    k: int
    phase: Phase = Phase.INITIALIZED
    kprime: int | None = None
    x: int | None = None
    orbit: tuple[tuple[int, int], ...] = ()   # (n, hat f^n(x)) on the own side
    z: int | None = None
    w: int | None = None
    outcome: str | None = None

    @property
    def name(self) -> str:
        return f"{self.side}({self.j},{self.k})"

    def params(self) -> dict:
        out = {}
        for key in ("kprime", "x", "z", "w"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.orbit:
            out["orbit"] = [list(p) for p in self.orbit]
        return out

    def reset(self) -> None:
        self.phase = Phase.INITIALIZED
        self.kprime = self.x = self.z = self.w = None
        self.orbit = ()
        self.outcome = None


def dovetail(num_phis: int, k_max: int | None = None) -> Iterator[tuple[str, int, int]]:
    """Requirements ``(side, j, k)`` in increasing Cantor code ``<side, <j, k>>``."""
    def stream(side_bit: int, j: int):
        ks = itertools.count() if k_max is None else range(k_max + 1)
        for k in ks:
            yield pair(side_bit, pair(j, k)), "XY"[side_bit], j, k

    streams = [stream(b, j) for b in (0, 1) for j in range(num_phis)]
    for _, side, j, k in heapq.merge(*streams):
        yield side, j, k


class JoinConstruction:
    def __init__(
        self,
        family: OracleFamily,
        priority: Iterable[tuple[str, int, int]] | None = None,
        *,
        k_max: int | None = None,
        free_parity: str = "odd",
    ) -> None:
        if free_parity not in FREE_PARITY:
            raise ValueError(f"free_parity must be 'odd' or 'even', not {free_parity!r}")
        self.family = family
        self.free_parity = free_parity
        self.k_max = k_max
        if priority is None:
            self.explicit_priority = None
            self._pending: Iterator = dovetail(len(family.phis), k_max)
        else:
            prio = [(str(s), int(j), int(k)) for s, j, k in priority]
            _check_priority(prio, len(family.phis), k_max)
            self.explicit_priority = prio
            self._pending = iter(prio)
        self.finite = priority is not None or k_max is not None or not family.phis
        self.clock = Clock()
        self.Z = StageCeer(self.clock)
        self.f = ReductionTable()
        self.bounds: dict[int, str] = {}
        self.reqs: list[Requirement] = []
        self.trace: list[dict] = []
        self.stage = 0
        self._next_v = 0

    # -- plumbing -----------------------------------------------------------
    def _emit(self, kind: str, **payload) -> dict:
        t = self.clock.advance()
        ev = {"time": t.as_list(), "kind": kind, **payload}
        self.trace.append(ev)
        return ev

    def _collapse(self, pairs: list[tuple[int, int]], cause: str) -> bool:
        report = self.Z.collapse(pairs, cause)
        self.trace.append({
            "time": report.time.as_list(),
            "kind": "collapse",
            "cause": cause,
            "pairs": [list(p) for p in sorted(pairs)],
            "merged": [list(p) for p in report.merges],
        })
        return report.changed

    def _phi(self, j: int, u: int, s: int) -> int | None:
        return phi_at(self.family, j, u, s)

    def _observe(self, r: Requirement, u: int, s: int) -> int:
        v = self._phi(r.j, u, s)
        c = code(r.side, v)
        self.Z.mention(c)
        self._emit("observe", req=r.name, phi=r.j, input=u, value=v, code=c)
        return v

    def _rel(self, side: str, u: int, v: int) -> bool:
        return self.Z.related(code(side, u), code(side, v))

    def _new_element(self, side: str, s: int) -> int:
        # code above 2s+3 keeps the element itself above s+1
        c = fresh(self.Z, TAG_PARITY[side], 2 * s + 2)
        return half(side, c)

    def _assign(self, r: Requirement, name: str, value: int) -> None:
        setattr(r, name, value)
        self._emit("param-assign", req=r.name, name=name, value=value, code=code(r.side, value))

    def _set_phase(self, r: Requirement, phase: Phase, outcome: str | None = None) -> None:
        r.phase = phase
        r.outcome = outcome
        ev = self._emit("phase-change", req=r.name, phase=phase.value, params=r.params())
        if outcome:
            ev["outcome"] = outcome

    def _tag(self, c: int, tag: str, r: Requirement) -> None:
        codes = self.f.orbit(c, len(self.f) + 1)
        for u in codes:
            self.bounds[u] = tag
        self.Z.mention(*codes)
        self._emit("tag", req=r.name, tag=tag, codes=codes)

    def _mirror(self, src: int, dst: int, r: Requirement, s: int) -> None:
        """Give ``dst`` an f-orbit with the parity pattern of ``src``'s defined orbit."""
        prev = dst
        for c in self.f.orbit(src, len(self.f) + 1)[1:]:
            val = fresh(self.Z, Parity(c % 2), s)
            t = self.clock.advance()
            self.f.define(prev, val, t)
            self.trace.append({"time": t.as_list(), "kind": "f-extend", "x": prev,
                               "value": val, "mode": "mirror", "req": r.name})
            prev = val

    # -- requirement scheduling ---------------------------------------------
    def _requires_attention(self, r: Requirement, s: int) -> bool:
        if r.phase is Phase.INITIALIZED:
            return True
        if r.phase is Phase.AWAIT_K:
            v = self._phi(r.j, r.k, s)
            return v is not None and not self._rel(r.side, v, r.k)
        if r.phase is Phase.AWAIT_KPRIME:
            return self._phi(r.j, r.kprime, s) is not None
        if r.phase is Phase.AWAIT_ORBIT:
            return all(self._phi(r.j, u, s) is not None for _, u in r.orbit)
        if r.phase is Phase.AWAIT_PARTNER:
            return self._phi(r.j, r.w, s) is not None
        return False

    def _select(self, s: int) -> Requirement | None:
        for r in self.reqs:
            if self._requires_attention(r, s):
                return r
        nxt = next(self._pending, None)
        if nxt is None:
            return None
        r = Requirement(*nxt)
        self.reqs.append(r)
        return r

    def _initialize_below(self, actor: Requirement) -> None:
        idx = self.reqs.index(actor)
        for r in self.reqs[idx + 1:]:
            if r.phase is not Phase.INITIALIZED:
                self._emit("param-cancel", req=r.name, params=r.params(), phase=r.phase.value)
                r.reset()

    # -- the strategy -------------------------------------------------------
    def _act(self, r: Requirement, s: int) -> None:
        if r.phase is Phase.INITIALIZED:
            kc = code(r.side, r.k)
            tag = self.bounds.get(kc)
            if tag != r.side:
                if tag is None:
                    self._tag(kc, OTHER[r.side], r)
                self._set_phase(r, Phase.AWAIT_K)
                return
            self._assign(r, "kprime", self._new_element(r.side, s))
            kpc = code(r.side, r.kprime)
            self._mirror(kc, kpc, r, s)
            self._tag(kpc, r.side, r)
            self._set_phase(r, Phase.AWAIT_KPRIME)
        elif r.phase is Phase.AWAIT_K:
            self._observe(r, r.k, s)
            self._start_diagonal(r, r.k, s)
        elif r.phase is Phase.AWAIT_KPRIME:
            v = self._observe(r, r.kprime, s)
            if self._rel(r.side, v, r.kprime):
                self._set_phase(r, Phase.SATISFIED, "kprime-merged")
                self._collapse([(code(r.side, r.kprime), code(r.side, r.k))], r.name)
            else:
                self._tag(code(r.side, r.kprime), OTHER[r.side], r)
                self._start_diagonal(r, r.kprime, s)
        elif r.phase is Phase.AWAIT_ORBIT:
            self._pick_z(r, s)
        elif r.phase is Phase.AWAIT_PARTNER:
            pz = self._observe(r, r.z, s)
            pw = self._observe(r, r.w, s)
            if self._rel(r.side, pz, pw):
                self._set_phase(r, Phase.SATISFIED, "images-related")
            else:
                self._set_phase(r, Phase.SATISFIED, "collapsed")
                self._collapse([(code(r.side, r.z), code(r.side, r.w))], r.name)

    def _own_orbit(self, side: str, u: int) -> list[tuple[int, int]]:
        orbit = self.f.orbit(code(side, u), len(self.f) + 1)
        return [(n, half(side, c)) for n, c in enumerate(orbit) if c % 2 == OFFSET[side]]

    def _start_diagonal(self, r: Requirement, x: int, s: int) -> None:
        self._assign(r, "x", x)
        orbit = self._own_orbit(r.side, x)
        px = self._phi(r.j, x, s)
        if all(not self._rel(r.side, px, u) for _, u in orbit):
            self._pick_partner(r, x, s)
        else:
            r.orbit = tuple(orbit)
            self._set_phase(r, Phase.AWAIT_ORBIT)

    def _pick_z(self, r: Requirement, s: int) -> None:
        images = {}
        for _, u in r.orbit:
            images[u] = self._observe(r, u, s)
        for _, u in r.orbit:
            if all(not self._rel(r.side, images[u], v) for _, v in self._own_orbit(r.side, u)):
                self._pick_partner(r, u, s)
                return
        # no usable z: the finite orbit already witnesses a hit or a failure
        if any(self._rel(r.side, images[u], r.x) for _, u in r.orbit):
            outcome = "range-hit"
        else:
            outcome = "unclassified"
            for (_, a), (_, b) in itertools.combinations(r.orbit, 2):
                if self._rel(r.side, a, b) != self._rel(r.side, images[a], images[b]):
                    outcome = "not-a-reduction"
                    break
        self._set_phase(r, Phase.SATISFIED, outcome)

    def _pick_partner(self, r: Requirement, z: int, s: int) -> None:
        self._assign(r, "z", z)
        self._assign(r, "w", self._new_element(r.side, s))
        wc = code(r.side, r.w)
        self._mirror(code(r.side, z), wc, r, s)
        self._tag(wc, OTHER[r.side], r)
        self._set_phase(r, Phase.AWAIT_PARTNER)

    # -- end of stage -------------------------------------------------------
    def _extend_f(self, s: int) -> None:
        while self._next_v in self.f:
            self._next_v += 1
        v = self._next_v
        tag = self.bounds.get(v)
        parity = TAG_PARITY[tag] if tag else FREE_PARITY[self.free_parity]
        self.Z.mention(v)
        val = fresh(self.Z, parity, s)
        t = self.clock.advance()
        self.f.define(v, val, t)
        ev = {"time": t.as_list(), "kind": "f-extend", "x": v, "value": val, "mode": "extend"}
        if tag:
            self.bounds[val] = tag
            ev["tag"] = tag
        self.trace.append(ev)

    def _close(self) -> None:
        changed = True
        while changed:
            changed = False
            first: dict[int, int] = {}
            for x in sorted(self.f.domain()):
                root, fx = self.Z.find(x), self.f[x]
                if root not in first:
                    first[root] = fx
                elif not self.Z.related(first[root], fx):
                    self._collapse([(first[root], fx)], "f-closure")
                    changed = True

    def step(self) -> "JoinConstruction":
        s = self.stage + 1
        self.clock.begin_stage(s)
        self.trace.append({"time": [s, 0], "kind": "stage", "stage": s})
        actor = self._select(s)
        if actor is not None:
            trigger = "initialized" if actor.phase is Phase.INITIALIZED else "converged"
            self._emit("act", req=actor.name, trigger=trigger)
            self._initialize_below(actor)
            self._act(actor, s)
        self._extend_f(s)
        self._close()
        self.stage = s
        return self

    def run(self, stages: int) -> "JoinConstruction":
        for _ in range(stages):
            self.step()
        return self

    # -- output -------------------------------------------------------------
    def header(self) -> dict:
        return {
            "scenario": "join",
            "family": self.family.to_dict(),
            "config": {
                "free_parity": self.free_parity,
                "k_max": self.k_max,
                "finite_priority": self.finite,
                "priority": self.explicit_priority and [list(p) for p in self.explicit_priority],
            },
        }

    def summary(self) -> dict:
        return {
            "stage": self.stage,
            "allocated_max": self.Z.allocated_max,
            "requirements": [
                {"req": r.name, "phase": r.phase.value, "params": r.params(), "outcome": r.outcome}
                for r in self.reqs
            ],
            "f": sorted([x, v] for x, v in self.f.items()),
            "tags": sorted([c, t] for c, t in self.bounds.items()),
            "classes": self.Z.nontrivial_classes(),
        }

    def document(self) -> TraceDocument:
        header = self.header()
        header["config"]["stages"] = self.stage
        return TraceDocument(header, [dict(ev) for ev in self.trace], self.summary())

    def requirement(self, name: str) -> Requirement:
        for r in self.reqs:
            if r.name == name:
                return r
        raise KeyError(name)


def _check_priority(prio: list[tuple[str, int, int]], num_phis: int, k_max: int | None) -> None:
    seen = set()
    for p in prio:
        side, j, k = p
        if side not in OFFSET or not 0 <= j < num_phis or k < 0:
            raise ValueError(f"bad requirement {p!r} for a family with {num_phis} functions")
        if p in seen:
            raise ValueError(f"requirement {p!r} listed twice")
        seen.add(p)
    bound = k_max if k_max is not None else max((k for _, _, k in prio), default=-1)
    missing = [(s, j, k) for s in OFFSET for j in range(num_phis) for k in range(bound + 1)
               if (s, j, k) not in seen]
    if missing:
        raise ValueError(f"priority list omits {missing[0]!r}")


def init(family: OracleFamily, priority=None, **kw) -> JoinConstruction:
    return JoinConstruction(family, priority, **kw)


def stage(state: JoinConstruction) -> JoinConstruction:
    return state.step()


def run(state: JoinConstruction, stages: int) -> JoinConstruction:
    return state.run(stages)
