"""Replay a join trace from its events alone and check the invariants at every time.

Nothing here calls back into the construction: the replay rebuilds Z, f,
tags and requirement phases from the event stream, so a hand-edited trace is
judged on what it says, not on what the construction would have done.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..kernel import DisjointSet, TimePoint
from ..oracles import family_from_dict, phi_at
from ..trace import Checker, Report, TraceDocument
from .construction import OFFSET, JoinConstruction

CHECKS = [
    "active-sets-disjoint",
    "related-active-are-images",
    "no-cross-parity-collapse",
    "reduction-omits-zero-class",
    "single-actor",
    "tag-respect",
]

_RELATION_CHANGES = {"collapse", "f-extend", "phase-change", "param-cancel"}


@dataclass(frozen=True)
class ActiveSets:
    D: frozenset[int]   # partners w~ awaiting phi_j(w)
    E: frozenset[int]   # substitutes k~' awaiting phi_j(k')
    I: frozenset[int]   # range of f


def _code(name: str, u: int) -> int:
    return 2 * u + OFFSET[name[0]]


class JoinReplay:
    def __init__(self, header: dict) -> None:
        cfg = header.get("config", {})
        self.free_parity = 1 if cfg.get("free_parity", "odd") == "odd" else 0
        self.finite = bool(cfg.get("finite_priority", False))
        self.uf = DisjointSet()
        self.f: dict[int, int] = {}
        self.pre: dict[int, int] = {}
        self.tags: dict[int, str] = {}
        self.phase: dict[str, str] = {}
        self.params: dict[str, dict] = {}
        self.outcome: dict[str, str | None] = {}
        self.D: dict[str, int] = {}
        self.E: dict[str, int] = {}
        self.allocated = 0
        self.stage = 0
        self.acts = 0
        self.time = TimePoint(0, 0)

    def _mention(self, *ns: int) -> None:
        for n in ns:
            if n > self.allocated:
                self.allocated = n

    def _refresh_active(self, name: str) -> None:
        self.D.pop(name, None)
        self.E.pop(name, None)
        ph, pr = self.phase.get(name), self.params.get(name, {})
        if ph == "await-partner" and "w" in pr:
            self.D[name] = _code(name, pr["w"])
        elif ph == "await-kprime" and "kprime" in pr:
            self.E[name] = _code(name, pr["kprime"])

    def apply(self, ev: dict, chk: Checker | None = None) -> None:
        kind = ev["kind"]
        self.time = TimePoint(*ev["time"])
        if kind == "stage":
            self.stage = ev["stage"]
            self.acts = 0
        elif kind == "act":
            self.acts += 1
            self.phase.setdefault(ev["req"], "initialized")
            self.params.setdefault(ev["req"], {})
            if chk is not None and self.acts > 1:
                chk.fail("single-actor", {"stage": self.stage, "req": ev["req"]},
                         "more than one requirement acted in a stage")
        elif kind == "collapse":
            for a, b in ev["pairs"]:
                self._mention(a, b)
                if chk is not None and a % 2 != b % 2:
                    chk.fail("no-cross-parity-collapse", [a, b],
                             f"collapse at {ev['time']} relates an even and an odd number")
                self.uf.union(a, b)
        elif kind == "param-assign":
            self.params.setdefault(ev["req"], {})[ev["name"]] = ev["value"]
            self._mention(ev["code"])
        elif kind == "param-cancel":
            name = ev["req"]
            self.phase[name] = "initialized"
            self.params[name] = {}
            self.outcome[name] = None
            self._refresh_active(name)
        elif kind == "phase-change":
            name = ev["req"]
            self.phase[name] = ev["phase"]
            self.params[name] = dict(ev.get("params", {}))
            self.outcome[name] = ev.get("outcome")
            self._refresh_active(name)
        elif kind == "f-extend":
            x, v = ev["x"], ev["value"]
            self._mention(x, v)
            if chk is not None and ev.get("mode") == "extend":
                tag = self.tags.get(x)
                want = {"X": 0, "Y": 1}[tag] if tag else self.free_parity
                if v % 2 != want:
                    chk.fail("tag-respect", [x, v], f"f({x}) has the wrong parity for tag {tag or 'free'}")
            self.f[x] = v
            self.pre[v] = x
            if ev.get("tag"):
                self.tags[v] = ev["tag"]
        elif kind == "tag":
            for c in ev["codes"]:
                self.tags[c] = ev["tag"]
            self._mention(*ev["codes"])
        elif kind == "observe":
            self._mention(ev["code"])
        elif kind == "mention":
            self._mention(*ev["numbers"])
        if chk is not None and kind in _RELATION_CHANGES:
            self.check_now(chk)

    # -- checks ------------------------------------------------------------
    def check_now(self, chk: Checker) -> None:
        image = self.pre
        d, e = set(self.D.values()), set(self.E.values())
        for a, b, label in ((d, e, "D/E"), (d, image, "D/I"), (e, image, "E/I")):
            common = sorted(x for x in a if x in b)
            if common:
                chk.fail("active-sets-disjoint", {"time": self.time.as_list(), "sets": label, "number": common[0]},
                         f"{label} share a number")
        groups: dict[int, list[int]] = {}
        for x in sorted(d | e | set(image)):
            groups.setdefault(self.uf.find(x), []).append(x)
        for members in groups.values():
            if len(members) < 2:
                continue
            first = members[0]
            for y in members[1:]:
                if first not in image or y not in image or self.uf.find(image[first]) != self.uf.find(image[y]):
                    chk.fail("related-active-are-images", {"time": self.time.as_list(), "pair": [first, y]},
                             "related active numbers are not images of related numbers")
                    break
        zero = self.uf.find(0)
        for v in image:
            if self.uf.find(v) == zero:
                chk.fail("reduction-omits-zero-class", {"time": self.time.as_list(), "image": v, "of": image[v]},
                         "the class of 0 meets the range of f")
                break

    def check_stage_end(self, chk: Checker) -> None:
        if self.stage and self.acts == 0 and not self.finite:
            chk.fail("single-actor", {"stage": self.stage}, "no requirement acted")
        seen: dict[int, tuple[int, int]] = {}
        back: dict[int, int] = {}
        for x in sorted(self.f):
            rx, rv = self.uf.find(x), self.uf.find(self.f[x])
            if rx in seen and seen[rx][1] != rv:
                chk.fail("reduction-omits-zero-class", {"stage": self.stage, "pair": [seen[rx][0], x]},
                         "related numbers with unrelated images")
                return
            if rv in back and back[rv] != rx:
                chk.fail("reduction-omits-zero-class", {"stage": self.stage, "pair": [self._any(back[rv]), x]},
                         "unrelated numbers with related images")
                return
            seen.setdefault(rx, (x, rv))
            back.setdefault(rv, rx)

    def _any(self, root: int) -> int:
        return min(x for x in self.f if self.uf.find(x) == root)

    def active_sets(self) -> ActiveSets:
        return ActiveSets(frozenset(self.D.values()), frozenset(self.E.values()), frozenset(self.pre))

    def summary(self) -> dict:
        tags_sorted = sorted([c, t] for c, t in self.tags.items())
        return {
            "stage": self.stage,
            "allocated_max": self.allocated,
            "requirements": [
                {"req": n, "phase": self.phase[n], "params": self.params.get(n, {}), "outcome": self.outcome.get(n)}
                for n in self.phase
            ],
            "f": sorted([x, v] for x, v in self.f.items()),
            "tags": tags_sorted,
            "classes": self.uf.nontrivial_classes(),
        }


def _doc(state) -> TraceDocument:
    return state.document() if isinstance(state, JoinConstruction) else state


def verify(state) -> Report:
    """Replay every event; check disjointness, images, parity, reduction and actors."""
    doc = _doc(state)
    rp = JoinReplay(doc.header)
    chk = Checker(CHECKS)
    for ev in doc.events:
        if ev["kind"] == "stage":
            rp.check_stage_end(chk)
        rp.apply(ev, chk)
    rp.check_stage_end(chk)
    return chk.report()


def replay(doc: TraceDocument, until: TimePoint | None = None) -> JoinReplay:
    rp = JoinReplay(doc.header)
    for ev in doc.events:
        if until is not None and TimePoint(*ev["time"]) > until:
            break
        rp.apply(ev)
    return rp


def active_sets(state, at: TimePoint) -> ActiveSets:
    doc = _doc(state)
    last = TimePoint(*doc.events[-1]["time"]) if doc.events else TimePoint(0, 0)
    if at > last and at.stage > last.stage:
        raise ValueError(f"time {at} is beyond the trace (last event at {last})")
    return replay(doc, at).active_sets()


def diagonal_outcome(doc: TraceDocument, req: str) -> dict:
    """Judge a satisfied diagonalization from the trace: exactly one of
    ``z ~ w`` and ``phi_j(z) ~ phi_j(w)`` must hold at the final stage."""
    rp = replay(doc)
    params = rp.params.get(req, {})
    if rp.phase.get(req) != "satisfied" or "z" not in params or "w" not in params:
        return {"req": req, "phase": rp.phase.get(req), "holds": False, "reason": "no recorded z, w"}
    fam = family_from_dict(doc.header["family"])
    j = int(req[2:].split(",")[0])
    z, w = params["z"], params["w"]
    pz, pw = phi_at(fam, j, z, rp.stage), phi_at(fam, j, w, rp.stage)
    zw = rp.uf.same(_code(req, z), _code(req, w))
    images = pz is not None and pw is not None and rp.uf.same(_code(req, pz), _code(req, pw))
    return {
        "req": req, "phase": "satisfied", "z": z, "w": w, "phi_z": pz, "phi_w": pw,
        "z_related_w": zw, "images_related": images, "holds": zw != images,
    }
