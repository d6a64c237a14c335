"""Non-self-full join construction and its trace verifier."""
from .construction import JoinConstruction, Phase, Requirement, dovetail, init, run, stage
from .replay import CHECKS, ActiveSets, active_sets, diagonal_outcome, replay, verify

__all__ = [
    "CHECKS", "ActiveSets", "JoinConstruction", "Phase", "Requirement",
    "active_sets", "diagonal_outcome", "dovetail", "init", "replay", "run", "stage", "verify",
]
