"""Incomparable covers of a base ceer, built by a priority construction, and their verifier."""
from .construction import CoverReq, CoversConstruction, default_requirements, init, run, stage
from .replay import CHECKS, diagonal_outcome, replay, verify

__all__ = [
    "CHECKS", "CoverReq", "CoversConstruction", "default_requirements",
    "diagonal_outcome", "init", "replay", "run", "stage", "verify",
]
