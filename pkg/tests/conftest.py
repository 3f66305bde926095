"""Shared helpers for the test suite: corpus generation and common checks."""

from __future__ import annotations

import random

from modalsat.formula import FModal, Atom, modal_atoms
from modalsat.logics import LogicConfig
from modalsat.sampling import random_formula

ALL_LOGICS = ("E", "M", "K", "KD", "COAL", "GML", "MAJ", "PML")
ARITH = ("GML", "MAJ", "PML")


def config_for(logic: str) -> LogicConfig:
    return LogicConfig(logic=logic)


def corpus(logic: str, count: int, seed: int, max_depth: int = 3, size_budget: int = 9):
    """Deterministic random formula corpus for one logic."""
    cfg = config_for(logic)
    rng = random.Random(seed)
    return cfg, [
        random_formula(rng, cfg, max_depth=max_depth, size_budget=size_budget)
        for _ in range(count)
    ]


def proper_atoms(f):
    return [
        a
        for a in modal_atoms(f)
        if isinstance(a, FModal) and not isinstance(a.op, Atom)
    ]


def max_atoms_per_level(f) -> int:
    """Largest number of distinct proper modal atoms at any one level."""
    here = proper_atoms(f)
    best = len(here)
    for a in here:
        best = max(best, max_atoms_per_level(a.arg))
    return best
