"""The alternating satisfiability solver."""

import random

import pytest

from modalsat.formula import neg_fold, parse, pretty
from modalsat.logics import LogicConfig
from modalsat.oracle import brute_force_sat
from modalsat.sampling import random_formula
from modalsat.solver import Solver, satisfiable

from conftest import ALL_LOGICS


def _sat(text, logic, n_agents=2):
    cfg = LogicConfig(logic=logic, n_agents=n_agents)
    return satisfiable(parse(text, n_agents), cfg)


def _valid(text, logic, n_agents=2):
    cfg = LogicConfig(logic=logic, n_agents=n_agents)
    return not satisfiable(neg_fold(parse(text, n_agents)), cfg).satisfiable


# Verdicts below were frozen from the brute-force semantic oracle (and agree
# with hand evaluation on concrete structures).
FROZEN_VERDICTS = [
    # (logic, formula, satisfiable)
    ("K", "[](a -> b) & []a & ~[]b", False),
    ("K", "[](a | b) & ~[]a & ~[]b", True),
    ("K", "[]false", True),
    ("KD", "[]false", False),
    ("KD", "[]a & []~a", False),
    ("K", "[]a & []~a", True),
    ("E", "[](a & b) & ~[](b & a)", False),
    ("E", "[](a & b) & ~[]a", True),
    ("M", "[](a & b) & ~[]a", False),
    ("M", "[]a & ~[](a | b)", False),
    ("M", "[]a & ~[]b", True),
    ("GML", "<1>a & ~<0>a", False),
    ("GML", "<0>a & ~<1>a", True),
    ("GML", "<1>(a & b) & ~<1>a", False),
    ("GML", "<0>a & <0>~a & ~<1>(a | ~a)", False),
    ("MAJ", "~W a & ~W ~a", False),
    ("MAJ", "W a & W ~a", True),
    ("MAJ", "M a & ~W a", False),
    ("PML", "L{1/2}a & L{2/3}~a", False),
    ("PML", "L{1/2}a & L{1/2}~a", True),
    ("PML", "~L{0/1}a", False),
    ("COAL", "[C 1]a & [C 2]~a", False),
    ("COAL", "[C 1]a & [C 2]b & ~[C 1,2](a & b)", False),
    ("COAL", "[C 1]a & ~[C 1,2]a", False),
    ("COAL", "[C 1,2]a & ~[C 1]a", True),
]


@pytest.mark.parametrize("logic,text,expected", FROZEN_VERDICTS)
def test_frozen_verdicts(logic, text, expected):
    verdict = _sat(text, logic)
    assert verdict.satisfiable == expected
    assert not verdict.caveat


def test_propositional_formulas():
    assert _sat("a & ~a", "K").satisfiable is False
    assert _sat("a | b", "K").satisfiable is True
    assert _valid("a -> a", "K")


def test_recursion_bounded_by_modal_depth():
    cfg = LogicConfig(logic="GML")
    f = parse("<1>(<0>a & <1>(b | <0>c))")
    solver = Solver(cfg)
    verdict = solver.run(f)
    assert verdict.stats.recursion_peak <= f.depth


def test_verdict_deterministic_across_solver_instances():
    cfg = LogicConfig(logic="PML")
    f = parse("L{1/2}(a | b) & ~L{1/3}a")
    v1 = Solver(cfg).run(f)
    v2 = Solver(cfg).run(f)
    assert v1.satisfiable == v2.satisfiable
    if v1.satisfiable:
        assert v1.trace.valuation == v2.trace.valuation


def test_trace_shapes():
    cfg = LogicConfig(logic="K")
    sat = satisfiable(parse("[](a | b) & ~[]a"), cfg)
    assert sat.satisfiable
    assert sat.trace.formula is parse("[](a | b) & ~[]a")
    unsat = satisfiable(parse("[]a & ~[]a"), cfg)
    assert not unsat.satisfiable
    assert unsat.trace.failures == []  # no pseudovaluation even entails it
    unsat2 = satisfiable(parse("[](a & ~a) & ~[]b & ~[]~b"), cfg)
    assert not unsat2.satisfiable
    assert unsat2.trace.failures  # refuted pseudovaluations are recorded


@pytest.mark.parametrize("logic", ALL_LOGICS)
def test_solver_never_contradicts_oracle(logic):
    cfg = LogicConfig(logic=logic)
    rng = random.Random(123)
    budget = 25 if logic in ("COAL", "GML", "PML") else 60
    for _ in range(budget):
        f = random_formula(rng, cfg, max_depth=2)
        verdict = satisfiable(f, cfg)
        witness = brute_force_sat(f, cfg)
        if witness is not None:
            assert verdict.satisfiable, pretty(f)
