"""Satisfiability solver: alternating search over pseudovaluations.

A formula is satisfiable iff some pseudovaluation H (a propositionally
consistent total sign assignment to its modal atoms) survives every
universal challenge: for every nonempty clause built from negations of H's
literals and every rule matching of that clause, some clause of the premise
CNF must have a satisfiable negation (a strictly shallower formula, solved
recursively).

For the finite schemas the matchings of each clause are enumerated directly.
For the linear schemas the universal quantifier over matchings is decided by
``refuting_matching_exists``: H fails iff coefficients exist under which
every premise CNF clause has an unsatisfiable negation, which only depends
on which sign patterns of the argument formulas are satisfiable.  The
pattern table is computed once per pseudovaluation by recursive solver
calls and shared by all clauses.

Traces record, per satisfiable node, one satisfiable demand per (clause,
matching) pair plus (for linear logics) one child per satisfiable argument
pattern; these are exactly the edges of a shallow tableau.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    Atom,
    FModal,
    Formula,
    conj_fold,
    modal_atoms,
    neg_fold,
)
from .logics import LogicConfig, matchings, refuting_matching_exists, validate_formula
from .onestep import (
    RuleMatching,
    congruence_matchings,
    negated_clause_instance,
    premise_cnf_clauses,
)


@dataclass
class SolveStats:
    recursion_peak: int = 0
    solve_calls: int = 0
    memo_hits: int = 0
    matchings_checked: int = 0
    patterns_solved: int = 0


@dataclass
class SatNode:
    """Witness for a satisfiable formula: a surviving pseudovaluation plus a
    satisfiable demand per challenge."""

    formula: Formula
    valuation: tuple
    # ("rule", clause, matching, gamma, child) or ("pattern", formula, child)
    obligations: list = field(default_factory=list)


@dataclass
class UnsatNode:
    """Refutation: every pseudovaluation has a failing challenge."""

    formula: Formula
    # (valuation, clause, matching, [(gamma, child_unsat_node), ...])
    failures: list = field(default_factory=list)


@dataclass
class Verdict:
    satisfiable: bool
    trace: object
    caveat: bool
    stats: SolveStats


class Solver:
    def __init__(self, cfg: LogicConfig):
        self.cfg = cfg
        self.memo = {}
        self.stats = SolveStats()
        self.caveat = False
        self.root_depth = 0

    def run(self, f: Formula) -> Verdict:
        validate_formula(f, self.cfg)
        self.root_depth = max(self.root_depth, f.depth)
        sat, node = self.solve(f, 0)
        return Verdict(sat, node, self.caveat, self.stats)

    def solve(self, f: Formula, level: int):
        cached = self.memo.get(f)
        if cached is not None:
            self.stats.memo_hits += 1
            return cached
        self.stats.solve_calls += 1
        if level > self.stats.recursion_peak:
            self.stats.recursion_peak = level
        # Recursion is bounded by modal depth: each level strips one layer.
        assert f.depth + level <= self.root_depth, "recursion exceeded modal depth"
        failures = []
        result = None
        atoms = modal_atoms(f)
        n = len(atoms)
        for bits in range(1 << n):
            assign = {atoms[i]: bool(bits >> i & 1) for i in range(n)}
            if not _eval(f, assign):
                continue
            valuation = tuple((assign[a], a) for a in atoms)
            verdict = self._check_valuation(f, valuation, level)
            if isinstance(verdict, SatNode):
                result = (True, verdict)
                break
            failures.append(verdict)
        if result is None:
            result = (False, UnsatNode(f, failures))
        self.memo[f] = result
        return result

    # -- universal challenges against one pseudovaluation ------------------

    def _check_valuation(self, f: Formula, valuation: tuple, level: int):
        obligations = []
        pattern_table = None
        arith_atoms = None
        if self.cfg.is_arithmetic():
            arith_atoms = [
                a for (_, a) in valuation
                if isinstance(a, FModal) and not isinstance(a.op, Atom)
            ]
            pattern_table = {}
            if arith_atoms:
                pattern_table = self._pattern_table(arith_atoms, level)
                for bits, (sat, child) in sorted(pattern_table.items()):
                    if sat:
                        obligations.append(
                            ("pattern", _pattern_formula(arith_atoms, bits), child)
                        )
        q = len(valuation)
        for mask in range(1, 1 << q):
            clause = tuple(
                (not s, a) for i, (s, a) in enumerate(valuation) if mask >> i & 1
            )
            if self.cfg.is_arithmetic():
                cands = congruence_matchings(clause, self.cfg.logic)
            else:
                cands = matchings(clause, self.cfg)
            for m in cands:
                self.stats.matchings_checked += 1
                gamma_children = []
                chosen = None
                for gamma in premise_cnf_clauses(m.premise()):
                    demand = negated_clause_instance(gamma, m.subst)
                    sat, child = self.solve(demand, level + 1)
                    if sat:
                        chosen = ("rule", clause, m, gamma, child)
                        break
                    gamma_children.append((gamma, child))
                if chosen is None:
                    return (valuation, clause, m, gamma_children)
                obligations.append(chosen)
            if self.cfg.is_arithmetic():
                refuter = self._arith_challenge(
                    clause, valuation, arith_atoms, pattern_table
                )
                if refuter is not None:
                    return refuter
        node = SatNode(f, valuation, obligations)
        return node

    def _pattern_table(self, arith_atoms, level: int) -> dict:
        table = {}
        k = len(arith_atoms)
        for bits in range(1 << k):
            pf = _pattern_formula(arith_atoms, bits)
            self.stats.patterns_solved += 1
            table[bits] = self.solve(pf, level + 1)
        return table

    def _arith_challenge(self, clause, valuation, arith_atoms, pattern_table):
        positions = []
        for _, a in clause:
            if not isinstance(a, FModal) or isinstance(a.op, Atom):
                return None
            positions.append(arith_atoms.index(a))
        sat_patterns = set()
        for bits, (sat, _) in pattern_table.items():
            if sat:
                proj = 0
                for ci, ai in enumerate(positions):
                    if bits >> ai & 1:
                        proj |= 1 << ci
                sat_patterns.add(proj)
        self.stats.matchings_checked += 1
        m, caveat = refuting_matching_exists(clause, sat_patterns, self.cfg)
        if caveat:
            self.caveat = True
        if m is None:
            return None
        gamma_children = []
        for gamma in premise_cnf_clauses(m.premise()):
            bits = 0
            for ci, (positive, _) in enumerate(gamma):
                if not positive:
                    bits |= 1 << ci
            # Lift the projected pattern back to a witnessing full pattern:
            # all full patterns restricting to it are unsatisfiable here.
            _, child = pattern_table[_restrict_witness(pattern_table, positions, bits)]
            gamma_children.append((gamma, child))
        return (valuation, clause, m, gamma_children)


def _restrict_witness(pattern_table, positions, proj_bits) -> int:
    """Some full pattern index restricting to the projected pattern."""
    full = 0
    for ci, ai in enumerate(positions):
        if proj_bits >> ci & 1:
            full |= 1 << ai
    return full


def _pattern_formula(arith_atoms, bits: int) -> Formula:
    parts = []
    for i, a in enumerate(arith_atoms):
        arg = a.arg
        parts.append(arg if bits >> i & 1 else neg_fold(arg))
    return conj_fold(parts)


def _eval(f, assign) -> bool:
    from .formula import eval_with

    return eval_with(f, assign)


def satisfiable(f: Formula, cfg: LogicConfig) -> Verdict:
    """Decide satisfiability of ``f`` in the configured logic."""
    return Solver(cfg).run(f)


def demand_satisfiable(clause_gamma, matching: RuleMatching, cfg: LogicConfig) -> bool:
    """Is the negation of the instantiated premise clause satisfiable?"""
    demand = negated_clause_instance(clause_gamma, matching.subst)
    return satisfiable(demand, cfg).satisfiable
