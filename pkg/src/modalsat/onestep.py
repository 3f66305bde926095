"""One-step rules: codes, premises, matchings, and instance helpers.

A rule has a propositional premise over variables and a clause conclusion
whose literals apply one modal operator each to a distinct variable.  Rule
variables are identified with conclusion literal positions ``0..arity-1``
(congruence uses two positions).  A matching pairs a rule code with a
substitution assigning an argument formula to every variable; the conclusion
instance must equal the matched clause literal-for-literal.

Rule codes are finite descriptions (scheme tag plus integer/rational/grade/
coalition parameters) that are serializable and checkable in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .formula import (
    Atom,
    Box,
    Coal,
    FModal,
    GDiamond,
    LProb,
    MajW,
    conj_fold,
    modal,
    neg_fold,
)


# ---------------------------------------------------------------------------
# Premises
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClausePremise:
    """Premise already in CNF: clauses of ``(positive, var)`` literals."""

    clauses: tuple


@dataclass(frozen=True)
class LinearPremise:
    """Premise ``sum(coeffs[i] * a_i) >= bound`` over 0/1-valued variables.

    Its CNF has one clause per subset J of variables with coefficient sum
    below the bound: the clause negating exactly the variables in J.
    """

    coeffs: tuple
    bound: int

    def subset_sum(self, bits: int) -> int:
        return sum(c for j, c in enumerate(self.coeffs) if bits >> j & 1)


def premise_cnf_clauses(premise) -> Iterator[tuple]:
    """CNF clauses of a premise, in deterministic order.

    For a linear premise the clauses are indexed by variable subsets in
    binary-counter order; subset J yields the clause that is false exactly
    when the variables in J are true and the rest false.
    """
    if isinstance(premise, ClausePremise):
        yield from premise.clauses
        return
    q = len(premise.coeffs)
    for bits in range(1 << q):
        if premise.subset_sum(bits) < premise.bound:
            yield tuple((not (bits >> j & 1), j) for j in range(q))


def premise_clause_index(premise: LinearPremise, clause) -> Optional[int]:
    """The subset index of a full-support clause, or None if malformed."""
    q = len(premise.coeffs)
    if len(clause) != q:
        return None
    bits = 0
    seen = set()
    for positive, var in clause:
        if not isinstance(var, int) or not 0 <= var < q or var in seen:
            return None
        seen.add(var)
        if not positive:
            bits |= 1 << var
    return bits


def premise_has_clause(premise, clause) -> bool:
    if isinstance(premise, ClausePremise):
        return clause in premise.clauses
    bits = premise_clause_index(premise, clause)
    if bits is None:
        return False
    return premise.subset_sum(bits) < premise.bound


# ---------------------------------------------------------------------------
# Rule codes
# ---------------------------------------------------------------------------

# Scheme tags:
#   CONG   congruence (every logic): premise a<->b, conclusion ~La | Lb
#   K      box: conjunction of negatives implies the single positive
#   KD     box, all-negative conclusion with inconsistent premise
#   M      box monotonicity: ~[]a | []b from a -> b
#   COAL1  coalition: all-negative, pairwise disjoint coalitions
#   COAL4  coalition: disjoint coalitions inside the distinguished positive,
#          remaining positives carry the grand coalition
#   GML    graded linear rule, premise sum(r_i a_i) >= 0
#   MAJ    graded/majority linear rule, premise sum(r_i a_i) >= m
#   PML    probabilistic linear rule, premise sum(r_i a_i) >= k
#
# ``ints`` holds the sign pattern (+1/-1 per literal) for shape schemes
# (COAL4 appends the index of the distinguished positive literal), and the
# coefficient list followed by the premise bound for linear schemes.
# ``grades`` aligns with literals for GML/MAJ (-1 marks a W literal) and
# holds the single operator grade for graded congruence.  ``rationals``
# holds per-literal probability indices (PML and probabilistic congruence).
# ``coalitions`` holds per-literal coalitions for COAL1/COAL4 and the single
# coalition for coalition congruence.

LINEAR_SCHEMES = ("GML", "MAJ", "PML")


@dataclass(frozen=True)
class RuleCode:
    logic: str
    scheme: str
    ints: tuple = ()
    rationals: tuple = ()
    grades: tuple = ()
    coalitions: tuple = ()

    def arity(self) -> int:
        if self.scheme == "CONG":
            return 2
        if self.scheme in LINEAR_SCHEMES:
            return len(self.ints) - 1
        if self.scheme == "COAL4":
            return len(self.ints) - 1
        return len(self.ints)

    def signs(self) -> tuple:
        """Conclusion literal signs, True = positive."""
        if self.scheme in LINEAR_SCHEMES:
            return tuple(c > 0 for c in self.ints[: self.arity()])
        return tuple(s > 0 for s in self.ints[: self.arity()])

    def to_json(self) -> dict:
        return {
            "logic": self.logic,
            "scheme": self.scheme,
            "ints": list(self.ints),
            "rationals": ["%d/%d" % (q.numerator, q.denominator) for q in self.rationals],
            "grades": list(self.grades),
            "coalitions": [sorted(c) for c in self.coalitions],
        }

    @staticmethod
    def from_json(data: dict) -> "RuleCode":
        rationals = []
        for item in data.get("rationals", ()):
            num, den = str(item).split("/")
            rationals.append(Fraction(int(num), int(den)))
        return RuleCode(
            logic=str(data["logic"]),
            scheme=str(data["scheme"]),
            ints=tuple(int(i) for i in data.get("ints", ())),
            rationals=tuple(rationals),
            grades=tuple(int(g) for g in data.get("grades", ())),
            coalitions=tuple(frozenset(int(i) for i in c) for c in data.get("coalitions", ())),
        )


def code_operators(code: RuleCode, n_agents: int) -> tuple:
    """The modal operator applied at each conclusion literal."""
    arity = code.arity()
    if code.scheme == "CONG":
        if code.grades:
            op = GDiamond(code.grades[0])
        elif code.rationals:
            op = LProb(code.rationals[0])
        elif code.coalitions:
            op = Coal(code.coalitions[0], n_agents)
        elif code.logic == "MAJ":
            op = MajW()
        else:
            op = Box()
        return (op, op)
    if code.scheme in ("K", "KD", "M"):
        return tuple(Box() for _ in range(arity))
    if code.scheme in ("COAL1", "COAL4"):
        return tuple(Coal(c, n_agents) for c in code.coalitions)
    if code.scheme == "GML":
        return tuple(GDiamond(g) for g in code.grades)
    if code.scheme == "MAJ":
        return tuple(MajW() if g < 0 else GDiamond(g) for g in code.grades)
    if code.scheme == "PML":
        return tuple(LProb(p) for p in code.rationals)
    raise ValueError("unknown scheme %r" % code.scheme)


def premise_of(code: RuleCode):
    """Reconstruct the premise of a rule code, over variables 0..arity-1."""
    if code.scheme == "CONG":
        i_neg = 0 if code.ints[0] < 0 else 1
        i_pos = 1 - i_neg
        return ClausePremise(
            (
                ((False, i_neg), (True, i_pos)),
                ((True, i_neg), (False, i_pos)),
            )
        )
    if code.scheme in LINEAR_SCHEMES:
        return LinearPremise(code.ints[:-1], code.ints[-1])
    # Shape schemes: single clause mirroring the conclusion sign pattern.
    return ClausePremise((tuple((s, i) for i, s in enumerate(code.signs())),))


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleMatching:
    """A rule code together with the substitution extracted from a clause.

    ``subst[i]`` is the argument formula of conclusion literal i.
    """

    code: RuleCode
    subst: tuple

    def premise(self):
        return premise_of(self.code)


def conclusion_clause(matching: RuleMatching, n_agents: int) -> tuple:
    ops = code_operators(matching.code, n_agents)
    signs = matching.code.signs()
    return tuple(
        (signs[i], modal(ops[i], matching.subst[i])) for i in range(len(ops))
    )


def is_contracted_instance(matching: RuleMatching, n_agents: int) -> bool:
    clause = conclusion_clause(matching, n_agents)
    return len(set(clause)) == len(clause)


def negated_clause_instance(gamma, subst):
    """The negation of a premise CNF clause under a substitution: the
    conjunction of the negated instantiated literals, constant-folded."""
    parts = []
    for positive, var in gamma:
        g = subst[var]
        parts.append(neg_fold(g) if positive else g)
    return conj_fold(parts)


def congruence_matchings(clause, logic: str) -> list:
    """Congruence matchings of a clause: exactly one negative and one
    positive literal carrying the same proper modal operator."""
    if len(clause) != 2:
        return []
    (s0, a0), (s1, a1) = clause
    if s0 == s1:
        return []
    if not isinstance(a0, FModal) or not isinstance(a1, FModal):
        return []
    if isinstance(a0.op, Atom) or a0.op != a1.op:
        return []
    op = a0.op
    grades = ()
    rationals = ()
    coalitions = ()
    if isinstance(op, GDiamond):
        grades = (op.grade,)
    elif isinstance(op, LProb):
        rationals = (op.prob,)
    elif isinstance(op, Coal):
        coalitions = (op.agents,)
    code = RuleCode(
        logic=logic,
        scheme="CONG",
        ints=(1 if s0 else -1, 1 if s1 else -1),
        rationals=rationals,
        grades=grades,
        coalitions=coalitions,
    )
    return [RuleMatching(code, (a0.arg, a1.arg))]
