"""Per-logic rule sets: matching enumeration, side conditions, and the
coefficient search for the linear (graded / majority / probabilistic) rules.

Supported logics:

==========  ===========================  ==========================
tag         operators                    rules besides congruence
==========  ===========================  ==========================
``E``       ``[]``                       none
``M``       ``[]``                       monotonicity
``K``       ``[]``                       K-schema
``KD``      ``[]``                       K-schema + seriality schema
``COAL``    ``[C ...]``                  coalition schemas (1) and (4')
``GML``     ``<k>``                      graded linear schema
``MAJ``     ``<k>``, ``W``               graded/majority linear schema
``PML``     ``L{p}``                     probabilistic linear schema
==========  ===========================  ==========================

For the linear schemas a clause has infinitely many matchings, indexed by
nonzero integer coefficients (one per literal, sign agreeing with the
literal) and a premise bound.  ``refuting_matching_exists`` decides whether
coefficients exist making every premise CNF clause's negation unsatisfiable,
given the set of satisfiable sign patterns of the argument formulas.  The
constraint systems are scale-invariant, so rational feasibility (decided
exactly by Fourier-Motzkin) coincides with integer feasibility; a small
brute-force pass runs first to prefer small coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import linarith
from .formula import (
    Atom,
    Box,
    Coal,
    FModal,
    Formula,
    GDiamond,
    LProb,
    MajW,
    subformulas,
)
from .onestep import (
    LINEAR_SCHEMES,
    RuleCode,
    RuleMatching,
    congruence_matchings,
)

LOGICS = ("E", "M", "K", "KD", "COAL", "GML", "MAJ", "PML")
ARITHMETIC_LOGICS = ("GML", "MAJ", "PML")


@dataclass
class LogicConfig:
    """A logic tag plus search and oracle bounds."""

    logic: str
    n_agents: int = 2
    coeff_bound: int = 64
    fm_budget: int = 50000
    # certificate synthesis bounds
    max_weight: int = 16
    # oracle bounds
    max_carrier: int = 3
    max_multiplicity: int = 4
    max_denominator: int = 12
    max_strategies: int = 2
    branch_bound: int = 4

    def __post_init__(self):
        if self.logic not in LOGICS:
            raise ValueError("unknown logic %r" % self.logic)
        if self.logic == "COAL" and self.n_agents < 1:
            raise ValueError("coalition logic needs at least one agent")

    @property
    def grand_coalition(self) -> frozenset:
        return frozenset(range(1, self.n_agents + 1))

    def is_arithmetic(self) -> bool:
        return self.logic in ARITHMETIC_LOGICS


def parse_logic_spec(spec: str) -> LogicConfig:
    """Parse a --logic value such as ``K`` or ``COAL:3``."""
    if spec.startswith("COAL"):
        if spec == "COAL":
            return LogicConfig("COAL")
        if spec.startswith("COAL:"):
            return LogicConfig("COAL", n_agents=int(spec.split(":", 1)[1]))
        raise ValueError("bad logic spec %r" % spec)
    return LogicConfig(spec)


def operator_legal(op, cfg: LogicConfig) -> bool:
    if isinstance(op, Atom):
        return True
    if cfg.logic in ("E", "M", "K", "KD"):
        return isinstance(op, Box)
    if cfg.logic == "COAL":
        return (
            isinstance(op, Coal)
            and op.n_agents == cfg.n_agents
            and op.agents <= cfg.grand_coalition
        )
    if cfg.logic == "GML":
        return isinstance(op, GDiamond) and op.grade >= 0
    if cfg.logic == "MAJ":
        return (isinstance(op, GDiamond) and op.grade >= 0) or isinstance(op, MajW)
    if cfg.logic == "PML":
        return isinstance(op, LProb) and 0 <= op.prob <= 1
    raise ValueError("unknown logic %r" % cfg.logic)


def validate_formula(f: Formula, cfg: LogicConfig) -> None:
    for g in subformulas(f):
        if isinstance(g, FModal) and not operator_legal(g.op, cfg):
            raise ValueError(
                "operator %s is not part of logic %s" % (g.op.render(), cfg.logic)
            )


# ---------------------------------------------------------------------------
# Shape-schema matchings
# ---------------------------------------------------------------------------


def _clause_ops(clause):
    """(signs, ops, args) if every literal is a proper modal atom, else None."""
    signs = []
    ops = []
    args = []
    for positive, a in clause:
        if not isinstance(a, FModal) or isinstance(a.op, Atom):
            return None
        signs.append(positive)
        ops.append(a.op)
        args.append(a.arg)
    return tuple(signs), tuple(ops), tuple(args)


def matchings(clause, cfg: LogicConfig) -> list:
    """All matchings of the finite schemas against a clause, congruence
    included.  Linear-schema matchings are reached through
    ``refuting_matching_exists`` instead (there are infinitely many)."""
    out = list(congruence_matchings(clause, cfg.logic))
    shape = _clause_ops(clause)
    if shape is None:
        return out
    signs, ops, args = shape
    sign_ints = tuple(1 if s else -1 for s in signs)
    n_pos = sum(signs)

    if cfg.logic in ("K", "KD") and all(isinstance(op, Box) for op in ops):
        if n_pos == 1:
            code = RuleCode(cfg.logic, "K", ints=sign_ints)
            out.append(RuleMatching(code, args))
        if cfg.logic == "KD" and n_pos == 0 and len(clause) >= 1:
            code = RuleCode(cfg.logic, "KD", ints=sign_ints)
            out.append(RuleMatching(code, args))

    if cfg.logic == "M" and all(isinstance(op, Box) for op in ops):
        if len(clause) == 2 and n_pos == 1:
            code = RuleCode(cfg.logic, "M", ints=sign_ints)
            out.append(RuleMatching(code, args))

    if cfg.logic == "COAL" and all(isinstance(op, Coal) for op in ops):
        coalitions = tuple(op.agents for op in ops)
        negatives = [i for i, s in enumerate(signs) if not s]
        positives = [i for i, s in enumerate(signs) if s]
        disjoint = _pairwise_disjoint([coalitions[i] for i in negatives])
        if n_pos == 0 and len(clause) >= 1 and disjoint:
            code = RuleCode(cfg.logic, "COAL1", ints=sign_ints, coalitions=coalitions)
            out.append(RuleMatching(code, args))
        if n_pos >= 1 and disjoint:
            grand = cfg.grand_coalition
            non_grand = [i for i in positives if coalitions[i] != grand]
            if len(non_grand) <= 1:
                d = non_grand[0] if non_grand else positives[0]
                if all(coalitions[i] <= coalitions[d] for i in negatives):
                    code = RuleCode(
                        cfg.logic,
                        "COAL4",
                        ints=sign_ints + (d,),
                        coalitions=coalitions,
                    )
                    out.append(RuleMatching(code, args))
    return out


def _pairwise_disjoint(sets) -> bool:
    seen = set()
    for s in sets:
        if seen & s:
            return False
        seen |= s
    return True


# ---------------------------------------------------------------------------
# Side conditions
# ---------------------------------------------------------------------------


def side_condition(code: RuleCode, cfg: LogicConfig) -> bool:
    """Validity of a rule code in isolation (used by certificate checkers)."""
    scheme = code.scheme
    arity = code.arity()
    if arity < 1 and scheme != "CONG":
        return False
    signs = code.signs()
    if scheme == "CONG":
        return len(code.ints) == 2 and sorted(code.ints) == [-1, 1]
    if scheme == "K":
        return cfg.logic in ("K", "KD") and sum(signs) == 1
    if scheme == "KD":
        return cfg.logic == "KD" and sum(signs) == 0 and arity >= 1
    if scheme == "M":
        return cfg.logic == "M" and arity == 2 and sum(signs) == 1
    if scheme == "COAL1":
        if cfg.logic != "COAL" or sum(signs) != 0 or len(code.coalitions) != arity:
            return False
        return _pairwise_disjoint(code.coalitions)
    if scheme == "COAL4":
        if cfg.logic != "COAL" or len(code.coalitions) != arity:
            return False
        d = code.ints[-1]
        if not (0 <= d < arity and signs[d]):
            return False
        grand = cfg.grand_coalition
        negatives = [i for i in range(arity) if not signs[i]]
        if not _pairwise_disjoint([code.coalitions[i] for i in negatives]):
            return False
        if not all(code.coalitions[i] <= code.coalitions[d] for i in negatives):
            return False
        return all(
            code.coalitions[i] == grand for i in range(arity) if signs[i] and i != d
        )
    if scheme in LINEAR_SCHEMES:
        coeffs = code.ints[:-1]
        bound = code.ints[-1]
        if any(c == 0 for c in coeffs):
            return False
        if scheme == "GML":
            if cfg.logic != "GML" or bound != 0 or len(code.grades) != arity:
                return False
            if any(g < 0 for g in code.grades):
                return False
            lhs = sum(-c * (k + 1) for c, k in zip(coeffs, code.grades) if c < 0)
            rhs = 1 + sum(c * k for c, k in zip(coeffs, code.grades) if c > 0)
            return lhs >= rhs
        if scheme == "MAJ":
            if cfg.logic != "MAJ" or len(code.grades) != arity:
                return False
            graded = [(c, k) for c, k in zip(coeffs, code.grades) if k >= 0]
            wsum = sum(c for c, k in zip(coeffs, code.grades) if k < 0)
            wpos = sum(c for c, k in zip(coeffs, code.grades) if k < 0 and c > 0)
            lhs = sum(-c * (k + 1) for c, k in graded if c < 0)
            lhs -= sum(c * k for c, k in graded if c > 0)
            if lhs - 1 + wpos - max(bound, 0) < 0:
                return False
            return 2 * bound - wsum >= 0
        if scheme == "PML":
            if cfg.logic != "PML" or len(code.rationals) != arity:
                return False
            if any(not 0 <= p <= 1 for p in code.rationals):
                return False
            total = sum(Fraction(c) * p for c, p in zip(coeffs, code.rationals))
            if all(c < 0 for c in coeffs):
                return total < bound
            return total <= bound
    return False


# ---------------------------------------------------------------------------
# Linear-schema coefficient search
# ---------------------------------------------------------------------------


class _Infeasible(Exception):
    pass


def _linear_literal_data(clause, cfg: LogicConfig):
    """Per-literal (sign, kind, index) for the linear schema of the logic,
    or None when the clause does not fit the schema's shape."""
    shape = _clause_ops(clause)
    if shape is None:
        return None
    signs, ops, args = shape
    rows = []
    for op in ops:
        if cfg.logic == "GML" and isinstance(op, GDiamond):
            rows.append(("g", op.grade))
        elif cfg.logic == "MAJ" and isinstance(op, GDiamond):
            rows.append(("g", op.grade))
        elif cfg.logic == "MAJ" and isinstance(op, MajW):
            rows.append(("w", None))
        elif cfg.logic == "PML" and isinstance(op, LProb):
            rows.append(("p", op.prob))
        else:
            return None
    return signs, rows, args


def _build_constraints(signs, rows, sat_patterns, cfg, branch):
    """Constraint list over magnitude variables x_i >= 1 and bound t.

    ``branch`` is None (GML: bound fixed 0; PML: bound variable) or for MAJ
    one of "nonneg"/"neg" fixing the sign of the premise bound.
    """
    q = len(signs)
    use_t = cfg.logic != "GML"
    cons = []
    for i in range(q):
        cons.append(({_x(i): Fraction(1)}, Fraction(-1), False))
    # Every satisfiable sign pattern J must satisfy r(J) >= bound.
    for bits in sorted(sat_patterns):
        coeffs = {}
        for i in range(q):
            if bits >> i & 1:
                coeffs[_x(i)] = Fraction(1 if signs[i] else -1)
        if use_t:
            coeffs["t"] = coeffs.get("t", Fraction(0)) - 1
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        cons.append((coeffs, Fraction(0), False))
    if cfg.logic == "GML":
        coeffs = {}
        for i, (kind, k) in enumerate(rows):
            coeffs[_x(i)] = Fraction(k + 1 if not signs[i] else -k)
        cons.append((coeffs, Fraction(-1), False))
    elif cfg.logic == "MAJ":
        coeffs = {}
        for i, (kind, k) in enumerate(rows):
            if kind == "g":
                coeffs[_x(i)] = Fraction(k + 1 if not signs[i] else -k)
            elif signs[i]:
                coeffs[_x(i)] = Fraction(1)
        if branch == "nonneg":
            coeffs["t"] = coeffs.get("t", Fraction(0)) - 1
        cons.append((dict(coeffs), Fraction(-1), False))
        # 2m - (signed sum of W coefficients) >= 0
        coeffs2 = {"t": Fraction(2)}
        for i, (kind, k) in enumerate(rows):
            if kind == "w":
                coeffs2[_x(i)] = Fraction(-1 if signs[i] else 1)
        cons.append((coeffs2, Fraction(0), False))
        if branch == "nonneg":
            cons.append(({"t": Fraction(1)}, Fraction(0), False))
        else:
            cons.append(({"t": Fraction(-1)}, Fraction(0), True))
    elif cfg.logic == "PML":
        coeffs = {"t": Fraction(1)}
        for i, (kind, p) in enumerate(rows):
            coeffs[_x(i)] = -p if signs[i] else p
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        strict = all(not s for s in signs)
        cons.append((coeffs, Fraction(0), strict))
    return cons


def _x(i: int) -> str:
    return "x%d" % i


def _check_point(cons, point) -> bool:
    for coeffs, const, strict in cons:
        total = const + sum(c * point[v] for v, c in coeffs.items())
        if total < 0 or (strict and total == 0):
            return False
    return True


def _small_search(signs, cons, use_t, branch) -> Optional[dict]:
    """Brute-force search over small magnitudes for readable certificates."""
    q = len(signs)
    if q > 4:
        return None
    if use_t:
        if branch == "nonneg":
            t_values = [0, 1, 2, 3, 4]
        elif branch == "neg":
            t_values = [-1, -2, -3, -4]
        else:
            t_values = [0, 1, -1, 2, -2, 3, -3, 4, -4]
    else:
        t_values = [0]
    magnitudes = [1, 2, 3]
    stack = [[]]
    for _ in range(q):
        stack = [base + [m] for base in stack for m in magnitudes]
    for t in t_values:
        for combo in stack:
            point = {_x(i): Fraction(combo[i]) for i in range(q)}
            if use_t:
                point["t"] = Fraction(t)
            if _check_point(cons, point):
                return point
    return None


def _scale_to_integers(point) -> dict:
    lcm = 1
    for v in point.values():
        den = v.denominator
        g = _gcd(lcm, den)
        lcm = lcm // g * den
    return {k: v * lcm for k, v in point.items()}


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def refuting_matching_exists(clause, sat_patterns, cfg: LogicConfig):
    """Search for a linear-schema matching of ``clause`` whose premise CNF
    consists only of clauses with unsatisfiable negations.

    ``sat_patterns`` is the set of satisfiable sign patterns, as bitmasks
    over clause positions (bit i set = argument of literal i true).

    Returns ``(matching_or_None, caveat)``; ``caveat`` is True when the
    exact search had to be abandoned for a bounded one that found nothing.
    """
    data = _linear_literal_data(clause, cfg)
    if data is None:
        return None, False
    signs, rows, args = data
    use_t = cfg.logic != "GML"
    branches = ("nonneg", "neg") if cfg.logic == "MAJ" else (None,)
    caveat = False
    for branch in branches:
        cons = _build_constraints(signs, rows, sat_patterns, cfg, branch)
        point = _small_search(signs, cons, use_t, branch)
        if point is None:
            variables = [_x(i) for i in range(len(signs))]
            if use_t:
                variables.append("t")
            try:
                point = linarith.feasible(cons, variables, cfg.fm_budget)
            except linarith.SearchBudgetExceeded:
                caveat = True
                point = _bounded_fallback(signs, cons, use_t, branch, cfg)
            if point is not None:
                point = _scale_to_integers(point)
                if not _check_point(cons, point):
                    point = None
        if point is None:
            continue
        coeffs = tuple(
            int(point[_x(i)]) * (1 if signs[i] else -1) for i in range(len(signs))
        )
        bound = int(point["t"]) if use_t else 0
        if cfg.logic == "GML":
            code = RuleCode(
                cfg.logic, "GML", ints=coeffs + (bound,), grades=tuple(k for _, k in rows)
            )
        elif cfg.logic == "MAJ":
            grades = tuple(k if kind == "g" else -1 for kind, k in rows)
            code = RuleCode(cfg.logic, "MAJ", ints=coeffs + (bound,), grades=grades)
        else:
            code = RuleCode(
                cfg.logic,
                "PML",
                ints=coeffs + (bound,),
                rationals=tuple(p for _, p in rows),
            )
        return RuleMatching(code, args), caveat
    return None, caveat


def _bounded_fallback(signs, cons, use_t, branch, cfg) -> Optional[dict]:
    """Depth-first bounded integer search used only when Fourier-Motzkin
    exceeds its budget; incomplete beyond the coefficient bound."""
    q = len(signs)
    bound = cfg.coeff_bound
    if q > 6:
        return None
    magnitudes = list(range(1, min(bound, 8) + 1))
    if use_t:
        if branch == "nonneg":
            t_values = list(range(0, min(bound, 8) + 1))
        elif branch == "neg":
            t_values = list(range(-1, -min(bound, 8) - 1, -1))
        else:
            t_values = sorted(range(-min(bound, 8), min(bound, 8) + 1), key=lambda v: (abs(v), v))
    else:
        t_values = [0]
    for t in t_values:
        point = {"t": Fraction(t)} if use_t else {}

        def rec(i):
            if i == q:
                return _check_point(cons, point)
            for m in magnitudes:
                point[_x(i)] = Fraction(m)
                if rec(i + 1):
                    return True
            del point[_x(i)]
            return False

        if rec(0):
            return point
    return None
