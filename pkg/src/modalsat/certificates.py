"""Certificates: shallow tableaux, concrete models, and shallow proofs.

All three certificate kinds serialize to versioned JSON and are validated
by checkers that do not consult the solver's internals:

* a tableau is checked structurally (every node is a pseudovaluation, every
  edge's demand is recomputed from its rule label, and for the finite-schema
  logics every challenge of every node has an answering edge);
* a model is checked by direct semantic evaluation (``model_check``);
* a proof is checked clause by clause against recomputed side conditions,
  conclusion entailment, and premise CNF coverage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linarith
from .formula import (
    Atom,
    Box,
    Coal,
    FAnd,
    FModal,
    FNot,
    Formula,
    GDiamond,
    LProb,
    MajW,
    cnf_clauses,
    clause_entails,
    conj_fold,
    eval_with,
    is_tautology_clause,
    modal_atoms,
    neg_fold,
    parse,
    pretty,
    subformulas,
)
from .logics import (
    LogicConfig,
    matchings,
    operator_legal,
    refuting_matching_exists,
    side_condition,
)
from .onestep import (
    RuleCode,
    RuleMatching,
    congruence_matchings,
    conclusion_clause,
    negated_clause_instance,
    premise_cnf_clauses,
    premise_has_clause,
)
from .solver import SatNode, Solver, Verdict

CERT_VERSION = 1


# ---------------------------------------------------------------------------
# Model witnesses
# ---------------------------------------------------------------------------


@dataclass
class ModelWitness:
    """A concrete finite model; ``kind`` selects which structure field is
    populated.  States are integers; ``labels`` maps states to true atoms."""

    kind: str  # kripke | multigraph | neighbourhood | distribution | game
    root: int
    states: list
    labels: dict
    serial: bool = False
    monotone: bool = False
    succ: dict = field(default_factory=dict)
    weights: dict = field(default_factory=dict)
    neigh: dict = field(default_factory=dict)
    dist: dict = field(default_factory=dict)
    games: dict = field(default_factory=dict)


class _Checker:
    def __init__(self, witness: ModelWitness):
        self.w = witness
        self.memo = {}

    def check(self, state: int, f: Formula) -> bool:
        key = (state, f)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = self._eval(state, f)
        self.memo[key] = result
        return result

    def _eval(self, state, f) -> bool:
        w = self.w
        if not isinstance(f, FModal):
            if isinstance(f, FAnd):
                return self.check(state, f.lhs) and self.check(state, f.rhs)
            if isinstance(f, FNot):
                return not self.check(state, f.arg)
            return False  # bottom
        op = f.op
        if isinstance(op, Atom):
            return op.name in w.labels.get(state, ())
        if isinstance(op, Box) and w.kind == "kripke":
            return all(self.check(t, f.arg) for t in w.succ.get(state, ()))
        if isinstance(op, Box) and w.kind == "neighbourhood":
            truth = frozenset(t for t in w.states if self.check(t, f.arg))
            hoods = w.neigh.get(state, ())
            if w.monotone:
                return any(member <= truth for member in hoods)
            return truth in hoods
        if isinstance(op, GDiamond):
            mass = sum(
                c for t, c in w.weights.get(state, {}).items() if self.check(t, f.arg)
            )
            return mass > op.grade
        if isinstance(op, MajW):
            inside = 0
            outside = 0
            for t, c in w.weights.get(state, {}).items():
                if self.check(t, f.arg):
                    inside += c
                else:
                    outside += c
            return inside >= outside
        if isinstance(op, LProb):
            mass = sum(
                p for t, p in w.dist.get(state, {}).items() if self.check(t, f.arg)
            )
            return mass >= op.prob
        if isinstance(op, Coal):
            sizes, table = w.games[state]
            agents = list(range(1, len(sizes) + 1))
            own = [i for i in agents if i in op.agents]
            rest = [i for i in agents if i not in op.agents]
            for mine in _profiles([sizes[i - 1] for i in own]):
                if all(
                    self.check(table[_merge(agents, own, mine, rest, theirs)], f.arg)
                    for theirs in _profiles([sizes[i - 1] for i in rest])
                ):
                    return True
            return False
        raise ValueError("operator %s not checkable in %s model" % (op.render(), w.kind))


def _profiles(sizes):
    if not sizes:
        return [()]
    out = [()]
    for s in sizes:
        out = [p + (i,) for p in out for i in range(s)]
    return out


def _merge(agents, own, mine, rest, theirs):
    choice = {}
    for a, v in zip(own, mine):
        choice[a] = v
    for a, v in zip(rest, theirs):
        choice[a] = v
    return tuple(choice[a] for a in agents)


def model_check(witness: ModelWitness, state: int, f: Formula) -> bool:
    return _Checker(witness).check(state, f)


# ---------------------------------------------------------------------------
# Tableaux
# ---------------------------------------------------------------------------


@dataclass
class Tableau:
    root: int
    nodes: list  # pseudovaluations: tuples of (positive, modal_atom)
    edges: list  # (src, label, dst); label as below


# Edge labels:
#   ("rule", clause, code, subst, gamma)  answer to a (clause, matching)
#       challenge via premise CNF clause gamma
#   ("pattern", formula)                  argument sign pattern child (linear
#       logics); formula is the pattern conjunction


def extract_tableau(verdict: Verdict, cfg: LogicConfig) -> Tableau:
    """Collapse a satisfiable trace into a dag of pseudovaluations."""
    if not verdict.satisfiable:
        raise ValueError("cannot extract a tableau from an unsatisfiable trace")
    index = {}
    nodes = []
    edges = []
    seen_edges = set()
    visited = {}

    def node_id(valuation):
        vid = index.get(valuation)
        if vid is None:
            vid = len(nodes)
            index[valuation] = vid
            nodes.append(valuation)
        return vid

    def visit(tn: SatNode) -> int:
        known = visited.get(id(tn))
        if known is not None:
            return known
        vid = node_id(tn.valuation)
        visited[id(tn)] = vid
        for ob in tn.obligations:
            if ob[0] == "rule":
                _, clause, m, gamma, child = ob
                cid = visit(child)
                label = ("rule", clause, m.code, m.subst, gamma)
            else:
                _, pf, child = ob
                cid = visit(child)
                label = ("pattern", pf)
            key = (vid, label, cid)
            if key not in seen_edges:
                seen_edges.add(key)
                edges.append((vid, label, cid))
        return vid

    root = visit(verdict.trace)
    return Tableau(root, nodes, edges)


def _is_pseudovaluation_for(valuation, f: Formula) -> bool:
    atoms = modal_atoms(f)
    if tuple(a for (_, a) in valuation) != atoms:
        # Allow any ordering as long as the atom sets agree and signs are
        # total and consistent.
        if {a for (_, a) in valuation} != set(atoms):
            return False
        if len({a for (_, a) in valuation}) != len(valuation):
            return False
    assign = {a: s for (s, a) in valuation}
    return eval_with(f, assign)


def check_tableau(tb: Tableau, f: Formula, cfg: LogicConfig):
    """Structural validity: returns (ok, message)."""
    n = len(tb.nodes)
    if not 0 <= tb.root < n:
        return False, "root out of range"
    if not _is_pseudovaluation_for(tb.nodes[tb.root], f):
        return False, "root is not a pseudovaluation for the formula"
    outgoing = {i: [] for i in range(n)}
    for src, label, dst in tb.edges:
        if not (0 <= src < n and 0 <= dst < n):
            return False, "edge endpoint out of range"
        valuation = tb.nodes[src]
        negations = {(not s, a) for (s, a) in valuation}
        if label[0] == "rule":
            _, clause, code, subst, gamma = label
            if not clause or not set(clause) <= negations:
                return False, "clause is not built from negated node literals"
            m = RuleMatching(code, subst)
            if not side_condition(code, cfg):
                return False, "rule code fails its side condition"
            try:
                concl = conclusion_clause(m, cfg.n_agents)
            except (ValueError, IndexError):
                return False, "malformed rule code"
            if concl != clause:
                return False, "rule conclusion does not match the clause"
            if any(
                isinstance(a, FModal) and not operator_legal(a.op, cfg)
                for (_, a) in concl
            ):
                return False, "rule uses an operator outside the logic"
            if not premise_has_clause(m.premise(), gamma):
                return False, "gamma is not a premise CNF clause"
            demand = negated_clause_instance(gamma, subst)
        else:
            if not cfg.is_arithmetic():
                return False, "pattern edges only occur in linear logics"
            demand = label[1]
            allowed = set()
            for (_, a) in valuation:
                if isinstance(a, FModal) and not isinstance(a.op, Atom):
                    allowed |= set(subformulas(a.arg))
            if not set(modal_atoms(demand)) <= {
                g for g in allowed if isinstance(g, FModal)
            }:
                return False, "pattern formula not built from argument formulas"
        if not _is_pseudovaluation_for(tb.nodes[dst], demand):
            return False, "edge target is not a pseudovaluation for its demand"
        outgoing[src].append((label, dst))
    # Challenge coverage: finite schemas (and congruence everywhere).
    for i, valuation in enumerate(tb.nodes):
        q = len(valuation)
        for mask in range(1, 1 << q):
            clause = tuple(
                (not s, a) for j, (s, a) in enumerate(valuation) if mask >> j & 1
            )
            if cfg.is_arithmetic():
                cands = congruence_matchings(clause, cfg.logic)
            else:
                cands = matchings(clause, cfg)
            for m in cands:
                answered = any(
                    label[0] == "rule"
                    and label[1] == clause
                    and label[2] == m.code
                    and label[3] == m.subst
                    for (label, _) in outgoing[i]
                )
                if not answered:
                    return False, "unanswered challenge at node %d" % i
    return True, "ok"


# ---------------------------------------------------------------------------
# Model synthesis from a tableau
# ---------------------------------------------------------------------------


def tableau_to_model(tb: Tableau, cfg: LogicConfig) -> Optional[ModelWitness]:
    """Turn a tableau into a concrete model by choosing structure at every
    node bottom-up.  Returns None for coalition logic (no synthesis) or when
    the bounded coherence search fails."""
    if cfg.logic == "COAL":
        return None
    builder = _ModelBuilder(tb, cfg)
    return builder.build()


class _ModelBuilder:
    def __init__(self, tb: Tableau, cfg: LogicConfig):
        self.tb = tb
        self.cfg = cfg
        kind = {
            "K": "kripke",
            "KD": "kripke",
            "E": "neighbourhood",
            "M": "neighbourhood",
            "GML": "multigraph",
            "MAJ": "multigraph",
            "PML": "distribution",
        }[cfg.logic]
        self.w = ModelWitness(
            kind=kind,
            root=tb.root,
            states=list(range(len(tb.nodes))),
            labels={},
            serial=cfg.logic == "KD",
            monotone=cfg.logic == "M",
        )
        self.checker = _Checker(self.w)
        self.sink = None
        # Intensional neighbourhoods during construction: formulas per state.
        self.neigh_formulas = {}

    def _make_sink(self) -> int:
        if self.sink is None:
            sink = len(self.w.states)
            self.w.states.append(sink)
            self.w.labels[sink] = frozenset()
            if self.w.kind == "kripke":
                self.w.succ[sink] = (sink,)
            elif self.w.kind == "distribution":
                self.w.dist[sink] = {sink: Fraction(1)}
            self.sink = sink
        return self.sink

    def build(self) -> Optional[ModelWitness]:
        tb = self.tb
        heights = []
        for valuation in tb.nodes:
            heights.append(max((a.depth for (_, a) in valuation), default=0))
        order = sorted(range(len(tb.nodes)), key=lambda i: (heights[i], i))
        children = {i: [] for i in range(len(tb.nodes))}
        for src, _, dst in tb.edges:
            if dst not in children[src]:
                children[src].append(dst)
        for i in range(len(tb.nodes)):
            self.w.labels[i] = frozenset(
                a.op.name
                for (s, a) in tb.nodes[i]
                if s and isinstance(a, FModal) and isinstance(a.op, Atom)
            )
        if self.w.kind == "neighbourhood":
            return self._build_neighbourhood(order, children)
        for i in order:
            if not self._build_node(i, sorted(children[i])):
                return None
            if not self._verify_node(i):
                return None
        return self.w

    def _literals(self, i):
        for s, a in self.tb.nodes[i]:
            if isinstance(a, FModal) and not isinstance(a.op, Atom):
                yield s, a

    def _build_node(self, i, kids) -> bool:
        kind = self.w.kind
        if kind == "kripke":
            pos = [a.arg for (s, a) in self._literals(i) if s]
            succ = [t for t in kids if all(self.checker.check(t, g) for g in pos)]
            if self.cfg.logic == "KD" and not succ:
                if pos:
                    return False
                succ = [self._make_sink()]
            self.w.succ[i] = tuple(succ)
            return True
        if kind == "multigraph":
            return self._build_multigraph(i, kids)
        if kind == "distribution":
            return self._build_distribution(i, kids)
        raise AssertionError(kind)

    def _verify_node(self, i) -> bool:
        for s, a in self.tb.nodes[i]:
            if self.checker.check(i, a) != s:
                return False
        return True

    # -- multigraph weights ------------------------------------------------

    def _build_multigraph(self, i, kids) -> bool:
        literals = list(self._literals(i))
        member = {
            t: tuple(self.checker.check(t, a.arg) for (_, a) in literals)
            for t in kids
        }
        # Merge children with the same membership vector; weight one block
        # representative.
        blocks = []
        reps = []
        seen = {}
        for t in kids:
            vec = member[t]
            if vec in seen:
                continue
            seen[vec] = t
            blocks.append(vec)
            reps.append(t)
        nb = len(blocks)
        cap = self.cfg.max_weight

        def satisfied(weights) -> bool:
            for li, (s, a) in enumerate(literals):
                inside = sum(w for b, w in enumerate(weights) if blocks[b][li])
                total = sum(weights)
                if isinstance(a.op, GDiamond):
                    ok = inside > a.op.grade
                else:
                    ok = inside >= total - inside
                if ok != s:
                    return False
            return True

        found = self._weight_search([0] * nb, 0, cap, satisfied)
        if found is None:
            return False
        self.w.weights[i] = {
            reps[b]: wgt for b, wgt in enumerate(found) if wgt > 0
        }
        return True

    def _weight_search(self, weights, idx, cap, satisfied):
        if idx == len(weights):
            return list(weights) if satisfied(weights) else None
        for value in range(cap + 1):
            weights[idx] = value
            got = self._weight_search(weights, idx + 1, cap, satisfied)
            if got is not None:
                return got
        weights[idx] = 0
        return None

    # -- distributions -----------------------------------------------------

    def _build_distribution(self, i, kids) -> bool:
        sink = self._make_sink()
        support = sorted(kids) + [sink]
        literals = list(self._literals(i))
        cons = []
        var = {t: "w%d" % t for t in support}
        for t in support:
            cons.append(({var[t]: Fraction(1)}, Fraction(0), False))
        total = {var[t]: Fraction(1) for t in support}
        cons.append((dict(total), Fraction(-1), False))
        cons.append(({v: -c for v, c in total.items()}, Fraction(1), False))
        for s, a in literals:
            inside = {
                var[t]: Fraction(1)
                for t in support
                if self.checker.check(t, a.arg)
            }
            if s:
                cons.append((dict(inside), -a.op.prob, False))
            else:
                cons.append(({v: -c for v, c in inside.items()}, a.op.prob, True))
        try:
            point = linarith.feasible(cons, [var[t] for t in support], self.cfg.fm_budget)
        except linarith.SearchBudgetExceeded:
            return False
        if point is None:
            return False
        self.w.dist[i] = {
            t: point[var[t]] for t in support if point[var[t]] > 0
        }
        return True

    # -- neighbourhoods ----------------------------------------------------

    def _build_neighbourhood(self, order, children) -> Optional[ModelWitness]:
        # Neighbourhoods are generated by the positive box arguments of each
        # node.  Generator truth sets are computed in formula-depth order
        # against the neighbourhoods frozen so far; the finished extensional
        # model is then re-validated literal by literal, so a staging
        # discrepancy can only make synthesis fail, never lie.
        gens = {}
        for i in order:
            seen = []
            for s, a in self._literals(i):
                if s and a.arg not in seen:
                    seen.append(a.arg)
            gens[i] = seen
        alpha = {i: [] for i in range(len(self.tb.nodes))}
        vec_cache = {}

        def tv(g) -> frozenset:
            cached = vec_cache.get(g)
            if cached is not None:
                return cached
            if isinstance(g, FAnd):
                result = tv(g.lhs) & tv(g.rhs)
            elif isinstance(g, FNot):
                result = frozenset(self.w.states) - tv(g.arg)
            elif isinstance(g, FModal) and isinstance(g.op, Atom):
                result = frozenset(
                    t for t in self.w.states if g.op.name in self.w.labels[t]
                )
            elif isinstance(g, FModal):
                inner = tv(g.arg)
                result = frozenset(
                    t
                    for t in self.w.states
                    if any(
                        member == inner or (self.w.monotone and member <= inner)
                        for member in alpha[t]
                    )
                )
            else:
                result = frozenset()
            vec_cache[g] = result
            return result

        ordered_gens = sorted(
            {g for seen in gens.values() for g in seen},
            key=lambda g: (g.depth, pretty(g)),
        )
        for g in ordered_gens:
            vector = tv(g)
            for i in range(len(self.tb.nodes)):
                if g in gens[i] and vector not in alpha[i]:
                    alpha[i].append(vector)
        for i in range(len(self.tb.nodes)):
            self.w.neigh[i] = tuple(alpha[i])
        checker = _Checker(self.w)
        for i in range(len(self.tb.nodes)):
            for s, a in self.tb.nodes[i]:
                if checker.check(i, a) != s:
                    return None
        return self.w


# ---------------------------------------------------------------------------
# Shallow proofs
# ---------------------------------------------------------------------------


@dataclass
class ClauseProof:
    clause: tuple
    kind: str  # "leaf" | "rule"
    matching: Optional[RuleMatching] = None
    parts: tuple = ()  # ((gamma, ProofDoc), ...)


@dataclass
class ProofDoc:
    formula: Formula
    clause_proofs: tuple


class ProofBuilder:
    """Dual search: proves a formula clause by clause, answering each clause
    with a rule instance whose conclusion is a subclause and whose premise
    CNF clauses are provable recursively."""

    def __init__(self, cfg: LogicConfig):
        self.cfg = cfg
        self.solver = Solver(cfg)
        self.memo = {}
        self.caveat = False

    def prove(self, f: Formula) -> Optional[ProofDoc]:
        if f in self.memo:
            return self.memo[f]
        clause_proofs = []
        doc = None
        for clause in cnf_clauses(f):
            cp = self._prove_clause(clause)
            if cp is None:
                clause_proofs = None
                break
            clause_proofs.append(cp)
        if clause_proofs is not None:
            doc = ProofDoc(f, tuple(clause_proofs))
        self.memo[f] = doc
        return doc

    def _prove_clause(self, clause) -> Optional[ClauseProof]:
        if is_tautology_clause(clause):
            return ClauseProof(clause, "leaf")
        q = len(clause)
        for mask in range(1, 1 << q):
            sub = tuple(clause[i] for i in range(q) if mask >> i & 1)
            if self.cfg.is_arithmetic():
                cands = list(congruence_matchings(sub, self.cfg.logic))
            else:
                cands = matchings(sub, self.cfg)
            for m in cands:
                parts = self._premise_parts(m)
                if parts is not None:
                    return ClauseProof(clause, "rule", m, parts)
            if self.cfg.is_arithmetic():
                m = self._arith_matching(sub)
                if m is not None:
                    parts = self._premise_parts(m)
                    if parts is not None:
                        return ClauseProof(clause, "rule", m, parts)
        return None

    def _arith_matching(self, sub):
        args = []
        for _, a in sub:
            if not isinstance(a, FModal) or isinstance(a.op, Atom):
                return None
            args.append(a.arg)
        sat_patterns = set()
        for bits in range(1 << len(args)):
            pf = conj_fold(
                [g if bits >> i & 1 else neg_fold(g) for i, g in enumerate(args)]
            )
            self.solver.root_depth = max(self.solver.root_depth, pf.depth)
            sat, _ = self.solver.solve(pf, 0)
            if sat:
                sat_patterns.add(bits)
        m, caveat = refuting_matching_exists(sub, sat_patterns, self.cfg)
        if caveat:
            self.caveat = True
        return m

    def _premise_parts(self, m: RuleMatching):
        parts = []
        for gamma in premise_cnf_clauses(m.premise()):
            inst = neg_fold(negated_clause_instance(gamma, m.subst))
            sub = self.prove(inst)
            if sub is None:
                return None
            parts.append((gamma, sub))
        return tuple(parts)


def extract_proof(verdict: Verdict, goal: Formula, cfg: LogicConfig) -> ProofDoc:
    """Build a shallow proof of ``goal`` from an unsatisfiability verdict for
    its negation."""
    if verdict.satisfiable:
        raise ValueError("cannot extract a proof from a satisfiable trace")
    if verdict.trace.formula is not neg_fold(goal):
        raise ValueError("trace does not refute the negation of the goal")
    doc = ProofBuilder(cfg).prove(goal)
    if doc is None:
        raise RuntimeError("proof search failed for a refuted goal")
    return doc


def check_proof(doc: ProofDoc, goal: Formula, cfg: LogicConfig):
    """Independent proof checking; returns (ok, message)."""
    if doc.formula is not goal:
        return False, "proof is not about the stated goal"
    return _check_doc(doc, cfg)


def _check_doc(doc: ProofDoc, cfg: LogicConfig):
    expected = cnf_clauses(doc.formula)
    got = tuple(cp.clause for cp in doc.clause_proofs)
    if got != expected:
        return False, "clause list does not match the CNF of the node formula"
    for cp in doc.clause_proofs:
        if cp.kind == "leaf":
            if not is_tautology_clause(cp.clause):
                return False, "leaf clause is not a tautology"
            continue
        if cp.kind != "rule" or cp.matching is None:
            return False, "malformed clause proof"
        m = cp.matching
        if not side_condition(m.code, cfg):
            return False, "rule code fails its side condition"
        try:
            concl = conclusion_clause(m, cfg.n_agents)
        except (ValueError, IndexError):
            return False, "malformed rule code"
        if any(
            isinstance(a, FModal) and not operator_legal(a.op, cfg)
            for (_, a) in concl
        ):
            return False, "rule uses an operator outside the logic"
        if not clause_entails(concl, cp.clause):
            return False, "rule conclusion does not entail the clause"
        seen = {gamma: sub for gamma, sub in cp.parts}
        for gamma in premise_cnf_clauses(m.premise()):
            sub = seen.get(gamma)
            if sub is None:
                return False, "premise CNF clause without a sub-proof"
            want = neg_fold(negated_clause_instance(gamma, m.subst))
            if sub.formula is not want:
                return False, "sub-proof proves the wrong instance"
            ok, msg = _check_doc(sub, cfg)
            if not ok:
                return False, msg
    return True, "ok"


def audit_proof_subformulas(doc: ProofDoc, goal: Formula) -> bool:
    """Weak subformula property: every modal atom mentioned anywhere in the
    proof is a subformula of the goal."""
    allowed = set(subformulas(goal))

    def walk(d: ProofDoc) -> bool:
        if not set(modal_atoms(d.formula)) <= allowed:
            return False
        for cp in d.clause_proofs:
            if cp.kind == "rule":
                for _, sub in cp.parts:
                    if not walk(sub):
                        return False
        return True

    return walk(doc)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _lit_str(lit) -> str:
    positive, a = lit
    return pretty(a) if positive else "~" + pretty(a)


def _lit_parse(text: str, n_agents: int):
    f = parse(text, n_agents)
    if isinstance(f, FNot):
        return (False, f.arg)
    return (True, f)


def _frac_str(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator)


def _frac_parse(text: str) -> Fraction:
    num, den = str(text).split("/")
    return Fraction(int(num), int(den))


def model_to_json(w: ModelWitness) -> dict:
    payload = {
        "model_kind": w.kind,
        "root": w.root,
        "states": list(w.states),
        "labels": {str(s): sorted(w.labels.get(s, ())) for s in w.states},
        "serial": w.serial,
        "monotone": w.monotone,
    }
    if w.kind == "kripke":
        payload["succ"] = {str(s): list(w.succ.get(s, ())) for s in w.states}
    elif w.kind == "multigraph":
        payload["weights"] = {
            str(s): {str(t): c for t, c in sorted(w.weights.get(s, {}).items())}
            for s in w.states
        }
    elif w.kind == "neighbourhood":
        payload["neigh"] = {
            str(s): [sorted(member) for member in w.neigh.get(s, ())]
            for s in w.states
        }
    elif w.kind == "distribution":
        payload["dist"] = {
            str(s): {
                str(t): _frac_str(p) for t, p in sorted(w.dist.get(s, {}).items())
            }
            for s in w.states
        }
    elif w.kind == "game":
        payload["games"] = {
            str(s): {
                "sizes": list(sizes),
                "table": {
                    ",".join(str(i) for i in profile): t
                    for profile, t in sorted(table.items())
                },
            }
            for s, (sizes, table) in sorted(w.games.items())
        }
    return {"kind": "model", "version": CERT_VERSION, "payload": payload}


def model_from_json(doc: dict) -> ModelWitness:
    payload = doc["payload"]
    w = ModelWitness(
        kind=payload["model_kind"],
        root=int(payload["root"]),
        states=[int(s) for s in payload["states"]],
        labels={int(s): frozenset(v) for s, v in payload["labels"].items()},
        serial=bool(payload.get("serial", False)),
        monotone=bool(payload.get("monotone", False)),
    )
    if w.kind == "kripke":
        w.succ = {int(s): tuple(v) for s, v in payload["succ"].items()}
    elif w.kind == "multigraph":
        w.weights = {
            int(s): {int(t): int(c) for t, c in v.items()}
            for s, v in payload["weights"].items()
        }
    elif w.kind == "neighbourhood":
        w.neigh = {
            int(s): tuple(frozenset(member) for member in v)
            for s, v in payload["neigh"].items()
        }
    elif w.kind == "distribution":
        w.dist = {
            int(s): {int(t): _frac_parse(p) for t, p in v.items()}
            for s, v in payload["dist"].items()
        }
    elif w.kind == "game":
        w.games = {
            int(s): (
                tuple(v["sizes"]),
                {
                    tuple(int(i) for i in k.split(",") if i != ""): int(t)
                    for k, t in v["table"].items()
                },
            )
            for s, v in payload["games"].items()
        }
    else:
        raise ValueError("unknown model kind %r" % w.kind)
    return w


def _gamma_json(gamma):
    return [[bool(s), int(v)] for (s, v) in gamma]


def _gamma_parse(data):
    return tuple((bool(s), int(v)) for s, v in data)


def tableau_to_json(tb: Tableau) -> dict:
    edges = []
    for src, label, dst in tb.edges:
        if label[0] == "rule":
            _, clause, code, subst, gamma = label
            edges.append(
                {
                    "src": src,
                    "dst": dst,
                    "label": {
                        "kind": "rule",
                        "clause": [_lit_str(lit) for lit in clause],
                        "code": code.to_json(),
                        "substitution": [pretty(g) for g in subst],
                        "gamma": _gamma_json(gamma),
                    },
                }
            )
        else:
            edges.append(
                {
                    "src": src,
                    "dst": dst,
                    "label": {"kind": "pattern", "formula": pretty(label[1])},
                }
            )
    payload = {
        "root": tb.root,
        "nodes": [[_lit_str(lit) for lit in valuation] for valuation in tb.nodes],
        "edges": edges,
    }
    return {"kind": "tableau", "version": CERT_VERSION, "payload": payload}


def tableau_from_json(doc: dict, n_agents: int) -> Tableau:
    payload = doc["payload"]
    nodes = [
        tuple(_lit_parse(t, n_agents) for t in valuation)
        for valuation in payload["nodes"]
    ]
    edges = []
    for e in payload["edges"]:
        label = e["label"]
        if label["kind"] == "rule":
            edges.append(
                (
                    int(e["src"]),
                    (
                        "rule",
                        tuple(_lit_parse(t, n_agents) for t in label["clause"]),
                        RuleCode.from_json(label["code"]),
                        tuple(parse(t, n_agents) for t in label["substitution"]),
                        _gamma_parse(label["gamma"]),
                    ),
                    int(e["dst"]),
                )
            )
        else:
            edges.append(
                (
                    int(e["src"]),
                    ("pattern", parse(label["formula"], n_agents)),
                    int(e["dst"]),
                )
            )
    return Tableau(int(payload["root"]), nodes, edges)


def proof_to_json(doc: ProofDoc) -> dict:
    return {"kind": "proof", "version": CERT_VERSION, "payload": _proof_payload(doc)}


def _proof_payload(doc: ProofDoc) -> dict:
    clauses = []
    for cp in doc.clause_proofs:
        entry = {"clause": [_lit_str(lit) for lit in cp.clause], "type": cp.kind}
        if cp.kind == "rule":
            entry["rule"] = cp.matching.code.to_json()
            entry["substitution"] = [pretty(g) for g in cp.matching.subst]
            entry["parts"] = [
                {"gamma": _gamma_json(gamma), "sub": _proof_payload(sub)}
                for gamma, sub in cp.parts
            ]
        clauses.append(entry)
    return {"formula": pretty(doc.formula), "clauses": clauses}


def proof_from_json(doc: dict, n_agents: int) -> ProofDoc:
    return _proof_parse(doc["payload"], n_agents)


def _proof_parse(payload: dict, n_agents: int) -> ProofDoc:
    clause_proofs = []
    for entry in payload["clauses"]:
        clause = tuple(_lit_parse(t, n_agents) for t in entry["clause"])
        if entry["type"] == "leaf":
            clause_proofs.append(ClauseProof(clause, "leaf"))
            continue
        code = RuleCode.from_json(entry["rule"])
        subst = tuple(parse(t, n_agents) for t in entry["substitution"])
        parts = tuple(
            (_gamma_parse(p["gamma"]), _proof_parse(p["sub"], n_agents))
            for p in entry["parts"]
        )
        clause_proofs.append(
            ClauseProof(clause, "rule", RuleMatching(code, subst), parts)
        )
    return ProofDoc(parse(payload["formula"], n_agents), tuple(clause_proofs))


def certificate_to_json(cert) -> dict:
    if isinstance(cert, ModelWitness):
        return model_to_json(cert)
    if isinstance(cert, Tableau):
        return tableau_to_json(cert)
    if isinstance(cert, ProofDoc):
        return proof_to_json(cert)
    raise TypeError("not a certificate: %r" % (cert,))


def certificate_from_json(doc: dict, n_agents: int):
    kind = doc.get("kind")
    if doc.get("version") != CERT_VERSION:
        raise ValueError("unsupported certificate version %r" % doc.get("version"))
    if kind == "model":
        return model_from_json(doc)
    if kind == "tableau":
        return tableau_from_json(doc, n_agents)
    if kind == "proof":
        return proof_from_json(doc, n_agents)
    raise ValueError("unknown certificate kind %r" % kind)


def check_certificate(cert, f: Formula, cfg: LogicConfig):
    """Dispatching checker: (ok, message)."""
    if isinstance(cert, ModelWitness):
        ok = model_check(cert, cert.root, f)
        return ok, "ok" if ok else "model does not satisfy the formula at its root"
    if isinstance(cert, Tableau):
        return check_tableau(cert, f, cfg)
    if isinstance(cert, ProofDoc):
        return check_proof(cert, f, cfg)
    raise TypeError("not a certificate: %r" % (cert,))
