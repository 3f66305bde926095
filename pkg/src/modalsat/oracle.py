"""Independent semantic oracle.

Everything here evaluates the modal operators directly against small concrete
structures, without touching the solver:

* ``one_step_sound`` checks a rule instance against all structures over small
  carriers;
* ``brute_force_sat`` searches for a finite tree-shaped (or carrier-based, for
  the neighbourhood logics) model by exhaustive bounded enumeration;
* ``resolve_rules`` cut-combines two linear rule instances on a pivot literal;
* ``strict_completeness_probe`` hunts for a rule instance matching a clause
  that is valid over a given concrete one-step argument assignment.

The searches are bounded, so a ``None`` answer from ``brute_force_sat`` means
"no model within the bounds", not unsatisfiability in general; within the
small-formula regimes used by the tests the bounds are exhaustive.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional

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
    subformulas,
)
from .logics import LogicConfig, matchings, refuting_matching_exists
from .onestep import (
    ClausePremise,
    LinearPremise,
    RuleCode,
    RuleMatching,
    code_operators,
    congruence_matchings,
)
from .certificates import ModelWitness, model_check


# ---------------------------------------------------------------------------
# One-step semantic backends
# ---------------------------------------------------------------------------


class PowersetBackend:
    kind = "kripke"

    def __init__(self, serial: bool):
        self.serial = serial

    def structures(self, n: int):
        for mask in range(1 if self.serial else 0, 1 << n):
            yield frozenset(i for i in range(n) if mask >> i & 1)

    def lift(self, op, struct, subset: frozenset) -> bool:
        return struct <= subset


class NeighbourhoodBackend:
    kind = "neighbourhood"

    def __init__(self, monotone: bool):
        self.monotone = monotone

    def structures(self, n: int):
        subsets = [
            frozenset(i for i in range(n) if mask >> i & 1)
            for mask in range(1 << n)
        ]
        for pick in range(1 << len(subsets)):
            alpha = frozenset(
                subsets[i] for i in range(len(subsets)) if pick >> i & 1
            )
            if self.monotone:
                # Up-closed collections only.
                if not all(
                    other in alpha
                    for member in alpha
                    for other in subsets
                    if member <= other
                ):
                    continue
            yield alpha

    def lift(self, op, struct, subset: frozenset) -> bool:
        if self.monotone:
            return any(member <= subset for member in struct)
        return subset in struct


class MultisetBackend:
    kind = "multigraph"

    def __init__(self, max_multiplicity: int):
        self.max_multiplicity = max_multiplicity

    def structures(self, n: int):
        return itertools.product(range(self.max_multiplicity + 1), repeat=n)

    def lift(self, op, struct, subset: frozenset) -> bool:
        inside = sum(struct[i] for i in subset)
        if isinstance(op, GDiamond):
            return inside > op.grade
        total = sum(struct)
        return inside >= total - inside


class DistributionBackend:
    kind = "distribution"

    def __init__(self, max_denominator: int):
        self.max_denominator = max_denominator

    def structures(self, n: int):
        if n == 0:
            return
        seen = set()
        for den in range(1, self.max_denominator + 1):
            for parts in _compositions(den, n):
                dist = tuple(Fraction(p, den) for p in parts)
                if dist not in seen:
                    seen.add(dist)
                    yield dist

    def lift(self, op, struct, subset: frozenset) -> bool:
        return sum((struct[i] for i in subset), Fraction(0)) >= op.prob


def _compositions(total: int, parts: int):
    """All splits of ``total`` into ``parts`` non-negative summands."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


class GameBackend:
    kind = "game"

    def __init__(self, n_agents: int, max_strategies: int):
        self.n_agents = n_agents
        self.max_strategies = max_strategies

    def structures(self, n: int):
        if n == 0:
            return
        for sizes in itertools.product(
            range(1, self.max_strategies + 1), repeat=self.n_agents
        ):
            profiles = list(itertools.product(*(range(s) for s in sizes)))
            for outcomes in itertools.product(range(n), repeat=len(profiles)):
                yield (sizes, dict(zip(profiles, outcomes)))

    def lift(self, op, struct, subset: frozenset) -> bool:
        sizes, table = struct
        agents = list(range(1, self.n_agents + 1))
        own = [a for a in agents if a in op.agents]
        rest = [a for a in agents if a not in op.agents]
        for mine in itertools.product(*(range(sizes[a - 1]) for a in own)):
            choice = dict(zip(own, mine))
            if all(
                table[tuple({**choice, **dict(zip(rest, theirs))}[a] for a in agents)]
                in subset
                for theirs in itertools.product(*(range(sizes[a - 1]) for a in rest))
            ):
                return True
        return False


def backend_for(cfg: LogicConfig):
    if cfg.logic == "K":
        return PowersetBackend(serial=False)
    if cfg.logic == "KD":
        return PowersetBackend(serial=True)
    if cfg.logic == "E":
        return NeighbourhoodBackend(monotone=False)
    if cfg.logic == "M":
        return NeighbourhoodBackend(monotone=True)
    if cfg.logic in ("GML", "MAJ"):
        return MultisetBackend(cfg.max_multiplicity)
    if cfg.logic == "PML":
        return DistributionBackend(cfg.max_denominator)
    if cfg.logic == "COAL":
        return GameBackend(cfg.n_agents, cfg.max_strategies)
    raise ValueError("unknown logic %r" % cfg.logic)


# ---------------------------------------------------------------------------
# One-step rule soundness
# ---------------------------------------------------------------------------


def _premise_holds(premise, tau, n: int) -> bool:
    """Does every carrier element satisfy the propositional premise under the
    subset assignment ``tau``?"""
    if isinstance(premise, ClausePremise):
        for clause in premise.clauses:
            for x in range(n):
                if not any((x in tau[v]) == s for (s, v) in clause):
                    return False
        return True
    if isinstance(premise, LinearPremise):
        for x in range(n):
            weight = sum(c for c, t in zip(premise.coeffs, tau) if x in t)
            if weight < premise.bound:
                return False
        return True
    raise TypeError(premise)


_SOUNDNESS_CACHE = {}


def one_step_sound(code: RuleCode, cfg: LogicConfig, max_carrier: int = None) -> bool:
    """Checks the one-step rule instance: over every carrier up to the bound,
    every argument assignment validating the premise, and every structure,
    some conclusion literal must hold."""
    if max_carrier is None:
        max_carrier = cfg.max_carrier
    cache_key = (code, cfg.logic, cfg.n_agents, max_carrier)
    cached = _SOUNDNESS_CACHE.get(cache_key)
    if cached is not None:
        return cached
    result = _one_step_sound(code, cfg, max_carrier)
    _SOUNDNESS_CACHE[cache_key] = result
    return result


def _one_step_sound(code: RuleCode, cfg: LogicConfig, max_carrier: int) -> bool:
    from .onestep import premise_of

    q = code.arity()
    premise = premise_of(code)
    ops = code_operators(code, cfg.n_agents)
    signs = code.signs()
    backend = backend_for(cfg)
    for n in range(max_carrier + 1):
        subsets = [
            frozenset(i for i in range(n) if mask >> i & 1)
            for mask in range(1 << n)
        ]
        for tau in itertools.product(subsets, repeat=q):
            if not _premise_holds(premise, tau, n):
                continue
            for struct in backend.structures(n):
                if not any(
                    backend.lift(ops[i], struct, tau[i]) == signs[i]
                    for i in range(q)
                ):
                    return False
    return True


# ---------------------------------------------------------------------------
# Brute-force satisfiability
# ---------------------------------------------------------------------------


class _Proto:
    """A concrete state under construction inside a scratch model."""

    __slots__ = ("sid", "label", "struct")

    def __init__(self, sid, label, struct):
        self.sid = sid
        self.label = label  # frozenset of atom names
        self.struct = struct  # kind-specific, referencing child protos


class _TreeEnumerator:
    """Level-wise enumeration of bounded tree models (with self-loop leaves
    where the logic forbids dead ends)."""

    def __init__(self, f: Formula, cfg: LogicConfig):
        self.f = f
        self.cfg = cfg
        self.kind = {
            "K": "kripke",
            "KD": "kripke",
            "GML": "multigraph",
            "MAJ": "multigraph",
            "PML": "distribution",
            "COAL": "game",
        }[cfg.logic]
        subs = subformulas(f)
        self.prop_names = []
        self.args = []
        for g in subs:
            if isinstance(g, FModal):
                if isinstance(g.op, Atom):
                    if g.op.name not in self.prop_names:
                        self.prop_names.append(g.op.name)
                elif g.arg not in self.args:
                    self.args.append(g.arg)
        self.memo = {}
        self.next_sid = 0

    # -- truth of a formula at a proto --------------------------------------

    def holds(self, proto: _Proto, g: Formula) -> bool:
        key = (proto.sid, g)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        result = self._eval(proto, g)
        self.memo[key] = result
        return result

    def _eval(self, proto, g) -> bool:
        if isinstance(g, FAnd):
            return self.holds(proto, g.lhs) and self.holds(proto, g.rhs)
        if isinstance(g, FNot):
            return not self.holds(proto, g.arg)
        if not isinstance(g, FModal):
            return False  # bottom
        op = g.op
        if isinstance(op, Atom):
            return op.name in proto.label
        if isinstance(op, Box):
            return all(self.holds(t, g.arg) for t in proto.struct)
        if isinstance(op, GDiamond):
            inside = sum(c for t, c in proto.struct if self.holds(t, g.arg))
            return inside > op.grade
        if isinstance(op, MajW):
            inside = sum(c for t, c in proto.struct if self.holds(t, g.arg))
            total = sum(c for _, c in proto.struct)
            return inside >= total - inside
        if isinstance(op, LProb):
            inside = sum(
                (p for t, p in proto.struct if self.holds(t, g.arg)), Fraction(0)
            )
            return inside >= op.prob
        if isinstance(op, Coal):
            sizes, table = proto.struct
            agents = list(range(1, self.cfg.n_agents + 1))
            own = [a for a in agents if a in op.agents]
            rest = [a for a in agents if a not in op.agents]
            for mine in itertools.product(*(range(sizes[a - 1]) for a in own)):
                choice = dict(zip(own, mine))
                if all(
                    self.holds(
                        table[
                            tuple(
                                {**choice, **dict(zip(rest, theirs))}[a]
                                for a in agents
                            )
                        ],
                        g.arg,
                    )
                    for theirs in itertools.product(
                        *(range(sizes[a - 1]) for a in rest)
                    )
                ):
                    return True
            return False
        raise AssertionError(op)

    # -- structure generation ------------------------------------------------

    def _labels(self):
        for mask in range(1 << len(self.prop_names)):
            yield frozenset(
                nm for i, nm in enumerate(self.prop_names) if mask >> i & 1
            )

    def _terminal_structs(self, proto_slot):
        """Structures with no real children; proto_slot lets self-loops refer
        to the state being created."""
        kind = self.kind
        if kind == "kripke":
            if self.cfg.logic == "KD":
                yield [proto_slot]
            else:
                yield []
        elif kind == "multigraph":
            yield []
        elif kind == "distribution":
            yield [(proto_slot, Fraction(1))]
        elif kind == "game":
            sizes = tuple(1 for _ in range(self.cfg.n_agents))
            profile = tuple(0 for _ in range(self.cfg.n_agents))
            yield (sizes, {profile: proto_slot})

    def _child_structs(self, children):
        """Structures over a fixed non-empty tuple of child protos."""
        kind = self.kind
        cfg = self.cfg
        if kind == "kripke":
            yield list(children)
        elif kind == "multigraph":
            for ws in itertools.product(
                range(1, cfg.max_multiplicity + 1), repeat=len(children)
            ):
                yield list(zip(children, ws))
        elif kind == "distribution":
            seen = set()
            for den in range(len(children), cfg.max_denominator + 1):
                for parts in _compositions(den - len(children), len(children)):
                    probs = tuple(Fraction(p + 1, den) for p in parts)
                    if probs in seen:
                        continue
                    seen.add(probs)
                    yield list(zip(children, probs))
        elif kind == "game":
            for sizes in itertools.product(
                range(1, cfg.max_strategies + 1), repeat=cfg.n_agents
            ):
                profiles = list(itertools.product(*(range(s) for s in sizes)))
                for outs in itertools.product(children, repeat=len(profiles)):
                    yield (sizes, dict(zip(profiles, outs)))

    def _make(self, label, struct) -> _Proto:
        proto = _Proto(self.next_sid, label, None)
        self.next_sid += 1
        proto.struct = self._patch(struct, proto)
        return proto

    def _patch(self, struct, proto):
        """Replace self-loop placeholders (None) with the new proto."""
        fix = lambda t: proto if t is None else t
        if self.kind == "kripke":
            return tuple(fix(t) for t in struct)
        if self.kind == "multigraph":
            return tuple((fix(t), c) for t, c in struct)
        if self.kind == "distribution":
            return tuple((fix(t), p) for t, p in struct)
        if self.kind == "game":
            sizes, table = struct
            return (sizes, {prof: fix(t) for prof, t in table.items()})
        raise AssertionError(self.kind)

    # -- the search ----------------------------------------------------------

    def search(self, depth_bound: int) -> Optional[_Proto]:
        level = []
        vectors = set()

        def tracked(d):
            names = tuple(self.prop_names)
            return names, tuple(g for g in self.args if g.depth <= d)

        def vec(proto, d):
            names, gs = tracked(d)
            return (
                tuple(nm in proto.label for nm in names),
                tuple(self.holds(proto, g) for g in gs),
            )

        def add(proto, d, pool):
            v = vec(proto, d)
            if v not in vectors:
                vectors.add(v)
                pool.append(proto)

        # Candidate generation shared between inner levels and the root.
        def candidates(pool):
            for label in self._labels():
                for struct in self._terminal_structs(None):
                    yield self._make(label, struct)
            for size in range(1, self.cfg.branch_bound + 1):
                for children in itertools.combinations(pool, size):
                    for label in self._labels():
                        for struct in self._child_structs(children):
                            yield self._make(label, struct)

        if depth_bound == 0:
            for label in self._labels():
                for struct in self._terminal_structs(None):
                    proto = self._make(label, struct)
                    if self.holds(proto, self.f):
                        return proto
            return None

        for d in range(depth_bound):
            new_pool = []
            vectors = set()
            for proto in level:
                add(proto, d, new_pool)
            if d == 0:
                for label in self._labels():
                    for struct in self._terminal_structs(None):
                        add(self._make(label, struct), d, new_pool)
            else:
                for proto in candidates(level):
                    add(proto, d, new_pool)
            level = new_pool
        for proto in candidates(level):
            if self.holds(proto, self.f):
                return proto
        return None

    # -- witness materialization ----------------------------------------------

    def materialize(self, root: _Proto) -> ModelWitness:
        cfg = self.cfg
        w = ModelWitness(
            kind=self.kind,
            root=0,
            states=[],
            labels={},
            serial=cfg.logic == "KD",
        )
        ids = {}

        def visit(proto: _Proto) -> int:
            if proto.sid in ids:
                return ids[proto.sid]
            s = len(w.states)
            ids[proto.sid] = s
            w.states.append(s)
            w.labels[s] = proto.label
            if self.kind == "kripke":
                w.succ[s] = ()
                w.succ[s] = tuple(visit(t) for t in proto.struct)
            elif self.kind == "multigraph":
                w.weights[s] = {}
                for t, c in proto.struct:
                    w.weights[s][visit(t)] = c
            elif self.kind == "distribution":
                w.dist[s] = {}
                for t, p in proto.struct:
                    tid = visit(t)
                    w.dist[s][tid] = w.dist[s].get(tid, Fraction(0)) + p
            elif self.kind == "game":
                sizes, table = proto.struct
                w.games[s] = (sizes, {})
                for prof, t in table.items():
                    w.games[s][1][prof] = visit(t)
            return s

        w.root = visit(root)
        return w


def _neighbourhood_sat(f: Formula, cfg: LogicConfig) -> Optional[ModelWitness]:
    """Carrier-based search for the neighbourhood logics: choose labels and a
    truth bit for every (state, box-argument) pair, enforce that equal (or,
    for the monotone logic, included) argument truth sets get consistent
    bits, then read the neighbourhoods off the positive bits."""
    monotone = cfg.logic == "M"
    subs = subformulas(f)
    prop_names = []
    args = []
    for g in subs:
        if isinstance(g, FModal):
            if isinstance(g.op, Atom):
                if g.op.name not in prop_names:
                    prop_names.append(g.op.name)
            elif g.arg not in args:
                args.append(g.arg)
    args.sort(key=lambda g: g.depth)  # stable: ties keep first-occurrence order
    np, na = len(prop_names), len(args)

    for n in range(1, cfg.max_carrier + 1):
        width = n * (np + na)
        if width > 22:
            break
        for choice in range(1 << width):
            label = []
            boxbit = []
            pos = 0
            for s in range(n):
                label.append(
                    frozenset(
                        prop_names[i] for i in range(np) if choice >> (pos + i) & 1
                    )
                )
                pos += np
                boxbit.append(
                    tuple(bool(choice >> (pos + i) & 1) for i in range(na))
                )
                pos += na

            def ev(s, g):
                if isinstance(g, FAnd):
                    return ev(s, g.lhs) and ev(s, g.rhs)
                if isinstance(g, FNot):
                    return not ev(s, g.arg)
                if not isinstance(g, FModal):
                    return False
                if isinstance(g.op, Atom):
                    return g.op.name in label[s]
                return boxbit[s][args.index(g.arg)]

            truth_sets = [
                frozenset(s for s in range(n) if ev(s, g)) for g in args
            ]
            consistent = True
            for i in range(na):
                for j in range(na):
                    if i == j:
                        continue
                    if monotone:
                        if truth_sets[i] <= truth_sets[j]:
                            if any(
                                boxbit[s][i] and not boxbit[s][j] for s in range(n)
                            ):
                                consistent = False
                                break
                    elif truth_sets[i] == truth_sets[j]:
                        if any(boxbit[s][i] != boxbit[s][j] for s in range(n)):
                            consistent = False
                            break
                if not consistent:
                    break
            if not consistent:
                continue
            root = next((s for s in range(n) if ev(s, f)), None)
            if root is None:
                continue
            w = ModelWitness(
                kind="neighbourhood",
                root=root,
                states=list(range(n)),
                labels={s: label[s] for s in range(n)},
                monotone=monotone,
            )
            for s in range(n):
                hoods = []
                for i in range(na):
                    if boxbit[s][i] and truth_sets[i] not in hoods:
                        hoods.append(truth_sets[i])
                w.neigh[s] = tuple(hoods)
            if model_check(w, root, f):
                return w
    return None


def brute_force_sat(
    f: Formula, cfg: LogicConfig, depth_bound: int = None
) -> Optional[ModelWitness]:
    """Exhaustive bounded model search; returns a checked witness or None."""
    if cfg.logic in ("E", "M"):
        return _neighbourhood_sat(f, cfg)
    if depth_bound is None:
        depth_bound = f.depth
    enum = _TreeEnumerator(f, cfg)
    root = enum.search(depth_bound)
    if root is None:
        return None
    w = enum.materialize(root)
    if not model_check(w, w.root, f):
        raise AssertionError("enumerated witness failed its own check")
    return w


# ---------------------------------------------------------------------------
# Rule resolution
# ---------------------------------------------------------------------------


def resolve_rules(code1: RuleCode, code2: RuleCode, i: int, j: int) -> Optional[RuleCode]:
    """Cut two unit-coefficient linear rule instances on a pivot: literal
    ``i`` of the first (must be positive, coefficient +1) against literal
    ``j`` of the second (negative, coefficient -1) over the same operator.
    Returns the combined instance, or None when the pivot does not line up."""
    if code1.scheme != code2.scheme or code1.scheme not in ("GML", "MAJ", "PML"):
        return None
    if any(abs(r) != 1 for r in code1.ints[:-1] + code2.ints[:-1]):
        return None
    q1, q2 = code1.arity(), code2.arity()
    if not (0 <= i < q1 and 0 <= j < q2):
        return None
    if code1.ints[i] != 1 or code2.ints[j] != -1:
        return None

    def op_key(code, k):
        if code.scheme == "GML":
            return code.grades[k]
        if code.scheme == "MAJ":
            return code.grades[k]
        return code.rationals[k]

    if op_key(code1, i) != op_key(code2, j):
        return None
    ints = (
        tuple(r for k, r in enumerate(code1.ints[:-1]) if k != i)
        + tuple(r for k, r in enumerate(code2.ints[:-1]) if k != j)
        + (code1.ints[-1] + code2.ints[-1],)
    )
    grades = tuple(g for k, g in enumerate(code1.grades) if k != i) + tuple(
        g for k, g in enumerate(code2.grades) if k != j
    )
    rationals = tuple(r for k, r in enumerate(code1.rationals) if k != i) + tuple(
        r for k, r in enumerate(code2.rationals) if k != j
    )
    return RuleCode(code1.logic, code1.scheme, ints, rationals, grades, ())


# ---------------------------------------------------------------------------
# Strict one-step completeness probe
# ---------------------------------------------------------------------------


def clause_valid_on(chi, tau, n: int, cfg: LogicConfig) -> bool:
    """Is the abstract clause ``chi`` (pairs of sign and operator) true under
    every structure, given the argument subsets ``tau``?"""
    backend = backend_for(cfg)
    for struct in backend.structures(n):
        if not any(
            backend.lift(op, struct, tau[i]) == s for i, (s, op) in enumerate(chi)
        ):
            return False
    return True


def strict_completeness_probe(
    chi, tau, n: int, cfg: LogicConfig
) -> Optional[RuleMatching]:
    """Given a clause of signed operators valid over ``tau``, find a rule
    instance whose conclusion is a subclause and whose premise holds pointwise
    on the carrier.  Returns None when no instance is found."""
    from .formula import atom, modal

    lits = tuple((s, modal(op, atom("v%d" % i))) for i, (s, op) in enumerate(chi))
    q = len(lits)
    for mask in range(1, 1 << q):
        positions = [i for i in range(q) if mask >> i & 1]
        sub = tuple(lits[i] for i in positions)
        sub_tau = tuple(tau[i] for i in positions)
        if cfg.is_arithmetic():
            cands = list(congruence_matchings(sub, cfg.logic))
        else:
            cands = matchings(sub, cfg)
        for m in cands:
            if _premise_holds(m.premise(), sub_tau, n):
                return m
        if cfg.is_arithmetic() and all(
            isinstance(a, FModal) and not isinstance(a.op, Atom) for (_, a) in sub
        ):
            table = {
                sum(1 << k for k in range(len(sub)) if x in sub_tau[k])
                for x in range(n)
            }
            m, _ = refuting_matching_exists(sub, table, cfg)
            if m is not None:
                return m
    return None
