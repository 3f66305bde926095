"""End-to-end acceptance checks: a hand-picked validity corpus, certificate
soundness on random corpora, brute-force oracle agreement, rule-set
soundness under sampling and resolution, structural bounds, and
determinism of all JSON artifacts."""

import json
import random
import time
from fractions import Fraction

import pytest

from conftest import ALL_LOGICS, ARITH, config_for, corpus, max_atoms_per_level
from modalsat.certificates import (
    audit_proof_subformulas,
    certificate_to_json,
    check_proof,
    check_tableau,
    extract_proof,
    extract_tableau,
    model_check,
    tableau_to_model,
)
from modalsat.formula import neg, neg_fold, parse
from modalsat.logics import LogicConfig, side_condition
from modalsat.onestep import RuleCode
from modalsat.oracle import brute_force_sat, one_step_sound, resolve_rules
from modalsat.sampling import sample_matchings
from modalsat.solver import satisfiable

# ---------------------------------------------------------------------------
# 1. Validity corpus
# ---------------------------------------------------------------------------


def bang(n: int, body: str) -> str:
    """Exactly-n counting abbreviation over the graded diamond."""
    if n == 0:
        return "~<0>(%s)" % body
    return "(<%d>(%s) & ~<%d>(%s))" % (n - 1, body, n, body)


def gbox(body: str) -> str:
    """Graded box: no successor falsifies the body."""
    return "~<0>~(%s)" % body


VALID = [
    ("K", "[](a -> b) -> ([]a -> []b)"),
    ("KD", "[](a -> b) -> ([]a -> []b)"),
    ("KD", "~[]false"),
    ("E", "(a -> a)"),
    ("M", "[](a & b) -> []a"),
    # Graded: diamond antitone in the grade.
    ("GML", "<1>a -> <0>a"),
    ("GML", "<2>a -> <1>a"),
    ("GML", "<3>a -> <2>a"),
    # Graded: box distributes over implication at every grade.
    ("GML", "%s -> (<0>a -> <0>b)" % gbox("a -> b")),
    ("GML", "%s -> (<1>a -> <1>b)" % gbox("a -> b")),
    ("GML", "%s -> (<2>a -> <2>b)" % gbox("a -> b")),
    # Graded: exact counts of disjoint sets add.
    ("GML", "%s -> ((%s & %s) -> %s)" % (bang(0, "a & b"), bang(0, "a"), bang(0, "b"), bang(0, "a | b"))),
    ("GML", "%s -> ((%s & %s) -> %s)" % (bang(0, "a & b"), bang(1, "a"), bang(0, "b"), bang(1, "a | b"))),
    ("GML", "%s -> ((%s & %s) -> %s)" % (bang(0, "a & b"), bang(1, "a"), bang(1, "b"), bang(2, "a | b"))),
    ("GML", "%s -> ((%s & %s) -> %s)" % (bang(0, "a & b"), bang(2, "a"), bang(1, "b"), bang(3, "a | b"))),
    # Graded: the box holds of the constant truth.
    ("GML", gbox("true")),
    # Majority: two weak majorities overlap.
    ("MAJ", "M a & M b -> <0>(a & b)"),
    ("MAJ", "M a & %s -> M b" % gbox("a -> b")),
    ("MAJ", "W a & W b & <0>(~a & ~b) -> <0>(a & b)"),
    ("MAJ", "W a & W b & <1>(~a & ~b) -> <1>(a & b)"),
    ("MAJ", "W a & M b & <0>(~a & ~b) -> <1>(a & b)"),
    ("MAJ", "W a & M b & <1>(~a & ~b) -> <2>(a & b)"),
    # Probabilistic: trivial bounds, total mass, and additivity boundaries.
    ("PML", "L{0/1}a"),
    ("PML", "L{1/1}true"),
    ("PML", "~L{2/3}a | ~L{2/3}~a"),
    ("PML", "~L{1/1}a | ~L{1/2}~a"),
    ("PML", "L{1/2}a | L{1/2}~a"),
    ("PML", "L{2/3}a | L{1/3}~a"),
    # Coalitions: monotone, superadditive, and jointly consistent.
    ("COAL:2", "[C 1]a -> [C 1,2]a"),
    ("COAL:2", "[C 1]a & [C 2]b -> [C 1,2](a & b)"),
    ("COAL:2", "~([C 1]a & [C 2]~a)"),
    ("COAL:2", "[C 1,2](a | ~a)"),
]

INVALID = [
    ("K", "[](a | b) -> ([]a | []b)"),
    ("PML", "L{1/2}(a | b) -> (L{1/2}a | L{1/2}b)"),
    ("E", "[](a & b) -> []a"),
    ("GML", "<0>a -> <1>a"),
    ("MAJ", "W a -> M a"),
    ("COAL:2", "[C 1,2]a -> [C 1]a"),
]


def _cfg(spec: str) -> LogicConfig:
    if ":" in spec:
        logic, n = spec.split(":")
        return LogicConfig(logic=logic, n_agents=int(n))
    return LogicConfig(logic=spec)


@pytest.mark.parametrize("spec,text", VALID)
def test_validity_corpus_valid(spec, text):
    cfg = _cfg(spec)
    f = parse(text, cfg.n_agents)
    start = time.monotonic()
    verdict = satisfiable(neg_fold(f), cfg)
    elapsed = time.monotonic() - start
    assert not verdict.satisfiable, text
    assert not verdict.caveat
    assert elapsed < 5.0
    doc = extract_proof(verdict, f, cfg)
    ok, msg = check_proof(doc, f, cfg)
    assert ok, (text, msg)


@pytest.mark.parametrize("spec,text", INVALID)
def test_validity_corpus_invalid(spec, text):
    cfg = _cfg(spec)
    f = parse(text, cfg.n_agents)
    start = time.monotonic()
    verdict = satisfiable(neg_fold(f), cfg)
    elapsed = time.monotonic() - start
    assert verdict.satisfiable, text
    assert elapsed < 5.0
    # A countermodel exists within the brute-force bounds.
    w = brute_force_sat(neg_fold(f), _cfg(spec))
    assert w is not None, text


# ---------------------------------------------------------------------------
# 2 + 5. Certificate soundness loop with structural assertions
# ---------------------------------------------------------------------------

CORPUS_SIZE = 500


@pytest.mark.parametrize("logic", ALL_LOGICS)
def test_certificate_loop(logic):
    cfg, formulas = corpus(logic, CORPUS_SIZE, seed=2024)
    for f in formulas:
        verdict = satisfiable(f, cfg)
        assert verdict.stats.recursion_peak <= f.depth
        if verdict.satisfiable:
            tb = extract_tableau(verdict, cfg)
            ok, msg = check_tableau(tb, f, cfg)
            assert ok, (logic, msg)
            if logic == "COAL":
                continue
            w = tableau_to_model(tb, cfg)
            if w is None:
                w = brute_force_sat(f, cfg)
            assert w is not None, logic
            assert model_check(w, w.root, f)
        else:
            goal = neg(f)
            doc = extract_proof(verdict, goal, cfg)
            ok, msg = check_proof(doc, goal, cfg)
            assert ok, (logic, msg)
            assert audit_proof_subformulas(doc, goal)


# ---------------------------------------------------------------------------
# 3. Brute-force oracle agreement
# ---------------------------------------------------------------------------

ORACLE_BUDGET = {"GML": 60, "MAJ": 80, "PML": 40, "COAL": 60}


@pytest.mark.parametrize("logic", ALL_LOGICS)
def test_oracle_agreement(logic):
    budget = ORACLE_BUDGET.get(logic, 120)
    cfg, formulas = corpus(logic, CORPUS_SIZE, seed=2024)
    checked = exact = 0
    for f in formulas:
        if checked >= budget:
            break
        if f.depth > 2:
            continue
        checked += 1
        verdict = satisfiable(f, cfg)
        w = brute_force_sat(f, cfg)
        if w is not None:
            # Any witness the oracle finds must be confirmed by the solver.
            assert verdict.satisfiable, (logic, f)
        if max_atoms_per_level(f) <= 2:
            # Here bounded tree search is exhaustive: exact agreement.
            exact += 1
            assert verdict.satisfiable == (w is not None), (logic, f)
    assert checked >= 30
    assert exact >= 10


# ---------------------------------------------------------------------------
# 4. Rule-set validation
# ---------------------------------------------------------------------------

MATCHING_SAMPLES = 1000


@pytest.mark.parametrize("logic", ALL_LOGICS)
def test_sampled_matchings_sound(logic):
    cfg = config_for(logic)
    rng = random.Random(77)
    ms = sample_matchings(rng, cfg, MATCHING_SAMPLES)
    assert len(ms) == MATCHING_SAMPLES
    carrier = 2 if logic in ARITH else None
    for code in sorted({m.code for m in ms}, key=repr):
        assert side_condition(code, cfg), (logic, code)
        assert one_step_sound(code, cfg, max_carrier=carrier), (logic, code)


def _unit_linear_codes(rng, cfg, count):
    out = []
    while len(out) < count:
        q = rng.randrange(2, 4)
        ints = tuple(rng.choice((1, -1)) for _ in range(q))
        if 1 not in ints or -1 not in ints:
            continue
        if cfg.logic == "GML":
            code = RuleCode("GML", "GML", ints + (0,), (),
                            tuple(rng.randrange(0, 3) for _ in range(q)), ())
        elif cfg.logic == "MAJ":
            grades = tuple(
                -1 if rng.random() < 0.5 else rng.randrange(0, 3) for _ in range(q)
            )
            code = RuleCode("MAJ", "MAJ", ints + (rng.choice((-1, 0, 1)),), (), grades, ())
        else:
            rationals = tuple(
                min(Fraction(rng.randrange(0, 4), rng.randrange(1, 4)), Fraction(1))
                for _ in range(q)
            )
            code = RuleCode("PML", "PML", ints + (rng.choice((-1, 0, 1)),), rationals, (), ())
        if side_condition(code, cfg):
            out.append(code)
    return out


def _resolvable(c1, c2):
    pairs = []
    for i, r in enumerate(c1.ints[:-1]):
        if r != 1:
            continue
        for j, r2 in enumerate(c2.ints[:-1]):
            if r2 != -1:
                continue
            if c1.scheme == "PML":
                if c1.rationals[i] == c2.rationals[j]:
                    pairs.append((i, j))
            elif c1.grades[i] == c2.grades[j]:
                pairs.append((i, j))
    return pairs


@pytest.mark.parametrize("logic", ARITH)
def test_resolvent_closure(logic):
    cfg = config_for(logic)
    rng = random.Random(2024)
    codes = _unit_linear_codes(rng, cfg, 200)
    checked = 0
    for c1 in codes:
        for c2 in codes:
            for i, j in _resolvable(c1, c2):
                r = resolve_rules(c1, c2, i, j)
                assert r is not None
                assert side_condition(r, cfg), (c1, c2)
                assert one_step_sound(r, cfg, max_carrier=2), (c1, c2)
                checked += 1
                break
            if checked >= 200:
                break
        if checked >= 200:
            break
    assert checked >= 200


# ---------------------------------------------------------------------------
# 6. Determinism of JSON artifacts
# ---------------------------------------------------------------------------


def _pipeline_report(logic):
    cfg, formulas = corpus(logic, 40, seed=99, max_depth=2, size_budget=7)
    records = []
    for f in formulas:
        verdict = satisfiable(f, cfg)
        if verdict.satisfiable:
            tb = extract_tableau(verdict, cfg)
            cert = certificate_to_json(tb)
            w = None if logic == "COAL" else tableau_to_model(tb, cfg)
            model = None if w is None else certificate_to_json(w)
        else:
            doc = extract_proof(verdict, neg(f), cfg)
            cert = certificate_to_json(doc)
            model = None
        records.append(
            {
                "satisfiable": verdict.satisfiable,
                "caveat": verdict.caveat,
                "certificate": cert,
                "model": model,
            }
        )
    return json.dumps(records, sort_keys=True, separators=(",", ":"))


@pytest.mark.parametrize("logic", ALL_LOGICS)
def test_byte_identical_reports(logic):
    assert _pipeline_report(logic) == _pipeline_report(logic)
