"""Satisfiability, provability, and certificates for rank-1 modal logics."""

from .formula import Formula, ParseError, parse, pretty
from .logics import LogicConfig, LOGICS, parse_logic_spec, validate_formula
from .solver import Verdict, satisfiable
from .certificates import (
    ModelWitness,
    ProofDoc,
    Tableau,
    certificate_from_json,
    certificate_to_json,
    check_certificate,
    check_proof,
    check_tableau,
    extract_proof,
    extract_tableau,
    model_check,
    tableau_to_model,
)
from .oracle import brute_force_sat, one_step_sound

__version__ = "0.1.0"

__all__ = [
    "Formula",
    "ParseError",
    "parse",
    "pretty",
    "LogicConfig",
    "LOGICS",
    "parse_logic_spec",
    "validate_formula",
    "Verdict",
    "satisfiable",
    "ModelWitness",
    "ProofDoc",
    "Tableau",
    "certificate_from_json",
    "certificate_to_json",
    "check_certificate",
    "check_proof",
    "check_tableau",
    "extract_proof",
    "extract_tableau",
    "model_check",
    "tableau_to_model",
    "brute_force_sat",
    "one_step_sound",
    "__version__",
]
