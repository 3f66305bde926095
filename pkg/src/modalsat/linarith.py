"""Exact feasibility of linear inequality systems over the rationals.

A constraint is ``(coeffs, const, strict)`` standing for
``sum(coeffs[v] * x_v) + const >= 0`` (``> 0`` when strict), with Fraction
coefficients.  Feasibility is decided by Fourier-Motzkin elimination; on
success a sample point with small entries is reconstructed by
back-substitution, preferring integers near zero.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional


class SearchBudgetExceeded(Exception):
    """Raised when elimination grows past the configured constraint budget."""


def _normalize(coeffs, const, strict):
    coeffs = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
    return (coeffs, Fraction(const), bool(strict))


def _dedupe(constraints):
    seen = set()
    out = []
    for coeffs, const, strict in constraints:
        key = (tuple(sorted(coeffs.items())), const, strict)
        if key in seen:
            continue
        seen.add(key)
        out.append((coeffs, const, strict))
    return out


def _combine(lower, upper, var):
    """Eliminate ``var`` from a pair with positive / negative coefficient."""
    lc, lk, ls = lower
    uc, uk, us = upper
    a = lc[var]
    b = -uc[var]
    coeffs = {}
    for v, c in lc.items():
        if v != var:
            coeffs[v] = coeffs.get(v, Fraction(0)) + b * c
    for v, c in uc.items():
        if v != var:
            coeffs[v] = coeffs.get(v, Fraction(0)) + a * c
    coeffs = {v: c for v, c in coeffs.items() if c != 0}
    return (coeffs, b * lk + a * uk, ls or us)


def _evaluate(coeffs, const, point):
    total = const
    for v, c in coeffs.items():
        total += c * point[v]
    return total


def _pick_value(lb, lb_strict, ub, ub_strict) -> Optional[Fraction]:
    """Pick a small rational in the interval, or None if it is empty."""
    if lb is not None and ub is not None:
        if lb > ub or (lb == ub and (lb_strict or ub_strict)):
            return None
    lo_int = None
    if lb is not None:
        lo_int = -(-lb.numerator // lb.denominator)  # ceil
        if lb_strict and lo_int == lb:
            lo_int += 1
    hi_int = None
    if ub is not None:
        hi_int = ub.numerator // ub.denominator  # floor
        if ub_strict and hi_int == ub:
            hi_int -= 1
    if lo_int is None and hi_int is None:
        return Fraction(0)
    if lo_int is None:
        return Fraction(min(hi_int, 0))
    if hi_int is None:
        return Fraction(max(lo_int, 0))
    if lo_int <= hi_int:
        if lo_int <= 0 <= hi_int:
            return Fraction(0)
        return Fraction(lo_int if lo_int > 0 else hi_int)
    # No integer fits; fall back to the midpoint of the rational interval.
    return (lb + ub) / 2


def feasible(constraints, variables, max_constraints: int = 50000) -> Optional[dict]:
    """Return a satisfying assignment (dict var -> Fraction) or None.

    ``variables`` fixes the elimination order; every variable mentioned by a
    constraint must be listed.
    """
    work = _dedupe(_normalize(c, k, s) for c, k, s in constraints)
    stack = []
    for var in reversed(list(variables)):
        lowers = []
        uppers = []
        rest = []
        for con in work:
            a = con[0].get(var)
            if a is None:
                rest.append(con)
            elif a > 0:
                lowers.append(con)
            else:
                uppers.append(con)
        stack.append((var, lowers, uppers))
        new = list(rest)
        for lo in lowers:
            for up in uppers:
                new.append(_combine(lo, up, var))
        work = _dedupe(new)
        if len(work) > max_constraints:
            raise SearchBudgetExceeded(
                "elimination produced %d constraints" % len(work)
            )
    for coeffs, const, strict in work:
        if const < 0 or (strict and const == 0):
            return None
    point = {}
    for var, lowers, uppers in reversed(stack):
        lb = None
        lb_strict = False
        for coeffs, const, strict in lowers:
            a = coeffs[var]
            rest = const
            for v, c in coeffs.items():
                if v != var:
                    rest += c * point[v]
            bound = -rest / a
            if lb is None or bound > lb or (bound == lb and strict):
                lb = bound
                lb_strict = strict
        ub = None
        ub_strict = False
        for coeffs, const, strict in uppers:
            a = coeffs[var]
            rest = const
            for v, c in coeffs.items():
                if v != var:
                    rest += c * point[v]
            bound = -rest / a
            if ub is None or bound < ub or (bound == ub and strict):
                ub = bound
                ub_strict = strict
        value = _pick_value(lb, lb_strict, ub, ub_strict)
        if value is None:
            return None
        point[var] = value
    for coeffs, const, strict in _dedupe(_normalize(c, k, s) for c, k, s in constraints):
        total = _evaluate(coeffs, const, point)
        if total < 0 or (strict and total == 0):
            return None
    return point
