"""Sparse exact-rational linear programming.

``solve`` runs a rational simplex (Bland's rule) either from scratch
(``mode="exact"``) or warm-started from a double-precision HiGHS solution
(``mode="fast"``).  Either way the returned point, optimum and
infeasibility certificate are exact and re-verified before returning.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable

from .program import (EQ, GE, LE, Constraint, LinearProgram, LPSolution, Status, check_point,
                      objective_at, to_lp_text, verify_farkas)
from .simplex import ExactSimplex, StandardForm, to_fraction

log = logging.getLogger(__name__)

MODES = ("exact", "fast")
_MODE_ALIASES = {"float-then-verify": "fast", "float": "fast"}


def _normalize_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def solve(lp: LinearProgram, mode: str = "exact", pricing: str = "bland",
          max_iter: int | None = None) -> LPSolution:
    mode = _normalize_mode(mode)
    lp.check()
    sf = StandardForm(lp)
    engine = ExactSimplex(sf, pricing=pricing, max_iter=max_iter)
    fallback = False
    notes = []
    warm = None
    if mode == "fast" and sf.m > 0:
        from .fast import warm_basis

        warm, reason = warm_basis(engine)
        if warm is None:
            fallback = True
            notes.append(f"NumericFallback: {reason}")
    res = engine.solve(warm_basis=warm)
    if warm is not None and engine.iterations > 0:
        notes.append(f"exact refinement took {engine.iterations} pivot(s)")
    if fallback:
        log.info("lp: %s", notes[-1])
    sol = _to_solution(lp, sf, res, mode, fallback, notes)
    _verify(lp, sol)
    return sol


def _to_solution(lp, sf, res, mode, fallback, notes) -> LPSolution:
    kwargs = dict(mode=mode, fallback=fallback, iterations=res.iterations, notes=notes)
    if res.status == "infeasible":
        cert = [to_fraction(res.farkas[r]) for r in sf.constraint_rows]
        return LPSolution(Status.INFEASIBLE, certificate=cert, **kwargs)
    if res.status == "unbounded":
        return LPSolution(Status.UNBOUNDED, **kwargs)
    if res.status != "optimal":
        raise RuntimeError(f"simplex stopped early: {res.status}")
    point = sf.recover(res.x)
    duals = [to_fraction(res.duals[r]) for r in sf.constraint_rows]
    status = Status.OPTIMAL if any(v != 0 for v in lp.objective.values()) else Status.FEASIBLE
    return LPSolution(status, point=point, objective_value=to_fraction(res.objective),
                      duals=duals, **kwargs)


def _verify(lp: LinearProgram, sol: LPSolution) -> None:
    if sol.feasible:
        problems = check_point(lp, sol.point)
        if problems:
            raise AssertionError(f"solver returned an infeasible point: {problems[:3]}")
        if objective_at(lp, sol.point) != sol.objective_value:
            raise AssertionError("objective value does not match the returned point")
    elif sol.status == Status.INFEASIBLE:
        if not verify_farkas(lp, sol.certificate):
            raise AssertionError("infeasibility certificate failed exact verification")


def split_signed(lp: LinearProgram, signed_vars: Iterable[int]) -> tuple[LinearProgram, dict]:
    """Rewrite each signed variable ``x`` as ``u - w`` with ``u, w >= 0``.

    ``u`` keeps index ``j``; ``w`` gets a fresh index returned in the map.
    The objective gains ``u + w`` for every split variable.
    """
    signed = sorted(set(signed_vars))
    neg = {j: lp.num_vars + k for k, j in enumerate(signed)}
    out = LinearProgram(lp.num_vars + len(signed))
    for row in lp.constraints:
        coeffs = dict(row.coeffs)
        for j, a in row.coeffs.items():
            if j in neg:
                coeffs[neg[j]] = -a
        out.constraints.append(Constraint(coeffs, row.relation, row.rhs, row.name))
    out.objective = dict(lp.objective)
    for j in signed:
        cj = lp.objective.get(j, Fraction(0))
        out.objective[j] = cj + 1
        out.objective[neg[j]] = 1 - cj
    out.bounds = {j: b for j, b in lp.bounds.items() if j not in neg}
    for j in signed:
        out.bounds[j] = (Fraction(0), None)
    if lp.var_names:
        out.var_names = list(lp.var_names) + [f"{lp.var_names[j]}_neg" for j in signed]
    return out, neg


def minimize_l1(lp: LinearProgram, signed_vars: Iterable[int], mode: str = "exact") -> LPSolution:
    """Minimize ``sum |x_j|`` over ``signed_vars`` (plus ``lp.objective``).

    The returned point is in the original variables and ``objective_value``
    is the optimal L1 norm plus any original objective term.
    """
    split, neg = split_signed(lp, signed_vars)
    sol = solve(split, mode=mode)
    if not sol.feasible:
        sol.point = None
        return sol
    point = list(sol.point[: lp.num_vars])
    for j, k in neg.items():
        point[j] = sol.point[j] - sol.point[k]
    value = objective_at(lp, point) + sum((abs(point[j]) for j in neg), Fraction(0))
    if value != sol.objective_value:
        raise AssertionError("split optimum has overlapping positive and negative parts")
    sol.point = point
    sol.status = Status.OPTIMAL
    return sol


def fixed_at_zero(lp: LinearProgram) -> set[int]:
    """Variables forced to 0 by a zero-rhs row whose terms cannot cancel."""
    fixed: set[int] = set()
    for row in lp.constraints:
        if row.rhs != 0 or any(lp.bound(j)[0] != 0 for j in row.coeffs):
            continue
        signs = {a > 0 for a in row.coeffs.values()}
        pinned = {EQ: len(signs) == 1, LE: signs == {True}, GE: signs == {False}}
        if pinned[row.relation]:
            fixed.update(row.coeffs)
    return fixed


def enumerate_vertices(lp: LinearProgram, limit: int = 100, max_bases: int = 20000) -> list[list]:
    """Distinct vertices of ``{x : constraints, bounds}`` (up to ``limit``).

    Variables pinned to zero are removed first, then the graph of feasible
    bases is walked breadth-first.  The walk is exhaustive for bounded
    polyhedra when ``max_bases`` is not hit.
    """
    lp.check()
    fixed = fixed_at_zero(lp)
    keep = [j for j in range(lp.num_vars) if j not in fixed]
    index = {j: k for k, j in enumerate(keep)}
    reduced = LinearProgram(len(keep))
    for row in lp.constraints:
        coeffs = {index[j]: a for j, a in row.coeffs.items() if j in index}
        if coeffs:
            reduced.constraints.append(Constraint(coeffs, row.relation, row.rhs, row.name))
        elif not {EQ: row.rhs == 0, LE: row.rhs >= 0, GE: row.rhs <= 0}[row.relation]:
            return []
    reduced.bounds = {index[j]: b for j, b in lp.bounds.items() if j in index}
    if not reduced.constraints or not keep:
        origin = [Fraction(0)] * lp.num_vars
        return [] if check_point(lp, origin) else [origin]
    sf = StandardForm(reduced)
    engine = ExactSimplex(sf)
    pts = engine.feasible_bases(limit, max_bases)
    if pts is None:
        return []
    out, seen = [], set()
    for p in pts:
        x = tuple(sf.recover(p))
        if x not in seen:
            seen.add(x)
            full = [Fraction(0)] * lp.num_vars
            for k, j in enumerate(keep):
                full[j] = x[k]
            out.append(full)
    return out


__all__ = ["LinearProgram", "Constraint", "LPSolution", "Status", "solve", "minimize_l1",
           "split_signed", "enumerate_vertices", "fixed_at_zero", "check_point", "verify_farkas", "to_lp_text",
           "objective_at", "EQ", "LE", "GE", "MODES"]
