"""Float warm start: solve in double precision, then hand an exact basis over.

HiGHS (through scipy) supplies a floating solution; its support is turned
into a candidate basis by exact elimination and completed with artificial
columns.  The exact engine then refactorizes that basis in rationals and
only pivots if the float answer was not already exactly optimal.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .simplex import ZERO, ExactSimplex

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
SUPPORT_TOL = 1e-9


def _matrix(engine: ExactSimplex, with_artificials: bool):
    rows, cols, vals = [], [], []
    ncols = engine.n + (engine.m if with_artificials else 0)
    for j in range(ncols):
        for i, a in engine.cols[j]:
            rows.append(i)
            cols.append(j)
            vals.append(float(a))
    return csr_matrix((vals, (rows, cols)), shape=(engine.m, ncols))


def float_solve(engine: ExactSimplex, phase1: bool = False):
    """Return ``(status, x)`` from HiGHS on the (sign-normalized) standard form.

    ``status`` is "optimal", "infeasible", "unbounded" or "failed".  With
    ``phase1`` the artificial columns are included and their sum minimized.
    """
    if engine.m == 0:
        return "failed", None
    a = _matrix(engine, phase1)
    b = np.array([float(v) for v in engine.b])
    if phase1:
        c = np.concatenate([np.zeros(engine.n), np.ones(engine.m)])
    else:
        c = np.array([float(v) for v in engine.sf.c])
    res = linprog(c, A_eq=a, b_eq=b, bounds=(0, None), method="highs")
    if res.status == 2:
        return "infeasible", None
    if res.status == 3:
        return "unbounded", None
    if res.status != 0 or res.x is None:
        return "failed", None
    resid = np.max(np.abs(a @ res.x - b)) if engine.m else 0.0
    if resid >= RESIDUAL_TOL:
        log.debug("float residual %.3g too large", resid)
        return "failed", None
    return "optimal", res.x


def crash_basis(engine: ExactSimplex, x) -> list[int]:
    """Independent support columns of ``x`` completed to a basis with artificials."""
    m = engine.m
    order = sorted((j for j in range(len(x)) if x[j] > SUPPORT_TOL), key=lambda j: -x[j])
    pivots: list[tuple[int, list]] = []  # (pivot row, reduced column)
    chosen: list[int] = []
    for j in order:
        if len(chosen) == m:
            break
        v = [ZERO] * m
        for i, a in engine.cols[j]:
            v[i] = a
        for prow, pvec in pivots:
            f = v[prow]
            if f != 0:
                f = f / pvec[prow]
                for i in range(m):
                    if pvec[i] != 0:
                        v[i] -= f * pvec[i]
        nz = next((i for i in range(m) if v[i] != 0), None)
        if nz is None:
            continue
        pivots.append((nz, v))
        chosen.append(j)
    covered = {p for p, _ in pivots}
    basis = list(chosen)
    for i in range(m):
        if i not in covered:
            basis.append(engine.n + i)
    return basis


def warm_basis(engine: ExactSimplex) -> tuple[list[int] | None, str]:
    """Best-effort starting basis from HiGHS; ``(None, reason)`` if unusable."""
    status, x = float_solve(engine)
    if status == "optimal":
        return crash_basis(engine, x), "optimal"
    if status == "infeasible":
        status1, x1 = float_solve(engine, phase1=True)
        if status1 == "optimal":
            return crash_basis(engine, x1), "infeasible"
        return None, "phase-1 float solve failed"
    return None, f"float solve {status}"
