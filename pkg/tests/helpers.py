"""Test building blocks: the categorical examples, random generators, oracles.

The oracles here are deliberately built without the package's coupling or
contextuality code.  They use a separate rational Gaussian elimination, or
only the package's generic LP solver on independently constructed programs.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from cbd2 import lp
from cbd2.corpus import BINARY, Skeleton, cyclic_skeleton, random_pmf, rex_skeleton
from cbd2.model import CCSystem, make_system

HALF = Fraction(1, 2)


# -- the two categorical examples ------------------------------------------------

EX1_VALUES = ("1", "2", "3")
EX1_ROWS = ((0, HALF, HALF), (HALF, 0, HALF), (HALF, HALF, 0))

EX2_VALUES = ("1", "1'", "2", "2'", "3", "3'")
EX2_ROWS = ((0, 0, 0, HALF, 0, HALF), (0, HALF, 0, 0, HALF, 0), (HALF, 0, HALF, 0, 0, 0))

# The two displayed couplings of the six-valued example.
EX2_T_DOT = {("2'", "1'", "1"): HALF, ("3'", "3", "2"): HALF}
EX2_T_DDOT = {("2'", "3", "2"): HALF, ("3'", "1'", "1"): HALF}


def single_connection(values, rows, content: str = "q") -> CCSystem:
    """One content measured alone in contexts c1, c2, ... with the given masses."""
    bunches = []
    for i, row in enumerate(rows, start=1):
        pmf = {(v,): Fraction(p) for v, p in zip(values, row) if p}
        bunches.append((f"c{i}", [content], pmf))
    return make_system({content: values}, bunches)


def example1() -> CCSystem:
    return single_connection(EX1_VALUES, EX1_ROWS)


def example2() -> CCSystem:
    return single_connection(EX2_VALUES, EX2_ROWS)


def binary_connection_system(ps) -> CCSystem:
    """Single binary connection with ``Pr[value 1] = ps[i]`` in context i+1."""
    return single_connection(BINARY, [(p, 1 - p) for p in ps])


# -- random generators ---------------------------------------------------------

def random_probability(rng: random.Random, max_den: int = 64) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def latent_threshold_system(skeleton: Skeleton, rng: random.Random, levels: int = 3,
                            max_weight: int = 4) -> CCSystem:
    """Noncontextual by construction.

    A latent U_q per content is drawn from one random joint distribution;
    cell (q, c) reads 1 when U_q < t[q, c].  Threshold functions of a shared
    latent couple each connection multimaximally, and the latent joint
    couples everything else.
    """
    latent = random_pmf(list(itertools.product(range(levels), repeat=len(skeleton.contents))),
                        rng, max_weight)
    pos = {q: i for i, q in enumerate(skeleton.contents)}
    thresholds = {(q, ctx): rng.randint(0, levels)
                  for ctx, qs in skeleton.layout for q in qs}
    pmfs = {}
    for ctx, qs in skeleton.layout:
        pmf: dict = {}
        for u, mass in latent.items():
            out = tuple(1 if u[pos[q]] < thresholds[q, ctx] else 2 for q in qs)
            pmf[out] = pmf.get(out, Fraction(0)) + mass
        pmfs[ctx] = pmf
    return skeleton.attach(pmfs)


def consistent_system(skeleton: Skeleton, rng: random.Random, swaps: int = 6) -> CCSystem:
    """Consistently connected: one Pr[value 1] per content, shared by every context.

    Each bunch starts as the product of its contents' marginals and is then
    perturbed by moves that shift mass around a 2x2 face of two cells, which
    keeps every univariate marginal fixed.
    """
    a = {q: Fraction(rng.randint(1, 5), 6) for q in skeleton.contents}
    pmfs = {}
    for ctx, qs in skeleton.layout:
        pmf: dict = {}
        for out in itertools.product(BINARY, repeat=len(qs)):
            mass = Fraction(1)
            for q, v in zip(qs, out):
                mass *= a[q] if v == 1 else 1 - a[q]
            pmf[out] = mass
        for _ in range(swaps):
            if len(qs) < 2:
                break
            i, j = rng.sample(range(len(qs)), 2)
            rest = [rng.choice(BINARY) for _ in qs]

            def at(vi, vj):
                o = list(rest)
                o[i], o[j] = vi, vj
                return tuple(o)
            sign = rng.choice((1, -1))
            up = [at(1, 1), at(2, 2)] if sign > 0 else [at(1, 2), at(2, 1)]
            down = [at(1, 2), at(2, 1)] if sign > 0 else [at(1, 1), at(2, 2)]
            room = min(pmf[o] for o in down)
            delta = room * Fraction(rng.randint(0, 4), 4)
            for o in up:
                pmf[o] += delta
            for o in down:
                pmf[o] -= delta
        pmfs[ctx] = {o: m for o, m in pmf.items() if m}
    return skeleton.attach(pmfs)


def random_small_skeleton(rng: random.Random) -> Skeleton:
    """R_ex or a cyclic shape of rank 2..6 (at most 12 cells)."""
    if rng.random() < 0.4:
        return rex_skeleton()
    return cyclic_skeleton(rng.randint(2, 6))


def marginal_couplings_program(conn) -> lp.LinearProgram:
    """Nonnegative masses over a binary connection's outcomes with the right margins only."""
    k = len(conn.cells)
    outcomes = list(itertools.product(BINARY, repeat=k))
    prog = lp.LinearProgram(len(outcomes))
    for i, m in enumerate(conn.marginals):
        for v in BINARY:
            cols = [j for j, o in enumerate(outcomes) if o[i] == v]
            prog.add(dict.fromkeys(cols, 1), lp.EQ, m.prob((v,)))
    return prog


# -- oracles -------------------------------------------------------------------

def content_assignment_rows(system: CCSystem):
    """Bunch-marginal rows over assignments of one value per content.

    Returns ``(assignments, rows)`` with each row ``(columns, rhs)``.
    """
    vs = [system.value_sets[q].labels for q in system.contents]
    assignments = list(itertools.product(*vs))
    index = {q: i for i, q in enumerate(system.contents)}
    rows = []
    for b in system.bunches:
        pos = [index[q] for q in b.contents]
        for out in itertools.product(*(system.value_sets[q].labels for q in b.contents)):
            cols = [j for j, a in enumerate(assignments) if tuple(a[p] for p in pos) == out]
            rows.append((cols, b.dist.prob(out)))
    return assignments, rows


def traditional_noncontextual(system: CCSystem) -> bool:
    """Identity-coupling test: a proper joint over content assignments."""
    assignments, rows = content_assignment_rows(system)
    prog = lp.LinearProgram(len(assignments))
    for cols, rhs in rows:
        prog.add({j: 1 for j in cols}, lp.EQ, rhs)
    return lp.solve(prog).feasible


def _solve_square(a, b):
    """Exact solution of a nonsingular square system, or None if singular."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _row_basis(rows):
    """Indices of a maximal linearly independent subset of rows."""
    basis, reduced = [], []
    for i, r in enumerate(rows):
        v = list(r)
        for piv, w in reduced:
            if v[piv] != 0:
                f = v[piv] / w[piv]
                v = [x - f * y for x, y in zip(v, w)]
        piv = next((k for k, x in enumerate(v) if x != 0), None)
        if piv is not None:
            basis.append(i)
            reduced.append((piv, v))
    return basis


def min_l1_by_vertex_enumeration(matrix, rhs) -> Fraction | None:
    """``min sum |x|`` subject to ``matrix x = rhs`` with x free.

    Every vertex of the split polytope ``{u, w >= 0 : A(u - w) = b}`` is a
    basic solution of ``A x = b``, so the minimum over all column subsets
    of size rank(A) with a nonsingular square restriction is the optimum.
    """
    keep = _row_basis(matrix)
    a = [matrix[i] for i in keep]
    b = [rhs[i] for i in keep]
    full = [list(r) + [v] for r, v in zip(matrix, rhs)]
    if len(_row_basis(full)) != len(keep):
        return None
    r, n = len(a), len(a[0])
    best = None
    for cols in itertools.combinations(range(n), r):
        sq = [[row[j] for j in cols] for row in a]
        x = _solve_square(sq, b)
        if x is None:
            continue
        val = sum((abs(v) for v in x), Fraction(0))
        if best is None or val < best:
            best = val
    return best


def content_level_measure(system: CCSystem) -> Fraction | None:
    """Minimal total variation over signed joints of content assignments, minus 1."""
    assignments, rows = content_assignment_rows(system)
    matrix = []
    for cols, _ in rows:
        row = [Fraction(0)] * len(assignments)
        for j in cols:
            row[j] = Fraction(1)
        matrix.append(row)
    tv = min_l1_by_vertex_enumeration(matrix, [rhs for _, rhs in rows])
    return None if tv is None else tv - 1


# -- random linear programs ----------------------------------------------------

def random_sparse_lp(rng: random.Random, max_vars: int = 2000, max_rows: int = 25) -> lp.LinearProgram:
    """Sparse LP with small integer data and a mix of relations and bounds.

    Most instances are built around a planted feasible point; the rest use
    arbitrary right-hand sides, so infeasible and unbounded programs also
    occur.
    """
    tiers = [(2, 12), (10, 120), (100, max_vars)]
    lo, hi = rng.choice([(a, min(b, max_vars)) for a, b in tiers if a <= max_vars])
    n = rng.randint(lo, hi)
    m = rng.randint(1, min(max_rows, n + 3))
    planted = rng.random() < 0.8
    x0 = [Fraction(rng.randint(0, 3), rng.randint(1, 2)) if rng.random() < 0.3 else Fraction(0)
          for _ in range(n)]
    prog = lp.LinearProgram(n)
    for _ in range(m):
        k = rng.randint(1, min(n, 8))
        cols = rng.sample(range(n), k)
        coeffs = {j: rng.choice([-3, -2, -1, 1, 1, 2, 3, 5]) for j in cols}
        rel = rng.choice([lp.EQ, lp.LE, lp.LE, lp.GE])
        if planted:
            at = sum(coeffs[j] * x0[j] for j in cols)
            slack = Fraction(rng.randint(0, 3))
            rhs = at if rel == lp.EQ else at + slack if rel == lp.LE else at - slack
        else:
            rhs = Fraction(rng.randint(-4, 12), rng.randint(1, 4))
        prog.add(coeffs, rel, rhs)
    if rng.random() < 0.8:
        prog.add({j: 1 for j in range(n)}, lp.LE, sum(x0) + rng.randint(0, 10))
    for j in rng.sample(range(n), min(n, 3)):
        kind = rng.randint(0, 3)
        if kind == 0:
            prog.set_bounds(j, 0, x0[j] + rng.randint(0, 3))
        elif kind == 1:
            prog.set_bounds(j, -rng.randint(0, 3), None)
        elif kind == 2:
            prog.set_bounds(j, -rng.randint(1, 3), x0[j] + rng.randint(0, 3))
    prog.objective = {j: Fraction(rng.randint(-5, 5)) for j in rng.sample(range(n), min(n, 12))}
    return prog


def beale_lp() -> lp.LinearProgram:
    """Beale's degenerate LP: cycles under largest-coefficient pricing."""
    prog = lp.LinearProgram(4, var_names=["x4", "x5", "x6", "x7"])
    prog.objective = {0: Fraction(-3, 4), 1: Fraction(20), 2: Fraction(-1, 2), 3: Fraction(6)}
    prog.add({0: Fraction(1, 4), 1: -8, 2: -1, 3: 9}, lp.LE, 0)
    prog.add({0: HALF, 1: -12, 2: -HALF, 3: 3}, lp.LE, 0)
    prog.add({2: 1}, lp.LE, 1)
    return prog
