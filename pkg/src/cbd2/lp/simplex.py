"""Exact revised simplex over rationals.

Works on the standard form ``min c.x, A x = b, x >= 0``.  Every row gets an
artificial column; phase 1 minimizes their sum, phase 2 the real objective
with artificials barred from entering.  Pricing defaults to Bland's rule
(lowest-index improving column, lowest-index leaving variable on ratio
ties), which cannot cycle.

Arithmetic uses ``gmpy2.mpq`` when available and ``fractions.Fraction``
otherwise; values cross the module boundary as Fractions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .program import EQ, GE, LE, LinearProgram

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    Q = Fraction

log = logging.getLogger(__name__)

ZERO = Q(0)
ONE = Q(1)


def to_q(x) -> "Q":
    x = Fraction(x)
    return Q(x.numerator, x.denominator)


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class StandardForm:
    """``min c.x + c0`` s.t. ``A x = b``, ``x >= 0``, built from a LinearProgram.

    ``var_map[j] = (offset, [(col, coef), ...])`` recovers original variable j
    and ``constraint_rows[i]`` is the standard row of constraint i.
    """

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        ncols = 0
        rows: list[dict] = []
        rhs: list = []
        self.var_map = []
        for j in range(lp.num_vars):
            lo, hi = lp.bound(j)
            if lo is not None:
                col = ncols
                ncols += 1
                self.var_map.append((to_q(lo), [(col, ONE)]))
                if hi is not None:
                    slack = ncols
                    ncols += 1
                    rows.append({col: ONE, slack: ONE})
                    rhs.append(to_q(hi) - to_q(lo))
            elif hi is not None:
                col = ncols
                ncols += 1
                self.var_map.append((to_q(hi), [(col, -ONE)]))
            else:
                self.var_map.append((ZERO, [(ncols, ONE), (ncols + 1, -ONE)]))
                ncols += 2
        self.constraint_rows = []
        for con in lp.constraints:
            row: dict = {}
            b = to_q(con.rhs)
            for j, a in con.coeffs.items():
                a = to_q(a)
                offset, parts = self.var_map[j]
                b -= a * offset
                for col, coef in parts:
                    row[col] = row.get(col, ZERO) + a * coef
            if con.relation == LE:
                row[ncols] = ONE
                ncols += 1
            elif con.relation == GE:
                row[ncols] = -ONE
                ncols += 1
            self.constraint_rows.append(len(rows))
            rows.append(row)
            rhs.append(b)
        self.m = len(rows)
        self.n = ncols
        self.b = rhs
        self.cols: list[list] = [[] for _ in range(ncols)]
        for i, row in enumerate(rows):
            for col, a in row.items():
                if a != 0:
                    self.cols[col].append((i, a))
        self.c = [ZERO] * ncols
        self.c0 = ZERO
        for j, cj in lp.objective.items():
            cj = to_q(cj)
            offset, parts = self.var_map[j]
            self.c0 += cj * offset
            for col, coef in parts:
                self.c[col] += cj * coef

    def recover(self, x_std) -> list[Fraction]:
        out = []
        for offset, parts in self.var_map:
            v = offset
            for col, coef in parts:
                v += coef * x_std[col]
            out.append(to_fraction(v))
        return out


@dataclass
class SimplexResult:
    status: str  # "optimal", "infeasible", "unbounded"
    x: list | None = None  # standard-form structural values
    objective: object = None
    farkas: list | None = None  # per standard row (unflipped)
    duals: list | None = None  # per standard row (unflipped)
    iterations: int = 0
    basis: list | None = None


class ExactSimplex:
    def __init__(self, sf: StandardForm, pricing: str = "bland", max_iter: int | None = None):
        if pricing not in ("bland", "dantzig"):
            raise ValueError(f"unknown pricing rule {pricing!r}")
        self.sf = sf
        self.m, self.n = sf.m, sf.n
        self.pricing = pricing
        self.max_iter = max_iter
        # Rows with negative rhs are negated so artificials start feasible.
        self.sign = [ONE if bi >= 0 else -ONE for bi in sf.b]
        self.b = [abs(bi) for bi in sf.b]
        self.cols = [[(i, a * self.sign[i]) for i, a in col] for col in sf.cols]
        self.cols += [[(i, ONE)] for i in range(self.m)]
        self.iterations = 0

    # -- basis bookkeeping -------------------------------------------------

    def _reset_identity(self):
        m = self.m
        self.basis = [self.n + i for i in range(m)]
        self.binv = [[ONE if i == k else ZERO for i in range(m)] for k in range(m)]
        self.xb = list(self.b)

    def _load_basis(self, basis) -> bool:
        """Factorize an explicit basis; False if singular or infeasible."""
        m = self.m
        if len(basis) != m or len(set(basis)) != m:
            return False
        mat = [[ZERO] * m + [ONE if i == k else ZERO for i in range(m)] for k in range(m)]
        for pos, j in enumerate(basis):
            for i, a in self.cols[j]:
                mat[i][pos] = a
        for col in range(m):
            piv = next((r for r in range(col, m) if mat[r][col] != 0), None)
            if piv is None:
                return False
            mat[col], mat[piv] = mat[piv], mat[col]
            p = mat[col][col]
            prow = [v / p for v in mat[col]]
            mat[col] = prow
            nz = [(i, v) for i, v in enumerate(prow) if v != 0]
            for r in range(m):
                if r != col:
                    f = mat[r][col]
                    if f != 0:
                        row = mat[r]
                        for i, v in nz:
                            row[i] -= f * v
        binv = [row[m:] for row in mat]
        xb = [sum((binv[k][i] * self.b[i] for i in range(m) if self.b[i] != 0), ZERO)
              for k in range(m)]
        if any(v < 0 for v in xb):
            return False
        self.basis = list(basis)
        self.binv = binv
        self.xb = xb
        return True

    def _duals(self, cost):
        m = self.m
        y = [ZERO] * m
        for k in range(m):
            ck = cost[self.basis[k]]
            if ck != 0:
                row = self.binv[k]
                for i in range(m):
                    if row[i] != 0:
                        y[i] += ck * row[i]
        return y

    def _reduced(self, cost, y, j):
        d = cost[j]
        for i, a in self.cols[j]:
            d -= y[i] * a
        return d

    def _column(self, j):
        m = self.m
        u = [ZERO] * m
        col = self.cols[j]
        for k in range(m):
            row = self.binv[k]
            s = ZERO
            for i, a in col:
                v = row[i]
                if v != 0:
                    s += v * a
            u[k] = s
        return u

    def _pivot(self, r, j, u):
        piv = u[r]
        row_r = [v / piv for v in self.binv[r]]
        self.binv[r] = row_r
        xr = self.xb[r] / piv
        self.xb[r] = xr
        nz = [(i, v) for i, v in enumerate(row_r) if v != 0]
        for k in range(self.m):
            if k == r:
                continue
            f = u[k]
            if f != 0:
                row = self.binv[k]
                for i, v in nz:
                    row[i] -= f * v
                self.xb[k] -= f * xr
        self.basis[r] = j
        self.iterations += 1

    # -- iterations ---------------------------------------------------------

    def _iterate(self, cost, ncols) -> str:
        """Run simplex pivots with columns ``0..ncols-1`` eligible."""
        while True:
            if self.max_iter is not None and self.iterations >= self.max_iter:
                return "iteration_limit"
            y = self._duals(cost)
            in_basis = set(self.basis)
            enter = None
            if self.pricing == "bland":
                for j in range(ncols):
                    if j not in in_basis and self._reduced(cost, y, j) < 0:
                        enter = j
                        break
            else:
                best = ZERO
                for j in range(ncols):
                    if j not in in_basis:
                        d = self._reduced(cost, y, j)
                        if d < best:
                            best, enter = d, j
            if enter is None:
                return "optimal"
            u = self._column(enter)
            leave, best_ratio = None, None
            for k in range(self.m):
                if u[k] > 0:
                    ratio = self.xb[k] / u[k]
                    if best_ratio is None or ratio < best_ratio:
                        leave, best_ratio = k, ratio
                    elif ratio == best_ratio:
                        # Bland: smallest variable index leaves; Dantzig here
                        # uses the topmost row, the classical cycling setup.
                        if self.pricing == "bland" and self.basis[k] < self.basis[leave]:
                            leave = k
            if leave is None:
                return "unbounded"
            self._pivot(leave, enter, u)

    def _drive_out_artificials(self):
        """Pivot zero-level artificials out of the basis where possible."""
        for k in range(self.m):
            if self.basis[k] < self.n:
                continue
            in_basis = set(self.basis)
            row = self.binv[k]
            for j in range(self.n):
                if j in in_basis:
                    continue
                s = ZERO
                for i, a in self.cols[j]:
                    if row[i] != 0:
                        s += row[i] * a
                if s != 0:
                    self._pivot(k, j, self._column(j))
                    break
            # No candidate: the row is redundant and the artificial stays at 0.

    def _unflip(self, y):
        return [yi * si for yi, si in zip(y, self.sign)]

    def _x_std(self):
        x = [ZERO] * self.n
        for k, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.xb[k]
        return x

    def phase1(self) -> SimplexResult | None:
        """Drive artificials to zero; returns an infeasible result or None."""
        cost1 = [ZERO] * self.n + [ONE] * self.m
        if any(self.basis[k] >= self.n and self.xb[k] != 0 for k in range(self.m)):
            status = self._iterate(cost1, self.n + self.m)
            if status == "iteration_limit":
                return SimplexResult("iteration_limit", iterations=self.iterations)
            w = sum((self.xb[k] for k in range(self.m) if self.basis[k] >= self.n), ZERO)
            if w > 0:
                y = self._duals(cost1)
                return SimplexResult("infeasible", farkas=self._unflip(y),
                                     iterations=self.iterations, basis=list(self.basis))
        self._drive_out_artificials()
        return None

    def solve(self, warm_basis=None) -> SimplexResult:
        if warm_basis is None or not self._load_basis(warm_basis):
            if warm_basis is not None:
                log.debug("warm basis rejected; starting from the artificial basis")
            self._reset_identity()
        infeasible = self.phase1()
        if infeasible is not None:
            return infeasible
        status = self._iterate(self.sf.c + [ZERO] * self.m, self.n)
        if status != "optimal":
            return SimplexResult(status, iterations=self.iterations)
        x = self._x_std()
        obj = self.sf.c0 + sum((self.sf.c[j] * x[j] for j in range(self.n) if x[j] != 0), ZERO)
        y = self._duals(self.sf.c + [ZERO] * self.m)
        return SimplexResult("optimal", x=x, objective=obj, duals=self._unflip(y),
                             iterations=self.iterations, basis=list(self.basis))

    # -- vertex enumeration -------------------------------------------------

    def feasible_bases(self, limit_vertices: int, max_bases: int):
        """Breadth-first walk over feasible bases; yields distinct vertices.

        Returns ``None`` if infeasible, else a list of standard-form points.
        """
        self._reset_identity()
        if self.phase1() is not None:
            return None
        from collections import deque

        start = (list(self.basis), [r[:] for r in self.binv], list(self.xb))
        seen = {frozenset(self.basis)}
        queue = deque([start])
        vertices: list[tuple] = []
        vertex_set = set()
        while queue and len(vertices) < limit_vertices:
            basis, binv, xb = queue.popleft()
            self.basis, self.binv, self.xb = basis, binv, xb
            point = tuple(self._x_std())
            if point not in vertex_set:
                vertex_set.add(point)
                vertices.append(point)
            if len(seen) >= max_bases:
                continue
            in_basis = set(basis)
            for j in range(self.n):
                if j in in_basis:
                    continue
                self.basis, self.binv, self.xb = basis, binv, xb
                u = self._column(j)
                # Zero-level artificials left in redundant rows have u[k] == 0.
                ratios = [(xb[k] / u[k], k) for k in range(self.m) if u[k] > 0]
                if not ratios:
                    continue
                best = min(r for r, _ in ratios)
                for r, k in ratios:
                    if r != best:
                        continue
                    nb = list(basis)
                    nb[k] = j
                    key = frozenset(nb)
                    if key in seen or len(seen) >= max_bases:
                        continue
                    seen.add(key)
                    self.basis = list(basis)
                    self.binv = [row[:] for row in binv]
                    self.xb = list(xb)
                    self._pivot(k, j, u)
                    queue.append((self.basis, self.binv, self.xb))
        return vertices


__all__ = ["ExactSimplex", "StandardForm", "SimplexResult", "Q", "to_q", "to_fraction",
           "EQ", "LE", "GE"]
