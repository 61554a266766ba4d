"""Noncontextuality checks and the total-variation contextuality measure.

A system coupling is a distribution over the full joint outcome space of
all cells.  Its bunch margins must reproduce the bunches, and its
connection margins must be multimaximal: pinned to the staircase coupling
for binary connections, or constrained by pairwise-maximality equalities
for categorical ones.  ``check`` asks for a nonnegative such coupling;
``measure`` allows signed masses and minimizes their total absolute value.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from . import lp as lpmod
from .coupling import (DEFAULT_BUDGET, max_pair_probability, multimaximal_binary,
                       multimaximal_exists)
from .errors import TooLarge, UnknownCell
from .model import (Bunch, CCSystem, Cell, Distribution, connection_of, marginal)


class Verdict(str, enum.Enum):
    NONCONTEXTUAL = "noncontextual"
    CONTEXTUAL = "contextual"


class Row(NamedTuple):
    name: str
    columns: np.ndarray
    relation: str
    rhs: Fraction


class JointSpace:
    """Mixed-radix indexing of all joint outcomes, last cell fastest."""

    def __init__(self, system: CCSystem, budget: int = DEFAULT_BUDGET):
        self.cells = system.cells
        self.value_sets = [system.value_set(c) for c in self.cells]
        self.radices = [len(vs) for vs in self.value_sets]
        size = 1
        for r in self.radices:
            size *= r
        if size > budget:
            raise TooLarge(size, budget)
        self.size = size
        self.digits = np.array(np.unravel_index(np.arange(size), self.radices)).reshape(
            len(self.radices), size)

    def position(self, cell: Cell) -> int:
        return self.cells.index(cell)

    def outcome(self, j: int) -> tuple:
        return tuple(vs.labels[int(d)] for vs, d in zip(self.value_sets, self.digits[:, j]))

    def sub_index(self, positions: list[int]) -> np.ndarray:
        """Canonical index of each joint outcome's restriction to ``positions``."""
        radices = [self.radices[p] for p in positions]
        return np.ravel_multi_index(tuple(self.digits[p] for p in positions), radices)

    def groups(self, positions: list[int]) -> list[np.ndarray]:
        """Column sets, one per sub-outcome of ``positions`` in canonical order."""
        sub = self.sub_index(positions)
        nsub = int(np.prod([self.radices[p] for p in positions]))
        order = np.argsort(sub, kind="stable")
        counts = np.bincount(sub, minlength=nsub)
        return np.split(order, np.cumsum(counts)[:-1])


@dataclass
class CouplingSpec:
    system: CCSystem
    space: JointSpace
    bunch_constraints: dict = field(default_factory=dict)  # context -> [Row]
    connection_constraints: dict = field(default_factory=dict)  # content -> [Row]
    # Rows only needed when joint masses may be negative.
    signed_only: dict = field(default_factory=dict)  # content -> [Row]

    @property
    def joint_cells(self) -> tuple:
        return self.space.cells

    @property
    def num_vars(self) -> int:
        return self.space.size

    def rows(self, signed: bool = False) -> list[Row]:
        out = [r for rows in self.bunch_constraints.values() for r in rows]
        out += [r for rows in self.connection_constraints.values() for r in rows]
        if signed:
            out += [r for rows in self.signed_only.values() for r in rows]
        return out

    def program(self, signed: bool = False, names: bool = False) -> lpmod.LinearProgram:
        prog = lpmod.LinearProgram(self.num_vars)
        for r in self.rows(signed):
            prog.add(dict.fromkeys(r.columns.tolist(), 1), r.relation, r.rhs, r.name)
        if signed:
            for j in range(self.num_vars):
                prog.bounds[j] = (None, None)
        if names:
            prog.var_names = ["S[" + ",".join(str(v) for v in self.space.outcome(j)) + "]"
                              for j in range(self.num_vars)]
        return prog


def _fmt_assign(cells, values) -> str:
    return ",".join(f"{c}={v}" for c, v in zip(cells, values))


def build_coupling_spec(system: CCSystem, budget: int = DEFAULT_BUDGET) -> CouplingSpec:
    space = JointSpace(system, budget)
    spec = CouplingSpec(system, space)
    for b in system.bunches:
        pos = [space.position(c) for c in b.cells]
        outcomes = itertools.product(*(system.value_set(c).labels for c in b.cells))
        rows = []
        for outcome, cols in zip(outcomes, space.groups(pos)):
            rows.append(Row(f"bunch {b.context}: {_fmt_assign(b.cells, outcome)}", cols,
                            lpmod.EQ, b.dist.prob(outcome)))
        spec.bunch_constraints[b.context] = rows
    for q in system.contents:
        conn = connection_of(system, q)
        k = len(conn.cells)
        if k < 2:
            spec.connection_constraints[q] = []
            continue
        pos = [space.position(c) for c in conn.cells]
        vs = conn.value_set
        rows = []
        if vs.is_binary:
            stair = multimaximal_binary(conn).dist
            outcomes = itertools.product(vs.labels, repeat=k)
            for outcome, cols in zip(outcomes, space.groups(pos)):
                rows.append(Row(f"connection {q}: {_fmt_assign(conn.cells, outcome)}", cols,
                                lpmod.EQ, stair.prob(outcome)))
        else:
            for a, b in itertools.combinations(range(k), 2):
                best = max_pair_probability(conn.marginals[a], conn.marginals[b], vs)
                cols = np.nonzero(space.digits[pos[a]] == space.digits[pos[b]])[0]
                rows.append(Row(f"connection {q}: Pr[{conn.cells[a]}={conn.cells[b]}]", cols,
                                lpmod.EQ, best))
            nonneg = []
            outcomes = itertools.product(vs.labels, repeat=k)
            for outcome, cols in zip(outcomes, space.groups(pos)):
                nonneg.append(Row(f"connection {q} proper: {_fmt_assign(conn.cells, outcome)}",
                                  cols, lpmod.GE, Fraction(0)))
            spec.signed_only[q] = nonneg
        spec.connection_constraints[q] = rows
    return spec


@dataclass(frozen=True)
class SystemCoupling:
    dist: Distribution


@dataclass(frozen=True)
class QuasiCoupling:
    cells: tuple
    masses: dict  # outcome tuple -> signed Fraction (nonzero only)

    @property
    def total_variation(self) -> Fraction:
        return sum((abs(m) for m in self.masses.values()), Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    @property
    def proper(self) -> bool:
        return all(m >= 0 for m in self.masses.values())

    def marginal(self, cells) -> dict:
        pos = [self.cells.index(c) for c in cells]
        out: dict = {}
        for o, m in self.masses.items():
            key = tuple(o[p] for p in pos)
            out[key] = out.get(key, Fraction(0)) + m
        return {k: v for k, v in out.items() if v != 0}


@dataclass
class ContextualityReport:
    verdict: Verdict
    measure: Fraction | None = None
    total_variation: Fraction | None = None
    witness: SystemCoupling | QuasiCoupling | None = None
    certificate: list | None = None  # [(row name, multiplier)]
    lp_vars: int = 0
    lp_rows: int = 0
    notes: list = field(default_factory=list)

    @property
    def noncontextual(self) -> bool:
        return self.verdict is Verdict.NONCONTEXTUAL


def _certificate(prog: lpmod.LinearProgram, y) -> list:
    return [(row.name, yi) for row, yi in zip(prog.constraints, y) if yi != 0]


def check(system: CCSystem, mode: str = "exact", budget: int = DEFAULT_BUDGET) -> ContextualityReport:
    """Decide noncontextuality: does a multimaximally connected coupling exist?"""
    spec = build_coupling_spec(system, budget)
    prog = spec.program(signed=False)
    sol = lpmod.solve(prog, mode=mode)
    report = ContextualityReport(Verdict.CONTEXTUAL, lp_vars=prog.num_vars,
                                 lp_rows=len(prog.constraints), notes=list(sol.notes))
    if sol.feasible:
        report.verdict = Verdict.NONCONTEXTUAL
        pmf = {spec.space.outcome(j): p for j, p in enumerate(sol.point) if p != 0}
        report.witness = SystemCoupling(Distribution(spec.joint_cells, pmf))
    else:
        report.certificate = _certificate(prog, sol.certificate)
    return report


def measure(system: CCSystem, mode: str = "exact", budget: int = DEFAULT_BUDGET) -> ContextualityReport:
    """Minimal total variation of a quasi-coupling with multimaximal connections.

    ``measure`` is the minimal total variation minus 1, so it is 0 exactly
    for noncontextual systems.  A categorical connection without any
    multimaximal coupling makes the system contextual with no measure.
    """
    for q in system.contents:
        conn = connection_of(system, q)
        if len(conn.cells) > 1 and not conn.value_set.is_binary:
            found = multimaximal_exists(conn, mode=mode, budget=budget)
            if not found.exists:
                return ContextualityReport(
                    Verdict.CONTEXTUAL,
                    certificate=_certificate(found.program, found.certificate),
                    notes=[f"connection {q} has no multimaximal coupling; measure undefined"])
    spec = build_coupling_spec(system, budget)
    prog = spec.program(signed=True)
    sol = lpmod.minimize_l1(prog, range(prog.num_vars), mode=mode)
    report = ContextualityReport(Verdict.CONTEXTUAL, lp_vars=2 * prog.num_vars,
                                 lp_rows=len(prog.constraints), notes=list(sol.notes))
    if not sol.feasible:
        report.certificate = _certificate(prog, sol.certificate)
        report.notes.append("no quasi-coupling satisfies the constraints")
        return report
    tv = sol.objective_value
    masses = {spec.space.outcome(j): p for j, p in enumerate(sol.point) if p != 0}
    report.total_variation = tv
    report.measure = tv - 1
    report.witness = QuasiCoupling(spec.joint_cells, masses)
    if report.measure == 0:
        report.verdict = Verdict.NONCONTEXTUAL
    if any(not connection_of(system, q).value_set.is_binary for q in system.contents):
        report.notes.append("categorical connections: measure is experimental")
    return report


def subsystem(system: CCSystem, drop: Iterable[Cell]) -> CCSystem:
    """Remove cells; bunches are marginalized, emptied contexts and contents vanish."""
    drop = set(drop)
    all_cells = set(system.cells)
    for c in drop:
        if c not in all_cells:
            raise UnknownCell(c)
    if not drop:
        return system
    bunches = []
    for b in system.bunches:
        keep = [c for c in b.cells if c not in drop]
        if not keep:
            continue
        if len(keep) == len(b.cells):
            bunches.append(b)
        else:
            bunches.append(Bunch(b.context, marginal(b.dist, keep)))
    measured = {c.content for b in bunches for c in b.cells}
    contents = tuple(q for q in system.contents if q in measured)
    value_sets = {q: system.value_sets[q] for q in contents}
    return CCSystem(contents, tuple(b.context for b in bunches), value_sets, tuple(bunches))


def restrict_to_contexts(system: CCSystem, contexts: Iterable[str]) -> CCSystem:
    keep = set(contexts)
    return subsystem(system, [c for b in system.bunches if b.context not in keep for c in b.cells])


@dataclass
class PairConsistencyReport:
    contextual_pairs: list  # [(context, context, ContextualityReport)]
    pairs_checked: int

    # A clean pair scan says nothing about the whole system.
    conclusive: bool = False


def check_pair_consistency(system: CCSystem, mode: str = "exact",
                           budget: int = DEFAULT_BUDGET) -> PairConsistencyReport:
    """Check every two-context subsystem that shares a content.

    Single contexts are always noncontextual, so each reported pair is a
    minimal contextual set of contexts.
    """
    found = []
    checked = 0
    for c1, c2 in itertools.combinations(system.contexts, 2):
        shared = set(system.bunch(c1).contents) & set(system.bunch(c2).contents)
        if not shared:
            continue
        checked += 1
        rep = check(restrict_to_contexts(system, (c1, c2)), mode=mode, budget=budget)
        if not rep.noncontextual:
            found.append((c1, c2, rep))
    return PairConsistencyReport(found, checked)
