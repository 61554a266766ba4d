"""Linear program and solution containers, exact checks, LP-format dump."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import DimensionMismatch

EQ, LE, GE = "=", "<=", ">="
_RELATIONS = (EQ, LE, GE)


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class Constraint:
    coeffs: dict  # var index -> Fraction
    relation: str
    rhs: Fraction
    name: str = ""

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise ValueError(f"relation must be one of {_RELATIONS}, got {self.relation!r}")
        self.coeffs = {int(j): Fraction(a) for j, a in self.coeffs.items() if a != 0}
        self.rhs = Fraction(self.rhs)


@dataclass
class LinearProgram:
    """Minimize ``objective . x`` subject to sparse rows and per-variable bounds.

    Bounds are ``(lower, upper)`` with ``None`` meaning unbounded; the
    default for every variable is ``(0, None)``.
    """

    num_vars: int
    constraints: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)  # var index -> (lo, hi); missing = (0, None)
    var_names: Sequence[str] | None = None

    def add(self, coeffs: Mapping[int, object], relation: str, rhs, name: str = "") -> Constraint:
        row = Constraint(dict(coeffs), relation, Fraction(rhs), name)
        self.constraints.append(row)
        return row

    def bound(self, j: int) -> tuple:
        return self.bounds.get(j, (Fraction(0), None))

    def set_bounds(self, j: int, lo=0, hi=None) -> None:
        self.bounds[j] = (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi))

    def check(self) -> None:
        """Raise DimensionMismatch on out-of-range indices or empty rows."""
        n = self.num_vars
        for i, row in enumerate(self.constraints):
            if not row.coeffs:
                raise DimensionMismatch(f"constraint {i} ({row.name}) has no nonzero coefficient")
            bad = [j for j in row.coeffs if not 0 <= j < n]
            if bad:
                raise DimensionMismatch(f"constraint {i} references variables {bad} >= {n}")
        bad = [j for j in self.objective if not 0 <= j < n]
        if bad:
            raise DimensionMismatch(f"objective references variables {bad} >= {n}")
        for j, (lo, hi) in self.bounds.items():
            if not 0 <= j < n:
                raise DimensionMismatch(f"bounds given for variable {j} >= {n}")
            if lo is not None and hi is not None and lo > hi:
                raise DimensionMismatch(f"variable {j} has empty bounds [{lo}, {hi}]")

    def name_of(self, j: int) -> str:
        return self.var_names[j] if self.var_names else f"x{j}"


@dataclass
class LPSolution:
    status: Status
    point: list | None = None
    objective_value: Fraction | None = None
    certificate: list | None = None  # one multiplier per constraint (Farkas)
    duals: list | None = None  # one multiplier per constraint at the optimum
    mode: str = "exact"
    fallback: bool = False
    iterations: int = 0
    notes: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status in (Status.OPTIMAL, Status.FEASIBLE)


def _dot(coeffs: Mapping[int, Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((a * x[j] for j, a in coeffs.items()), Fraction(0))


def check_point(lp: LinearProgram, x: Sequence[Fraction]) -> list[str]:
    """Exact constraint/bound violations of ``x``; empty means feasible."""
    problems = []
    if len(x) != lp.num_vars:
        return [f"point has {len(x)} entries, expected {lp.num_vars}"]
    for i, row in enumerate(lp.constraints):
        lhs = _dot(row.coeffs, x)
        ok = (lhs == row.rhs if row.relation == EQ
              else lhs <= row.rhs if row.relation == LE else lhs >= row.rhs)
        if not ok:
            problems.append(f"row {i} {row.name}: {lhs} {row.relation} {row.rhs} fails")
    for j in range(lp.num_vars):
        lo, hi = lp.bound(j)
        if lo is not None and x[j] < lo:
            problems.append(f"{lp.name_of(j)} = {x[j]} below {lo}")
        if hi is not None and x[j] > hi:
            problems.append(f"{lp.name_of(j)} = {x[j]} above {hi}")
    return problems


def objective_at(lp: LinearProgram, x: Sequence[Fraction]) -> Fraction:
    return _dot(lp.objective, x)


def verify_farkas(lp: LinearProgram, y: Sequence[Fraction]) -> bool:
    """Exactly check an infeasibility certificate.

    ``y`` has one multiplier per constraint, nonnegative on ``>=`` rows and
    nonpositive on ``<=`` rows, so every feasible ``x`` would satisfy the
    combined inequality ``g . x >= h`` with ``g = sum y_i a_i`` and
    ``h = sum y_i b_i``.  The certificate is valid when the supremum of
    ``g . x`` over the variable bounds is strictly below ``h``.
    """
    if len(y) != len(lp.constraints):
        return False
    g: dict[int, Fraction] = {}
    h = Fraction(0)
    for yi, row in zip(y, lp.constraints):
        yi = Fraction(yi)
        if yi == 0:
            continue
        if row.relation == GE and yi < 0:
            return False
        if row.relation == LE and yi > 0:
            return False
        h += yi * row.rhs
        for j, a in row.coeffs.items():
            g[j] = g.get(j, Fraction(0)) + yi * a
    sup = Fraction(0)
    for j, gj in g.items():
        if gj == 0:
            continue
        lo, hi = lp.bound(j)
        end = hi if gj > 0 else lo
        if end is None:
            return False
        sup += gj * end
    return sup < h


def _fmt(q: Fraction) -> str:
    return str(q)


def to_lp_text(lp: LinearProgram) -> str:
    """Render in CPLEX-style LP text with exact ``p/q`` coefficients."""

    def terms(coeffs: Iterable[tuple[int, Fraction]]) -> str:
        parts = []
        for j, a in coeffs:
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            coef = "" if mag == 1 else f"{_fmt(mag)} "
            parts.append(f"{sign} {coef}{lp.name_of(j)}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text or "0"

    lines = ["\\ exact rational LP", "Minimize", f" obj: {terms(sorted(lp.objective.items()))}",
             "Subject To"]
    for i, row in enumerate(lp.constraints):
        label = f"r{i}"
        lines.append(f" {label}: {terms(sorted(row.coeffs.items()))} {row.relation} {_fmt(row.rhs)}")
    lines.append("Bounds")
    for j in range(lp.num_vars):
        lo, hi = lp.bound(j)
        name = lp.name_of(j)
        if lo is None and hi is None:
            lines.append(f" {name} free")
        elif lo is None:
            lines.append(f" -inf <= {name} <= {_fmt(hi)}")
        elif hi is None:
            if lo != 0:
                lines.append(f" {name} >= {_fmt(lo)}")
        else:
            lines.append(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}")
    lines.append("End")
    return "\n".join(lines) + "\n"
