"""Maximal and multimaximal couplings of connections.

Binary connections get the closed-form staircase coupling, which is the
only multimaximal one.  Categorical connections go through an exact LP:
fixed univariate marginals plus, for every pair of members, the equality
``Pr[T = T'] = sum_v min(p(v), p'(v))``.  Pairwise maximality already
implies maximality of every subset, so no subset rows are generated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import lp as lpmod
from .errors import MarginalMismatch, NotBinary, TooLarge, ValueSetMismatch
from .model import Cell, Connection, Distribution, ValueSet, marginal

DEFAULT_BUDGET = 1 << 20


@dataclass(frozen=True)
class CouplingDistribution:
    cells: tuple
    dist: Distribution

    def prob_all_equal(self, indices: Sequence[int] | None = None) -> Fraction:
        idx = range(len(self.cells)) if indices is None else list(indices)
        total = Fraction(0)
        for outcome, mass in self.dist.pmf.items():
            vals = {outcome[i] for i in idx}
            if len(vals) <= 1:
                total += mass
        return total

    def member_marginal(self, i: int) -> Distribution:
        return marginal(self.dist, [self.cells[i]])


@dataclass(frozen=True)
class PairCheck:
    first: Cell
    second: Cell
    achieved: Fraction
    maximum: Fraction

    @property
    def maximal(self) -> bool:
        return self.achieved == self.maximum


@dataclass(frozen=True)
class PairMaximalityReport:
    pairs: tuple

    @property
    def all_maximal(self) -> bool:
        return all(p.maximal for p in self.pairs)


@dataclass
class MultimaximalResult:
    """Outcome of the existence LP: a witness coupling or an exact certificate."""

    exists: bool
    coupling: CouplingDistribution | None
    certificate: list | None
    program: lpmod.LinearProgram
    outcomes: list


def _binary_probs(connection: Connection) -> list[Fraction]:
    if len(connection.value_set) != 2:
        raise NotBinary(f"connection {connection.content} has {len(connection.value_set)} values")
    return [connection.probabilities(i)[0] for i in range(len(connection.cells))]


def multimaximal_binary(connection: Connection) -> CouplingDistribution:
    """The staircase coupling of a binary connection.

    Members are sorted by ``p_i = Pr[first value]`` (ties in context order).
    The l-th outcome puts the second value on the l lowest-p members and the
    first value on the rest, with mass ``p_(l+1) - p_(l)``.
    """
    ps = _binary_probs(connection)
    one, two = connection.value_set.labels
    k = len(ps)
    order = sorted(range(k), key=lambda i: (ps[i], i))
    sorted_p = [ps[i] for i in order]
    pmf = {}
    bounds = [Fraction(0)] + sorted_p + [Fraction(1)]
    for l in range(k + 1):
        mass = bounds[l + 1] - bounds[l]
        if mass == 0:
            continue
        outcome = [one] * k
        for pos in order[:l]:
            outcome[pos] = two
        pmf[tuple(outcome)] = mass
    return CouplingDistribution(connection.cells, Distribution(connection.cells, pmf))


def _univariate(m: Distribution) -> dict:
    if len(m.cells) != 1:
        raise ValueSetMismatch(f"expected a univariate distribution, got {len(m.cells)} cells")
    return {o[0]: p for o, p in m.pmf.items()}


def max_pair_probability(m1: Distribution, m2: Distribution,
                         value_set: ValueSet | None = None) -> Fraction:
    """Largest ``Pr[T = T']`` over couplings of two univariate distributions."""
    return max_equal_probability([m1, m2], value_set)


def max_equal_probability(marginals: Sequence[Distribution],
                          value_set: ValueSet | None = None) -> Fraction:
    """``sum_v min_i p_i(v)``: the maximal-coupling value of ``Pr[all equal]``."""
    pmfs = [_univariate(m) for m in marginals]
    if value_set is not None:
        for pmf in pmfs:
            extra = [v for v in pmf if v not in value_set]
            if extra:
                raise ValueSetMismatch(f"values {extra} are not in {list(value_set.labels)}")
    values = set().union(*pmfs) if pmfs else set()
    return sum((min(p.get(v, Fraction(0)) for p in pmfs) for v in values), Fraction(0))


def _check_marginals(coupling: CouplingDistribution, connection: Connection) -> None:
    if tuple(coupling.cells) != tuple(connection.cells):
        raise MarginalMismatch("coupling cells differ from the connection's cells")
    for i, cell in enumerate(connection.cells):
        got = coupling.member_marginal(i)
        if got.pmf != connection.marginals[i].pmf:
            raise MarginalMismatch(f"marginal of {cell} in the coupling differs from the connection")


def is_multimaximal(coupling: CouplingDistribution,
                    connection: Connection) -> tuple[bool, PairMaximalityReport]:
    """All-pairs maximality check (sufficient for every subset)."""
    _check_marginals(coupling, connection)
    pairs = []
    for i, j in itertools.combinations(range(len(connection.cells)), 2):
        achieved = coupling.prob_all_equal([i, j])
        maximum = max_pair_probability(connection.marginals[i], connection.marginals[j],
                                       connection.value_set)
        pairs.append(PairCheck(connection.cells[i], connection.cells[j], achieved, maximum))
    report = PairMaximalityReport(tuple(pairs))
    return report.all_maximal, report


def is_multimaximal_consecutive(coupling: CouplingDistribution, connection: Connection) -> bool:
    """Binary-only check using just the neighbours in p-sorted order."""
    ps = _binary_probs(connection)
    _check_marginals(coupling, connection)
    order = sorted(range(len(ps)), key=lambda i: (ps[i], i))
    for a, b in zip(order, order[1:]):
        best = max_pair_probability(connection.marginals[a], connection.marginals[b])
        if coupling.prob_all_equal([a, b]) != best:
            return False
    return True


def coupling_program(connection: Connection, budget: int = DEFAULT_BUDGET):
    """LP whose feasible set is the set of multimaximal couplings.

    Returns ``(program, outcomes)`` where variable ``j`` is the mass of
    ``outcomes[j]`` in the product space of the connection.
    """
    vs = connection.value_set
    k = len(connection.cells)
    size = len(vs) ** k
    if size > budget:
        raise TooLarge(size, budget, f"connection {connection.content}")
    outcomes = list(itertools.product(vs.labels, repeat=k))
    names = ["T[" + ",".join(str(v) for v in o) + "]" for o in outcomes]
    prog = lpmod.LinearProgram(len(outcomes), var_names=names)
    for i, cell in enumerate(connection.cells):
        for v in vs:
            cols = {j: 1 for j, o in enumerate(outcomes) if o[i] == v}
            prog.add(cols, lpmod.EQ, connection.marginals[i].prob((v,)), f"marginal {cell}={v}")
    for i, j in itertools.combinations(range(k), 2):
        best = max_pair_probability(connection.marginals[i], connection.marginals[j], vs)
        cols = {t: 1 for t, o in enumerate(outcomes) if o[i] == o[j]}
        prog.add(cols, lpmod.EQ, best,
                 f"pair {connection.cells[i]}~{connection.cells[j]} equal")
    return prog, outcomes


def _as_coupling(connection: Connection, outcomes, point) -> CouplingDistribution:
    pmf = {o: p for o, p in zip(outcomes, point) if p != 0}
    return CouplingDistribution(connection.cells, Distribution(connection.cells, pmf))


def multimaximal_exists(connection: Connection, mode: str = "exact",
                        budget: int = DEFAULT_BUDGET) -> MultimaximalResult:
    prog, outcomes = coupling_program(connection, budget)
    sol = lpmod.solve(prog, mode=mode)
    if sol.feasible:
        return MultimaximalResult(True, _as_coupling(connection, outcomes, sol.point), None,
                                  prog, outcomes)
    return MultimaximalResult(False, None, sol.certificate, prog, outcomes)


def enumerate_multimaximal(connection: Connection, limit: int = 16,
                           budget: int = DEFAULT_BUDGET,
                           max_bases: int = 20000) -> list[CouplingDistribution]:
    """Up to ``limit`` distinct vertices of the multimaximal-coupling polytope."""
    prog, outcomes = coupling_program(connection, budget)
    verts = lpmod.enumerate_vertices(prog, limit=limit, max_bases=max_bases)
    return [_as_coupling(connection, outcomes, v) for v in verts]
