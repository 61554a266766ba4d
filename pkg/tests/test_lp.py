import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbd2 import lp
from cbd2.errors import DimensionMismatch
from cbd2.lp import fast
from cbd2.lp.simplex import ExactSimplex, StandardForm
from helpers import beale_lp, random_sparse_lp

F = Fraction


def one_var(**kw):
    prog = lp.LinearProgram(1, **kw)
    return prog


class TestSolve:
    def test_minimize_x_at_least_three(self):
        prog = one_var(objective={0: 1})
        prog.add({0: 1}, lp.GE, 3)
        sol = lp.solve(prog)
        assert sol.status == lp.Status.OPTIMAL
        assert sol.point == [3] and sol.objective_value == 3

    def test_contradictory_equalities(self):
        prog = one_var()
        prog.add({0: 1}, lp.EQ, 1)
        prog.add({0: 1}, lp.EQ, 2)
        sol = lp.solve(prog)
        assert sol.status == lp.Status.INFEASIBLE
        assert lp.verify_farkas(prog, sol.certificate)

    def test_feasibility_status_without_objective(self):
        prog = lp.LinearProgram(2)
        prog.add({0: 1, 1: 1}, lp.EQ, 1)
        sol = lp.solve(prog)
        assert sol.status == lp.Status.FEASIBLE
        assert lp.check_point(prog, sol.point) == []

    def test_unbounded(self):
        prog = one_var(objective={0: -1})
        prog.add({0: 1}, lp.GE, 1)
        assert lp.solve(prog).status == lp.Status.UNBOUNDED

    def test_free_upper_and_boxed_bounds(self):
        prog = lp.LinearProgram(3, objective={0: 1, 1: -1, 2: 1})
        prog.set_bounds(0, None, None)
        prog.set_bounds(1, None, 4)
        prog.set_bounds(2, F(-2), F(5, 2))
        prog.add({0: 1, 1: 1}, lp.GE, -3)
        sol = lp.solve(prog)
        assert sol.point == [-7, 4, -2]
        assert sol.objective_value == -13

    def test_negative_rhs_rows(self):
        prog = lp.LinearProgram(2, objective={0: 1, 1: 1})
        prog.add({0: -1, 1: -1}, lp.LE, -3)
        prog.add({0: 1, 1: -1}, lp.EQ, -1)
        sol = lp.solve(prog)
        assert sol.objective_value == 3 and sol.point == [1, 2]

    def test_redundant_equalities(self):
        prog = lp.LinearProgram(2, objective={0: 1})
        prog.add({0: 1, 1: 1}, lp.EQ, 1)
        prog.add({0: 2, 1: 2}, lp.EQ, 2)
        sol = lp.solve(prog)
        assert sol.point == [0, 1]

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            lp.solve(one_var(), mode="quantum")

    @pytest.mark.parametrize("alias", ["fast", "float-then-verify", "float"])
    def test_mode_aliases(self, alias):
        prog = one_var(objective={0: 1})
        prog.add({0: 1}, lp.GE, F(1, 3))
        assert lp.solve(prog, mode=alias).point == [F(1, 3)]


class TestDimension:
    def test_empty_row(self):
        prog = one_var()
        prog.add({}, lp.EQ, 0)
        with pytest.raises(DimensionMismatch):
            lp.solve(prog)

    def test_index_out_of_range(self):
        prog = one_var()
        prog.add({3: 1}, lp.EQ, 0)
        with pytest.raises(DimensionMismatch):
            lp.solve(prog)

    def test_empty_bounds(self):
        prog = one_var()
        prog.add({0: 1}, lp.LE, 1)
        prog.set_bounds(0, 2, 1)
        with pytest.raises(DimensionMismatch):
            lp.solve(prog)

    def test_bad_relation(self):
        with pytest.raises(ValueError):
            lp.Constraint({0: 1}, "<", 0)


class TestFarkas:
    def test_rejects_wrong_multipliers(self):
        prog = one_var()
        prog.add({0: 1}, lp.EQ, 1)
        prog.add({0: 1}, lp.EQ, 2)
        assert not lp.verify_farkas(prog, [F(1), F(-1)])
        assert not lp.verify_farkas(prog, [F(0), F(0)])

    def test_certificate_with_inequalities_and_bounds(self):
        prog = lp.LinearProgram(2)
        prog.set_bounds(0, 0, 1)
        prog.add({0: 1, 1: 1}, lp.GE, 3)
        prog.add({1: 1}, lp.LE, 1)
        sol = lp.solve(prog)
        assert sol.status == lp.Status.INFEASIBLE
        assert lp.verify_farkas(prog, sol.certificate)


class TestL1:
    def test_single_negative_value(self):
        prog = one_var()
        prog.add({0: 1}, lp.EQ, -5)
        sol = lp.minimize_l1(prog, [0])
        assert sol.objective_value == 5 and sol.point == [-5]

    def test_proper_probability_vector(self):
        prog = lp.LinearProgram(3)
        prog.add({0: 1, 1: 1, 2: 1}, lp.EQ, 1)
        prog.add({0: 1}, lp.EQ, F(1, 5))
        prog.add({1: 1, 2: 1}, lp.GE, 0)
        sol = lp.minimize_l1(prog, range(3))
        assert sol.objective_value == 1

    def test_cancellation_is_penalized(self):
        prog = lp.LinearProgram(2)
        prog.add({0: 1, 1: 1}, lp.EQ, 1)
        sol = lp.minimize_l1(prog, [0, 1])
        assert sol.objective_value == 1
        assert all(v >= 0 for v in sol.point)

    def test_original_objective_is_kept(self):
        prog = lp.LinearProgram(2, objective={1: 3})
        prog.add({0: 1, 1: 1}, lp.EQ, 2)
        sol = lp.minimize_l1(prog, [0])
        assert sol.point == [2, 0] and sol.objective_value == 2

    def test_split_is_linear(self):
        prog = lp.LinearProgram(2, objective={0: 2})
        prog.add({0: 1, 1: -1}, lp.EQ, 0)
        split, neg = lp.split_signed(prog, [0])
        assert neg == {0: 2}
        assert split.objective == {0: 3, 2: -1}
        assert split.constraints[0].coeffs == {0: 1, 1: -1, 2: -1}

    def test_infeasible_l1(self):
        prog = one_var()
        prog.add({0: 1}, lp.EQ, 1)
        prog.add({0: 1}, lp.EQ, 2)
        sol = lp.minimize_l1(prog, [0])
        assert sol.status == lp.Status.INFEASIBLE and sol.point is None


class TestBeale:
    def test_dantzig_cycles(self):
        sf = StandardForm(beale_lp())
        res = ExactSimplex(sf, pricing="dantzig", max_iter=100).solve(warm_basis=[4, 5, 6])
        assert res.status == "iteration_limit"

    def test_bland_terminates(self):
        sf = StandardForm(beale_lp())
        start = time.perf_counter()
        res = ExactSimplex(sf, pricing="bland").solve(warm_basis=[4, 5, 6])
        assert time.perf_counter() - start < 10
        assert res.status == "optimal" and res.objective == F(-5, 4)

    def test_public_solve(self):
        sol = lp.solve(beale_lp())
        assert sol.objective_value == F(-5, 4)
        assert sol.point == [1, 0, 1, 0]


class TestFastMode:
    def test_fallback_is_noted(self, monkeypatch):
        monkeypatch.setattr(fast, "float_solve", lambda engine, phase1=False: ("failed", None))
        prog = one_var(objective={0: 1})
        prog.add({0: 1}, lp.GE, 2)
        sol = lp.solve(prog, mode="fast")
        assert sol.fallback and sol.notes[0].startswith("NumericFallback")
        assert sol.point == [2]

    def test_infeasible_gets_exact_certificate(self):
        prog = lp.LinearProgram(2)
        prog.add({0: 1, 1: 1}, lp.EQ, 1)
        prog.add({0: 1, 1: 1}, lp.GE, 2)
        sol = lp.solve(prog, mode="fast")
        assert sol.status == lp.Status.INFEASIBLE
        assert lp.verify_farkas(prog, sol.certificate)

    def test_crash_basis_spans(self):
        prog = lp.LinearProgram(3)
        prog.add({0: 1, 1: 1}, lp.EQ, 1)
        prog.add({1: 1, 2: 1}, lp.EQ, 1)
        engine = ExactSimplex(StandardForm(prog))
        basis = fast.crash_basis(engine, [0.5, 0.5, 0.5])
        assert len(basis) == engine.m
        assert engine._load_basis(basis)


class TestVertices:
    def test_unit_square(self):
        prog = lp.LinearProgram(2)
        prog.add({0: 1}, lp.LE, 1)
        prog.add({1: 1}, lp.LE, 1)
        verts = {tuple(v) for v in lp.enumerate_vertices(prog)}
        assert verts == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_simplex_with_pinned_variable(self):
        prog = lp.LinearProgram(3)
        prog.add({0: 1, 1: 1, 2: 1}, lp.EQ, 1)
        prog.add({2: 1}, lp.EQ, 0)
        verts = {tuple(v) for v in lp.enumerate_vertices(prog)}
        assert verts == {(1, 0, 0), (0, 1, 0)}
        assert lp.fixed_at_zero(prog) == {2}

    def test_infeasible_has_no_vertices(self):
        prog = one_var()
        prog.add({0: 1}, lp.EQ, -1)
        assert lp.enumerate_vertices(prog) == []

    def test_limit(self):
        prog = lp.LinearProgram(3)
        for j in range(3):
            prog.add({j: 1}, lp.LE, 1)
        assert len(lp.enumerate_vertices(prog, limit=3)) == 3
        assert len(lp.enumerate_vertices(prog)) == 8


def test_lp_text_dump():
    prog = lp.LinearProgram(2, objective={0: F(1, 2)})
    prog.add({0: 1, 1: F(-2, 3)}, lp.LE, F(7, 3), "cap")
    prog.set_bounds(1, None, None)
    text = lp.to_lp_text(prog)
    assert "obj: 1/2 x0" in text
    assert "r0: x0 - 2/3 x1 <= 7/3" in text
    assert "x1 free" in text and text.rstrip().endswith("End")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_modes_agree_and_outputs_verify(seed):
    prog = random_sparse_lp(random.Random(seed), max_vars=60, max_rows=10)
    exact = lp.solve(prog)
    quick = lp.solve(prog, mode="fast")
    assert exact.status == quick.status
    assert exact.objective_value == quick.objective_value
    for sol in (exact, quick):
        if sol.feasible:
            assert lp.check_point(prog, sol.point) == []
            assert lp.objective_at(prog, sol.point) == sol.objective_value
        elif sol.status == lp.Status.INFEASIBLE:
            assert lp.verify_farkas(prog, sol.certificate)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimum_satisfies_weak_duality(seed):
    prog = random_sparse_lp(random.Random(seed), max_vars=40, max_rows=8)
    for j in range(prog.num_vars):
        prog.bounds.pop(j, None)
    sol = lp.solve(prog)
    if sol.status != lp.Status.OPTIMAL:
        return
    # With x >= 0 only: y^T b equals the optimum and reduced costs are >= 0.
    y = sol.duals
    assert sum(r.rhs * yi for r, yi in zip(prog.constraints, y)) == sol.objective_value
    for j in range(prog.num_vars):
        col = sum(r.coeffs.get(j, 0) * yi for r, yi in zip(prog.constraints, y))
        assert prog.objective.get(j, 0) - col >= 0
