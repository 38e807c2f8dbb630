"""Tests for the linear-quadratic control layer."""

import numpy as np
import pytest

from lieint.control import (
    LqrProblem,
    closed_loop_simulate,
    constant_control,
    cost_eval,
    feedback_gain,
    riccati_backward_solve,
    vehicle_cost_pair,
    vehicle_problem,
)
from lieint.integrators import TimeGrid, rk4_step
from lieint.problems import lqr_exact_value_function

ONE = np.array([[1.0]])


class TestLqrProblem:
    def test_vehicle_problem_fields(self):
        prob = vehicle_problem()
        assert prob.a[0, 0] == -2.0
        assert prob.state_dim == 1
        assert (prob.t0, prob.tf) == (0.0, 1.0)

    def test_rejects_asymmetric_q(self):
        with pytest.raises(ValueError):
            LqrProblem(a=np.eye(2), b=np.eye(2), q=np.array([[1.0, 1.0], [0.0, 1.0]]),
                       r=np.eye(2), s=np.eye(2), t0=0.0, tf=1.0)

    def test_rejects_indefinite_q(self):
        with pytest.raises(ValueError):
            LqrProblem(a=ONE, b=ONE, q=-ONE, r=ONE, s=ONE, t0=0.0, tf=1.0)

    def test_rejects_semidefinite_r(self):
        with pytest.raises(ValueError):
            LqrProblem(a=ONE, b=ONE, q=ONE, r=np.array([[0.0]]), s=ONE, t0=0.0, tf=1.0)

    def test_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            LqrProblem(a=ONE, b=ONE, q=ONE, r=ONE, s=ONE, t0=1.0, tf=1.0)


class TestExactValueFunction:
    def test_terminal_condition(self):
        assert lqr_exact_value_function(1.0) == pytest.approx(1.0)

    def test_solves_riccati_ode(self):
        for t in (0.1, 0.5, 0.9):
            h = 1e-6
            lhs = (lqr_exact_value_function(t + h) - lqr_exact_value_function(t - h)) / (2.0 * h)
            p = lqr_exact_value_function(t)
            assert lhs == pytest.approx(p * p + 4.0 * p - 1.0, rel=1e-6)

    def test_positive_on_interval(self):
        for t in np.linspace(0.0, 1.0, 101):
            assert lqr_exact_value_function(t) > 0.0


class TestBackwardSolve:
    @pytest.mark.parametrize("scheme", ["magnus2", "magnus4", "rkmk4", "rk4", "heun"])
    def test_matches_closed_form(self, scheme):
        prob = vehicle_problem()
        grid = TimeGrid.from_step(0.0, 1.0, 1e-3)
        vp = riccati_backward_solve(prob, scheme, grid)
        worst = max(abs(vp.values[i, 0, 0] - lqr_exact_value_function(t))
                    for i, t in enumerate(grid.nodes))
        tol = 1e-6 if scheme != "heun" else 1e-5
        assert worst < tol

    def test_group_and_direct_routes_agree(self):
        prob = vehicle_problem()
        grid = TimeGrid.from_step(0.0, 1.0, 1e-3)
        vp_group = riccati_backward_solve(prob, "rkmk4", grid)
        vp_direct = riccati_backward_solve(prob, "rk4", grid)
        assert np.max(np.abs(vp_group.values - vp_direct.values)) < 1e-8

    def test_forward_reintegration_lands_on_terminal_weight(self):
        prob = vehicle_problem()
        grid = TimeGrid.from_step(0.0, 1.0, 1e-3)
        vp = riccati_backward_solve(prob, "rkmk4", grid)
        # integrate dP/dt = P^2 + 4P - 1 forward from the returned P(t0)
        p = np.array([vp.values[0, 0, 0]])
        f = lambda t, p: p * p + 4.0 * p - 1.0
        for t_k in grid.nodes[:-1]:
            p = rk4_step(f, t_k, p, grid.h)
        assert abs(p[0] - prob.s[0, 0]) < 1e-8

    def test_value_path_interpolates(self):
        prob = vehicle_problem()
        vp = riccati_backward_solve(prob, "rkmk4", TimeGrid(0.0, 1.0, 100))
        mid = vp(0.005)[0, 0]
        assert min(vp.values[0, 0, 0], vp.values[1, 0, 0]) <= mid <= max(
            vp.values[0, 0, 0], vp.values[1, 0, 0])
        # clamped outside the window
        assert np.allclose(vp(-1.0), vp.values[0])
        assert np.allclose(vp(2.0), vp.values[-1])

    def test_grid_must_cover_horizon(self):
        with pytest.raises(ValueError):
            riccati_backward_solve(vehicle_problem(), "rk4", TimeGrid(0.0, 2.0, 10))

    def test_group_route_rejects_matrix_problems(self):
        prob = LqrProblem(a=np.eye(2), b=np.eye(2), q=np.eye(2), r=np.eye(2),
                          s=np.eye(2), t0=0.0, tf=1.0)
        with pytest.raises(ValueError):
            riccati_backward_solve(prob, "magnus2", TimeGrid(0.0, 1.0, 10))

    def test_matrix_problem_direct_route(self):
        # two decoupled copies of the scalar problem
        prob = LqrProblem(a=-2.0 * np.eye(2), b=np.eye(2), q=np.eye(2), r=np.eye(2),
                          s=np.eye(2), t0=0.0, tf=1.0)
        vp = riccati_backward_solve(prob, "rk4", TimeGrid.from_step(0.0, 1.0, 1e-3))
        assert vp.values[0].shape == (2, 2)
        assert vp.values[0][0, 0] == pytest.approx(lqr_exact_value_function(0.0), abs=1e-8)
        assert abs(vp.values[0][0, 1]) < 1e-12


class TestFeedbackAndCost:
    def test_gain_is_negative_value_function(self):
        prob = vehicle_problem()
        law = feedback_gain(riccati_backward_solve(prob, "rkmk4", TimeGrid(0.0, 1.0, 1000)), prob)
        assert law.gain(0.5)[0, 0] == pytest.approx(-lqr_exact_value_function(0.5), abs=1e-6)

    def test_constant_control_values(self):
        assert constant_control(1.0) == 0.0
        assert constant_control(1.2) == pytest.approx(0.4 / (1.0 - np.e**2), rel=1e-12)
        assert constant_control(1.2) == pytest.approx(-0.06260, abs=2e-5)
        assert constant_control(0.9) == pytest.approx(0.03130, abs=2e-5)

    def test_constant_control_reaches_cruise_speed(self):
        # the defining property: dv(1) = 0 under the constant input
        prob = vehicle_problem()
        du_c = constant_control(1.2)
        def plant(t, x, u):
            return prob.a @ x + prob.b @ np.atleast_1d(u)
        traj = closed_loop_simulate(plant, du_c, np.array([0.2]), TimeGrid(0.0, 1.0, 2000))
        assert abs(traj.states[-1, 0]) < 1e-9

    def test_optimal_cost_matches_value_function(self):
        # J* = dv0' P(0) dv0 for the linear-quadratic problem
        j_opt, _ = vehicle_cost_pair(1.2)
        assert j_opt == pytest.approx(0.04 * lqr_exact_value_function(0.0), rel=1e-6)

    def test_cost_dominance(self):
        for v_bar in (1.2, 1.1, 1.05):
            j_opt, j_const = vehicle_cost_pair(v_bar)
            assert j_opt <= j_const

    def test_cruise_start_costs_nothing(self):
        j_opt, j_const = vehicle_cost_pair(1.0)
        assert j_opt == pytest.approx(0.0, abs=1e-14)
        assert j_const == pytest.approx(0.0, abs=1e-14)

    def test_cost_eval_on_known_trajectory(self):
        # x(t) = e^{-t}, u = 0: J = x(1)^2 + int_0^1 e^{-2t} dt
        prob = vehicle_problem()
        grid = TimeGrid(0.0, 1.0, 2000)
        def plant(t, x, u):
            return -x
        traj = closed_loop_simulate(plant, 0.0, np.array([1.0]), grid)
        j = cost_eval(traj, lambda t, x: np.array([0.0]), prob)
        expected = np.exp(-2.0) + 0.5 * (1.0 - np.exp(-2.0))
        assert j == pytest.approx(expected, rel=1e-8)

    def test_cost_eval_odd_panel_count(self):
        prob = vehicle_problem()
        grid = TimeGrid(0.0, 1.0, 999)
        def plant(t, x, u):
            return -x
        traj = closed_loop_simulate(plant, 0.0, np.array([1.0]), grid)
        j = cost_eval(traj, lambda t, x: np.array([0.0]), prob)
        expected = np.exp(-2.0) + 0.5 * (1.0 - np.exp(-2.0))
        assert j == pytest.approx(expected, rel=1e-6)
