"""Time stepping, steady states, and the closed-form modal solution."""

import numpy as np
import pytest

from conftest import ramp
from oscillab.schemes import (
    BoundaryData,
    Discretization,
    backward_euler,
    crank_nicolson,
    forward_euler,
    taylor,
)
from oscillab.simulate import (
    ConvergenceError,
    Kind,
    Problem,
    modal_solution,
    run,
    steady_state,
    step,
)

FE = forward_euler()
CN = crank_nicolson()

# (scheme, safely stable mesh ratio) pairs for sweeps.
STABLE_CONFIGS = [
    (forward_euler(), 0.4),
    (taylor(2), 0.4),
    (taylor(3), 0.5),
    (taylor(5), 0.6),
    (backward_euler(), 1.0),
    (crank_nicolson(), 1.0),
]


def heat_problem(k, r, bc=(0.0, 0.0), initial=None):
    disc = Discretization.from_r(k, r)
    if initial is None:
        initial = ramp(k)
    return Problem(kind=Kind.HEAT, disc=disc, bc=BoundaryData(*bc), initial=initial)


def test_step_single_stencil_application():
    p = heat_problem(3, 0.25, initial=np.array([0.0, 1.0, 0.0]))
    assert np.array_equal(step(p, FE, p.initial), np.array([0.25, 0.5, 0.25]))


def test_step_fixed_point_at_steady_state():
    for scheme, r in STABLE_CONFIGS:
        p = heat_problem(8, r, bc=(1.0, 0.25))
        ubar = steady_state(p, scheme)
        assert np.max(np.abs(step(p, scheme, ubar) - ubar)) < 1e-12


def test_nonlinear_step_with_implicit_diffusion():
    # Frozen-form update under backward Euler: diffusion through the scheme's
    # rational function, reaction explicit at the current state.
    k = 6
    disc = Discretization.from_r(k, 0.4)
    rho = 0.7
    u = np.linspace(0.2, 0.9, k)
    p = Problem(kind=Kind.NONLINEAR_RD, disc=disc, bc=BoundaryData(0.3, 0.1), initial=u, rho=rho)
    be = backward_euler()
    got = step(p, be, u)

    a = disc.r * (np.diag(np.full(k - 1, 1.0), 1) + np.diag(np.full(k - 1, 1.0), -1) - 2.0 * np.eye(k))
    b0 = np.zeros(k)
    b0[0], b0[-1] = 0.3, 0.1
    m_inv = np.linalg.inv(np.eye(k) - a)
    expected = m_inv @ u + m_inv @ (disc.r * b0) - disc.dt * rho * u * u
    assert np.max(np.abs(got - expected)) < 1e-12


def test_fisher_with_zero_rho_matches_heat():
    k = 9
    ic = ramp(k)
    heat = heat_problem(k, 0.3, bc=(0.5, 0.0), initial=ic)
    fisher = Problem(
        kind=Kind.FISHER_KPP,
        disc=Discretization.from_r(k, 0.3),
        bc=BoundaryData(0.5, 0.0),
        initial=ic,
        rho=0.0,
    )
    assert np.array_equal(step(heat, FE, ic), step(fisher, FE, ic))


def test_run_zero_steps():
    p = heat_problem(5, 0.25)
    traj = run(p, FE, 0)
    assert traj.states.shape == (1, 5)
    assert not traj.diverged


def test_run_divergence_flag():
    p = heat_problem(30, 0.6, initial=np.random.default_rng(3).random(30))
    traj = run(p, FE, 200)
    assert traj.diverged
    assert traj.states.shape[0] <= 201


def test_run_approaches_steady_ramp():
    k = 12
    p = heat_problem(k, 0.5, bc=(1.0, 0.0), initial=np.zeros(k))
    traj = run(p, CN, 1200)
    expected = (k + 1 - np.arange(1.0, k + 1)) / (k + 1)
    assert np.max(np.abs(traj.states[-1] - expected)) < 1e-9


def test_steady_state_ramp_and_zero():
    p = heat_problem(5, 0.7, bc=(1.0, 0.0))
    assert np.max(np.abs(steady_state(p, FE) - np.array([5, 4, 3, 2, 1]) / 6.0)) < 1e-11
    p0 = heat_problem(5, 0.7, bc=(0.0, 0.0))
    assert np.max(np.abs(steady_state(p0, FE))) < 1e-13


def test_fisher_steady_near_one():
    k = 20
    disc = Discretization.from_r(k, 0.2)
    p = Problem(
        kind=Kind.FISHER_KPP,
        disc=disc,
        bc=BoundaryData(1.0, 1.0),
        initial=np.ones(k),
        rho=0.8,
    )
    ubar = steady_state(p, FE)
    assert np.max(np.abs(ubar - 1.0)) < 1e-10
    # Residual of the discrete steady equation.
    ext = np.concatenate(([1.0], ubar, [1.0]))
    second = ext[:-2] - 2.0 * ext[1:-1] + ext[2:]
    resid = disc.delta / disc.dx**2 * second - 0.8 * ubar * (1.0 - ubar)
    assert np.max(np.abs(resid)) < 1e-10


def test_nonlinear_steady_convergence_error():
    k = 10
    p = Problem(
        kind=Kind.NONLINEAR_RD,
        disc=Discretization.from_r(k, 0.25),
        bc=BoundaryData(0.0, 0.0),
        initial=0.5 * np.ones(k),
        rho=0.4,
    )
    with pytest.raises(ConvergenceError):
        steady_state(p, FE, tol=1e-12, max_iter=3)


def test_modal_solution_rejects_nonlinear():
    p = Problem(
        kind=Kind.FISHER_KPP,
        disc=Discretization.from_r(4, 0.25),
        bc=BoundaryData(0.0, 0.0),
        initial=np.zeros(4),
        rho=1.0,
    )
    with pytest.raises(ValueError):
        modal_solution(p, FE, 3)


def test_modal_solution_reproduces_initial_state(rng):
    k = 33
    p = heat_problem(k, 0.4, bc=(0.3, 0.8), initial=rng.random(k))
    assert np.max(np.abs(modal_solution(p, FE, 0) - p.initial)) < 1e-10


def test_modal_equivalence_heat_and_linear_rd(rng):
    for k in (10, 50):
        ic = rng.random(k)
        for scheme, r in STABLE_CONFIGS:
            # heat
            p = heat_problem(k, r, bc=(1.0, 0.2), initial=ic)
            traj = run(p, scheme, 200)
            for n in (1, 17, 200):
                assert np.max(np.abs(modal_solution(p, scheme, n) - traj.states[n])) <= 1e-9
            # linear reaction-diffusion with sigma = 0.1
            disc = Discretization.from_r(k, r, rho=0.1 / r)
            p2 = Problem(kind=Kind.LINEAR_RD, disc=disc, bc=BoundaryData(1.0, 0.2), initial=ic, rho=0.1 / r)
            traj2 = run(p2, scheme, 200)
            for n in (1, 17, 200):
                assert np.max(np.abs(modal_solution(p2, scheme, n) - traj2.states[n])) <= 1e-9


def test_maximum_principle_at_nonneg_bound(rng):
    k = 40
    ic = rng.random(k)
    p = heat_problem(k, 0.25, bc=(0.3, 0.9), initial=ic)
    traj = run(p, FE, 300)
    assert np.min(traj.states) >= -1e-12
    assert np.max(traj.states) <= 1.0 + 1e-12


def test_linearity(rng):
    k = 25
    ic = rng.normal(size=k)
    alpha = 3.7
    for scheme in (FE, CN):
        base = run(heat_problem(k, 0.45, initial=ic), scheme, 80).states
        scaled = run(heat_problem(k, 0.45, initial=alpha * ic), scheme, 80).states
        assert np.max(np.abs(scaled - alpha * base)) <= 1e-10 * max(1.0, np.max(np.abs(scaled)))


def test_problem_validation():
    disc = Discretization.from_r(5, 0.25)
    with pytest.raises(ValueError):
        Problem(kind=Kind.HEAT, disc=disc, bc=BoundaryData(0, 0), initial=np.zeros(4))
    with pytest.raises(ValueError):
        Problem(kind=Kind.HEAT, disc=disc, bc=BoundaryData(0, 0), initial=np.zeros(5), rho=0.5)
    with pytest.raises(ValueError):
        # linear RD needs the shift inside the discretization
        Problem(kind=Kind.LINEAR_RD, disc=disc, bc=BoundaryData(0, 0), initial=np.zeros(5), rho=0.5)
    with pytest.raises(ValueError):
        # nonlinear kinds must not double-count the reaction in the operator
        bad = Discretization.from_r(5, 0.25, rho=0.5)
        Problem(kind=Kind.FISHER_KPP, disc=bad, bc=BoundaryData(0, 0), initial=np.zeros(5), rho=0.5)
    with pytest.raises(ValueError):
        Problem(kind=Kind.CUBIC_RD, disc=disc, bc=BoundaryData(0, 0), initial=np.zeros(5), rho=0.5, a_param=1.5)
    with pytest.raises(ValueError):
        run(heat_problem(5, 0.25), FE, -1)
