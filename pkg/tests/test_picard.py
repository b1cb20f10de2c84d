import math

import numpy as np
import pytest
from scipy import optimize

from uhrfrac.analysis.picard import (MildOperator, SolveResult,
                                     impulse_pointwise_solve, omega_apply,
                                     perturb, picard_solve, skeleton,
                                     weighted_sup_distance)
from uhrfrac.analysis.stability import phi_constant
from uhrfrac.calculus import caching
from uhrfrac.calculus.psi import FractionalOrder, PsiFunction
from uhrfrac.calculus.quadrature import GridFunction, build_mesh
from uhrfrac.errors import ConvergenceError, DomainError, MeshMismatchError
from uhrfrac.model.expr import evaluate, parse
from uhrfrac.model.problem import ImpulsiveProblem, builtin_scenario


@pytest.fixture(autouse=True)
def fresh_cache():
    caching.flush()
    yield
    caching.flush()


def make_problem(alpha=1.0, beta=0.0, f="0", K="0", ell="0", g=(),
                 partition=(), T=1.0, x0=0.0, psi=None):
    return ImpulsiveProblem(
        order=FractionalOrder(alpha, beta),
        psi=psi or PsiFunction("identity"), T=T, partition=partition,
        f=parse(f), K=parse(K), ell=parse(ell),
        g=[parse(e) for e in g], x0=x0)


#--- DISTANCE -----------------------------------------------------------------

def test_weighted_sup_distance():
    mesh = build_mesh([], 1.0, 4, 1.0)
    a = GridFunction(mesh, [0.0, 1.0, 2.0, 3.0, 4.0])
    b = GridFunction(mesh, [0.0, 1.0, 2.5, 3.0, 4.0])
    c = GridFunction(mesh, [1.0, 1.0, 1.0, 1.0, 1.0])
    assert weighted_sup_distance(a, a) == 0.0
    assert weighted_sup_distance(a, b) == 0.5
    assert weighted_sup_distance(b, a) == 0.5
    assert weighted_sup_distance(a, c) <= \
        weighted_sup_distance(a, b) + weighted_sup_distance(b, c)
    other = GridFunction(build_mesh([], 1.0, 8, 1.0), np.zeros(9))
    with pytest.raises(MeshMismatchError):
        weighted_sup_distance(a, other)
    singular = GridFunction(mesh, np.zeros(5), 0.5, PsiFunction("identity"))
    with pytest.raises(MeshMismatchError):
        weighted_sup_distance(a, singular)


#--- OPERATOR -----------------------------------------------------------------

def test_zero_problem_maps_to_zero():
    problem = make_problem(alpha=0.5, beta=0.5, f="x", K="x", ell="x",
                           g=["x/2"], partition=[(0.5, 1.0)], T=2.0)
    mesh = problem.mesh(8, 2.0)
    x = GridFunction(mesh, np.zeros(len(mesh)), problem.gamma, problem.psi)
    y = omega_apply(problem, x)
    assert np.all(y.values == 0.0)


def test_constant_initial_datum():
    problem = make_problem(x0=1.0, f="0")
    mesh = problem.mesh(8, 2.0)
    rng = np.random.RandomState(3)
    x = GridFunction(mesh, rng.randn(len(mesh)))
    assert omega_apply(problem, x).values == pytest.approx(np.ones(len(mesh)))


def test_linear_growth():
    # Omega 1 = 1 + t for x' = x, x(0) = 1
    problem = make_problem(f="x", x0=1.0)
    mesh = problem.mesh(8, 2.0)
    x = GridFunction(mesh, np.ones(len(mesh)))
    y = omega_apply(problem, x)
    assert y.values == pytest.approx(1.0 + mesh.nodes, rel=1e-12)


def test_skeleton():
    problem = make_problem(alpha=0.5, beta=0.0, x0=2.0,
                           partition=[(0.5, 1.0)], g=["x"], T=2.0)
    mesh = problem.mesh(4, 1.0)
    s = skeleton(problem, mesh)
    head = list(mesh.head.nodes)
    assert s.values[head] == pytest.approx(
        np.full(len(head), 2.0 / math.sqrt(math.pi)))
    assert np.all(s.values[head[-1] + 1:] == 0.0)
    # raw skeleton is x0 (psi(t) - psi(0))**(gamma - 1) / Gamma(gamma)
    assert s.raw()[2] == pytest.approx(2.0 / math.sqrt(math.pi * 0.25))


def test_operator_rejects():
    problem = make_problem()
    mesh = problem.mesh(4, 1.0)
    with pytest.raises(DomainError):
        MildOperator(problem, mesh, memory_anchor="u")
    with pytest.raises(DomainError):
        MildOperator(problem, mesh, impulse_mode="lazy")
    other = build_mesh([], 1.0, 8, 1.0)
    with pytest.raises(MeshMismatchError):
        MildOperator(problem, mesh)(GridFunction(other, np.zeros(9)))


#--- IMPULSES -----------------------------------------------------------------

def test_impulse_solve_examples():
    problem = make_problem(g=["3"], partition=[(0.5, 1.0)], T=1.0)
    assert impulse_pointwise_solve(problem, 1, 0.75, 0.0) == 3.0
    problem = make_problem(g=["x/2 + 1"], partition=[(0.5, 1.0)], T=1.0)
    assert impulse_pointwise_solve(problem, 1, 0.75, 0.0) == pytest.approx(
        2.0, abs=1e-12)
    with pytest.raises(DomainError):
        impulse_pointwise_solve(problem, 2, 0.75, 0.0)


def test_impulse_solve_matches_root_finder():
    problem = make_problem(g=["1/((5+t)*(1+abs(x)))*(abs(x)+w)"],
                           partition=[(1.0, 2.0)], T=2.0)
    g = problem.g[0]
    for t, M in [(1.5, 0.0), (1.25, 0.3), (2.0, 1.2)]:
        x = impulse_pointwise_solve(problem, 1, t, M, start=0.5)
        root = optimize.brentq(
            lambda v: v - evaluate(g, t=t, x=v, w=M), -1.0, 2.0, xtol=1e-15)
        assert x == pytest.approx(root, abs=1e-12)


def test_impulse_solve_damps_oscillation():
    # plain iteration of x = 3 - 1.5 x diverges; damping converges to 1.2
    problem = make_problem(g=["3 - 1.5*x"], partition=[(0.5, 1.0)], T=1.0)
    x = impulse_pointwise_solve(problem, 1, 0.75, 0.0, start=0.0)
    assert x == pytest.approx(1.2, abs=1e-12)


def test_impulse_solve_gives_up():
    problem = make_problem(g=["x + 1"], partition=[(0.5, 1.0)], T=1.0)
    with pytest.raises(ConvergenceError):
        impulse_pointwise_solve(problem, 1, 0.75, 0.0, max_iter=50)


#--- PICARD -------------------------------------------------------------------

def test_trivial_problem():
    problem = make_problem(f="x", K="x", ell="x", g=["x"],
                           partition=[(0.5, 1.0)], T=2.0)
    result = picard_solve(problem, n_per_interval=8)
    assert result.converged
    assert result.iterations == 1
    assert np.all(result.y0.values == 0.0)
    assert result.final_diff == 0.0


def test_classical_limit():
    # alpha = 1, gamma = 1, f = x: y0 = exp(t)
    problem = make_problem(f="x", x0=1.0)
    result = picard_solve(problem, tol=1e-12, n_per_interval=256)
    assert result.converged
    t = result.mesh.nodes
    assert np.max(np.abs(result.y0.raw() - np.exp(t))) <= 1e-4


def test_riemann_liouville_linear_problem():
    # D^{1/2} x = 0 with I^{1/2} x(0+) = 1: x = t**(-1/2) / Gamma(1/2)
    problem = make_problem(alpha=0.5, beta=0.0, x0=1.0)
    result = picard_solve(problem, n_per_interval=16)
    assert result.converged
    raw = result.y0.raw()[1:]
    t = result.mesh.nodes[1:]
    assert raw == pytest.approx(t ** -0.5 / math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("name", ["example-integer", "example-rl"])
def test_scenarios_converge(name):
    problem, h = builtin_scenario(name)
    problem = problem.with_x0(1.0)
    result = picard_solve(problem, tol=1e-10, n_per_interval=64)
    assert result.converged
    assert result.iterations <= 60
    ratios = result.ratios()
    bound = phi_constant(h, problem.order, problem.psi, problem.T) + 0.1
    assert all(r <= bound for r in ratios[2:])
    residual = weighted_sup_distance(omega_apply(problem, result.y0),
                                     result.y0)
    assert residual <= 2e-10


def test_solve_is_deterministic():
    problem = builtin_scenario("example-rl")[0].with_x0(1.0)
    a = picard_solve(problem, n_per_interval=16)
    caching.flush()
    b = picard_solve(problem, n_per_interval=16)
    assert np.array_equal(a.y0.values, b.y0.values)
    assert a.diff_history == b.diff_history


def test_budget_exhausted():
    problem = builtin_scenario("example-rl")[0].with_x0(1.0)
    result = picard_solve(problem, tol=1e-14, max_iter=2, n_per_interval=16)
    assert not result.converged
    assert result.iterations == 2
    assert len(result.diff_history) == 2
    with pytest.raises(DomainError):
        picard_solve(problem, tol=0.0)
    with pytest.raises(DomainError):
        picard_solve(problem, max_iter=0)


def test_implicit_impulses_reach_same_fixed_point():
    problem = builtin_scenario("example-integer")[0].with_x0(1.0)
    explicit = picard_solve(problem, n_per_interval=16)
    implicit = picard_solve(problem, n_per_interval=16,
                            impulse_mode="implicit")
    assert implicit.converged
    assert weighted_sup_distance(explicit.y0, implicit.y0) <= 1e-8
    assert implicit.y0.right_limits() == pytest.approx(
        explicit.y0.right_limits(), abs=1e-8)


@pytest.mark.parametrize("anchor", ["t", "s_i"])
def test_free_interval(anchor):
    problem = make_problem(
        alpha=0.5, beta=1.0, x0=1.0, T=2.0, partition=[(0.5, 1.0)],
        f="1/(5+psi(t))*(abs(x)+w)", K="abs(x)/(10+t)",
        ell="abs(x)/(15+t)", g=["1/((5+t)*(1+abs(x)))*(abs(x)+w)"])
    result = picard_solve(problem, n_per_interval=16, memory_anchor=anchor)
    assert result.converged
    y = result.y0.raw()
    mesh = result.mesh
    free = mesh.intervals[-1]
    # continuous at s_1 from the impulse side into the free interval
    j = free.start
    assert y[j + 1] == pytest.approx(y[j], abs=0.05)
    # x(s_1+) = g_1(s_1, x(s_1), M(s_1)) = x(s_1) at the fixed point
    assert result.y0.right_limits()[1] == pytest.approx(y[j], abs=1e-8)
    assert np.all(np.isfinite(y))


def test_anchor_changes_free_interval_only():
    kwargs = dict(alpha=0.5, beta=1.0, x0=1.0, T=2.0, partition=[(0.5, 1.0)],
                  f="x/10", K="0", ell="x", g=["w/4"])
    problem = make_problem(**kwargs)
    a = picard_solve(problem, n_per_interval=16, memory_anchor="t").y0
    b = picard_solve(problem, n_per_interval=16, memory_anchor="s_i").y0
    free = a.mesh.intervals[-1]
    head_and_impulse = slice(0, free.start + 1)
    assert a.values[head_and_impulse] == pytest.approx(
        b.values[head_and_impulse], abs=1e-9)
    assert not np.allclose(a.values[free.start + 1:],
                           b.values[free.start + 1:])


#--- JUMPS AND MESH REFINEMENT ------------------------------------------------

def jump_problem():
    # x = 1 on [0, 1], x = exp((t - 1)/2) / 2 on (1, 2], x = exp(1/2) / 2
    # on (2, 3]: the memory w = int_0^t x jumps in slope at t = 1.
    return make_problem(alpha=1.0, x0=1.0, T=3.0, partition=[(1.0, 2.0)],
                        ell="x", g=["w/2"])


def jump_solution(t):
    return np.where(t <= 1.0, 1.0,
                    np.where(t <= 2.0, 0.5 * np.exp((t - 1.0) / 2.0),
                             0.5 * np.exp(0.5)))


def test_right_limits_at_impulse():
    result = picard_solve(jump_problem(), tol=1e-13, n_per_interval=8,
                          grading=1.0)
    assert result.converged
    mesh = result.mesh
    assert mesh.boundaries == (8, 16)
    y = result.y0
    assert y.raw()[8] == pytest.approx(1.0, abs=1e-12)
    assert y.right_limits()[0] == pytest.approx(0.5, abs=1e-12)
    assert y.jumps()[0] == pytest.approx(-0.5, abs=1e-12)
    assert y.jumps()[1] == pytest.approx(0.0, abs=1e-12)


def test_impulsive_solution_is_second_order():
    errors = []
    for n in (16, 32, 64):
        result = picard_solve(jump_problem(), tol=1e-13, n_per_interval=n,
                              grading=1.0)
        assert result.converged
        t = result.mesh.nodes
        errors.append(np.max(np.abs(result.y0.raw() - jump_solution(t))))
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    assert all(order >= 1.8 for order in orders)
    assert errors[-1] <= 1e-4


def test_scenario_refinement_at_shared_nodes():
    # Doubling n keeps every coarse node (grading included), so the change at
    # shared nodes shrinks by about 4 for a second order rule.
    problem = builtin_scenario("example-integer")[0].with_x0(1.0)
    solutions = [picard_solve(problem, tol=1e-13, n_per_interval=n)
                 for n in (16, 32, 64)]
    changes = []
    for coarse, fine in zip(solutions, solutions[1:]):
        assert np.array_equal(fine.mesh.nodes[::2], coarse.mesh.nodes)
        changes.append(np.max(np.abs(fine.y0.raw()[::2] - coarse.y0.raw())))
    assert changes[1] > 0.0
    assert changes[0] / changes[1] >= 2 ** 1.8


#--- RESULTS ------------------------------------------------------------------

def test_solve_result_ratios():
    mesh = build_mesh([], 1.0, 4, 1.0)
    result = SolveResult(GridFunction(mesh, np.zeros(5)), 3, [1.0, 0.5, 0.0])
    assert result.ratios() == [0.5, 0.0]
    assert result.final_diff == 0.0
    assert result.mesh is mesh


def test_perturb():
    problem, h = builtin_scenario("example-integer")
    mesh = problem.mesh(8)
    y0 = GridFunction(mesh, np.zeros(len(mesh)))
    y = perturb(y0, h.phi, h.delta, 1e-3)
    expected = 1e-3 * (np.exp(mesh.nodes) + 1.0)
    assert y.raw() == pytest.approx(expected, rel=1e-12)


def test_perturb_singular_head():
    problem, h = builtin_scenario("example-rl")
    mesh = problem.mesh(8)
    y0 = GridFunction(mesh, np.zeros(len(mesh)), 0.5, problem.psi)
    y = perturb(y0, h.phi, h.delta, 1e-3, problem.psi)
    assert y.values[0] == 0.0
    t = mesh.nodes[1:]
    phi = evaluate(h.phi, t=t)
    assert y.raw()[1:] == pytest.approx(1e-3 * (phi + 1.0), rel=1e-12)
