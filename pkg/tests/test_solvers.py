import numpy as np
import pytest

import nonlocal_saddle as ns
from nonlocal_saddle import nonlinearity as nl
from nonlocal_saddle.assembly import norm_Z
from nonlocal_saddle.errors import ResonanceError, UnsupportedCaseError
from nonlocal_saddle.solvers import (eval_J, eval_gradient,
                                     linear_nonresonant_solve, load_vector,
                                     residual_weakform)

OPTS = ns.SolverOptions()


@pytest.fixture(scope="module")
def gap_spec():
    return nl.saturating(20.0, 0.5, nl.constant_profile(1.0))


def test_gradient_matches_finite_differences(op128, rng, gap_spec):
    """central difference of J along random directions reproduces J'."""
    u = rng.standard_normal(op128.size)
    grad = eval_gradient(op128, gap_spec, u)
    eps = 1e-6
    for _ in range(5):
        d = rng.standard_normal(op128.size)
        d /= np.linalg.norm(d)
        fd = (eval_J(op128, gap_spec, u + eps * d)
              - eval_J(op128, gap_spec, u - eps * d)) / (2.0 * eps)
        assert fd == pytest.approx(float(grad @ d), rel=1e-6, abs=1e-8)


def test_load_vector_of_constant_source(op128):
    """for f(x,u) = g constant the load is M applied to the interpolant."""
    spec = nl.affine(0.0, nl.constant_profile(3.0))
    b = load_vector(op128, spec, np.zeros(op128.size))
    ref = op128.mass @ np.full(op128.size, 3.0)
    # boundary elements see g against the hat, not its interpolant truncation
    np.testing.assert_allclose(b[1:-1], ref[1:-1], rtol=1e-12)
    assert b[0] == pytest.approx(3.0 * op128.mesh.h, rel=1e-12)


def test_linear_nonresonant_solve_1x1():
    """single dof, hand-checkable: u = h / (a11 - 2mh/3)."""
    mesh = ns.build_uniform_mesh(-1.0, 1.0, 2)
    op = ns.assemble(mesh, ns.make_fractional_kernel(0.5), skip_audit=True)
    sp = ns.solve_eigenproblem(op)
    a11 = op.stiffness[0, 0]
    h = mesh.h
    m = 1.0
    res = linear_nonresonant_solve(op, sp, m, nl.constant_profile(1.0))
    assert res.solution[0] == pytest.approx(
        h / (a11 - m * 2.0 * h / 3.0), rel=1e-12)


def test_linear_solve_matches_direct_inverse(op128, spectrum128, rng):
    for m in (0.0, 10.0, 20.0):
        g_val = float(rng.uniform(-2.0, 2.0))
        res = linear_nonresonant_solve(op128, spectrum128, m,
                                       nl.constant_profile(g_val))
        spec = nl.affine(m, nl.constant_profile(g_val))
        b = load_vector(op128, spec, np.zeros(op128.size))
        b -= m * (op128.mass @ np.zeros(op128.size))
        # direct: (A - mM) u = load of g alone
        g_load = load_vector(op128, nl.affine(0.0, nl.constant_profile(g_val)),
                             np.zeros(op128.size))
        direct = np.linalg.solve(op128.stiffness - m * op128.mass, g_load)
        np.testing.assert_allclose(res.solution, direct, atol=1e-10)


def test_linear_solve_refuses_resonance(op128, spectrum128):
    lam2 = float(spectrum128.eigenvalues[1])
    with pytest.raises(ResonanceError):
        linear_nonresonant_solve(op128, spectrum128, lam2,
                                 nl.constant_profile(1.0))


def test_case_a_matches_direct_solve(op128):
    spec = nl.affine(0.0, nl.constant_profile(1.0))
    rep = ns.solve_case_a(op128, spec, OPTS)
    assert rep.converged
    g_load = load_vector(op128, spec, np.zeros(op128.size))
    direct = np.linalg.solve(op128.stiffness, g_load)
    np.testing.assert_allclose(rep.solution, direct, atol=1e-10)
    assert rep.residual_inf <= 1e-9


def test_case_a_refuses_gap_problem(op128, spectrum128, gap_spec):
    cls = nl.classify(gap_spec, spectrum128)
    with pytest.raises(UnsupportedCaseError):
        ns.solve_case_a(op128, gap_spec, OPTS, classification=cls)


def test_case_a_minimizes(op128, rng):
    """J at the solution is below J at random perturbations."""
    spec = nl.saturating(0.0, 0.5, nl.constant_profile(1.0))
    rep = ns.solve_case_a(op128, spec, OPTS)
    j0 = eval_J(op128, spec, rep.solution)
    assert rep.j_value == pytest.approx(j0, rel=1e-12)
    for _ in range(10):
        d = rng.standard_normal(op128.size)
        assert eval_J(op128, spec, rep.solution + 0.1 * d) > j0


def test_case_b_converges_and_is_critical(op128, spectrum128, gap_spec):
    rep = ns.solve_case_b(op128, spectrum128, gap_spec, OPTS)
    assert rep.converged
    assert rep.residual_inf <= 1e-9
    assert rep.iterations <= 25
    grad = eval_gradient(op128, gap_spec, rep.solution)
    assert np.max(np.abs(grad)) < 1e-8


def test_case_b_saddle_signature(op128, spectrum128, gap_spec):
    """at the gap solution J decreases along the head, increases along the
    orthogonal tail (the minimax structure)."""
    rep = ns.solve_case_b(op128, spectrum128, gap_spec, OPTS)
    u = rep.solution
    j0 = eval_J(op128, gap_spec, u)
    E = spectrum128.eigenvectors
    for j in (0, 1):  # head directions, k = 2
        for sgn in (+1.0, -1.0):
            assert eval_J(op128, gap_spec, u + sgn * 0.5 * E[:, j]) < j0
    for j in (2, 5, 20):  # tail directions
        for sgn in (+1.0, -1.0):
            assert eval_J(op128, gap_spec, u + sgn * 0.5 * E[:, j]) > j0


def test_morse_index_equals_gap_index(op128, spectrum128):
    for m, k in ((10.0, 1), (20.0, 2), (30.0, 3)):
        spec = nl.saturating(m, 0.5, nl.constant_profile(1.0))
        rep = ns.solve_case_b(op128, spectrum128, spec, OPTS)
        assert ns.morse_index(op128, spec, rep.solution) == k


def test_residual_weakform_zero_at_linear_solution(op128, spectrum128):
    spec = nl.affine(10.0, nl.constant_profile(1.0))
    res = linear_nonresonant_solve(op128, spectrum128, 10.0,
                                   nl.constant_profile(1.0))
    assert residual_weakform(op128, spec, res.solution) < 1e-12


def test_uniqueness_probe_unique_under_f2(op128, spectrum128, gap_spec):
    verdict = ns.uniqueness_probe(op128, spectrum128, gap_spec, 2,
                                  n_starts=8, opts=OPTS)
    assert verdict.kind == "Unique"
    assert verdict.max_pairwise_z <= 1e-8
    assert verdict.n_starts == 8


def test_uniqueness_probe_resonant_multiple(op128, spectrum128):
    lam2 = float(spectrum128.eigenvalues[1])
    spec = nl.affine(lam2, nl.constant_profile(0.0))
    verdict = ns.uniqueness_probe(op128, spectrum128, spec, 2,
                                  n_starts=8, opts=OPTS)
    assert verdict.kind == "MultipleFound"
    assert verdict.max_pairwise_z > 1e-6
    # every representative is a genuine critical point (on ker(A - lam2 M))
    for u in verdict.representatives:
        assert residual_weakform(op128, spec, np.asarray(u)) < 1e-8


def test_uniqueness_probe_is_seeded(op128, spectrum128, gap_spec):
    v1 = ns.uniqueness_probe(op128, spectrum128, gap_spec, 2, n_starts=4,
                             opts=ns.SolverOptions(seed=7))
    v2 = ns.uniqueness_probe(op128, spectrum128, gap_spec, 2, n_starts=4,
                             opts=ns.SolverOptions(seed=7))
    assert v1.max_pairwise_z == v2.max_pairwise_z


# ---------------------------------------------------------------------------
# geometry probe
# ---------------------------------------------------------------------------

def test_geometry_probe_affine_exact_ratios(op128, spectrum128):
    """for the purely quadratic functional the eigen-axis samples attain
    (lambda_j - m)/2 in the L2-normalized ratio exactly."""
    m = 20.0
    spec = nl.affine(m, nl.constant_profile(0.0))
    probe = ns.geometry_probe(op128, spectrum128, spec, 2)
    lam = spectrum128.eigenvalues
    head_target = (lam[1] - m) / 2.0
    tail_target = (lam[2] - m) / 2.0
    assert head_target < 0.0 < tail_target
    largest = probe.head[-1]
    assert largest.extreme_ratio_l2 == pytest.approx(head_target, abs=1e-10)
    for sample in probe.tail:
        assert sample.extreme_ratio_l2 == pytest.approx(tail_target,
                                                        abs=1e-10)
    assert probe.separated


def test_geometry_probe_z_ratio_normalization(op128, spectrum128):
    """on a Z-sphere the same extremes give (lambda_j - m)/(2 lambda_j)."""
    m = 20.0
    spec = nl.affine(m, nl.constant_profile(0.0))
    probe = ns.geometry_probe(op128, spectrum128, spec, 2)
    lam = spectrum128.eigenvalues
    assert probe.head[-1].extreme_ratio_z == pytest.approx(
        (lam[1] - m) / (2.0 * lam[1]), abs=1e-10)


def test_geometry_probe_coercive_positive(op128, spectrum128):
    spec = nl.affine(0.0, nl.constant_profile(1.0))
    probe = ns.geometry_probe(op128, spectrum128, spec, 0)
    assert probe.mode == "coercive"
    for sample in probe.head:
        assert sample.extreme_ratio_l2 > 0.0


def test_z_norm_of_eigenvector(op128, spectrum128):
    # an M-normalized eigenvector has Z-norm sqrt(lambda)
    for j in (0, 3):
        e = spectrum128.eigenvectors[:, j]
        assert norm_Z(op128, e) == pytest.approx(
            np.sqrt(spectrum128.eigenvalues[j]), rel=1e-10)
