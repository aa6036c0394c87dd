"""Fixed-point solver: step algebra, the shipped worked instance, regions.

The expected limit of the worked instance is frozen through two routes that
do not touch the solver: the closed-form root of the scalar quadratic
satisfied by the tail norm, and a general-purpose nonlinear root finder on
the raw residual.  Both agree to machine precision.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import optimize

import mesoc_kit as mk
from mesoc_kit import micp_solver, sampling


def closed_form_solution():
    # tail norm solves 258299 s^2 - 7016 s - 22864 = 0; the coordinates are
    # affine in s (derived by eliminating the two zero-residual equations)
    s = (7016.0 + np.sqrt(7016.0**2 + 4 * 258299.0 * 22864.0)) / (2 * 258299.0)
    x2 = s / 6.0 + 2.0 / 3.0
    return np.array([2.0 * x2, x2, 29.0 * s / 720.0 + 53.0 / 180.0, 31.0 * s / 720.0 + 7.0 / 180.0])


# ---------------------------------------------------------------------------
# map containers


def test_scalar_combo_batch_matches_scalar(rng):
    m = mk.example_instance().map
    Z = rng.normal(size=(50, 4)) * 3
    batch = m.update_batch(Z)
    for i, z in enumerate(Z):
        assert_allclose(batch[i], m.update(z), atol=0)
        assert_allclose(m.residual(z), z - m.update(z), atol=0)


def test_affine_map_frozen():
    A = mk.AffineMap(p=1, q=1, matrix=[[2.0, 0.0], [1.0, 1.0]], offset=[1.0, -1.0])
    assert_allclose(A.residual([3.0, 4.0]), [7.0, 6.0])
    assert_allclose(A.update([3.0, 4.0]), [-4.0, -2.0])
    assert_allclose(A.update_batch(np.array([[3.0, 4.0]]))[0], [-4.0, -2.0])
    with pytest.raises(mk.DimensionError):
        mk.AffineMap(p=1, q=1, matrix=[[1.0]], offset=[0.0, 0.0])


def test_affine_identity_evaluates_to_blocks(rng):
    ident = mk.AffineMap(p=2, q=2, matrix=np.eye(4), offset=np.zeros(4))
    z = rng.normal(size=4)
    G, H = mk.evaluate_map(ident, z)
    assert (G == z[:2]).all() and (H == z[2:]).all()


def test_affine_contraction_matches_direct_solve():
    # update U(z) = M z + b with spectral radius < 1 and a positive fixed
    # point, so the inner projection is inactive and the limit is the plain
    # linear-system solution
    M = np.array([[0.5, 0.1], [0.2, 0.3]])
    b = np.array([1.0, 0.5])
    inst = mk.MicpInstance(
        map=mk.AffineMap(p=1, q=1, matrix=np.eye(2) - M, offset=-b),
        inner=mk.nonneg_orthant(1),
    )
    _, trace = mk.picard_solve(inst)
    assert trace.status == "converged"
    direct = np.linalg.solve(np.eye(2) - M, b)
    assert np.abs(trace.final - direct).max() < 1e-9


def test_scalar_combo_validation():
    with pytest.raises(mk.DimensionError):
        mk.ScalarComboMap(
            p=2,
            q=1,
            fields=(mk.ScalarField([1.0], 0.0, 0.0),),
            directions=[[1.0, 0.0, 0.0]],
        )


def test_evaluate_map_at_origin_is_exact():
    inst = mk.example_instance()
    G, H = mk.evaluate_map(inst.map, np.zeros(4))
    # the x residual comes out exactly, the tail norm to an ulp
    assert (-G == np.array([0.8, 0.4])).all()
    assert abs(np.linalg.norm(H) - np.sqrt(2.0) / 6.0) <= 1e-15
    # PartitionedVector input is accepted too
    G2, _ = mk.evaluate_map(inst.map, mk.PartitionedVector([0.0, 0.0], [0.0, 0.0]))
    assert (G2 == G).all()


# ---------------------------------------------------------------------------
# the worked instance, step by step


def test_first_two_steps_frozen():
    inst = mk.example_instance()
    z1 = mk.picard_step(inst, np.zeros(4))
    assert_allclose(z1, [0.8, 0.4, 7.0 / 30.0, 0.0], rtol=1e-15, atol=0)
    assert z1[3] == 0.0  # clipped by the inner projection
    z2 = mk.picard_step(inst, z1)
    assert_allclose(z2, [7.0 / 6.0, 7.0 / 12.0, 331.0 / 1200.0, 19.0 / 1200.0], rtol=1e-14)
    # from the second step on, the tail leaves the clipped face for good
    assert z2[3] > 0


def test_solve_reaches_the_closed_form_limit():
    inst = mk.example_instance()
    sol, trace = mk.picard_solve(inst)
    assert trace.status == "converged"
    assert trace.n_steps < 100
    assert trace.iterates.shape == (trace.n_steps + 1, 4)
    assert trace.step_norms[-1] <= inst.conv_tol
    assert trace.order_certificates.all()

    expected = closed_form_solution()
    assert np.abs(trace.final - expected).max() < 1e-9
    # fixed-point characterization of the returned point
    residual = np.linalg.norm(mk.picard_step(inst, trace.final) - trace.final)
    assert residual <= 2 * inst.conv_tol

    # independent cross-check of the frozen expectation itself
    res = optimize.root(
        lambda z: np.concatenate(mk.evaluate_map(inst.map, z)), x0=np.ones(4), tol=1e-13
    )
    assert res.success
    assert np.abs(res.x - expected).max() < 1e-10
    assert abs(np.linalg.norm(expected[2:]) ** 2 * 258299.0
               - 7016.0 * np.linalg.norm(expected[2:]) - 22864.0) < 1e-9


def test_iterate_structure():
    inst = mk.example_instance()
    _, trace = mk.picard_solve(inst)
    it = trace.iterates
    # the two x coordinates stay locked at ratio two after the first step
    assert (it[1:, 0] == 2.0 * it[1:, 1]).all()
    # the tail is strictly inside the inner cone from step two on
    assert (it[2:, 3] > 0).all()


def test_solution_verifies():
    inst = mk.example_instance()
    _, trace = mk.picard_solve(inst)
    rep = mk.verify_solution(inst, trace.final)
    assert rep.ok and rep.failed == ()
    assert rep.g_norm < 1e-11 and rep.orthogonality < 1e-11
    # a non-solution is reported as such, with the culprit named
    bad = mk.verify_solution(inst, [0.8, 0.4, 7.0 / 30.0, 0.0])
    assert not bad.ok and "g_norm" in bad.failed


def test_verify_closed_form_directly():
    inst = mk.example_instance()
    z = closed_form_solution()
    rep = mk.verify_solution(inst, z, tol=1e-12)
    assert rep.ok, rep
    # a solution is its own step, and it sits in the descent region
    assert np.abs(mk.picard_step(inst, z) - z).max() <= 1e-12
    region = mk.region_membership(inst, z)
    assert region.in_descent and region.in_feasible


# ---------------------------------------------------------------------------
# regions and preconditions


def test_region_membership_witness():
    inst = mk.example_instance()
    rep = mk.region_membership(inst, [30.0, 12.0, 4.0, 3.0])
    assert rep.in_feasible and rep.in_descent and rep.reasons == ()
    G, H = mk.evaluate_map(inst.map, np.array([30.0, 12.0, 4.0, 3.0]))
    assert_allclose(G, [15.0, 4.5], rtol=1e-14)
    assert_allclose(H, [257.0 / 120.0, 133.0 / 120.0], rtol=1e-13)


def test_region_membership_origin():
    inst = mk.example_instance()
    rep = mk.region_membership(inst, np.zeros(4))
    assert not rep.in_feasible and not rep.in_descent
    assert "g_not_nonincreasing" in rep.reasons


def test_feasible_region_inside_descent_region(rng):
    inst = mk.example_instance()
    hits = 0
    for z in rng.normal(size=(3000, 4)) * rng.uniform(0.5, 20, (3000, 1)):
        rep = mk.region_membership(inst, z)
        if rep.in_feasible:
            hits += 1
            assert rep.in_descent
    assert hits > 0  # the sweep actually visited the region


def test_preconditions_report():
    inst = mk.example_instance()
    pre = mk.check_solvability_preconditions(inst, n_samples=300, seed=7)
    assert pre.ok and pre.start_ascending
    assert_allclose(pre.first_step, [0.8, 0.4, 7.0 / 30.0, 0.0], rtol=1e-15)
    assert pre.isotone.ok and pre.isotone.checked == 300


# ---------------------------------------------------------------------------
# failure modes and validation


def test_divergence_is_detected():
    grow = mk.AffineMap(p=2, q=2, matrix=-2.0 * np.eye(4), offset=-np.ones(4))
    inst = mk.MicpInstance(map=grow, inner=mk.monotone_nonneg(2))
    _, trace = mk.picard_solve(inst)
    assert trace.status == "diverged"
    assert np.linalg.norm(trace.final) > micp_solver.DIVERGENCE_LIMIT
    assert trace.n_steps < 100


def test_identity_residual_converges_immediately():
    # residual F(z) = z has update z - F(z) = 0: one step lands on the origin
    ident = mk.AffineMap(p=2, q=2, matrix=np.eye(4), offset=np.zeros(4))
    inst = mk.MicpInstance(map=ident, inner=mk.monotone_nonneg(2))
    _, trace = mk.picard_solve(inst)
    assert trace.status == "converged" and trace.n_steps == 1
    assert (trace.final == 0).all()


def test_iteration_budget():
    inst = mk.example_instance(max_iter=3)
    _, trace = mk.picard_solve(inst)
    assert trace.status == "max_iter" and trace.n_steps == 3


def test_instance_validation():
    m = mk.example_instance().map
    with pytest.raises(mk.DimensionError):
        mk.MicpInstance(map=m, inner=mk.monotone_nonneg(3))
    with pytest.raises(mk.DimensionError):
        mk.MicpInstance(map=m, inner=mk.monotone_nonneg(2), start=[0.0, 0.0])
    inst = mk.MicpInstance(map=m, inner=mk.monotone_nonneg(2), start=[1.0, 0.5, 0.1, 0.0])
    assert_allclose(inst.start, [1.0, 0.5, 0.1, 0.0])
    assert inst.order_cone == mk.mesoc(2, 2)


def test_solver_works_from_other_starts():
    # the fixed point is unique for this instance, so any sane start lands
    # on the same limit
    inst = mk.example_instance()
    for start in ([5.0, 2.0, 1.0, 0.5], [0.0, 10.0, 0.0, 3.0]):
        shifted = mk.MicpInstance(map=inst.map, inner=inst.inner, start=start)
        _, trace = mk.picard_solve(shifted)
        assert trace.status == "converged"
        assert np.abs(trace.final - closed_form_solution()).max() < 1e-9


def test_sampling_cylinder_members_feed_the_solver(rng):
    # the instance's ambient cylinder admits sampling and its dual pairs up
    cyl = mk.cylinder(2, mk.monotone_nonneg(2))
    Z = sampling.sample(cyl, rng, 200)
    W = sampling.sample(mk.dual_of(cyl), rng, 200)
    assert mk.contains_batch(cyl, Z).all()
    assert np.einsum("ij,ij->i", Z, W).min() >= -1e-10
