"""Membership, duality, complementarity and decomposition over the cone zoo."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import mesoc_kit as mk
from mesoc_kit import sampling
from mesoc_kit.cones import ConeSpec

SHAPES = [(2, 2), (3, 2), (2, 3), (4, 1), (1, 2)]


def all_cones():
    cones = []
    for p, q in SHAPES:
        cones += [mk.mesoc(p, q), mk.mesoc_dual(p, q), mk.esoc(p, q), mk.esoc_dual(p, q)]
    for n in (1, 2, 4):
        cones += [
            mk.monotone(n),
            mk.monotone_dual(n),
            mk.monotone_nonneg(n),
            mk.monotone_nonneg_dual(n),
            mk.nonneg_orthant(n),
            mk.lorentz(n),
        ]
    cones += [
        mk.cylinder(2, mk.monotone_nonneg(2)),
        mk.cylinder(3, mk.lorentz(3)),
        mk.cylinder_dual(2, mk.monotone_nonneg_dual(2)),
    ]
    return cones


# ---------------------------------------------------------------------------
# specs and vectors


def test_spec_validation():
    with pytest.raises(ValueError):
        mk.mesoc(0, 2)
    with pytest.raises(ValueError):
        ConeSpec("monotone", 3, 0, inner=mk.lorentz(2))
    with pytest.raises(ValueError):
        ConeSpec("no_such_kind", 2)
    with pytest.raises(ValueError):
        ConeSpec("cylinder", 2, 2)  # missing inner
    with pytest.raises(mk.DimensionError):
        ConeSpec("cylinder", 2, 3, inner=mk.lorentz(2))
    # q = 0 degenerates cleanly for the partitioned kinds that allow it
    assert mk.mesoc(3, 0).dim == 3
    with pytest.raises(ValueError):
        ConeSpec("cylinder", 2, 0)


def test_mesoc_q0_matches_monotone_nonneg(rng):
    X = rng.normal(size=(200, 4))
    a = mk.contains_batch(mk.mesoc(4, 0), X)
    b = mk.contains_batch(mk.monotone_nonneg(4), X)
    assert (a == b).all()


def test_mesoc_width_one_matches_second_order_cone(rng):
    # with a single head coordinate the chain collapses to x_1 >= |u|
    narrow, soc = mk.mesoc(1, 3), mk.lorentz(4)
    members = sampling.sample(narrow, rng, 5_000)
    noise = rng.normal(size=(5_000, 4)) * rng.uniform(0.1, 5, (5_000, 1))
    for batch in (members, noise):
        assert (mk.contains_batch(narrow, batch) == mk.contains_batch(soc, batch)).all()


def test_partitioned_vector_roundtrip():
    z = mk.PartitionedVector([3.0, 2.0], [0.5, 1.0])
    assert z.p == 2 and z.q == 2 and z.dim == 4
    assert_allclose(z.concat(), [3.0, 2.0, 0.5, 1.0])
    back = mk.PartitionedVector.from_array(z.concat(), 2, 2)
    assert_allclose(back.x, z.x)
    assert_allclose(np.asarray(z), z.concat())
    d = z - back
    assert_allclose(d.concat(), np.zeros(4))
    with pytest.raises(ValueError):
        mk.PartitionedVector([np.nan, 1.0], [0.0])
    with pytest.raises(mk.DimensionError):
        mk.PartitionedVector.from_array([1.0, 2.0], 2, 2)


# ---------------------------------------------------------------------------
# membership


def test_membership_frozen_cases():
    cases = [
        (mk.mesoc(3, 2), [3, 2, 1.5, 0.9, 1.2], True),   # 1.5 = ||(0.9,1.2)||
        (mk.mesoc(3, 2), [3, 2, 1.4, 0.9, 1.2], False),
        (mk.mesoc(2, 2), [2, 3, 0, 0], False),           # order violated
        (mk.mesoc_dual(2, 2), [2, -1, 0.6, 0.8], True),  # sums (2, 1), ||v|| = 1
        (mk.mesoc_dual(2, 2), [-0.1, 2, 0, 0], False),
        (mk.esoc(2, 2), [1.5, 1.2, 0.9, 0.5], True),
        (mk.esoc(2, 2), [1.5, 1.0, 0.9, 0.5], False),
        (mk.esoc_dual(2, 1), [0.3, 0.8, 1.1], True),     # sum 1.1 = |u|
        (mk.esoc_dual(2, 1), [0.3, 0.8, -1.2], False),
        (mk.monotone(3), [1.0, 1.0, -5.0], True),
        (mk.monotone(3), [1.0, 1.1, -5.0], False),
        (mk.monotone_dual(3), [1.0, -0.5, -0.5], True),  # partial sums 1, .5, 0
        (mk.monotone_dual(3), [1.0, -0.5, -0.4], False), # total != 0
        (mk.monotone_nonneg(3), [2.0, 1.0, 0.0], True),
        (mk.monotone_nonneg(3), [2.0, 1.0, -0.1], False),
        (mk.monotone_nonneg_dual(3), [1.0, -1.0, 0.5], True),
        (mk.monotone_nonneg_dual(3), [1.0, -1.5, 0.5], False),
        (mk.nonneg_orthant(2), [0.0, 3.0], True),
        (mk.lorentz(3), [5.0, 3.0, 4.0], True),
        (mk.lorentz(3), [4.9, 3.0, 4.0], False),
        (mk.lorentz(1), [0.1], True),
        (mk.cylinder(2, mk.lorentz(2)), [-9.0, 4.0, 1.0, 0.5], True),
        (mk.cylinder(2, mk.lorentz(2)), [-9.0, 4.0, 0.4, 0.5], False),
        (mk.cylinder_dual(2, mk.lorentz(2)), [0.0, 0.0, 1.0, 0.5], True),
        (mk.cylinder_dual(2, mk.lorentz(2)), [0.1, 0.0, 1.0, 0.5], False),
    ]
    for cone, z, expected in cases:
        assert mk.contains(cone, z) == expected, (cone, z)


def test_membership_slack_count_and_sign():
    cone = mk.mesoc(3, 2)
    s = mk.membership_slacks(cone, [3, 2, 1.5, 0.9, 1.2])
    assert s.shape == (3,)
    assert_allclose(s, [1.0, 0.5, 0.0], atol=1e-15)
    # equality kinds expose both one-sided slacks, so min(slacks) works there too
    s = mk.membership_slacks(mk.monotone_dual(3), [1.0, -0.5, -0.5])
    assert s.shape == (4,)
    assert s.min() >= -1e-15


def test_sampled_members_are_members(rng):
    for cone in all_cones():
        Z = sampling.sample(cone, rng, 300)
        assert Z.shape == (300, cone.dim)
        assert mk.contains_batch(cone, Z).all(), cone


def test_contains_batch_matches_scalar(rng):
    cone = mk.mesoc(3, 2)
    Z = rng.normal(size=(100, 5))
    # borderline points: half of them genuine members
    Z[::2] = sampling.sample(cone, rng, 50)
    batch = mk.contains_batch(cone, Z)
    scalar = np.array([mk.contains(cone, z) for z in Z])
    assert (batch == scalar).all()
    with pytest.raises(mk.DimensionError):
        mk.contains_batch(cone, np.zeros((3, 4)))


# ---------------------------------------------------------------------------
# duality


def test_dual_of_is_an_involution():
    for cone in all_cones():
        assert mk.dual_of(mk.dual_of(cone)) == cone


def test_dual_pairing_nonnegative(rng):
    for cone in all_cones():
        Z = sampling.sample(cone, rng, 400)
        W = sampling.sample(mk.dual_of(cone), rng, 400)
        inner = np.einsum("ij,ij->i", Z, W)
        assert inner.min() >= -1e-10, (cone, inner.min())


def test_duality_chain_orders_and_guards(rng):
    p, q = 3, 2
    L, M = mk.mesoc(p, q), mk.mesoc_dual(p, q)
    for _ in range(200):
        z = mk.PartitionedVector.from_array(sampling.sample(L, rng, 1)[0], p, q)
        w = mk.PartitionedVector.from_array(sampling.sample(M, rng, 1)[0], p, q)
        a, b, c = mk.duality_chain(z, w)
        assert a >= b - 1e-10 and b >= c - 1e-10
    with pytest.raises(mk.MembershipError):
        mk.duality_chain(
            mk.PartitionedVector([0.0, 1.0, 0.0], [0.0, 0.0]),  # not nonincreasing
            mk.PartitionedVector([1.0, 0.0, 0.0], [0.0, 0.0]),
        )


def test_duality_chain_frozen_value():
    z = mk.PartitionedVector([3.0, 2.0, 1.5], [0.9, 1.2])
    w = mk.PartitionedVector([2.0, -1.0, 0.5], [1.0, 1.0])
    a, b, c = mk.duality_chain(z, w)
    assert_allclose([a, b, c], [4.75, 2.25, 1.5 * np.sqrt(2.0)])


# ---------------------------------------------------------------------------
# complementarity


def test_generated_pairs_are_complementary(rng):
    for p, q in SHAPES:
        cone = mk.mesoc(p, q)
        Z, W = sampling.complementarity_pairs(cone, rng, 150)
        dual = mk.dual_of(cone)
        assert mk.contains_batch(cone, Z).all()
        assert mk.contains_batch(dual, W).all()
        assert np.abs(np.einsum("ij,ij->i", Z, W)).max() < 1e-12
        for z, w in zip(Z, W):
            assert mk.in_complementarity_set(cone, mk.CompPair(z, w)).member


def test_complementarity_structured_report():
    # flat primal against its scaled antipodal dual: every residual tight
    rep = mk.in_complementarity_set(
        mk.mesoc(2, 2), mk.CompPair([1.0, 1.0, 0.6, 0.8], [0.5, 0.5, -0.6, -0.8])
    )
    assert rep.member and rep.mode == "structured"
    assert rep.scaling == pytest.approx(1.0)
    assert set(rep.residuals) == {
        "primal_membership",
        "dual_membership",
        "face_products",
        "primal_tightness",
        "dual_tightness",
        "antiparallel",
    }
    assert max(abs(v) for v in rep.residuals.values()) < 1e-14


def test_complementarity_rejections():
    cone = mk.mesoc(2, 2)
    # v not antiparallel to u: caught by the structured characterization
    rep = mk.in_complementarity_set(cone, mk.CompPair([1, 1, 0.6, 0.8], [0.5, 0.5, 0.8, -0.6]))
    assert not rep.member and "antiparallel" in rep.failed
    # norm not tight on the primal side
    rep = mk.in_complementarity_set(cone, mk.CompPair([2, 2, 0.6, 0.8], [0.5, 0.5, -0.6, -0.8]))
    assert not rep.member and "primal_tightness" in rep.failed
    # degenerate u: falls back to the direct orthogonality test
    rep = mk.in_complementarity_set(cone, mk.CompPair([1, 1, 0, 0], [1, 0, 0, 0]))
    assert rep.mode == "direct" and not rep.member and rep.failed == ("orthogonality",)
    rep = mk.in_complementarity_set(cone, mk.CompPair([1, 0, 0, 0], [0, 1, 0, 0]))
    assert rep.mode == "direct" and rep.member


def test_complementarity_monotone_nonneg_path(rng):
    cone = mk.monotone_nonneg(4)
    Z, W = sampling.complementarity_pairs(cone, rng, 200)
    for z, w in zip(Z, W):
        rep = mk.in_complementarity_set(cone, mk.CompPair(z, w))
        assert rep.member and rep.mode == "structured"
    bad = mk.in_complementarity_set(cone, mk.CompPair([2, 1, 1, 0], [1, 0, 0, 0]))
    assert not bad.member and bad.failed == ("face_products",)


def test_complementarity_direct_kinds(rng):
    # kinds without a structured characterization route through "direct"
    cone = mk.lorentz(3)
    Z, W = sampling.complementarity_pairs(cone, rng, 100)
    for z, w in zip(Z, W):
        rep = mk.in_complementarity_set(cone, mk.CompPair(z, w))
        assert rep.member and rep.mode == "direct"


# ---------------------------------------------------------------------------
# decomposition


def test_decompose_frozen_case():
    dec = mk.decompose_mesoc(4, 1, [9.0, 6.0, 5.5, 2.0, 1.0])
    assert_allclose(dec.weights, [2.0, 3.5, 0.5, 3.0])
    assert_allclose(dec.first_summand, [2, 2, 2, 2, 1.0])
    assert_allclose(dec.second_summand, [7.0, 4.0, 3.5, 0.0, 0.0])
    assert_allclose(dec.reconstruct(), [9.0, 6.0, 5.5, 2.0, 1.0])


def test_decompose_roundtrip_and_summands(rng):
    for p, q in SHAPES:
        cone = mk.mesoc(p, q)
        Z = sampling.sample(cone, rng, 400)
        for z in Z:
            dec = mk.decompose_mesoc(p, q, z)
            assert dec.weights.min() >= 0
            assert np.abs(dec.reconstruct() - z).max() <= 1e-12
            # first summand: constant x block at least the tail norm
            f = dec.first_summand
            assert np.ptp(f[:p]) == 0.0 and mk.contains(cone, f)
            # second summand: staircase ending at zero, no tail
            s = dec.second_summand
            assert s[p - 1] == 0.0 and not s[p:].any() and mk.contains(cone, s)


def test_decompose_rejects_non_members():
    with pytest.raises(mk.MembershipError):
        mk.decompose_mesoc(2, 2, [1.0, 2.0, 0.0, 0.0])
