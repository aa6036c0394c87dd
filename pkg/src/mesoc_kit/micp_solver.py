"""Isotone fixed-point solver for complementarity problems on cylinders.

The problem: given F = (G, H) on R^p x R^q and a closed convex cone C in
R^q, find z = (x, u) with

    G(z) = 0,    u in C,    H(z) in C*,    <u, H(z)> = 0.

The solver iterates the half-projected step

    z+ = (x - G(z), P_C(u - H(z))),

whose fixed points are exactly the solutions.  When the update map
z -> z - F(z) is isotone for the order of the cone of nonincreasing
coordinates with a norm tail, and the first step moves up in that order,
the iteration is monotone and its limit solves the problem; per-step order
certificates are recorded in the trace (but never enforced).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import order, projections, sampling
from .cones import (
    ConeSpec,
    PartitionedVector,
    _as_vector,
    contains,
    membership_slacks,
    dual_of,
    mesoc,
    monotone_nonneg,
)
from .errors import DimensionError

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class ScalarField:
    """Affine scalar field f(x, u) = <linear, x> + norm_coeff * |u| + offset."""

    linear: np.ndarray
    norm_coeff: float
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "linear", np.asarray(self.linear, dtype=float))


@dataclass(frozen=True)
class ScalarComboMap:
    """Map whose update z - F(z) is a scalar-field combination of fixed
    directions: z - F(z) = sum_i f_i(z) * w_i."""

    kind = "scalar_combo"

    p: int
    q: int
    fields: tuple[ScalarField, ...]
    directions: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.directions, dtype=float)
        if W.shape != (len(self.fields), self.p + self.q):
            raise DimensionError(
                f"directions must be {len(self.fields)} x {self.p + self.q}, got {W.shape}"
            )
        for f in self.fields:
            if f.linear.shape != (self.p,):
                raise DimensionError("scalar field coefficients must have length p")
        object.__setattr__(self, "directions", W)

    def field_values(self, Z: np.ndarray) -> np.ndarray:
        X, U = Z[:, : self.p], Z[:, self.p :]
        norms = np.linalg.norm(U, axis=1)
        cols = [X @ f.linear + f.norm_coeff * norms + f.offset for f in self.fields]
        return np.stack(cols, axis=1)

    def update_batch(self, Z: np.ndarray) -> np.ndarray:
        return self.field_values(np.asarray(Z, dtype=float)) @ self.directions

    def update(self, z: np.ndarray) -> np.ndarray:
        return self.update_batch(np.asarray(z, dtype=float)[None, :])[0]

    def residual(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z - self.update(z)


@dataclass(frozen=True)
class AffineMap:
    """Map F(z) = matrix @ z + offset."""

    kind = "affine"

    p: int
    q: int
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        n = self.p + self.q
        M = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.offset, dtype=float)
        if M.shape != (n, n) or b.shape != (n,):
            raise DimensionError(f"affine map blocks must be {n} x {n} and length {n}")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", b)

    def residual(self, z: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(z, dtype=float) + self.offset

    def update(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z - self.residual(z)

    def update_batch(self, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=float)
        return Z - (Z @ self.matrix.T + self.offset)


StructuredMap = Union[ScalarComboMap, AffineMap]


def evaluate_map(map_: StructuredMap, z) -> tuple[np.ndarray, np.ndarray]:
    """Split F(z) into its x-part G(z) and u-part H(z)."""
    r = map_.residual(_as_vector(z, map_.p + map_.q))
    return r[: map_.p], r[map_.p :]


@dataclass(frozen=True)
class MicpInstance:
    map: StructuredMap
    inner: ConeSpec
    start: np.ndarray | None = None
    max_iter: int = 2000
    conv_tol: float = 1e-12

    def __post_init__(self):
        if self.inner.dim != self.map.q:
            raise DimensionError(
                f"inner cone dimension {self.inner.dim} != map tail dimension {self.map.q}"
            )
        z0 = np.zeros(self.map.p + self.map.q) if self.start is None else None
        if z0 is None:
            z0 = _as_vector(self.start, self.map.p + self.map.q)
        object.__setattr__(self, "start", z0)

    @property
    def order_cone(self) -> ConeSpec:
        return mesoc(self.map.p, self.map.q)


@dataclass(frozen=True)
class IterationTrace:
    iterates: np.ndarray
    step_norms: np.ndarray
    order_certificates: np.ndarray
    status: str

    @property
    def n_steps(self) -> int:
        return len(self.step_norms)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def picard_step(instance: MicpInstance, z) -> np.ndarray:
    """One half-projected step (x - G(z), P_C(u - H(z)))."""
    map_ = instance.map
    z = _as_vector(z, map_.p + map_.q)
    t = map_.update(z)
    t[map_.p :] = projections.project(instance.inner, t[map_.p :]).point
    return t


def picard_solve(instance: MicpInstance) -> tuple[PartitionedVector, IterationTrace]:
    p, q = instance.map.p, instance.map.q
    cone = instance.order_cone
    z = instance.start.copy()
    iterates = [z]
    step_norms = []
    certs = []
    status = "max_iter"
    for _ in range(instance.max_iter):
        z_new = picard_step(instance, z)
        d = z_new - z
        step_norms.append(float(np.linalg.norm(d)))
        certs.append(contains(cone, d))
        iterates.append(z_new)
        z = z_new
        if step_norms[-1] <= instance.conv_tol:
            status = "converged"
            break
        if np.linalg.norm(z) > DIVERGENCE_LIMIT:
            status = "diverged"
            break
    trace = IterationTrace(
        iterates=np.array(iterates),
        step_norms=np.array(step_norms),
        order_certificates=np.array(certs, dtype=bool),
        status=status,
    )
    return PartitionedVector.from_array(z, p, q), trace


@dataclass(frozen=True)
class SolutionReport:
    ok: bool
    g_norm: float
    inner_slack: float
    dual_slack: float
    orthogonality: float
    failed: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def verify_solution(instance: MicpInstance, z, tol: float = 1e-8) -> SolutionReport:
    """Check the four complementarity conditions at z against a scalar
    tolerance: G = 0, u in C, H in C*, <u, H> = 0."""
    zv = _as_vector(z, instance.map.p + instance.map.q)
    G, H = evaluate_map(instance.map, zv)
    u = zv[instance.map.p :]
    inner_s = membership_slacks(instance.inner, u)
    dual_s = membership_slacks(dual_of(instance.inner), H)
    report = {
        "g_norm": float(np.abs(G).max()) if G.size else 0.0,
        "inner_slack": float(inner_s.min()) if inner_s.size else 0.0,
        "dual_slack": float(dual_s.min()) if dual_s.size else 0.0,
        "orthogonality": float(abs(u @ H)),
    }
    failed = []
    if report["g_norm"] > tol:
        failed.append("g_norm")
    if report["inner_slack"] < -tol:
        failed.append("inner_membership")
    if report["dual_slack"] < -tol:
        failed.append("dual_membership")
    if report["orthogonality"] > tol:
        failed.append("orthogonality")
    return SolutionReport(ok=not failed, failed=tuple(failed), **report)


@dataclass(frozen=True)
class RegionReport:
    in_feasible: bool
    in_descent: bool
    reasons: tuple[str, ...]
    details: dict = field(default_factory=dict)


def region_membership(instance: MicpInstance, z, tol: float = 1e-10) -> RegionReport:
    """Locate z relative to the two comparison regions of the iteration.

    Feasible region: z in the order cone, u in C, and the chain
    G_1 >= ... >= G_p >= |H| holds at z.  Descent region: same but with
    the weaker floor |u - P_C(u - H)| (the actual move of the u-block), so
    the feasible region sits inside the descent region.
    """
    p = instance.map.p
    zv = _as_vector(z, p + instance.map.q)
    u = zv[p:]
    G, H = evaluate_map(instance.map, zv)
    move = u - projections.project(instance.inner, u - H).point
    # how far G is from being nonincreasing (0.0 when it already is)
    chain_violation = float(max(np.diff(G).max(), 0.0)) if p > 1 else 0.0
    details = {
        "order_cone_ok": contains(instance.order_cone, zv),
        "inner_ok": contains(instance.inner, u),
        "chain_violation": chain_violation,
        "g_floor": float(G[-1]),
        "h_norm": float(np.linalg.norm(H)),
        "move_norm": float(np.linalg.norm(move)),
    }
    reasons = []
    if not details["order_cone_ok"]:
        reasons.append("order_cone")
    if not details["inner_ok"]:
        reasons.append("inner_membership")
    if chain_violation > tol:
        reasons.append("g_not_nonincreasing")
    common_ok = not reasons
    in_feasible = common_ok and details["g_floor"] >= details["h_norm"] - tol
    in_descent = common_ok and details["g_floor"] >= details["move_norm"] - tol
    if common_ok and not in_feasible:
        reasons.append("g_floor_below_h_norm")
    return RegionReport(
        in_feasible=in_feasible,
        in_descent=in_descent,
        reasons=tuple(reasons),
        details=details,
    )


@dataclass(frozen=True)
class PreconditionReport:
    start_ascending: bool
    first_step: np.ndarray
    isotone: order.IsotonicityReport

    @property
    def ok(self) -> bool:
        return self.start_ascending and self.isotone.ok


def check_solvability_preconditions(
    instance: MicpInstance,
    n_samples: int = 200,
    seed: int = 0,
    cone: ConeSpec | None = None,
    extra_pairs: tuple[order.OrderedPairSample, ...] = (),
) -> PreconditionReport:
    """Sampled check of the sufficient conditions for convergence to a
    solution: the update map is isotone for the order cone, and the first
    step moves up in that order.  The isotone half is a falsification
    check, not a proof."""
    cone = instance.order_cone if cone is None else cone
    z1 = picard_step(instance, instance.start)
    ascending = order.cone_leq(cone, instance.start, z1)
    report = order.check_isotone(
        instance.map, cone, n_samples, seed, extra_pairs=extra_pairs
    )
    return PreconditionReport(
        start_ascending=bool(ascending),
        first_step=z1,
        isotone=report,
    )


def example_instance(max_iter: int = 2000, conv_tol: float = 1e-12) -> MicpInstance:
    """Two-field worked instance on the cylinder R^2 x C, with C the cone
    of nonincreasing nonnegative pairs.

    Its update map is isotone for the graded order cone by construction,
    not just by sampling: the update is sum_k f_k(z) * w_k with both
    directions w_k members of the order cone, and each scalar field grows
    along the order — for an ordered difference (dx, du) with
    dx_1 >= dx_2 >= |du|, the field change is
    a_1 dx_1 + a_2 dx_2 + c (|u + du| - |u|) >= (a_1 + a_2 - c) |du| >= 0
    since both fields satisfy a_1 >= 0 and a_1 + a_2 = c = 1/20.  Image
    differences are therefore nonnegative combinations of cone members.
    The iteration from the origin converges."""
    fields = (
        ScalarField(linear=[1 / 10, -1 / 20], norm_coeff=1 / 20, offset=1.0),
        ScalarField(linear=[1 / 5, -3 / 20], norm_coeff=1 / 20, offset=-3 / 5),
    )
    directions = np.array(
        [
            [2.0, 1.0, 1 / 3, 1 / 6],
            [2.0, 1.0, 1 / 6, 1 / 3],
        ]
    )
    return MicpInstance(
        map=ScalarComboMap(p=2, q=2, fields=fields, directions=directions),
        inner=monotone_nonneg(2),
        max_iter=max_iter,
        conv_tol=conv_tol,
    )
