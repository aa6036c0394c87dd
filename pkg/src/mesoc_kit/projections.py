"""Euclidean projections onto the solvable cones, plus a slow exact oracle.

The isotonic projections run through the pool-adjacent-violators kernel in
:mod:`mesoc_kit._kernels`; the Lorentz projection is the standard three-case
closed form; cylinders project blockwise (the free block is untouched).

:func:`project_oracle` re-solves the same problems by entirely different
means — exhaustive face enumeration for the polyhedral cones and a bounded
one-dimensional minimization for the Lorentz cone — and is used by the test
suite to cross-check the fast paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import cones
from ._kernels import isotonic_decreasing, isotonic_decreasing_batch
from .cones import ConeSpec, PartitionedVector
from .errors import DimensionError, OracleError, UnsupportedConeError


@dataclass(frozen=True)
class ProjectionResult:
    """Projection output: the point, its distance from the input, and (for
    the isotonic solvers) the index ranges merged into constant blocks."""

    point: np.ndarray
    distance: float
    active_blocks: tuple[tuple[int, int], ...] | None = None


def _as_1d(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise DimensionError("cannot project an empty vector")
    return v


def project_monotone(v) -> ProjectionResult:
    """Project onto the nonincreasing vectors x_1 >= ... >= x_n."""
    v = _as_1d(v)
    fit, starts, lengths = isotonic_decreasing(v)
    blocks = tuple((int(s), int(s + c)) for s, c in zip(starts, lengths))
    return ProjectionResult(fit, float(np.linalg.norm(v - fit)), blocks)


def project_monotone_nonneg(v) -> ProjectionResult:
    """Project onto nonincreasing nonnegative vectors (isotonic fit, then clip)."""
    v = _as_1d(v)
    fit, starts, lengths = isotonic_decreasing(v)
    point = np.maximum(fit, 0.0)
    blocks = tuple((int(s), int(s + c)) for s, c in zip(starts, lengths))
    return ProjectionResult(point, float(np.linalg.norm(v - point)), blocks)


def project_lorentz(v) -> ProjectionResult:
    """Project onto the second order cone x_1 >= ||rest||: identity inside,
    zero on the polar, and the boundary average in between."""
    v = _as_1d(v)
    head, rest = v[0], v[1:]
    nr = float(np.linalg.norm(rest))
    if head >= nr:
        point = v.copy()
    elif head <= -nr:
        point = np.zeros_like(v)
    else:
        t = (head + nr) / 2.0
        point = np.concatenate([[t], rest * (t / nr)])
    return ProjectionResult(point, float(np.linalg.norm(v - point)), None)


def project_nonneg_orthant(v) -> ProjectionResult:
    v = _as_1d(v)
    point = np.maximum(v, 0.0)
    return ProjectionResult(point, float(np.linalg.norm(v - point)), None)


_PROJECTABLE = {
    cones.MONOTONE: project_monotone,
    cones.MONOTONE_NONNEG: project_monotone_nonneg,
    cones.NONNEG_ORTHANT: project_nonneg_orthant,
    cones.LORENTZ: project_lorentz,
}


def project(cone: ConeSpec, z) -> ProjectionResult:
    """Dispatch to the projection for ``cone``.

    Supported: the monotone / monotone nonnegative cones, the nonnegative
    orthant, the Lorentz cone, and cylinders over any of those.
    """
    if cone.kind == cones.CYLINDER:
        return project_cylinder(cone.p, cone.inner, z)
    fn = _PROJECTABLE.get(cone.kind)
    if fn is None:
        raise UnsupportedConeError(f"no projection for {cone.kind!r}")
    v = _as_1d(z)
    if v.size != cone.dim:
        raise DimensionError(f"expected length {cone.dim}, got {v.size}")
    return fn(v)


def project_cylinder(p: int, inner: ConeSpec, z) -> ProjectionResult:
    """Project onto R^p x C by leaving the x block alone and projecting the
    u block onto the base cone."""
    if isinstance(z, PartitionedVector):
        z = z.concat()
    z = _as_1d(z)
    if z.size != p + inner.dim:
        raise DimensionError(f"expected length {p + inner.dim}, got {z.size}")
    inner_result = project(inner, z[p:])
    point = np.concatenate([z[:p], inner_result.point])
    return ProjectionResult(point, float(np.linalg.norm(z - point)), inner_result.active_blocks)


def project_monotone_batch(V) -> np.ndarray:
    """Row-wise :func:`project_monotone` (no block bookkeeping)."""
    V = np.ascontiguousarray(np.atleast_2d(np.asarray(V, dtype=float)))
    return isotonic_decreasing_batch(V)


def project_monotone_nonneg_batch(V) -> np.ndarray:
    """Row-wise :func:`project_monotone_nonneg`."""
    return np.maximum(project_monotone_batch(V), 0.0)


# ---------------------------------------------------------------------------
# independent oracle


def _constraint_rows(cone: ConeSpec) -> np.ndarray:
    """Rows a_i with the cone equal to { z : a_i . z >= 0 for all i }."""
    n = cone.dim
    diffs = np.eye(n)[:-1] - np.eye(n)[1:]
    if cone.kind == cones.MONOTONE:
        return diffs
    if cone.kind == cones.MONOTONE_NONNEG:
        return np.vstack([diffs, np.eye(n)[-1]])
    if cone.kind == cones.NONNEG_ORTHANT:
        return np.eye(n)
    raise UnsupportedConeError(f"{cone.kind!r} is not polyhedral here")


_FACE_CACHE: dict[tuple[str, int], list[np.ndarray]] = {}


def _face_projectors(cone: ConeSpec) -> list[np.ndarray]:
    key = (cone.kind, cone.dim)
    if key not in _FACE_CACHE:
        A = _constraint_rows(cone)
        m, n = A.shape
        projectors = [np.eye(n)]
        for bits in range(1, 1 << m):
            As = A[[i for i in range(m) if bits >> i & 1]]
            projectors.append(np.eye(n) - np.linalg.pinv(As) @ As)
        _FACE_CACHE[key] = projectors
    return _FACE_CACHE[key]


def _polyhedral_oracle(cone: ConeSpec, v: np.ndarray) -> np.ndarray:
    A = _constraint_rows(cone)
    best = None
    best_dist = np.inf
    for P in _face_projectors(cone):
        cand = P @ v
        if np.min(A @ cand) >= -1e-11:
            d = np.linalg.norm(v - cand)
            if d < best_dist:
                best, best_dist = cand, d
    return best


def _lorentz_oracle(v: np.ndarray, step: float, iters: int) -> np.ndarray:
    head, rest = v[0], v[1:]
    nr = float(np.linalg.norm(rest))

    def objective(t):
        gap = max(nr - t, 0.0)
        return (t - head) ** 2 + gap * gap

    upper = max(head + nr, nr, 1.0) + 1.0
    res = minimize_scalar(
        objective, bounds=(0.0, upper), method="bounded",
        options={"maxiter": iters, "xatol": step},
    )
    t = float(res.x)
    if objective(0.0) <= objective(t):
        t = 0.0
    tail = np.zeros_like(rest) if nr == 0.0 else rest * min(t / nr, 1.0)
    return np.concatenate([[t], tail])


def _kkt_residual(cone: ConeSpec, v: np.ndarray, y: np.ndarray) -> float:
    slacks = cones.membership_slacks(cone, y)
    feas = -float(slacks.min()) if slacks.size else 0.0
    comp = abs(float((v - y) @ y)) / (1.0 + float(v @ v))
    return max(feas, comp)


def project_oracle(cone: ConeSpec, v, step: float = 1e-12, iters: int = 500) -> ProjectionResult:
    """Independently recompute the projection of ``v`` onto ``cone``.

    Polyhedral cones are solved exactly by enumerating all 2^m subsets of
    active constraints and keeping the feasible candidate closest to ``v``;
    the Lorentz cone by reducing to a one-dimensional convex problem in the
    head coordinate, minimized to within ``step`` over at most ``iters``
    evaluations; cylinders compose the two.  Raises :class:`OracleError` when
    the result fails its own optimality check.
    """
    v = _as_1d(v)
    if v.size != cone.dim:
        raise DimensionError(f"expected length {cone.dim}, got {v.size}")
    if cone.kind == cones.CYLINDER:
        inner = project_oracle(cone.inner, v[cone.p:], step=step, iters=iters)
        y = np.concatenate([v[: cone.p], inner.point])
    elif cone.kind == cones.LORENTZ:
        y = _lorentz_oracle(v, step, iters)
    else:
        y = _polyhedral_oracle(cone, v)
    resid = _kkt_residual(cone, v, y)
    if resid > 1e-8:
        raise OracleError(f"oracle optimality residual {resid:.3e} exceeds 1e-8")
    return ProjectionResult(y, float(np.linalg.norm(v - y)), None)
