"""Cone descriptions, membership, duality, complementarity, decomposition.

The central object is the monotone extended second order cone

    L(p, q) = { (x, u) in R^p x R^q : x_1 >= x_2 >= ... >= x_p >= ||u|| }

together with its dual

    M(p, q) = { (y, v) : y_1 + ... + y_j >= 0 for j < p,
                          y_1 + ... + y_p >= ||v|| },

the "all coordinates dominate the norm" variant (x_i >= ||u|| for every i),
the plain monotone / monotone nonnegative cones and their duals, the Lorentz
cone, the nonnegative orthant, and cylinders R^p x C with their duals
{0}^p x C*.  Vectors over the partitioned cones split into an ``x`` block of
length ``p`` and a ``u`` block of length ``q``.

Every cone is represented by a small frozen :class:`ConeSpec`; membership is
computed through per-inequality slack vectors so callers can see which
inequality failed, not just a boolean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, MembershipError, UnsupportedConeError

MESOC = "mesoc"
MESOC_DUAL = "mesoc_dual"
ESOC = "esoc"
ESOC_DUAL = "esoc_dual"
MONOTONE = "monotone"
MONOTONE_DUAL = "monotone_dual"
MONOTONE_NONNEG = "monotone_nonneg"
MONOTONE_NONNEG_DUAL = "monotone_nonneg_dual"
NONNEG_ORTHANT = "nonneg_orthant"
LORENTZ = "lorentz"
CYLINDER = "cylinder"
CYLINDER_DUAL = "cylinder_dual"

KINDS = frozenset(
    {
        MESOC,
        MESOC_DUAL,
        ESOC,
        ESOC_DUAL,
        MONOTONE,
        MONOTONE_DUAL,
        MONOTONE_NONNEG,
        MONOTONE_NONNEG_DUAL,
        NONNEG_ORTHANT,
        LORENTZ,
        CYLINDER,
        CYLINDER_DUAL,
    }
)

# kinds whose vectors meaningfully split into (x, u) blocks
PARTITIONED_KINDS = frozenset({MESOC, MESOC_DUAL, ESOC, ESOC_DUAL, CYLINDER, CYLINDER_DUAL})
# kinds that may have q == 0 (they degenerate to cones over the x block alone)
_Q_ZERO_OK = frozenset({MESOC, MESOC_DUAL, ESOC, ESOC_DUAL})


@dataclass(frozen=True)
class Tolerances:
    """Numeric slack allowed by membership and orthogonality checks."""

    membership: float = 1e-10
    orthogonality: float = 1e-10

    def __post_init__(self):
        if self.membership < 0 or self.orthogonality < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class ConeSpec:
    """Description of a cone: a variant tag plus dimension parameters.

    ``p`` is the x-block length (or the full length for unpartitioned kinds),
    ``q`` the u-block length, and ``inner`` the base cone for cylinders.  Use
    the module-level factories (:func:`mesoc`, :func:`lorentz`, ...) rather
    than the constructor.
    """

    kind: str
    p: int
    q: int = 0
    inner: ConeSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.p < 1:
            raise ValueError("dimension parameters must be strictly positive")
        if self.q < 0 or (self.q == 0 and self.kind in (CYLINDER, CYLINDER_DUAL)):
            raise ValueError("cylinder cones need a nonempty base")
        if self.q == 0 and self.kind in PARTITIONED_KINDS and self.kind not in _Q_ZERO_OK:
            raise ValueError(f"q = 0 is not allowed for kind {self.kind!r}")
        if self.kind in (CYLINDER, CYLINDER_DUAL):
            if self.inner is None:
                raise ValueError("cylinder cones require an inner cone")
            if self.inner.dim != self.q:
                raise DimensionError("cylinder q does not match the inner cone dimension")
        elif self.inner is not None:
            raise ValueError(f"kind {self.kind!r} does not take an inner cone")

    @property
    def dim(self) -> int:
        return self.p + self.q

    def __str__(self):
        if self.kind in (CYLINDER, CYLINDER_DUAL):
            return f"{self.kind}(p={self.p}, inner={self.inner})"
        if self.kind in PARTITIONED_KINDS:
            return f"{self.kind}({self.p}, {self.q})"
        return f"{self.kind}({self.p})"


def mesoc(p: int, q: int) -> ConeSpec:
    """Cone of (x, u) with x nonincreasing and x_p >= ||u||."""
    return ConeSpec(MESOC, p, q)

def mesoc_dual(p: int, q: int) -> ConeSpec:
    """Dual of :func:`mesoc`: partial sums of y nonnegative, total >= ||v||."""
    return ConeSpec(MESOC_DUAL, p, q)

def esoc(p: int, q: int) -> ConeSpec:
    """Cone of (x, u) with every x_i >= ||u||."""
    return ConeSpec(ESOC, p, q)

def esoc_dual(p: int, q: int) -> ConeSpec:
    """Dual of :func:`esoc`: x >= 0 componentwise and sum(x) >= ||u||."""
    return ConeSpec(ESOC_DUAL, p, q)

def monotone(n: int) -> ConeSpec:
    """Nonincreasing vectors x_1 >= ... >= x_n."""
    return ConeSpec(MONOTONE, n)

def monotone_dual(n: int) -> ConeSpec:
    """Dual of :func:`monotone`: leading partial sums >= 0, total sum = 0."""
    return ConeSpec(MONOTONE_DUAL, n)

def monotone_nonneg(n: int) -> ConeSpec:
    """Nonincreasing nonnegative vectors x_1 >= ... >= x_n >= 0."""
    return ConeSpec(MONOTONE_NONNEG, n)

def monotone_nonneg_dual(n: int) -> ConeSpec:
    """Dual of :func:`monotone_nonneg`: all partial sums >= 0."""
    return ConeSpec(MONOTONE_NONNEG_DUAL, n)

def nonneg_orthant(n: int) -> ConeSpec:
    """Componentwise nonnegative vectors."""
    return ConeSpec(NONNEG_ORTHANT, n)

def lorentz(n: int) -> ConeSpec:
    """Second order cone in R^n: x_1 >= ||(x_2, ..., x_n)||."""
    return ConeSpec(LORENTZ, n)

def cylinder(p: int, inner: ConeSpec) -> ConeSpec:
    """R^p x C for a base cone C over the u block."""
    return ConeSpec(CYLINDER, p, inner.dim, inner)

def cylinder_dual(p: int, inner: ConeSpec) -> ConeSpec:
    """{0}^p x D; obtained from :func:`dual_of` with D the dual base."""
    return ConeSpec(CYLINDER_DUAL, p, inner.dim, inner)


@dataclass(frozen=True)
class PartitionedVector:
    """A vector split into its x block (length p) and u block (length q)."""

    x: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        u = np.atleast_1d(np.asarray(self.u, dtype=float)) if np.size(self.u) else np.empty(0)
        if x.ndim != 1 or u.ndim != 1:
            raise DimensionError("blocks must be one-dimensional")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u))):
            raise ValueError("blocks must contain finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)

    @classmethod
    def from_array(cls, z, p: int, q: int) -> PartitionedVector:
        z = np.asarray(z, dtype=float).ravel()
        if z.size != p + q:
            raise DimensionError(f"expected length {p + q}, got {z.size}")
        return cls(z[:p], z[p:])

    @property
    def p(self) -> int:
        return self.x.size

    @property
    def q(self) -> int:
        return self.u.size

    @property
    def dim(self) -> int:
        return self.x.size + self.u.size

    def concat(self) -> np.ndarray:
        return np.concatenate([self.x, self.u])

    def __array__(self, dtype=None, copy=None):
        out = self.concat()
        return out.astype(dtype) if dtype is not None else out

    def __sub__(self, other: PartitionedVector) -> PartitionedVector:
        if (self.p, self.q) != (other.p, other.q):
            raise DimensionError("block sizes differ")
        return PartitionedVector(self.x - other.x, self.u - other.u)

    def __add__(self, other: PartitionedVector) -> PartitionedVector:
        if (self.p, self.q) != (other.p, other.q):
            raise DimensionError("block sizes differ")
        return PartitionedVector(self.x + other.x, self.u + other.u)


def _as_vector(z, dim: int) -> np.ndarray:
    z = np.asarray(z, dtype=float).ravel()
    if z.size != dim:
        raise DimensionError(f"expected a vector of length {dim}, got {z.size}")
    return z


def membership_slacks(cone: ConeSpec, z) -> np.ndarray:
    """Signed slack of every defining inequality at ``z`` (all >= 0 inside).

    Equality constraints contribute a pair of one-sided slacks, so membership
    is uniformly ``min(slacks) >= -tol``.
    """
    z = _as_vector(z, cone.dim)
    return _slacks_batch(cone, z[None, :])[0]


def _slacks_batch(cone: ConeSpec, Z: np.ndarray) -> np.ndarray:
    kind, p = cone.kind, cone.p
    X, U = Z[:, :p], Z[:, p:]
    if kind == MESOC:
        nu = np.linalg.norm(U, axis=1) if cone.q else np.zeros(len(Z))
        return np.hstack([X[:, :-1] - X[:, 1:], (X[:, -1] - nu)[:, None]])
    if kind == MESOC_DUAL:
        nv = np.linalg.norm(U, axis=1) if cone.q else np.zeros(len(Z))
        S = np.cumsum(X, axis=1)
        return np.hstack([S[:, :-1], (S[:, -1] - nv)[:, None]])
    if kind == ESOC:
        nu = np.linalg.norm(U, axis=1) if cone.q else np.zeros(len(Z))
        return X - nu[:, None]
    if kind == ESOC_DUAL:
        nu = np.linalg.norm(U, axis=1) if cone.q else np.zeros(len(Z))
        return np.hstack([X, (X.sum(axis=1) - nu)[:, None]])
    if kind == MONOTONE:
        if p == 1:
            return np.empty((len(Z), 0))
        return X[:, :-1] - X[:, 1:]
    if kind == MONOTONE_DUAL:
        S = np.cumsum(X, axis=1)
        return np.hstack([S[:, :-1], S[:, -1:], -S[:, -1:]])
    if kind == MONOTONE_NONNEG:
        return np.hstack([X[:, :-1] - X[:, 1:], X[:, -1:]])
    if kind == MONOTONE_NONNEG_DUAL:
        return np.cumsum(X, axis=1)
    if kind == NONNEG_ORTHANT:
        return X.copy()
    if kind == LORENTZ:
        rest = np.linalg.norm(Z[:, 1:], axis=1) if cone.dim > 1 else np.zeros(len(Z))
        return (Z[:, 0] - rest)[:, None]
    if kind == CYLINDER:
        return _slacks_batch(cone.inner, U)
    if kind == CYLINDER_DUAL:
        return np.hstack([X, -X, _slacks_batch(cone.inner, U)])
    raise UnsupportedConeError(f"no membership rule for {kind!r}")


def contains(cone: ConeSpec, z, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when every membership slack of ``z`` is >= -tol.membership."""
    s = membership_slacks(cone, z)
    return bool(s.size == 0 or s.min() >= -tol.membership)


def contains_batch(cone: ConeSpec, Z, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorized :func:`contains` over the rows of ``Z``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != cone.dim:
        raise DimensionError(f"expected shape (n, {cone.dim})")
    s = _slacks_batch(cone, Z)
    if s.shape[1] == 0:
        return np.ones(len(Z), dtype=bool)
    return s.min(axis=1) >= -tol.membership


_DUAL_MAP = {
    MESOC: MESOC_DUAL,
    MESOC_DUAL: MESOC,
    ESOC: ESOC_DUAL,
    ESOC_DUAL: ESOC,
    MONOTONE: MONOTONE_DUAL,
    MONOTONE_DUAL: MONOTONE,
    MONOTONE_NONNEG: MONOTONE_NONNEG_DUAL,
    MONOTONE_NONNEG_DUAL: MONOTONE_NONNEG,
    NONNEG_ORTHANT: NONNEG_ORTHANT,
    LORENTZ: LORENTZ,
}


def dual_of(cone: ConeSpec) -> ConeSpec:
    """The dual cone, in the same representation family.

    Self-dual kinds map to themselves; a cylinder R^p x C maps to the dual
    cylinder {0}^p x C*, and applying the map twice returns the original
    description.
    """
    if cone.kind == CYLINDER:
        return cylinder_dual(cone.p, dual_of(cone.inner))
    if cone.kind == CYLINDER_DUAL:
        return cylinder(cone.p, dual_of(cone.inner))
    return ConeSpec(_DUAL_MAP[cone.kind], cone.p, cone.q)


def duality_chain(
    xu: PartitionedVector, yv: PartitionedVector, tol: Tolerances = DEFAULT_TOL
) -> tuple[float, float, float]:
    """The chained pairing bounds for a primal/dual pair.

    For (x, u) in L(p, q) and (y, v) in its dual the three quantities

        <x, y>  >=  ||u|| * (y_1 + ... + y_p)  >=  ||u|| * ||v||

    are returned in that order; the full pairing <x,y> + <u,v> is then
    bounded below by the first minus the last.  Raises
    :class:`MembershipError` when either argument fails its membership check.
    """
    if (xu.p, xu.q) != (yv.p, yv.q):
        raise DimensionError("pair members have different block sizes")
    L = mesoc(xu.p, xu.q)
    if not contains(L, xu.concat(), tol):
        raise MembershipError("first argument is not in the primal cone")
    if not contains(dual_of(L), yv.concat(), tol):
        raise MembershipError("second argument is not in the dual cone")
    nu = float(np.linalg.norm(xu.u))
    nv = float(np.linalg.norm(yv.u))
    return (float(xu.x @ yv.x), nu * float(yv.x.sum()), nu * nv)


@dataclass(frozen=True)
class CompPair:
    """A candidate complementary pair (primal point, dual point).

    Members may be :class:`PartitionedVector` instances or plain full-length
    vectors; ``lambda_`` is the recovered antiparallel scaling v = -lambda * u
    when both norm blocks are nonzero, else None.
    """

    primal: PartitionedVector | np.ndarray
    dual: PartitionedVector | np.ndarray
    lambda_: float | None = None


@dataclass(frozen=True)
class ComplementarityReport:
    """Outcome of a complementarity-set test with per-condition residuals.

    ``mode`` is "structured" when the face-by-face characterization was used
    and "direct" when the test fell back to plain orthogonality (always the
    case for degenerate pairs with a vanishing norm block).  Residuals are
    slack-like: a condition passes when its value is >= -tol, so equality
    conditions report minus their absolute violation.
    """

    member: bool
    mode: str
    residuals: dict[str, float] = field(default_factory=dict)
    failed: tuple[str, ...] = ()
    scaling: float | None = None

    def __bool__(self) -> bool:
        return self.member


def _direct_report(cone, zp, zd, tol, residuals=None):
    residuals = dict(residuals or {})
    residuals["primal_membership"] = float(_min_slack(cone, zp))
    residuals["dual_membership"] = float(_min_slack(dual_of(cone), zd))
    residuals["orthogonality"] = -abs(float(zp @ zd))
    failed = []
    if residuals["primal_membership"] < -tol.membership:
        failed.append("primal_membership")
    if residuals["dual_membership"] < -tol.membership:
        failed.append("dual_membership")
    if residuals["orthogonality"] < -tol.orthogonality:
        failed.append("orthogonality")
    return ComplementarityReport(
        member=not failed, mode="direct", residuals=residuals, failed=tuple(failed)
    )


def _min_slack(cone, z):
    s = membership_slacks(cone, z)
    return np.inf if s.size == 0 else s.min()


def in_complementarity_set(
    cone: ConeSpec, pair: CompPair, tol: Tolerances = DEFAULT_TOL
) -> ComplementarityReport:
    """Test whether (primal, dual) is a complementary pair of ``cone``.

    For the partitioned monotone cone the structured characterization is
    used: memberships, (x_i - x_{i+1}) * (y_1 + ... + y_i) = 0 for i < p,
    x_p = ||u||, y_1 + ... + y_p = ||v||, and v = -lambda * u with
    lambda = ||v|| / ||u|| > 0.  When either norm block vanishes (and for the
    unpartitioned monotone nonnegative cone, where the face conditions close
    the test on their own), degenerate pairs fall back to the direct
    orthogonality test; the report's ``mode`` records which route ran.
    """
    zp = _as_vector(pair.primal, cone.dim)
    zd = _as_vector(pair.dual, cone.dim)

    if cone.kind == MESOC and cone.q > 0:
        x, u = zp[: cone.p], zp[cone.p :]
        y, v = zd[: cone.p], zd[cone.p :]
        nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
        if nu > tol.membership and nv > tol.membership:
            lam = nv / nu
            S = np.cumsum(y)
            res = {
                "primal_membership": float(_min_slack(cone, zp)),
                "dual_membership": float(_min_slack(dual_of(cone), zd)),
                "face_products": -float(np.max(np.abs((x[:-1] - x[1:]) * S[:-1]), initial=0.0)),
                "primal_tightness": -abs(float(x[-1] - nu)),
                "dual_tightness": -abs(float(S[-1] - nv)),
                "antiparallel": -float(np.max(np.abs(v + lam * u))),
            }
            failed = []
            for name in ("primal_membership", "dual_membership"):
                if res[name] < -tol.membership:
                    failed.append(name)
            for name in ("face_products", "primal_tightness", "dual_tightness", "antiparallel"):
                if res[name] < -tol.orthogonality:
                    failed.append(name)
            return ComplementarityReport(
                member=not failed,
                mode="structured",
                residuals=res,
                failed=tuple(failed),
                scaling=lam,
            )
        return _direct_report(cone, zp, zd, tol)

    if cone.kind == MONOTONE_NONNEG or (cone.kind == MESOC and cone.q == 0):
        x = zp[: cone.p]
        y = zd[: cone.p]
        S = np.cumsum(y)
        drops = np.append(x[:-1] - x[1:], x[-1])
        res = {
            "primal_membership": float(_min_slack(cone, zp)),
            "dual_membership": float(_min_slack(dual_of(cone), zd)),
            "face_products": -float(np.max(np.abs(drops * S))),
        }
        failed = [
            name
            for name, cut in (
                ("primal_membership", tol.membership),
                ("dual_membership", tol.membership),
                ("face_products", tol.orthogonality),
            )
            if res[name] < -cut
        ]
        return ComplementarityReport(
            member=not failed, mode="structured", residuals=res, failed=tuple(failed)
        )

    return _direct_report(cone, zp, zd, tol)


@dataclass(frozen=True)
class Decomposition:
    """Additive split of a point of L(p, q) into its two generating summands.

    The first summand is a_1 * (1, ..., 1, u / a_1) — a constant x block of
    height a_1 carrying the whole u block — and the second collects the
    nonnegative staircase built from the increments a_2, ..., a_p, with
    a_i = x_{p-i+1} - x_{p-i+2}.
    """

    weights: np.ndarray
    u: np.ndarray

    @property
    def p(self) -> int:
        return self.weights.size

    @property
    def q(self) -> int:
        return self.u.size

    @property
    def first_summand(self) -> np.ndarray:
        return np.concatenate([np.full(self.p, self.weights[0]), self.u])

    @property
    def second_summand(self) -> np.ndarray:
        a = self.weights
        # x_i - x_p is the sum of the drops below index i, i.e. a_2 + ... up
        # to the increment recorded for that position
        xs = np.append(np.cumsum(a[1:])[::-1], 0.0) if self.p > 1 else np.zeros(1)
        return np.concatenate([xs, np.zeros(self.q)])

    def reconstruct(self) -> np.ndarray:
        return self.first_summand + self.second_summand


def decompose_mesoc(p: int, q: int, z, tol: Tolerances = DEFAULT_TOL) -> Decomposition:
    """Split a point of L(p, q) into its flat and staircase summands.

    Weights are a_1 = x_p and a_i = x_{p-i+1} - x_{p-i+2} for i >= 2; all are
    nonnegative for members and ``reconstruct`` returns the input exactly.
    Raises :class:`MembershipError` when ``z`` is not in the cone.
    """
    cone = mesoc(p, q)
    z = _as_vector(z, cone.dim)
    if not contains(cone, z, tol):
        raise MembershipError(f"point is not in {cone}")
    x, u = z[:p], z[p:]
    weights = np.empty(p)
    weights[0] = x[-1]
    if p > 1:
        weights[1:] = (x[:-1] - x[1:])[::-1]
    return Decomposition(weights=weights, u=u.copy())
