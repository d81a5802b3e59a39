"""Isometry-orbit machinery: sampling, geodesic ball packing, orbit measures.

Three enumerated actions are supported:

- FULL_ROTATION: the orthogonal group fixing the origin of a SpaceForm; the
  orbit of y is the geodesic sphere through y.
- PRODUCT_ROTATION: O(d_1) x ... x O(d_k) acting blockwise on Euclidean
  R^d; the orbit of y is a product of spheres with radii |y_i|.
- MATRIX_CONJUGATION: SO(2) acting by conjugation on the determinant-one
  positive cone P(2, R)_1 with its trace metric.

packing_count reports a certified number of mutually disjoint geodesic
rho-balls centered on an orbit: the exact angular count where the orbit is
a circle, otherwise a deterministic greedy walk whose result is a lower
bound.  Every report carries its centers and is verified pairwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtri

from .modelspace import (
    EUCLIDEAN,
    POINCARE_BALL,
    SpaceForm,
    geodesic_distance,
    s_c,
    sphere_area,
    unit_ball_volume,
)
from .numerics import adaptive_integrate

__all__ = [
    "FULL_ROTATION",
    "PRODUCT_ROTATION",
    "MATRIX_CONJUGATION",
    "GREEDY",
    "ANGULAR_EXACT",
    "GroupAction",
    "MatrixPoint",
    "PackingReport",
    "CoercivityReport",
    "orbit_sample",
    "packing_count",
    "expansion_profile",
    "orbit_diameter",
    "coercivity_probe",
    "tangent_packing_lower_bound",
    "spherical_cap_count",
    "orbit_hausdorff_product_spheres",
    "orbit_hausdorff_matrix",
    "matrix_distance",
]

FULL_ROTATION = "FULL_ROTATION"
PRODUCT_ROTATION = "PRODUCT_ROTATION"
MATRIX_CONJUGATION = "MATRIX_CONJUGATION"

GREEDY = "GREEDY"
ANGULAR_EXACT = "ANGULAR_EXACT"

_WALK_SUBDIVISION = 20  # greedy walk step is rho / this
_MAX_WALK = 500_000
_MAX_CENTERS = 200_000


@dataclass(frozen=True)
class GroupAction:
    """An enumerated compact isometry action."""

    kind: str
    blocks: tuple = ()

    def __post_init__(self):
        if self.kind not in (FULL_ROTATION, PRODUCT_ROTATION, MATRIX_CONJUGATION):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == PRODUCT_ROTATION:
            blocks = tuple(int(b) for b in self.blocks)
            if len(blocks) < 1 or any(b < 2 for b in blocks):
                raise ValueError("product rotation blocks must all have dim >= 2")
            object.__setattr__(self, "blocks", blocks)
        elif self.blocks:
            raise ValueError(f"{self.kind} takes no blocks")


@dataclass(frozen=True)
class MatrixPoint:
    """Element of P(2, R)_1: symmetric positive definite with det = 1."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise ValueError("diagonal entries must be positive")
        if abs(self.a * self.c - self.b * self.b - 1.0) > 1e-10:
            raise ValueError(
                f"determinant constraint violated: ac - b^2 = {self.a*self.c - self.b**2}"
            )

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b, self.c]])

    @property
    def eigenvalues(self):
        tr = self.a + self.c
        disc = math.sqrt(max(0.0, (self.a - self.c) ** 2 + 4.0 * self.b**2))
        return (tr + disc) / 2.0, (tr - disc) / 2.0

    @classmethod
    def diagonal(cls, lam: float) -> "MatrixPoint":
        return cls(a=lam, b=0.0, c=1.0 / lam)

    @classmethod
    def identity(cls) -> "MatrixPoint":
        return cls(1.0, 0.0, 1.0)


def matrix_distance(x: MatrixPoint, y: MatrixPoint) -> float:
    """Trace-metric distance on P(2, R)_1: sqrt(sum log^2 eig(X^-1 Y)).

    For determinant-one pairs the eigenvalues are e^(+-mu), so the distance
    collapses to sqrt(2) * arcosh(tr(X^-1 Y)/2).
    """
    tr = x.c * y.a - 2.0 * x.b * y.b + x.a * y.c
    return math.sqrt(2.0) * math.acosh(max(1.0, tr / 2.0))


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]])


def _conjugate(x: MatrixPoint, theta: float) -> MatrixPoint:
    m = _rotation(theta) @ x.matrix @ _rotation(theta).T
    return MatrixPoint(a=m[0, 0], b=m[0, 1], c=m[1, 1])


def _sphere_points(d: int, n: int) -> np.ndarray:
    """n deterministic, roughly uniform unit vectors in R^d."""
    if d == 1:
        return np.array([[1.0 if k % 2 == 0 else -1.0] for k in range(n)])
    if d == 2:
        thetas = 2.0 * math.pi * np.arange(n) / n
        return np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    if d == 3:
        # Fibonacci spiral
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        k = np.arange(n)
        z = 1.0 - 2.0 * (k + 0.5) / n
        phi = 2.0 * math.pi * k / golden
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    # Kronecker low-discrepancy sequence pushed through the normal inverse CDF
    primes = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37])[:d]
    k = np.arange(1, n + 1)[:, None]
    seq = np.mod(k * np.sqrt(primes)[None, :], 1.0)
    seq = np.clip(seq, 1e-12, 1.0 - 1e-12)
    pts = ndtri(seq)
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    return pts / np.maximum(norms, 1e-300)


def orbit_sample(action: GroupAction, y, n: int, space: Optional[SpaceForm] = None):
    """n deterministic points on the orbit of y (uniform parameter grids)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if action.kind == MATRIX_CONJUGATION:
        thetas = 2.0 * math.pi * np.arange(n) / n
        return [_conjugate(y, float(t)) for t in thetas]
    y = np.asarray(y, dtype=float)
    if action.kind == FULL_ROTATION:
        r = float(np.linalg.norm(y))
        if r == 0.0:
            return np.zeros((n, y.size))
        if y.size == 2:
            thetas = 2.0 * math.pi * np.arange(n) / n
            cos, sin = np.cos(thetas), np.sin(thetas)
            return np.stack(
                [cos * y[0] - sin * y[1], sin * y[0] + cos * y[1]], axis=1
            )
        return r * _sphere_points(y.size, n)
    blocks = action.blocks
    if sum(blocks) != y.size:
        raise ValueError(f"blocks {blocks} do not partition a vector of size {y.size}")
    out = np.zeros((n, y.size))
    offset = 0
    for j, bdim in enumerate(blocks):
        yj = y[offset : offset + bdim]
        rj = float(np.linalg.norm(yj))
        if rj > 0.0:
            # offset each block's grid deterministically to avoid aligned seams
            pts = _sphere_points(bdim, n)
            shift = (j * 7919) % n
            out[:, offset : offset + bdim] = rj * np.roll(pts, shift, axis=0)
        offset += bdim
    return out


def _squared_dist_chunk(pts, start, stop):
    """|a-b|^2 via the Gram identity (fast), clipped at zero."""
    sq = np.einsum("ij,ij->i", pts, pts)
    block = sq[start:stop, None] + sq[None, :] - 2.0 * (pts[start:stop] @ pts.T)
    return np.maximum(block, 0.0)


def _pairwise_min_distance(action, space, centers) -> float:
    """Smallest pairwise distance among centers (chunked, BLAS-backed).

    The Gram identity loses ~|x|^2 * eps of absolute accuracy, so pairs that
    land near the current minimum are re-measured with the exact difference
    formula before the minimum is reported.
    """
    if action.kind == MATRIX_CONJUGATION:
        arr = np.array([[c.a, c.b, c.c] for c in centers])
        if len(centers) < 2:
            return math.inf
        a, b, c = arr[:, 0], arr[:, 1], arr[:, 2]
        tr = np.outer(c, a) - 2.0 * np.outer(b, b) + np.outer(a, c)
        np.fill_diagonal(tr, -np.inf)
        tr_max = float(np.max(tr))
        return math.sqrt(2.0) * math.acosh(max(1.0, tr_max / 2.0))
    pts = np.asarray(centers, dtype=float)
    m = pts.shape[0]
    if m < 2:
        return math.inf
    hyper = space is not None and space.model == POINCARE_BALL
    if hyper:
        one_minus = 1.0 - np.einsum("ij,ij->i", pts, pts)
        k = math.sqrt(-space.curvature)
    near_pairs = []
    scale2 = float(np.max(np.einsum("ij,ij->i", pts, pts)))
    slack2 = 1e-9 * max(1.0, scale2)
    chunk = max(1, int(2e7 // max(m, 1)))
    key_min = math.inf  # squared chordal distance (or its hyperbolic ratio)
    for start in range(0, m, chunk):
        stop = min(m, start + chunk)
        key = _squared_dist_chunk(pts, start, stop)
        if hyper:
            key /= one_minus[start:stop, None] * one_minus[None, :]
        key[np.arange(stop - start), np.arange(start, stop)] = np.inf
        block_min = float(key.min())
        key_min = min(key_min, block_min)
        rows, cols = np.nonzero(key <= block_min + slack2)
        near_pairs.extend(zip((rows + start).tolist(), cols.tolist()))
    # exact recheck with the cancellation-free difference formula; the true
    # argmin pair is among the near-minimal ones collected above
    exact_best = math.inf
    for i, j in near_pairs[:20000]:
        diff2 = float(((pts[i] - pts[j]) ** 2).sum())
        if hyper:
            d = math.acosh(max(1.0, 1.0 + 2.0 * diff2 / (one_minus[i] * one_minus[j]))) / k
        else:
            d = math.sqrt(diff2)
        exact_best = min(exact_best, d)
    if near_pairs:
        return exact_best
    if hyper:
        return math.acosh(max(1.0, 1.0 + 2.0 * key_min)) / k
    return math.sqrt(key_min)


@dataclass(frozen=True)
class PackingReport:
    """Certified family of disjoint geodesic rho-balls centered on an orbit."""

    y: object
    rho: float
    count: int
    centers: object
    method: str
    fixed_point: bool = False
    min_pairwise_distance: float = math.inf

    def verify(self, action: GroupAction, space: Optional[SpaceForm]) -> None:
        """Recompute the pairwise-disjointness certificate; raises on failure."""
        dmin = _pairwise_min_distance(action, space, self.centers)
        if dmin < 2.0 * self.rho - 1e-12:
            raise RuntimeError(
                f"packing certificate violated: min distance {dmin} < 2 rho"
            )


def _circle_exact_count(space: SpaceForm, orbit_radius: float, rho: float):
    """Max equally spaced points on a geodesic circle with pair distance >= 2 rho."""
    if space.model == EUCLIDEAN:
        if orbit_radius < rho:
            return 1, None
        phi_min = 2.0 * math.asin(min(1.0, rho / orbit_radius))
    else:
        k = math.sqrt(-space.curvature)
        s, r = k * orbit_radius, k * rho
        if orbit_radius < rho:
            return 1, None
        num = math.cosh(s) ** 2 - math.cosh(2.0 * r)
        cos_phi = num / math.sinh(s) ** 2
        phi_min = math.acos(max(-1.0, min(1.0, cos_phi)))
    count = max(1, int(math.floor(2.0 * math.pi / phi_min)))
    return count, phi_min


def _chart_radius(space: SpaceForm, geodesic_radius: float) -> float:
    if space.model == EUCLIDEAN:
        return geodesic_radius
    k = math.sqrt(-space.curvature)
    return math.tanh(k * geodesic_radius / 2.0)


def _greedy_circle(space, y, rho):
    """Greedy walk around the geodesic circle through y (dimension 2).

    The circle is scanned at arc step rho/20; each acceptance is then
    sharpened by bisecting the continuous angle at which the distance to
    the previously accepted center first clears 2 rho, so no arc is wasted
    to grid quantization.
    """
    y = np.asarray(y, dtype=float)
    chart_r = float(np.linalg.norm(y))
    base_angle = math.atan2(y[1], y[0])
    r_orbit = geodesic_distance(space, np.zeros(2), y)
    circumference = 2.0 * math.pi * s_c(space.curvature, r_orbit)
    n_steps = int(min(_MAX_WALK, max(64, math.ceil(circumference / (rho / _WALK_SUBDIVISION)))))
    step = 2.0 * math.pi / n_steps

    def point_at(theta):
        return chart_r * np.array(
            [math.cos(base_angle + theta), math.sin(base_angle + theta)]
        )

    def dist_at(theta, other):
        return geodesic_distance(space, point_at(theta), other)

    accepted_angles = [0.0]
    accepted_pts = [point_at(0.0)]
    theta = 0.0
    while True:
        # scan forward for the next crossing of the 2 rho threshold
        prev = theta
        found = None
        while prev < 2.0 * math.pi:
            nxt = min(prev + step, 2.0 * math.pi)
            if dist_at(nxt, accepted_pts[-1]) >= 2.0 * rho:
                found = (prev, nxt)
                break
            prev = nxt
        if found is None:
            break
        lo, hi = found
        if dist_at(lo, accepted_pts[-1]) < 2.0 * rho:
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if dist_at(mid, accepted_pts[-1]) >= 2.0 * rho:
                    hi = mid
                else:
                    lo = mid
        theta = hi
        candidate = point_at(theta)
        # wrap check against the first accepted center
        if geodesic_distance(space, candidate, accepted_pts[0]) < 2.0 * rho:
            break
        accepted_angles.append(theta)
        accepted_pts.append(candidate)
    return np.array(accepted_pts)


def _greedy_sphere(space, y, rho):
    """Greedy walk over a deterministic spiral on the orbit sphere (dim >= 3)."""
    y = np.asarray(y, dtype=float)
    d = y.size
    r_orbit = geodesic_distance(space, np.zeros(d), y)
    radius_scale = s_c(space.curvature, r_orbit)
    step = rho / _WALK_SUBDIVISION
    area = sphere_area(d) * radius_scale ** (d - 1)
    n_steps = int(min(_MAX_WALK, max(256, math.ceil(area / step ** (d - 1)))))
    chart_r = float(np.linalg.norm(y))
    pts = chart_r * _sphere_points(d, n_steps)
    accepted = np.empty((0, d))
    accepted_list = []
    if space.model == POINCARE_BALL:
        k = math.sqrt(-space.curvature)
    for i in range(n_steps):
        if accepted_list:
            diff2 = ((accepted - pts[i]) ** 2).sum(axis=1)
            if space.model == EUCLIDEAN:
                dmin = math.sqrt(float(diff2.min()))
            else:
                denom = (1.0 - pts[i] @ pts[i]) * (1.0 - np.einsum("ij,ij->i", accepted, accepted))
                dmin = float(
                    np.min(np.arccosh(np.maximum(1.0, 1.0 + 2.0 * diff2 / denom)))
                ) / k
            if dmin < 2.0 * rho:
                continue
        accepted_list.append(pts[i])
        accepted = np.array(accepted_list)
    return accepted


def _product_block_counts(space, y, blocks, rho):
    """Per-block packing counts whose product grid is automatically disjoint.

    Any two grid points differ in at least one block by a full angular step,
    which alone contributes chord >= 2 rho, so the ambient distance clears
    the threshold regardless of the other blocks.
    """
    euclid = SpaceForm(2, 0.0)
    counts, block_centers = [], []
    offset = 0
    for bdim in blocks:
        yj = np.asarray(y, dtype=float)[offset : offset + bdim]
        rj = float(np.linalg.norm(yj))
        if rj == 0.0:
            counts.append(1)
            block_centers.append(np.zeros((1, bdim)))
        elif bdim == 2:
            cnt, _ = _circle_exact_count(euclid, rj, rho)
            thetas = 2.0 * math.pi * np.arange(cnt) / cnt
            base = math.atan2(yj[1], yj[0])
            block_centers.append(
                rj * np.stack([np.cos(base + thetas), np.sin(base + thetas)], axis=1)
            )
            counts.append(cnt)
        else:
            centers = _greedy_sphere(SpaceForm(bdim, 0.0), yj, rho)
            block_centers.append(centers)
            counts.append(len(centers))
        offset += bdim
    return counts, block_centers


def packing_count(
    action: GroupAction,
    space: Optional[SpaceForm],
    y,
    rho: float,
    method: str = "auto",
) -> PackingReport:
    """Number of mutually disjoint geodesic rho-balls centered on the orbit.

    method "angular_exact" (circles only) uses the closed-form spacing;
    "greedy" walks a fine orbit parametrization and reports a certified
    lower bound; "auto" picks exact where available.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    method = method.lower()

    if action.kind == MATRIX_CONJUGATION:
        return _packing_matrix(action, y, rho)

    y = np.asarray(y, dtype=float)
    if action.kind == FULL_ROTATION:
        if space is None:
            raise ValueError("full rotation needs an ambient space")
        if space.model == POINCARE_BALL:
            space.point(y)  # chart validation
        r_chart = float(np.linalg.norm(y))
        if r_chart == 0.0:
            return PackingReport(y, rho, 1, np.zeros((1, y.size)), GREEDY, fixed_point=True)
        if y.size == 2 and method in ("auto", "angular_exact"):
            r_orbit = geodesic_distance(space, np.zeros(2), y)
            count, phi_min = _circle_exact_count(space, r_orbit, rho)
            thetas = 2.0 * math.pi * np.arange(count) / count
            base = math.atan2(y[1], y[0])
            centers = r_chart * np.stack(
                [np.cos(base + thetas), np.sin(base + thetas)], axis=1
            )
            report = PackingReport(
                y,
                rho,
                count,
                centers,
                ANGULAR_EXACT,
                min_pairwise_distance=_pairwise_min_distance(action, space, centers),
            )
            report.verify(action, space)
            return report
        if method == "angular_exact":
            raise ValueError("angular_exact is only available for circles (dim 2)")
        centers = (
            _greedy_circle(space, y, rho) if y.size == 2 else _greedy_sphere(space, y, rho)
        )
        report = PackingReport(
            y,
            rho,
            len(centers),
            centers,
            GREEDY,
            min_pairwise_distance=_pairwise_min_distance(action, space, centers),
        )
        report.verify(action, space)
        return report

    # PRODUCT_ROTATION on Euclidean space
    if space is not None and space.model != EUCLIDEAN:
        raise ValueError("product rotations act on Euclidean space")
    if sum(action.blocks) != y.size:
        raise ValueError(f"blocks {action.blocks} do not partition y of size {y.size}")
    if method == "angular_exact":
        raise ValueError("angular_exact is only available for circles (dim 2)")
    if float(np.linalg.norm(y)) == 0.0:
        return PackingReport(y, rho, 1, np.zeros((1, y.size)), GREEDY, fixed_point=True)
    counts, block_centers = _product_block_counts(space, y, action.blocks, rho)
    total = int(np.prod(counts))
    if total > _MAX_CENTERS:
        raise ValueError(
            f"packing materializes {total} centers; increase rho for a desk-scale run"
        )
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    centers = np.concatenate(
        [block_centers[j][g.ravel()] for j, g in enumerate(grids)], axis=1
    )
    euclid_full = SpaceForm(max(2, y.size), 0.0)
    report = PackingReport(
        y,
        rho,
        total,
        centers,
        GREEDY,
        min_pairwise_distance=_pairwise_min_distance(action, euclid_full, centers),
    )
    report.verify(action, euclid_full)
    return report


def _packing_matrix(action, y: MatrixPoint, rho: float) -> PackingReport:
    if abs(y.a - 1.0) < 1e-12 and abs(y.b) < 1e-12 and abs(y.c - 1.0) < 1e-12:
        return PackingReport(y, rho, 1, [y], GREEDY, fixed_point=True)
    # conjugation orbit is a closed curve of period pi
    probe = [
        matrix_distance(_conjugate(y, t), _conjugate(y, t + 1e-4)) / 1e-4
        for t in np.linspace(0.0, math.pi, 64)
    ]
    speed = max(max(probe), 1e-12)
    n_steps = int(min(_MAX_WALK, max(128, math.ceil(math.pi * speed / (rho / _WALK_SUBDIVISION)))))
    thetas = math.pi * np.arange(n_steps) / n_steps
    pts = [_conjugate(y, float(t)) for t in thetas]
    accepted = [pts[0]]
    for p in pts[1:]:
        if all(matrix_distance(p, q) >= 2.0 * rho for q in accepted):
            accepted.append(p)
    report = PackingReport(
        y,
        rho,
        len(accepted),
        accepted,
        GREEDY,
        min_pairwise_distance=_pairwise_min_distance(action, None, accepted),
    )
    report.verify(action, None)
    return report


def expansion_profile(
    action: GroupAction,
    space: SpaceForm,
    rho: float,
    radii: Sequence[float],
    method: str = "auto",
):
    """Packing counts along a geodesic ray from the origin.

    radii are chart radii of the sampled points; each row records the
    geodesic distance from the origin, rho, the packing count, and the
    counting method.  The table is the machine-readable artifact for
    checking that counts blow up with distance.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("radii must be non-empty")
    if np.any(np.diff(radii) < 0):
        raise ValueError("radii must be non-decreasing")
    rows = []
    dim = space.dim if action.kind != PRODUCT_ROTATION else sum(action.blocks)
    for r in radii:
        y = np.zeros(dim)
        if action.kind == PRODUCT_ROTATION:
            # spread the radius across the first coordinate of every block
            offset = 0
            for bdim in action.blocks:
                y[offset] = r / math.sqrt(len(action.blocks))
                offset += bdim
        else:
            y[0] = r
        report = packing_count(action, space, y, rho, method=method)
        dist = (
            float(np.linalg.norm(y))
            if space.model == EUCLIDEAN
            else geodesic_distance(space, np.zeros(dim), y)
        )
        rows.append(
            {
                "distance": dist,
                "rho": rho,
                "count": report.count,
                "method": report.method,
            }
        )
    return rows


def orbit_diameter(action: GroupAction, space: Optional[SpaceForm], y, n: int = 10_000) -> float:
    """Max pairwise geodesic distance over a dense deterministic orbit sample."""
    pts = orbit_sample(action, y, n, space=space)
    if action.kind == MATRIX_CONJUGATION:
        arr = np.array([[p.a, p.b, p.c] for p in pts])
        a, b, c = arr[:, 0], arr[:, 1], arr[:, 2]
        tr = np.outer(c, a) - 2.0 * np.outer(b, b) + np.outer(a, c)
        return math.sqrt(2.0) * math.acosh(max(1.0, float(tr.max()) / 2.0))
    pts = np.asarray(pts, dtype=float)
    best = 0.0
    chunk = max(1, int(4e7 // max(len(pts), 1)))
    hyper = space is not None and space.model == POINCARE_BALL
    if hyper:
        one_minus = 1.0 - np.einsum("ij,ij->i", pts, pts)
        k = math.sqrt(-space.curvature)
    for start in range(0, len(pts), chunk):
        stop = min(len(pts), start + chunk)
        diff2 = _squared_dist_chunk(pts, start, stop)
        if not hyper:
            best = max(best, math.sqrt(float(diff2.max())))
        else:
            denom = one_minus[start:stop, None] * one_minus[None, :]
            best = max(
                best,
                float(np.arccosh(np.maximum(1.0, 1.0 + 2.0 * diff2 / denom)).max()) / k,
            )
    return best


@dataclass(frozen=True)
class CoercivityReport:
    """Numeric probe of whether {x : diam orbit(x) <= t} reaches a radius shell."""

    threshold: float
    search_radius: float
    min_diameter: float
    witness: Optional[np.ndarray]

    @property
    def small_orbit_found(self) -> bool:
        return self.witness is not None


def coercivity_probe(
    action: GroupAction,
    space: SpaceForm,
    t: float,
    search_radius: float,
    n_points: int = 32,
    orbit_samples: int = 512,
) -> CoercivityReport:
    """Search the shell d(x0, x) in [R/2, R] for points with small orbits."""
    if not t > 0 or not search_radius > 0:
        raise ValueError("t and search_radius must be positive")
    dim = space.dim if action.kind != PRODUCT_ROTATION else sum(action.blocks)
    dirs = _sphere_points(dim, n_points)
    best = math.inf
    witness = None
    for frac in np.linspace(0.5, 1.0, 5):
        geo = frac * search_radius
        chart = _chart_radius(space, geo)
        for u in dirs:
            x = chart * u
            diam = orbit_diameter(action, space, x, n=orbit_samples)
            if diam < best:
                best = diam
                if diam <= t:
                    witness = x
    return CoercivityReport(t, search_radius, best, witness)


def tangent_packing_lower_bound(angles: Sequence[float], rho: float, t: float) -> int:
    """Largest n with t >= t_n, where t_n = rho / sin(alpha_min(n)/2).

    angles lists the pairwise angles between rays in the order the pairs
    appear as rays are introduced: (1,2), (1,3), (2,3), (1,4), ...  Centers
    placed t out along the rays carry n disjoint rho-balls once t passes
    t_n, and the bound tends to infinity with t for any fixed family of
    positive pairwise angles.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        raise ValueError("angles must be non-empty")
    if np.any(angles <= 0) or np.any(angles > math.pi):
        raise ValueError("angles must lie in (0, pi]")
    if not rho > 0 or not t >= 0:
        raise ValueError("rho must be positive and t non-negative")
    n_rays = int((1 + math.isqrt(1 + 8 * angles.size)) // 2)
    best = 1  # t_1 = 0, a single ball always fits
    for n in range(2, n_rays + 1):
        n_pairs = n * (n - 1) // 2
        if n_pairs > angles.size:
            break
        alpha_min = float(np.min(angles[:n_pairs]))
        t_n = rho / math.sin(alpha_min / 2.0)
        if t >= t_n:
            best = n
    return best


def spherical_cap_count(d: int, rho: float, t: float) -> float:
    """Cap-covering estimate: sphere area / area of a cap of radius 2 rho/t."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if not t > rho:
        raise ValueError(f"need t > rho, got t={t}, rho={rho}")
    cap_radius = 2.0 * rho / t
    inner = adaptive_integrate(
        lambda s: math.sin(s) ** (d - 2), 0.0, min(cap_radius, math.pi), tol=1e-12
    )
    cap_area = (d - 1) * unit_ball_volume(d - 1) * inner.value
    return sphere_area(d) / cap_area


@dataclass(frozen=True)
class ProductSpheresMeasure:
    measure: float
    lower_bound: float
    m_g: float

    @property
    def holds(self) -> bool:
        return self.measure >= self.lower_bound - 1e-12 * max(1.0, self.measure)


def simplex_min_exponent_sum(blocks: Sequence[int]) -> float:
    """min of sum z_i^(d_i - 1) over the simplex sum z_i = 1, z_i >= 0."""
    blocks = [int(b) for b in blocks]
    k = len(blocks)
    exps = np.array([b - 1 for b in blocks], dtype=float)

    def objective(z):
        return float(np.sum(np.abs(z) ** exps))

    if all(b == 2 for b in blocks):
        return 1.0
    starts = [np.full(k, 1.0 / k)]
    for j in range(k):
        e = np.full(k, 0.05 / max(1, k - 1))
        e[j] = 0.95
        starts.append(e)
    best = math.inf
    for z0 in starts:
        res = minimize(
            objective,
            z0,
            method="SLSQP",
            bounds=[(0.0, 1.0)] * k,
            constraints=[{"type": "eq", "fun": lambda z: float(np.sum(z) - 1.0)}],
            options={"maxiter": 200, "ftol": 1e-14},
        )
        if res.success:
            best = min(best, float(res.fun))
    return best


def orbit_hausdorff_product_spheres(blocks: Sequence[int], y) -> ProductSpheresMeasure:
    """Orbit measure of y under a product of rotation groups.

    The measure is the sum over active blocks of (unit-sphere area) times
    |y_i|^(d_i - 1); the lower bound is 2 pi m_G |y| with m_G the simplex
    minimum above.  Note the summed form: a product of sphere measures
    might be expected for a product orbit, but the sum is what the bound
    below consumes, and it is what this function reports.
    """
    blocks = [int(b) for b in blocks]
    if any(b < 2 for b in blocks):
        raise ValueError("blocks must all have dimension >= 2")
    y = np.asarray(y, dtype=float)
    if sum(blocks) != y.size:
        raise ValueError(f"blocks {blocks} do not partition y of size {y.size}")
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        raise ValueError("y must be non-zero")
    measure = 0.0
    offset = 0
    for bdim in blocks:
        rj = float(np.linalg.norm(y[offset : offset + bdim]))
        if rj > 0.0:
            measure += sphere_area(bdim) * rj ** (bdim - 1)
        offset += bdim
    m_g = simplex_min_exponent_sum(blocks)
    lower = 2.0 * math.pi * m_g * norm_y
    result = ProductSpheresMeasure(measure=measure, lower_bound=lower, m_g=m_g)
    if norm_y >= 1.0 and not result.holds:
        raise RuntimeError(
            f"orbit measure {measure} fell below its bound {lower} at |y| = {norm_y}"
        )
    return result


@dataclass(frozen=True)
class MatrixOrbitMeasure:
    length: float
    distance_to_identity: float
    kappa_check: bool


def orbit_hausdorff_matrix(y: MatrixPoint) -> MatrixOrbitMeasure:
    """Length of the rotation-orbit curve through y and the comparison
    length >= pi * d(I, y) in the trace metric.

    The orbit curve is theta -> y @ rotation(theta), whose speed in the
    Frobenius norm is the constant ||y||_F, giving length 2 pi ||y||_F.
    """
    frob = math.sqrt(y.a**2 + 2.0 * y.b**2 + y.c**2)
    length = 2.0 * math.pi * frob
    lam1, lam2 = y.eigenvalues
    dist = math.sqrt(math.log(lam1) ** 2 + math.log(lam2) ** 2)
    return MatrixOrbitMeasure(
        length=length,
        distance_to_identity=dist,
        kappa_check=length >= math.pi * dist - 1e-12,
    )
