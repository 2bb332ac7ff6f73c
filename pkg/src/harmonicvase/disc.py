"""Attached discs: the explicit square map, its welds, and its checks.

A relator path alpha descending from height h to height l, together with
the straight return path up the line {r = 2, phi = 0, w = 0}, bounds a
disc built from the unit square:

  * the t parameter runs down alpha on [0, 1/2] and back up the return
    path on [1/2, 1], synchronized so mirrored t values share a height;
  * the s parameter slides each boundary point straight toward the z
    axis at its own height;
  * the upper half (the return side) is pushed into the fourth
    coordinate by a polynomial bump that vanishes on the half-square's
    boundary and stays below the local height.

Welding (s, 0) ~ (s, 1) and folding the axis column (1, 1/2 - t) ~
(1, 1/2 + t) turns the square into a disc whose boundary is exactly the
attaching loop. Injectivity and wall-disjointness are verified at sample
resolution with refinement-stability reporting; they are resolution-
bounded checks, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .braid import BhvScene
from .relator_path import AlphaPath
from .vase import cyl_to_cartesian

AXIS_RADIUS = 2.0


@dataclass(frozen=True)
class BumpG:
    """Fourth-coordinate bump on the upper half square.

    value(s, t, z) = scale * 8 * margin * s(1-s) * (t-1/2)(1-t) * z.
    Zero on the boundary of I x [1/2, 1], positive inside (for scale > 0),
    and at most margin/8 of z, hence always below z.
    """

    margin: float = 0.5
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.margin < 8:
            raise ValueError("bump margin must lie in (0, 8)")
        if self.scale < 0:
            raise ValueError("bump scale must be >= 0")

    def value(self, s, t, z_axis):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        return (
            self.scale
            * 8.0
            * self.margin
            * s
            * (1.0 - s)
            * (t - 0.5)
            * (1.0 - t)
            * np.asarray(z_axis, dtype=float)
        )


class _BoundaryMap:
    """Synchronized boundary parametrization of alpha plus the return path."""

    def __init__(self, alpha: AlphaPath):
        if not alpha.terminal_height < alpha.start_height:
            raise ValueError("degenerate path: no height drop to span")
        pts = cyl_to_cartesian(alpha.polyline)
        # z decreases along alpha; np.interp wants increasing knots.
        self._z_knots = pts[::-1, 2].copy()
        self._xyzw = pts[::-1].copy()
        self.h = alpha.start_height
        self.l = alpha.terminal_height

    def z_of_t(self, t: float) -> float:
        if t <= 0.5:
            return self.h + (self.l - self.h) * (2.0 * t)
        return self.l + (self.h - self.l) * (2.0 * t - 1.0)

    def descent_point(self, z: float) -> np.ndarray:
        """Point of alpha at the given height, by chordal interpolation."""
        out = np.empty(4)
        for c in range(4):
            out[c] = np.interp(z, self._z_knots, self._xyzw[:, c])
        out[2] = z
        return out

    def boundary_point(self, t: float) -> np.ndarray:
        z = self.z_of_t(t)
        if t <= 0.5:
            return self.descent_point(z)
        return np.array([AXIS_RADIUS, 0.0, z, 0.0])


def disc_point_f(
    alpha: AlphaPath, s: float, t: float, bump: BumpG | None = None
) -> np.ndarray:
    """Evaluate the square map at (s, t); Cartesian (x, y, z, w).

    Heights are preserved exactly: the z channel is taken from the
    synchronized boundary parametrization, never re-interpolated.
    """
    if not 0.0 <= s <= 1.0 or not 0.0 <= t <= 1.0:
        raise ValueError(f"(s, t) = ({s}, {t}) outside the unit square")
    bump = bump or BumpG()
    boundary = _BoundaryMap(alpha)
    p0 = boundary.boundary_point(t)
    z = p0[2]
    out = np.array([(1.0 - s) * p0[0], (1.0 - s) * p0[1], z, (1.0 - s) * p0[3]])
    if t > 0.5:
        out[3] += float(bump.value(s, t, z))
    return out


@dataclass(frozen=True)
class DiscMesh:
    """Sampled disc with its weld table implied by the grid indices.

    points[a, b] is the map at (s, t) = (a/n, b/n). Welds are exact index
    identifications: (a, n) ~ (a, 0) and, on the axis column,
    (n, b) ~ (n, n - b) for b > n/2. The welded duplicates are bitwise
    equal by construction.
    """

    n: int
    points: np.ndarray
    band: tuple[float, float]  # (l, h)
    relator_index: int
    bump: BumpG

    def canonical_index(self, a: int, b: int) -> tuple[int, int]:
        if b == self.n:
            b = 0
        if a == self.n and b > self.n // 2:
            b = self.n - b
        return a, b

    @property
    def welded_vertex_count(self) -> int:
        return (self.n + 1) * self.n - self.n // 2 + 1

    def welded_points(self, min_a: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Unique welded samples with s index >= min_a.

        Returns (points, grid) where grid[k] = (a, b) of the canonical
        representative of sample k.
        """
        n = self.n
        keep = []
        coords = []
        for a in range(min_a, n + 1):
            b_hi = n // 2 if a == n else n - 1
            for b in range(0, b_hi + 1):
                keep.append(self.points[a, b])
                coords.append((a, b))
        return np.array(keep), np.array(coords)

    @property
    def boundary_polyline(self) -> np.ndarray:
        """The attaching loop: the s = 0 column, closed by the (0, n) weld."""
        return self.points[0, : self.n + 1]


def build_disc(
    alpha: AlphaPath,
    n: int,
    relator_index: int = 0,
    bump: BumpG | None = None,
) -> DiscMesh:
    """Sample the square map on an (n+1) x (n+1) grid and record the welds.

    n must be even so the t = 1/2 row (the lowest height) is a grid row;
    production meshes use n >= 16.
    """
    if n < 2 or n % 2:
        raise ValueError("disc resolution must be an even integer >= 2")
    if not alpha.terminal_height < alpha.start_height:
        raise ValueError("degenerate path: zero length")
    bump = bump or BumpG()
    boundary = _BoundaryMap(alpha)
    h, l = boundary.h, boundary.l
    half = n // 2
    # Heights per t row; the upper half mirrors the lower half bitwise.
    z_row = np.empty(n + 1)
    z_row[: half + 1] = h + (l - h) * (2.0 * np.arange(half + 1) / n)
    z_row[0] = h
    z_row[half] = l
    z_row[half + 1 :] = z_row[: half][::-1]
    p0 = np.empty((n + 1, 4))
    for b in range(half + 1):
        p0[b] = boundary.descent_point(z_row[b])
    p0[half + 1 :, 0] = AXIS_RADIUS
    p0[half + 1 :, 1] = 0.0
    p0[half + 1 :, 2] = z_row[half + 1 :]
    p0[half + 1 :, 3] = 0.0
    s = np.arange(n + 1) / n
    t = np.arange(n + 1) / n
    pts = np.empty((n + 1, n + 1, 4))
    one_minus_s = (1.0 - s)[:, np.newaxis]
    pts[..., 0] = one_minus_s * p0[np.newaxis, :, 0]
    pts[..., 1] = one_minus_s * p0[np.newaxis, :, 1]
    pts[..., 2] = z_row[np.newaxis, :]
    pts[..., 3] = one_minus_s * p0[np.newaxis, :, 3]
    # The bump already vanishes on the t = 1/2 and t = 1 rows.
    pts[:, half:, 3] += bump.value(
        s[:, np.newaxis], t[np.newaxis, half:], z_row[np.newaxis, half:]
    )
    return DiscMesh(
        n=n,
        points=pts,
        band=(l, h),
        relator_index=relator_index,
        bump=bump,
    )


def euler_characteristic(mesh: DiscMesh) -> int:
    """V - E + F of the welded quad complex, counted at the cell level.

    Edges are identified as cells (two distinct edges may share both
    endpoints after welding), so the count is the honest CW Euler
    characteristic. A disc must give 1.
    """
    n = mesh.n
    vertices = set()
    edges = set()
    for a in range(n + 1):
        for b in range(n + 1):
            vertices.add(mesh.canonical_index(a, b))
    for a in range(n):
        for b in range(n + 1):
            edges.add(("s", a, 0 if b == n else b))
    for a in range(n + 1):
        for b in range(n):
            bb = b
            if a == n and b >= n // 2:
                bb = n - 1 - b
            edges.add(("t", a, bb))
    faces = n * n
    return len(vertices) - len(edges) + faces


@dataclass(frozen=True)
class InjectivityReport:
    passed: bool
    min_distance: float
    closest_pair: tuple[tuple[int, int], tuple[int, int]] | None
    sample_count: int
    tolerance: float


def verify_injective(mesh: DiscMesh, distance_floor: float = 1e-9) -> InjectivityReport:
    """All welded samples off the attaching boundary must be pairwise distinct.

    The s = 0 column is the attaching loop and legitimately revisits
    points of the walls, so only samples with s > 0 are compared.
    """
    pts, coords = mesh.welded_points(min_a=1)
    tree = cKDTree(pts)
    dist, idx = tree.query(pts, k=2)
    nearest = dist[:, 1]
    k = int(np.argmin(nearest))
    min_distance = float(nearest[k])
    pair = (tuple(coords[k]), tuple(coords[idx[k, 1]]))
    return InjectivityReport(
        passed=min_distance > distance_floor,
        min_distance=min_distance,
        closest_pair=pair,
        sample_count=len(pts),
        tolerance=distance_floor,
    )


@dataclass(frozen=True)
class DisjointnessReport:
    passed: bool
    min_distance: float
    disc_sample: tuple[int, int] | None
    wall_sample: tuple[int, int] | None  # (vase index, flat sample index)
    s_min: float
    per_height_minima: tuple[tuple[float, float, float], ...]
    wall_sample_count: int


def verify_disjoint(
    mesh: DiscMesh,
    scene: BhvScene,
    s_min: float | None = None,
    height_buckets: int = 12,
) -> DisjointnessReport:
    """Minimum 4D distance from interior disc samples to wall samples.

    The s = 0 column lies on the walls by construction and is excluded;
    s_min defaults to one grid step. Keep s_min fixed when comparing
    across resolutions, otherwise the excluded collar shrinks with n and
    the minimum trends to zero for that reason alone.
    """
    if scene.meshes is None:
        raise ValueError("scene has no sampled wall meshes")
    if s_min is None:
        s_min = 1.0 / mesh.n
    l, h = mesh.band
    wall_pts = []
    wall_tags = []
    for wm in scene.meshes:
        cart = wm.cartesian()
        sel = (cart[:, 2] >= l) & (cart[:, 2] <= h)
        wall_pts.append(cart[sel])
        flat_idx = np.nonzero(sel)[0]
        wall_tags.extend((wm.vase_index, int(fi)) for fi in flat_idx)
    walls = np.concatenate(wall_pts, axis=0)
    if len(walls) == 0:
        return DisjointnessReport(
            passed=True,
            min_distance=math.inf,
            disc_sample=None,
            wall_sample=None,
            s_min=s_min,
            per_height_minima=(),
            wall_sample_count=0,
        )
    min_a = max(1, int(math.ceil(s_min * mesh.n - 1e-12)))
    disc_pts, coords = mesh.welded_points(min_a=min_a)
    tree = cKDTree(walls)
    dist, idx = tree.query(disc_pts)
    k = int(np.argmin(dist))
    zs = disc_pts[:, 2]
    buckets = []
    edges = np.linspace(l, h, height_buckets + 1)
    for b0, b1 in zip(edges[:-1], edges[1:]):
        sel = (zs >= b0) & (zs <= b1)
        if np.any(sel):
            buckets.append((float(b0), float(b1), float(np.min(dist[sel]))))
    return DisjointnessReport(
        passed=float(dist[k]) > 0.0,
        min_distance=float(dist[k]),
        disc_sample=tuple(coords[k]),
        wall_sample=wall_tags[int(idx[k])],
        s_min=s_min,
        per_height_minima=tuple(buckets),
        wall_sample_count=len(walls),
    )


def disjointness_refinement(
    alpha: AlphaPath,
    scene: BhvScene,
    n: int,
    relator_index: int = 0,
    bump: BumpG | None = None,
    stability_floor: float = 0.5,
) -> tuple[DisjointnessReport, DisjointnessReport, float, bool]:
    """Disjointness at resolution n and 2n with a shared s_min collar.

    Returns both reports, the minimum-distance ratio (finer / coarser),
    and whether the ratio clears the stability floor.
    """
    s_min = 1.0 / n
    coarse = verify_disjoint(build_disc(alpha, n, relator_index, bump), scene, s_min)
    fine = verify_disjoint(build_disc(alpha, 2 * n, relator_index, bump), scene, s_min)
    ratio = fine.min_distance / coarse.min_distance
    return coarse, fine, ratio, ratio >= stability_floor
