"""Geometry of a single oscillating vase.

A vase is the union of a flat pedestal disc of radius 3 in the plane
{z = 0, w = 0} and a wall: the surface

    r(phi, z) = (|phi| / pi) * sin(pi * osc / z) + 2,
    phi in [-pi, pi],  z in (0, height],

in cylindric coordinates, lifted to R^4 by a fourth coordinate
w = |phi| * w_i(z) when a braiding profile is attached (w = 0 otherwise).
The wall oscillates ever faster as z -> 0; the heights where the phi = pi
profile is innermost (sin = -1) are the "inner heights", with closed form
2 * osc / (4k + 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # only for annotations; avoids an import cycle
    from .braid import WProfile

PEDESTAL_RADIUS = 3.0


class SampleBudgetError(RuntimeError):
    """Raised when a mesh build would exceed its sample budget."""


@dataclass(frozen=True)
class VaseParams:
    """height: wall extent in z. osc: oscillation parameter of the ripple."""

    height: float
    osc: float

    def __post_init__(self) -> None:
        if not self.height > 0:
            raise ValueError(f"height must be positive, got {self.height}")
        if not self.osc > 0:
            raise ValueError(f"osc must be positive, got {self.osc}")


@dataclass(frozen=True)
class CylPoint4:
    """Point in cylindric 4D coordinates (r, phi, z, w)."""

    r: float
    phi: float
    z: float
    w: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.phi) > math.pi + 1e-12:
            raise ValueError(f"phi must lie in [-pi, pi], got {self.phi}")

    def cartesian(self) -> np.ndarray:
        return np.array(
            [
                self.r * math.cos(self.phi),
                self.r * math.sin(self.phi),
                self.z,
                self.w,
            ]
        )


def cyl_to_cartesian(points: np.ndarray) -> np.ndarray:
    """Map an (..., 4) array of (r, phi, z, w) to Cartesian (x, y, z, w)."""
    pts = np.asarray(points, dtype=float)
    out = np.empty_like(pts)
    out[..., 0] = pts[..., 0] * np.cos(pts[..., 1])
    out[..., 1] = pts[..., 0] * np.sin(pts[..., 1])
    out[..., 2] = pts[..., 2]
    out[..., 3] = pts[..., 3]
    return out


def wall_radius(osc: float, phi, z):
    """Radius of the wall at angle phi and height z.

    Accepts scalars or arrays; the result always lies in [1, 3].
    """
    phi_arr = np.asarray(phi, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0):
        raise ValueError("wall_radius needs z > 0")
    if np.any(np.abs(phi_arr) > math.pi + 1e-9):
        raise ValueError("wall_radius needs phi in [-pi, pi]")
    r = (np.abs(phi_arr) / math.pi) * np.sin(math.pi * osc / z_arr) + 2.0
    if r.ndim == 0:
        return float(r)
    return r


def inner_heights(vase: VaseParams, count: int) -> list[float]:
    """The `count` largest heights h <= height with sin(pi*osc/h) = -1.

    Closed form h = 2*osc / (4k + 3), descending in k.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    k = 0
    while 2.0 * vase.osc / (4 * k + 3) > vase.height:
        k += 1
    return [2.0 * vase.osc / (4 * kk + 3) for kk in range(k, k + count)]


def inner_heights_bisection(vase: VaseParams, count: int) -> list[float]:
    """Independent root-finding oracle for inner_heights.

    Each inner height is a zero of cos(pi*osc/z) where the sine is
    negative. In u = osc/z the candidate brackets are (2k+1, 2k+2), on
    which cos(pi*u) rises monotonically from -1 to +1; plain bisection in
    z then converges to machine precision. No closed-form height enters.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    found: list[float] = []
    k = 0
    while len(found) < count:
        z_lo = vase.osc / (2 * k + 2)
        z_hi = vase.osc / (2 * k + 1)
        k += 1
        if z_lo > vase.height:
            continue
        z_hi = min(z_hi, vase.height)
        f_lo = math.cos(math.pi * vase.osc / z_lo)
        if math.cos(math.pi * vase.osc / z_hi) * f_lo > 0:
            continue  # bracket clipped past the root by the height cap
        lo, hi = z_lo, z_hi
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if math.cos(math.pi * vase.osc / mid) * f_lo > 0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        if math.sin(math.pi * vase.osc / root) < 0:
            found.append(root)
    return found


def inner_curve(vase: VaseParams, c: float, samples: int) -> np.ndarray:
    """Closed wall section at height c as (samples, 4) cylindric points, w = 0.

    The first and last samples sit at phi = -pi and phi = +pi, the same
    Cartesian point.
    """
    if not 0 < c <= vase.height:
        raise ValueError(f"section height {c} outside (0, {vase.height}]")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    phi = np.linspace(-math.pi, math.pi, samples)
    out = np.empty((samples, 4))
    out[:, 0] = wall_radius(vase.osc, phi, c)
    out[:, 1] = phi
    out[:, 2] = c
    out[:, 3] = 0.0
    return out


def pedestal_contains(pt: CylPoint4) -> bool:
    """True iff the point lies on the pedestal disc {z = 0, w = 0, r <= 3}."""
    return pt.z == 0.0 and pt.w == 0.0 and pt.r <= PEDESTAL_RADIUS


def adaptive_z_grid(
    osc: float,
    top: float,
    z_min: float,
    oversample: int,
    budget: int = 5_000_000,
) -> np.ndarray:
    """Strictly decreasing height grid over (z_min, top].

    The wall's local oscillation period near height z is about
    2 * z**2 / osc, so the step is capped at that period divided by the
    oversample factor. A uniform grid would alias the wall as z -> 0.
    """
    if not 0 < z_min < top:
        raise ValueError(f"need 0 < z_min < top, got z_min={z_min}, top={top}")
    if oversample < 4:
        raise ValueError("oversample must be >= 4")
    # Closed-form bound on the step count, checked before any allocation.
    est = 0.5 * osc * oversample * (1.0 / z_min - 1.0 / top) + 2
    if est > budget:
        raise SampleBudgetError(
            f"adaptive grid would need ~{int(est)} rows, budget {budget}"
        )
    zs = [top]
    z = top
    while True:
        step = 2.0 * z * z / (osc * oversample)
        z = z - step
        if z <= z_min:
            break
        zs.append(z)
    return np.array(zs)


@dataclass(frozen=True)
class WallMesh:
    """Sampled wall of one vase.

    phi: (n_phi + 1,) angles from -pi to pi inclusive; the two end columns
        are the same Cartesian points and are welded at export time.
    z: strictly decreasing heights in (z_min, height].
    radius, w: (len(z), len(phi)) sample arrays satisfying the wall
        equation and w = |phi| * w_i(z) at every grid node.
    """

    vase_index: int
    osc: float
    height: float
    z_min: float
    phi: np.ndarray
    z: np.ndarray
    radius: np.ndarray
    w: np.ndarray

    @property
    def sample_count(self) -> int:
        return self.radius.size

    @property
    def welded_vertex_count(self) -> int:
        return len(self.z) * (len(self.phi) - 1)

    def cylindric(self) -> np.ndarray:
        """All samples as an (n, 4) array of (r, phi, z, w)."""
        nz, nphi = self.radius.shape
        out = np.empty((nz, nphi, 4))
        out[..., 0] = self.radius
        out[..., 1] = self.phi[np.newaxis, :]
        out[..., 2] = self.z[:, np.newaxis]
        out[..., 3] = self.w
        return out.reshape(-1, 4)

    def cartesian(self) -> np.ndarray:
        return cyl_to_cartesian(self.cylindric())


def sample_wall(
    vase: VaseParams,
    profile: "WProfile | None",
    vase_index: int,
    phi_steps: int = 64,
    oversample: int = 8,
    z_min: float = 0.01,
    budget: int = 5_000_000,
) -> WallMesh:
    """Sample the wall on an adaptive height grid.

    With a braiding profile the fourth coordinate is |phi| * w_i(z);
    without one it is identically zero.
    """
    from .braid import w_eval  # local import: braid builds on this module

    zs = adaptive_z_grid(vase.osc, vase.height, z_min, oversample, budget)
    phi = np.linspace(-math.pi, math.pi, phi_steps + 1)
    if len(zs) * len(phi) > budget:
        raise SampleBudgetError(
            f"mesh would hold {len(zs) * len(phi)} samples, budget {budget}"
        )
    radius = np.empty((len(zs), len(phi)))
    w = np.zeros_like(radius)
    sin_vals = np.sin(math.pi * vase.osc / zs)
    radius[:] = (np.abs(phi)[np.newaxis, :] / math.pi) * sin_vals[:, np.newaxis] + 2.0
    if profile is not None:
        w[:] = np.abs(phi)[np.newaxis, :] * w_eval(profile, zs)[:, np.newaxis]
    return WallMesh(
        vase_index=vase_index,
        osc=vase.osc,
        height=vase.height,
        z_min=z_min,
        phi=phi,
        z=zs,
        radius=radius,
        w=w,
    )
