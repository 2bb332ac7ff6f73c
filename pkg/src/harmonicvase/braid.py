"""Braiding a family of vases into R^4 without unwanted intersections.

Vase i has height 1/i and oscillation parameter p_i. In R^3 the walls of
vases i and j would intersect at the heights where their ripples agree:

    sin(pi * p_i / z) = sin(pi * p_j / z)
    =>  z = (p_i - p_j) / (2k)    (k nonzero integer)   "diff family"
        z = (p_i + p_j) / (2k+1)  (k integer)           "sum family"

The braiding lifts vase i by the fourth coordinate |phi| * w_i(z), where
the profile w_i vanishes near vase i's inner heights, stays strictly
below z, and differs from every other profile at each shared intersection
height. Choosing p_i = sqrt(i-th prime) keeps inner heights away from
intersection heights; this module verifies that numerically with an
explicit margin instead of assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal, getcontext

import numpy as np

from .config import Tolerances
from .vase import VaseParams, WallMesh, inner_heights, sample_wall

_DECIMAL_DIGITS = 55
_REPAIR_FACTOR = math.exp(-1.0 / 34.0)  # irrational shrink, about 0.971


class CoincidenceError(RuntimeError):
    """Raised when profile repair cannot separate colliding profile values."""


def _first_primes(n: int) -> list[int]:
    primes: list[int] = []
    candidate = 2
    while len(primes) < n:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


@dataclass(frozen=True)
class PSequence:
    """Oscillation parameters as high-precision decimal strings.

    Geometry is evaluated from the float values; the decimal strings make
    scene files reproducible across platforms.
    """

    decimals: tuple[str, ...]
    provenance: str
    verified_no_coincidence: bool = False

    def __post_init__(self) -> None:
        if not self.decimals:
            raise ValueError("empty parameter sequence")
        vals = self.floats
        if any(v <= 0 for v in vals):
            raise ValueError("parameters must be positive")
        if len(set(vals)) != len(vals):
            raise ValueError("parameters must be pairwise distinct")

    @property
    def floats(self) -> tuple[float, ...]:
        return tuple(float(Decimal(d)) for d in self.decimals)

    def __len__(self) -> int:
        return len(self.decimals)

    def mark_verified(self) -> "PSequence":
        return replace(self, verified_no_coincidence=True)


def choose_p_sequence(count: int) -> PSequence:
    """Square roots of the first `count` primes, to 50+ significant digits."""
    if count < 1:
        raise ValueError("count must be >= 1")
    ctx = getcontext().copy()
    ctx.prec = _DECIMAL_DIGITS
    decimals = tuple(str(ctx.sqrt(Decimal(p))) for p in _first_primes(count))
    return PSequence(decimals=decimals, provenance="sqrt-prime")


def intersection_heights(
    p_hi: float, p_lo: float, index_hi: int, z_floor: float
) -> list[float]:
    """Heights in [z_floor, 1/index_hi] where the two walls would meet in R^3.

    The full set accumulates at 0, hence the explicit floor. Sorted
    descending; the two closed-form families are merged and deduplicated.
    """
    if p_hi == p_lo:
        raise ValueError("intersection heights need distinct parameters")
    if index_hi < 1:
        raise ValueError("index_hi must be >= 1")
    if not z_floor > 0:
        raise ValueError("z_floor must be positive")
    top = 1.0 / index_hi
    points: list[float] = []
    diff = abs(p_hi - p_lo)
    k = 1
    while diff / (2 * k) > top:
        k += 1
    while diff / (2 * k) >= z_floor:
        points.append(diff / (2 * k))
        k += 1
    total = p_hi + p_lo
    n = 1
    while total / n > top:
        n += 2
    while total / n >= z_floor:
        points.append(total / n)
        n += 2
    points.sort(reverse=True)
    out: list[float] = []
    for z in points:
        if not out or abs(out[-1] - z) > 1e-13 * max(1.0, z):
            out.append(z)
    return out


def scan_intersection_heights(
    p_hi: float,
    p_lo: float,
    index_hi: int,
    z_floor: float,
    step_u: float = 2e-4,
) -> list[float]:
    """Sign-change oracle for intersection_heights, no closed form used.

    Scans f(u) = sin(pi*p_hi*u) - sin(pi*p_lo*u) on u = 1/z in
    [index_hi, 1/z_floor] and bisects every sign change to machine
    precision. The step must undercut the closest root spacing; 2e-4
    is comfortably below the observed minimum gap for the sqrt-prime
    parameters at desk scale.
    """

    def f(u: np.ndarray | float):
        return np.sin(math.pi * p_hi * u) - np.sin(math.pi * p_lo * u)

    u_lo, u_hi = float(index_hi), 1.0 / z_floor
    n = int(math.ceil((u_hi - u_lo) / step_u)) + 1
    grid = np.linspace(u_lo, u_hi, n)
    vals = f(grid)
    signs = np.sign(vals)
    # Treat exact zeros (vanishingly rare) as positive to keep brackets clean.
    signs[signs == 0] = 1.0
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    roots_u: list[float] = []
    for i in idx:
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = float(f(lo))
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if f_lo * float(f(mid)) > 0:
                lo = mid
            else:
                hi = mid
        roots_u.append(0.5 * (lo + hi))
    return sorted((1.0 / u for u in roots_u), reverse=True)


@dataclass(frozen=True)
class IndependenceReport:
    passed: bool
    min_gap: float
    tolerance: float
    depth: int
    location: tuple[int, int, float, float] | None
    """(vase i, vase j, inner height, intersection height) attaining min_gap."""


def verify_independence(
    ps: PSequence, depth: int = 50, tolerance: float = 1e-9
) -> IndependenceReport:
    """Check that no inner height collides with an intersection height.

    For every pair j < i, compares the first `depth` inner heights of
    vase i with every intersection height of the pair down to the
    smallest of them. A pass certifies the gap at the checked depth
    only; it is a margin report, not an algebraic proof.
    """
    values = ps.floats
    min_gap = math.inf
    where: tuple[int, int, float, float] | None = None
    for i in range(2, len(values) + 1):
        vase = VaseParams(height=1.0 / i, osc=values[i - 1])
        heights = inner_heights(vase, depth)
        floor = heights[-1]
        for j in range(1, i):
            pts = intersection_heights(values[i - 1], values[j - 1], i, floor)
            for h in heights:
                for z in pts:
                    gap = abs(h - z)
                    if gap < min_gap:
                        min_gap = gap
                        where = (i, j, h, z)
    passed = min_gap > tolerance
    return IndependenceReport(
        passed=passed,
        min_gap=min_gap,
        tolerance=tolerance,
        depth=depth,
        location=where,
    )


@dataclass(frozen=True)
class ZeroInterval:
    """Closed interval [center - radius, center + radius] where w_i = 0,
    with a linear ramp of the given width just outside it."""

    center: float
    radius: float
    ramp: float

    def __post_init__(self) -> None:
        if self.radius <= 0 or self.ramp <= 0:
            raise ValueError("interval radius and ramp must be positive")

    @property
    def lo(self) -> float:
        return self.center - self.radius

    @property
    def hi(self) -> float:
        return self.center + self.radius


@dataclass(frozen=True)
class WProfile:
    """Braiding profile of one vase: amplitude plus zero intervals.

    w_i(z) is theta * z away from the intervals, zero on them, and
    linearly ramped in between, so |phi| * w_i(z) <= pi * theta * z < z
    for every angle once theta < 1/pi.
    """

    vase_index: int
    theta: float
    intervals: tuple[ZeroInterval, ...]
    z_min: float

    def __post_init__(self) -> None:
        if self.vase_index < 1:
            raise ValueError("vase_index must be >= 1")
        if not 0 < self.theta < 1.0 / math.pi:
            raise ValueError("theta must lie in (0, 1/pi)")
        top = 1.0 / self.vase_index
        ordered = sorted(self.intervals, key=lambda iv: -iv.center)
        for iv in ordered:
            if iv.lo <= 0 or iv.hi > top + 1e-15:
                raise ValueError(
                    f"interval [{iv.lo}, {iv.hi}] outside (0, {top}]"
                )
        for above, below in zip(ordered, ordered[1:]):
            if below.hi >= above.lo:
                raise ValueError("zero intervals must be disjoint")

    @property
    def height(self) -> float:
        return 1.0 / self.vase_index

    def interval_for(self, z: float) -> ZeroInterval | None:
        for iv in self.intervals:
            if iv.lo <= z <= iv.hi:
                return iv
        return None


def w_eval(profile: WProfile, z):
    """Profile value: 0 on zero intervals, theta*z on plateaus, ramped between."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0) or np.any(z_arr > profile.height + 1e-12):
        raise ValueError(
            f"height outside (0, {profile.height}] for vase {profile.vase_index}"
        )
    factor = np.ones_like(z_arr)
    for iv in profile.intervals:
        dist = np.maximum(0.0, np.abs(z_arr - iv.center) - iv.radius)
        factor = np.minimum(factor, np.minimum(1.0, dist / iv.ramp))
    out = profile.theta * z_arr * factor
    if out.ndim == 0:
        return float(out)
    return out


def collect_h_sets(
    ps: PSequence, z_min: float
) -> dict[tuple[int, int], list[float]]:
    """Intersection heights for every pair (i, j), j < i, down to z_min."""
    values = ps.floats
    out: dict[tuple[int, int], list[float]] = {}
    for i in range(2, len(values) + 1):
        for j in range(1, i):
            out[(i, j)] = intersection_heights(
                values[i - 1], values[j - 1], i, z_min
            )
    return out


def _carve_intervals(
    vase_index: int,
    osc: float,
    z_min: float,
    blockers: list[float],
) -> tuple[ZeroInterval, ...]:
    """Zero intervals around each inner height above z_min.

    Radius: at most half the distance to the nearest blocking height
    (any intersection height involving this vase), at most a quarter of
    the gap to the adjacent inner heights, and the interval stays inside
    (0, 1/vase_index]. The ramp is half the radius, which keeps every
    blocker on the full plateau: a blocker sits at distance >= 2*radius
    from the center, hence >= radius = 2*ramp outside the interval.
    """
    top = 1.0 / vase_index
    vase = VaseParams(height=top, osc=osc)
    heights: list[float] = []
    k = 0
    while True:
        h = inner_heights(vase, k + 1)[-1]
        if h < z_min:
            break
        heights.append(h)
        k += 1
    intervals = []
    for idx, h in enumerate(heights):
        gap_up = (top - h) if idx == 0 else (heights[idx - 1] - h) / 4.0
        # The next inner height below always exists in closed form.
        below = inner_heights(vase, idx + 2)[-1] if idx + 1 >= len(heights) else heights[idx + 1]
        gap_dn = (h - below) / 4.0
        radius = min(gap_up, gap_dn)
        if blockers:
            nearest = min(abs(h - b) for b in blockers)
            radius = min(radius, nearest / 2.0)
        if radius <= 0:
            raise CoincidenceError(
                f"vase {vase_index}: inner height {h} has no room for a zero interval"
            )
        intervals.append(ZeroInterval(center=h, radius=radius, ramp=radius / 2.0))
    return tuple(intervals)


def build_w_profiles(
    ps: PSequence,
    z_min: float,
    tolerances: Tolerances | None = None,
    max_repairs: int = 32,
) -> tuple[WProfile, ...]:
    """Construct braiding profiles for all vases jointly and verify them.

    Amplitudes start at theta_i = 1/(pi*(i+1)). If two profiles agree to
    within the coincidence tolerance at some shared intersection height,
    the higher-indexed amplitude is shrunk by an irrational factor and
    the check reruns, at most `max_repairs` times.
    """
    tol = tolerances or Tolerances()
    values = ps.floats
    n = len(values)
    h_sets = collect_h_sets(ps, z_min)
    # Blockers for vase i: every intersection height of a pair containing i.
    blockers: dict[int, list[float]] = {i: [] for i in range(1, n + 1)}
    for (i, j), pts in h_sets.items():
        blockers[i].extend(pts)
        blockers[j].extend(pts)
    thetas = [1.0 / (math.pi * (i + 1)) for i in range(1, n + 1)]
    intervals = [
        _carve_intervals(i, values[i - 1], z_min, blockers[i])
        for i in range(1, n + 1)
    ]

    def make_profiles() -> tuple[WProfile, ...]:
        return tuple(
            WProfile(
                vase_index=i,
                theta=thetas[i - 1],
                intervals=intervals[i - 1],
                z_min=z_min,
            )
            for i in range(1, n + 1)
        )

    last_collision: tuple[int, int, float] | None = None
    for _ in range(max_repairs + 1):
        profiles = make_profiles()
        last_collision = _find_profile_collision(profiles, h_sets, tol.coincidence)
        if last_collision is None:
            return profiles
        thetas[last_collision[0] - 1] *= _REPAIR_FACTOR
    raise CoincidenceError(
        f"profile repair budget ({max_repairs}) exhausted; "
        f"last collision at vase pair {last_collision[:2]}, z = {last_collision[2]}"
    )


def _find_profile_collision(
    profiles: tuple[WProfile, ...],
    h_sets: dict[tuple[int, int], list[float]],
    tolerance: float,
) -> tuple[int, int, float] | None:
    for (i, j), pts in h_sets.items():
        pi_, pj_ = profiles[i - 1], profiles[j - 1]
        for z in pts:
            if abs(w_eval(pi_, z) - w_eval(pj_, z)) <= tolerance:
                return (i, j, z)
    return None


@dataclass(frozen=True)
class ProfileReport:
    passed: bool
    amplitude_ok: bool
    separation_ok: bool
    zeros_ok: bool
    min_separation: float
    max_w_over_z: float
    details: tuple[str, ...]


def verify_profile_conditions(
    profiles: tuple[WProfile, ...],
    ps: PSequence,
    z_min: float,
    tolerances: Tolerances | None = None,
    samples_per_vase: int = 2048,
) -> ProfileReport:
    """Re-check the three profile conditions from the stored data alone.

    (1) |phi| * w_i(z) < z for all angles: equivalent to pi*theta_i < 1,
        checked on a sample grid as pi * w_i(z) < z.
    (2) profiles differ at every shared intersection height.
    (3) w_i vanishes on declared intervals, and every inner height above
        the cutoff lies inside exactly one declared interval.
    """
    tol = tolerances or Tolerances()
    details: list[str] = []
    amplitude_ok = True
    max_ratio = 0.0
    for prof in profiles:
        zs = np.linspace(z_min, prof.height, samples_per_vase)
        w = np.asarray(w_eval(prof, zs))
        ratio = float(np.max(math.pi * w / zs))
        max_ratio = max(max_ratio, ratio)
        if ratio >= 1.0:
            amplitude_ok = False
            details.append(f"vase {prof.vase_index}: pi*w/z reaches {ratio}")
    h_sets = collect_h_sets(ps, z_min)
    min_sep = math.inf
    separation_ok = True
    for (i, j), pts in h_sets.items():
        for z in pts:
            gap = abs(w_eval(profiles[i - 1], z) - w_eval(profiles[j - 1], z))
            min_sep = min(min_sep, gap)
            if gap <= tol.coincidence:
                separation_ok = False
                details.append(
                    f"profiles {i} and {j} agree to {gap} at z = {z}"
                )
    zeros_ok = True
    for prof in profiles:
        vase = VaseParams(height=prof.height, osc=ps.floats[prof.vase_index - 1])
        k = 0
        while True:
            h = inner_heights(vase, k + 1)[-1]
            if h < z_min:
                break
            k += 1
            hosts = [iv for iv in prof.intervals if iv.lo <= h <= iv.hi]
            if len(hosts) != 1:
                zeros_ok = False
                details.append(
                    f"vase {prof.vase_index}: inner height {h} in "
                    f"{len(hosts)} declared intervals"
                )
                continue
            if w_eval(prof, h) != 0.0:
                zeros_ok = False
                details.append(
                    f"vase {prof.vase_index}: w({h}) = {w_eval(prof, h)} != 0"
                )
    passed = amplitude_ok and separation_ok and zeros_ok
    return ProfileReport(
        passed=passed,
        amplitude_ok=amplitude_ok,
        separation_ok=separation_ok,
        zeros_ok=zeros_ok,
        min_separation=min_sep,
        max_w_over_z=max_ratio,
        details=tuple(details),
    )


@dataclass(frozen=True)
class BhvScene:
    """Braided family of vases, optionally with sampled wall meshes."""

    ps: PSequence
    profiles: tuple[WProfile, ...]
    z_min: float
    phi_steps: int
    oversample: int
    meshes: tuple[WallMesh, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.profiles) != len(self.ps):
            raise ValueError("one profile per parameter required")

    @property
    def vase_count(self) -> int:
        return len(self.ps)

    def vase(self, index: int) -> VaseParams:
        return VaseParams(height=1.0 / index, osc=self.ps.floats[index - 1])

    def profile(self, index: int) -> WProfile:
        return self.profiles[index - 1]


def build_bhv(
    ps: PSequence,
    profiles: tuple[WProfile, ...],
    z_min: float,
    phi_steps: int = 64,
    oversample: int = 8,
    with_meshes: bool = True,
    budget: int = 5_000_000,
) -> BhvScene:
    """Assemble the braided scene; vase i gets height 1/i."""
    meshes = None
    if with_meshes:
        built = []
        for i in range(1, len(ps) + 1):
            built.append(
                sample_wall(
                    VaseParams(height=1.0 / i, osc=ps.floats[i - 1]),
                    profiles[i - 1],
                    i,
                    phi_steps=phi_steps,
                    oversample=oversample,
                    z_min=z_min,
                    budget=budget,
                )
            )
        meshes = tuple(built)
    return BhvScene(
        ps=ps,
        profiles=profiles,
        z_min=z_min,
        phi_steps=phi_steps,
        oversample=oversample,
        meshes=meshes,
    )


@dataclass(frozen=True)
class SeparationReport:
    min_distance: float
    vase_pair: tuple[int, int] | None
    phi: float | None
    z: float | None
    phi_samples: int
    z_samples: int


def min_wall_separation(
    scene: BhvScene,
    phi_exclusion: float,
    z_window: tuple[float, float] | None = None,
    phi_samples: int = 64,
    z_samples: int = 512,
) -> SeparationReport:
    """Minimum 4D distance between walls of distinct vases at shared (phi, z).

    Sampled over |phi| >= phi_exclusion; the height grid always includes
    the closed-form intersection heights, where the radial gap vanishes
    and the distance reduces to |phi| * |w_i - w_j|. With exclusion 0 the
    shared line {r = 2, phi = 0, w = 0} makes the distance 0 by design.
    """
    if phi_exclusion < 0:
        raise ValueError("phi_exclusion must be >= 0")
    z_lo = scene.z_min if z_window is None else max(z_window[0], scene.z_min)
    z_hi = 1.0 if z_window is None else z_window[1]
    if phi_exclusion >= math.pi:
        raise ValueError("phi_exclusion must be < pi")
    if phi_exclusion > 0:
        half = np.linspace(phi_exclusion, math.pi, phi_samples)
        phis = np.concatenate([-half[::-1], half])
    else:
        phis = np.linspace(-math.pi, math.pi, 2 * phi_samples + 1)
    values = scene.ps.floats
    best = math.inf
    where: tuple[int, int] | None = None
    at_phi = at_z = None
    for i in range(2, scene.vase_count + 1):
        for j in range(1, i):
            top = min(1.0 / i, z_hi)
            if top <= z_lo:
                continue
            zs = np.linspace(z_lo, top, z_samples)
            special = [
                z
                for z in intersection_heights(values[i - 1], values[j - 1], i, z_lo)
                if z <= top
            ]
            for vase_idx in (i, j):
                prof = scene.profile(vase_idx)
                special.extend(
                    iv.center for iv in prof.intervals if z_lo <= iv.center <= top
                )
            if special:
                zs = np.unique(np.concatenate([zs, np.array(special)]))
            sin_i = np.sin(math.pi * values[i - 1] / zs)
            sin_j = np.sin(math.pi * values[j - 1] / zs)
            w_i = np.asarray(w_eval(scene.profile(i), zs))
            w_j = np.asarray(w_eval(scene.profile(j), zs))
            abs_phi = np.abs(phis)[:, np.newaxis]
            dr = (abs_phi / math.pi) * (sin_i - sin_j)[np.newaxis, :]
            dw = abs_phi * (w_i - w_j)[np.newaxis, :]
            dist = np.hypot(dr, dw)
            flat = int(np.argmin(dist))
            d = float(dist.flat[flat])
            if d < best:
                best = d
                where = (i, j)
                pi_idx, z_idx = np.unravel_index(flat, dist.shape)
                at_phi = float(phis[pi_idx])
                at_z = float(zs[z_idx])
    return SeparationReport(
        min_distance=best,
        vase_pair=where,
        phi=at_phi,
        z=at_z,
        phi_samples=len(phis),
        z_samples=z_samples,
    )
