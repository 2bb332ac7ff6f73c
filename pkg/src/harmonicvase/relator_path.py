"""Descending paths that realize relator words on the braided walls.

A word g_{j(1)}^{s_1} ... g_{j(k)}^{s_k} becomes a path that alternates
vertical drops along the shared line {r = 2, phi = 0, w = 0} with full
angular loops on the wall of vase j(i), each loop run inside a zero
interval of that vase's braiding profile (so its fourth coordinate
vanishes) while the height keeps strictly decreasing. Loops sweep the
angle through +-pi rather than back through 0, so each one is a genuine
generator of its vase's circle.

decode_word inverts the construction from the sampled polyline alone,
never consulting the builder's segment metadata; it is the independent
check that an attached disc realizes the intended word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .braid import BhvScene, w_eval
from .vase import wall_radius

AXIS_RADIUS = 2.0
_PHI_AXIS_TOL = 1e-12


class HeadroomError(RuntimeError):
    """Word cannot be scheduled above the height cutoff."""

    def __init__(self, message: str, letters_placed: int, required_depth: float):
        super().__init__(message)
        self.letters_placed = letters_placed
        self.required_depth = required_depth


class DecodeError(RuntimeError):
    """Polyline cannot be decoded into a word."""


class UnmatchedEpisodeError(DecodeError):
    pass


class AmbiguousEpisodeError(DecodeError):
    def __init__(self, message: str, candidates: tuple[int, ...]):
        super().__init__(message)
        self.candidates = candidates


@dataclass(frozen=True)
class PathSegment:
    """One piece of a relator path.

    kind "vertical": a drop on the axis line between z_start and z_end.
    kind "loop": a full angular sweep on vase `vase_index`, entering at
    z_start and exiting at z_end inside the zero interval around
    `inner_height`, with the given orientation.
    """

    kind: str
    z_start: float
    z_end: float
    vase_index: int | None = None
    inner_height: float | None = None
    orientation: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("vertical", "loop"):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if not self.z_start > self.z_end:
            raise ValueError("segments must strictly descend")
        if self.kind == "loop" and (
            self.vase_index is None
            or self.inner_height is None
            or self.orientation not in (1, -1)
        ):
            raise ValueError("loop segments need vase, inner height, orientation")


@dataclass(frozen=True)
class ScheduledLoop:
    vase_index: int
    inner_height: float
    radius: float
    z_in: float
    z_out: float


@dataclass(frozen=True)
class AlphaPath:
    """Sampled relator path from (r=2, phi=0, z=start, w=0) down to z=terminal.

    polyline holds cylindric rows (r, phi, z, w) with strictly decreasing z.
    """

    segments: tuple[PathSegment, ...]
    polyline: np.ndarray
    start_height: float
    terminal_height: float


def schedule_inner_heights(
    scene: BhvScene, word, start_height: float
) -> list[ScheduledLoop]:
    """Pick one inner height per letter, greedily and strictly descending.

    Each pick is the largest inner height of the letter's vase whose zero
    interval clears the previous pick by the sum of both interval radii
    (and clears the starting height entirely for the first letter), and
    whose interval stays above the scene cutoff.
    """
    loops: list[ScheduledLoop] = []
    prev_a: float | None = None
    prev_rho = 0.0
    for pos, (gen, _sign) in enumerate(word):
        if not 1 <= gen <= scene.vase_count:
            raise ValueError(f"letter {pos + 1}: no vase {gen} in scene")
        profile = scene.profile(gen)
        picked = None
        deepest = math.inf
        for iv in profile.intervals:
            a, rho = iv.center, iv.radius
            deepest = min(deepest, a - rho)
            if a - rho <= scene.z_min:
                continue
            if prev_a is None:
                ok = a + rho < start_height
            else:
                ok = prev_a - a >= prev_rho + rho
            if ok:
                picked = ScheduledLoop(
                    vase_index=gen,
                    inner_height=a,
                    radius=rho,
                    z_in=a + rho / 2.0,
                    z_out=a - rho / 2.0,
                )
                break
        if picked is None:
            raise HeadroomError(
                f"letter {pos + 1} of {len(word)} (generator {gen}) does not fit "
                f"between height {prev_a if prev_a is not None else start_height} "
                f"and cutoff {scene.z_min}; the word needs a cutoff below {deepest}",
                letters_placed=pos,
                required_depth=deepest,
            )
        loops.append(picked)
        prev_a, prev_rho = picked.inner_height, picked.radius
    return loops


def _vertical_rows(z_from: float, z_to: float, samples: int) -> np.ndarray:
    zs = np.linspace(z_from, z_to, max(2, samples))
    rows = np.zeros((len(zs), 4))
    rows[:, 0] = AXIS_RADIUS
    rows[:, 2] = zs
    return rows


def _loop_rows(
    scene: BhvScene, loop: ScheduledLoop, orientation: int, samples: int
) -> np.ndarray:
    """Full angular sweep 0 -> +-pi == -+pi -> 0 with z falling linearly.

    The sweep stays inside the zero interval, so w = |phi| * w(z) = 0 and
    the radius follows the vase's wall equation exactly.
    """
    n = max(8, samples)
    if n % 2:
        n += 1
    tau = np.arange(n + 1) / n
    phi = orientation * 2.0 * math.pi * tau
    phi[tau > 0.5] -= orientation * 2.0 * math.pi
    zs = loop.z_in + (loop.z_out - loop.z_in) * tau
    profile = scene.profile(loop.vase_index)
    w = np.abs(phi) * np.asarray(w_eval(profile, zs))
    rows = np.empty((n + 1, 4))
    rows[:, 0] = wall_radius(scene.vase(loop.vase_index).osc, phi, zs)
    rows[:, 1] = phi
    rows[:, 2] = zs
    rows[:, 3] = w
    return rows


def build_alpha(
    scene: BhvScene,
    word,
    start_height: float,
    loop_samples: int = 128,
    vertical_samples: int = 16,
) -> AlphaPath:
    """Build the descending path realizing `word` from `start_height`."""
    if not 0 < start_height <= 1.0:
        raise ValueError("start_height must lie in (0, 1]")
    loops = schedule_inner_heights(scene, word, start_height)
    segments: list[PathSegment] = []
    chunks: list[np.ndarray] = []
    start = np.array([[AXIS_RADIUS, 0.0, start_height, 0.0]])
    chunks.append(start)
    cur = start_height
    for (gen, sign), loop in zip(word, loops):
        segments.append(
            PathSegment(kind="vertical", z_start=cur, z_end=loop.z_in)
        )
        chunks.append(_vertical_rows(cur, loop.z_in, vertical_samples)[1:])
        segments.append(
            PathSegment(
                kind="loop",
                z_start=loop.z_in,
                z_end=loop.z_out,
                vase_index=gen,
                inner_height=loop.inner_height,
                orientation=sign,
            )
        )
        chunks.append(_loop_rows(scene, loop, sign, loop_samples)[1:])
        cur = loop.z_out
    polyline = np.concatenate(chunks, axis=0)
    return AlphaPath(
        segments=tuple(segments),
        polyline=polyline,
        start_height=start_height,
        terminal_height=cur,
    )


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    first_violation: int | None
    """Index of the first sample whose z does not strictly decrease."""


def verify_monotone(path: AlphaPath) -> MonotoneReport:
    """Strict check that z decreases between consecutive samples."""
    z = path.polyline[:, 2]
    bad = np.nonzero(np.diff(z) >= 0)[0]
    if len(bad):
        return MonotoneReport(passed=False, first_violation=int(bad[0]) + 1)
    return MonotoneReport(passed=True, first_violation=None)


def _episodes(phi: np.ndarray) -> list[tuple[int, int]]:
    off_axis = np.abs(phi) > _PHI_AXIS_TOL
    runs: list[tuple[int, int]] = []
    start = None
    for idx, flag in enumerate(off_axis):
        if flag and start is None:
            start = idx
        elif not flag and start is not None:
            runs.append((start, idx))
            start = None
    if start is not None:
        runs.append((start, len(phi)))
    return runs


def decode_word(scene: BhvScene, polyline: np.ndarray, formula_tol: float = 1e-9):
    """Read the letter sequence back from a sampled path.

    Only the polyline and the scene's stored geometry are used. Loop
    episodes are maximal runs where the angle leaves 0; the owning vase
    is the unique one whose declared zero interval contains the episode's
    height range and whose wall equation reproduces the sampled radii.
    No free reduction is applied: the letters come back as traversed.
    """
    pts = np.asarray(polyline, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError("polyline must be an (n, 4) array of (r, phi, z, w)")
    letters = []
    for start, stop in _episodes(pts[:, 1]):
        phi = pts[start:stop, 1]
        zs = pts[start:stop, 2]
        radii = pts[start:stop, 0]
        peak = float(np.max(np.abs(phi)))
        if peak < math.pi - 0.5:
            raise UnmatchedEpisodeError(
                f"episode at samples {start}:{stop} never completes a sweep "
                f"(max |phi| = {peak})"
            )
        orientation = 1 if phi[0] > 0 else -1
        z_lo, z_hi = float(np.min(zs)), float(np.max(zs))
        candidates = []
        for vase_index in range(1, scene.vase_count + 1):
            profile = scene.profile(vase_index)
            hosted = any(iv.lo <= z_lo and z_hi <= iv.hi for iv in profile.intervals)
            if not hosted:
                continue
            expect = wall_radius(scene.vase(vase_index).osc, phi, zs)
            if float(np.max(np.abs(radii - expect))) < formula_tol:
                candidates.append(vase_index)
        if not candidates:
            raise UnmatchedEpisodeError(
                f"episode at samples {start}:{stop} (z in [{z_lo}, {z_hi}]) "
                "matches no vase"
            )
        if len(candidates) > 1:
            raise AmbiguousEpisodeError(
                f"episode at samples {start}:{stop} matches vases {candidates}",
                candidates=tuple(candidates),
            )
        letters.append((candidates[0], orientation))
    return tuple(letters)
