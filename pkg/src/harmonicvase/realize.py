"""Assembling the full realization scene and its verifiable consequences.

Given a presentation, the build starts from the braided vases (one per
generator, vase i of height 1/i), then walks down the z axis attaching
one disc per relator inside its own height band: relator k's path starts
just below the previous band and the next band starts just below where
it terminated. The bands are therefore outputs of the construction, and
discs are pairwise separated in z by design.

What cannot be computed (the fundamental group of the limit object) is
replaced by checkable consequences on truncations: for every cutoff, the
generators and decoded attaching words above it present a group whose
abelianization and finite-quotient counts must match the input
presentation truncated to the same relators. Agreement is evidence, not
an isomorphism proof, and the reports say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .braid import (
    BhvScene,
    build_bhv,
    build_w_profiles,
    choose_p_sequence,
    verify_independence,
)
from .config import BuildConfig
from .disc import BumpG, DiscMesh, build_disc
from .presentation import (
    FiniteGroupTable,
    Presentation,
    Word,
    count_homomorphisms,
    first_homology,
    standard_oracle_groups,
)
from .relator_path import AlphaPath, HeadroomError, build_alpha, decode_word

TOP_HEIGHT = 1.0


class ConstructionError(RuntimeError):
    """Scene build failed a structural precondition."""


@dataclass(frozen=True)
class BandSchedule:
    """Height bands hosting the attached discs.

    tops[0] is the overall ceiling; disc k spans [terminal[k], start[k]]
    and tops[k] = terminal[k] * (1 - margin) seals it from below, so
    tops[k] < terminal[k] <= start[k] < tops[k-1].
    """

    tops: tuple[float, ...]
    starts: tuple[float, ...]
    terminals: tuple[float, ...]

    def __post_init__(self) -> None:
        k = len(self.starts)
        if len(self.terminals) != k or len(self.tops) != k + 1:
            raise ValueError("band schedule lengths are inconsistent")
        for i in range(k):
            if not self.tops[i + 1] < self.terminals[i] <= self.starts[i] < self.tops[i]:
                raise ValueError(f"band {i + 1} is not nested in its slot")

    @property
    def count(self) -> int:
        return len(self.starts)


@dataclass(frozen=True)
class Scene:
    """Immutable result of a full build."""

    presentation: Presentation
    config: BuildConfig
    bhv: BhvScene
    alphas: tuple[AlphaPath, ...]
    discs: tuple[DiscMesh, ...]
    bands: BandSchedule

    @property
    def vase_count(self) -> int:
        return self.bhv.vase_count

    @property
    def z_min(self) -> float:
        return self.config.z_min

    def generator_name(self, index: int) -> str:
        names = self.presentation.names
        return names[index - 1] if index <= len(names) else f"g{index}"


def build_space(pres: Presentation, config: BuildConfig | None = None) -> Scene:
    """Build the scene for a presentation, deterministically for a config."""
    config = config or BuildConfig()
    n_vases = config.depth_gens or pres.generator_count
    if n_vases < pres.generator_count:
        raise ConstructionError(
            f"depth_gens={n_vases} is below the generator count "
            f"{pres.generator_count}"
        )
    relator_count = (
        len(pres.relators) if config.relator_count is None else config.relator_count
    )
    if not 0 <= relator_count <= len(pres.relators):
        raise ConstructionError(
            f"relator_count={relator_count} out of range 0..{len(pres.relators)}"
        )
    ps = choose_p_sequence(n_vases)
    indep = verify_independence(
        ps, depth=config.independence_depth, tolerance=config.tolerances.coincidence
    )
    if not indep.passed:
        raise ConstructionError(
            f"parameter sequence failed the coincidence check: min gap "
            f"{indep.min_gap} at {indep.location}"
        )
    ps = ps.mark_verified()
    profiles = build_w_profiles(ps, config.z_min, config.tolerances)
    bhv = build_bhv(
        ps,
        profiles,
        config.z_min,
        phi_steps=config.phi_steps,
        oversample=config.oversample,
        with_meshes=config.include_meshes,
        budget=config.sample_budget,
    )
    tops = [TOP_HEIGHT]
    starts: list[float] = []
    terminals: list[float] = []
    alphas: list[AlphaPath] = []
    discs: list[DiscMesh] = []
    bump = BumpG(margin=config.bump_margin)
    for k in range(relator_count):
        start = tops[-1] * (1.0 - config.band_margin)
        try:
            alpha = build_alpha(
                bhv,
                pres.relators[k],
                start,
                loop_samples=config.loop_samples,
                vertical_samples=config.vertical_samples,
            )
        except HeadroomError as exc:
            raise HeadroomError(
                f"only {k} of {relator_count} relators fit above z_min="
                f"{config.z_min}: {exc}",
                letters_placed=exc.letters_placed,
                required_depth=exc.required_depth,
            ) from exc
        alphas.append(alpha)
        starts.append(start)
        terminals.append(alpha.terminal_height)
        tops.append(alpha.terminal_height * (1.0 - config.band_margin))
        discs.append(
            build_disc(alpha, config.disc_resolution, relator_index=k + 1, bump=bump)
        )
    bands = BandSchedule(
        tops=tuple(tops), starts=tuple(starts), terminals=tuple(terminals)
    )
    return Scene(
        presentation=pres,
        config=config,
        bhv=bhv,
        alphas=tuple(alphas),
        discs=tuple(discs),
        bands=bands,
    )


@dataclass(frozen=True)
class TruncationComplex:
    """Combinatorial model of the scene above a height cutoff.

    Attaching words are decoded from the stored path polylines, not taken
    from build metadata, so the presentation below really was read off
    the geometry.
    """

    epsilon: float
    generator_indices: tuple[int, ...]
    disc_indices: tuple[int, ...]
    attaching_words: tuple[Word, ...]
    generator_names: tuple[str, ...]

    @property
    def presentation(self) -> Presentation:
        return Presentation(names=self.generator_names, relators=self.attaching_words)


def truncate(scene: Scene, epsilon: float) -> TruncationComplex:
    """Generators with 1/i >= epsilon plus discs terminating at or above it."""
    if not scene.z_min < epsilon <= 1.0:
        raise ValueError(
            f"epsilon must lie in ({scene.z_min}, 1], got {epsilon}"
        )
    gens = tuple(
        i for i in range(1, scene.vase_count + 1) if 1.0 / i >= epsilon
    )
    discs = tuple(
        k + 1
        for k in range(len(scene.discs))
        if scene.bands.terminals[k] >= epsilon
    )
    words = []
    for k in discs:
        decoded = decode_word(scene.bhv, scene.alphas[k - 1].polyline)
        if any(g not in gens for g, _ in decoded):
            raise ConstructionError(
                f"disc {k} decoded a generator outside the truncation at "
                f"epsilon={epsilon}"
            )
        words.append(decoded)
    names = tuple(scene.generator_name(i) for i in gens)
    return TruncationComplex(
        epsilon=epsilon,
        generator_indices=gens,
        disc_indices=discs,
        attaching_words=tuple(words),
        generator_names=names,
    )


@dataclass(frozen=True)
class Pi1Report:
    """Presentation-invariant comparison of a truncation with its target."""

    passed: bool
    h1_actual: tuple[int, tuple[int, ...]]
    h1_expected: tuple[int, tuple[int, ...]]
    hom_counts: tuple[tuple[str, int, int], ...]  # (group, actual, expected)
    generator_counts: tuple[int, int]
    note: str = (
        "homology and finite-quotient counts are presentation invariants; "
        "agreement is evidence for the group identification, not a proof"
    )


def pi1_report(
    tc: TruncationComplex,
    expected: Presentation,
    groups: tuple[FiniteGroupTable, ...] | None = None,
) -> Pi1Report:
    """Compare abelianization and homomorphism counts of the two presentations."""
    groups = groups or standard_oracle_groups()
    actual_pres = tc.presentation
    rank_a, tors_a = first_homology(actual_pres)
    rank_e, tors_e = first_homology(expected)
    counts = []
    ok = (rank_a, tors_a) == (rank_e, tors_e)
    ok = ok and actual_pres.generator_count == expected.generator_count
    for g in groups:
        ca = count_homomorphisms(actual_pres, g)
        ce = count_homomorphisms(expected, g)
        counts.append((g.name, ca, ce))
        ok = ok and ca == ce
    return Pi1Report(
        passed=ok,
        h1_actual=(rank_a, tuple(tors_a)),
        h1_expected=(rank_e, tuple(tors_e)),
        hom_counts=tuple(counts),
        generator_counts=(actual_pres.generator_count, expected.generator_count),
    )


@dataclass(frozen=True)
class LevelCount:
    epsilon: float
    wall_count: int
    expected_wall_count: int
    disc_count: int
    expected_disc_count: int


@dataclass(frozen=True)
class CompactnessReport:
    """Box containment plus per-level patch counts.

    The scene must stay inside {r <= 3, 0 <= z <= 1, 0 <= w <= z}; at any
    level epsilon only finitely many patches survive, and the wall count
    must equal |{i : 1/i >= epsilon}|.
    """

    passed: bool
    box_ok: bool
    max_radius: float
    max_w_over_z: float
    levels: tuple[LevelCount, ...]
    unsampled_band: tuple[float, float]
    notes: tuple[str, ...]


def compactness_report(scene: Scene, epsilons: tuple[float, ...]) -> CompactnessReport:
    """Re-check the compactness proxies from the stored samples."""
    notes: list[str] = []
    max_radius = 0.0
    max_w_ratio = 0.0
    box_ok = True
    if scene.bhv.meshes is None:
        raise ValueError("scene has no sampled wall meshes")
    for wm in scene.bhv.meshes:
        r = float(np.max(wm.radius))
        max_radius = max(max_radius, r)
        if r > 3.0 + 1e-12:
            box_ok = False
            notes.append(f"vase {wm.vase_index}: radius {r} exceeds 3")
        z = wm.z[:, np.newaxis]
        if np.any(wm.w > z) or np.any(wm.w < 0):
            box_ok = False
            notes.append(f"vase {wm.vase_index}: w leaves [0, z]")
        max_w_ratio = max(max_w_ratio, float(np.max(wm.w / z)))
        if float(np.max(wm.z)) > 1.0 or float(np.min(wm.z)) <= 0.0:
            box_ok = False
            notes.append(f"vase {wm.vase_index}: z leaves (0, 1]")
    for disc in scene.discs:
        pts = disc.points.reshape(-1, 4)
        r = float(np.max(np.hypot(pts[:, 0], pts[:, 1])))
        max_radius = max(max_radius, r)
        if r > 3.0 + 1e-12:
            box_ok = False
            notes.append(f"disc {disc.relator_index}: radius {r} exceeds 3")
        if np.any(pts[:, 3] > pts[:, 2]) or np.any(pts[:, 3] < 0):
            box_ok = False
            notes.append(f"disc {disc.relator_index}: w leaves [0, z]")
        max_w_ratio = max(max_w_ratio, float(np.max(pts[:, 3] / pts[:, 2])))
        if float(np.max(pts[:, 2])) > 1.0 or float(np.min(pts[:, 2])) <= 0.0:
            box_ok = False
            notes.append(f"disc {disc.relator_index}: z leaves (0, 1]")
    levels = []
    counts_ok = True
    for eps in epsilons:
        walls = sum(
            1 for wm in scene.bhv.meshes if float(np.max(wm.z)) >= eps
        )
        expected_walls = sum(
            1 for i in range(1, scene.vase_count + 1) if 1.0 / i >= eps
        )
        discs = sum(
            1
            for disc in scene.discs
            if float(np.max(disc.points[..., 2])) >= eps
        )
        expected_discs = sum(1 for s in scene.bands.starts if s >= eps)
        levels.append(
            LevelCount(
                epsilon=eps,
                wall_count=walls,
                expected_wall_count=expected_walls,
                disc_count=discs,
                expected_disc_count=expected_discs,
            )
        )
        if walls != expected_walls or discs != expected_discs:
            counts_ok = False
            notes.append(f"patch counts disagree at epsilon={eps}")
    return CompactnessReport(
        passed=box_ok and counts_ok,
        box_ok=box_ok,
        max_radius=max_radius,
        max_w_over_z=max_w_ratio,
        levels=tuple(levels),
        unsampled_band=(0.0, scene.z_min),
        notes=tuple(notes),
    )


def bands_disjoint(scene: Scene) -> bool:
    """Discs occupy pairwise disjoint height bands."""
    spans = [
        (scene.bands.terminals[k], scene.bands.starts[k])
        for k in range(scene.bands.count)
    ]
    for (lo1, hi1), (lo2, hi2) in zip(spans, spans[1:]):
        if hi2 >= lo1:
            return False
    return True


def connectivity_proxy(scene: Scene, tol: float = 1e-9) -> tuple[bool, tuple[str, ...]]:
    """Every patch touches the shared line {r = 2, phi = 0, w = 0}.

    Wall meshes carry the phi = 0 column; each disc's boundary starts and
    ends on the line. The line itself limits onto the pedestal, which
    holds the base point.
    """
    notes = []
    ok = True
    if scene.bhv.meshes is not None:
        for wm in scene.bhv.meshes:
            on_axis = np.abs(wm.phi) < tol
            if not np.any(on_axis):
                ok = False
                notes.append(f"vase {wm.vase_index}: no phi = 0 column")
                continue
            col = wm.radius[:, on_axis]
            if float(np.max(np.abs(col - 2.0))) > tol:
                ok = False
                notes.append(f"vase {wm.vase_index}: phi = 0 column leaves r = 2")
    for disc, alpha in zip(scene.discs, scene.alphas):
        first = disc.boundary_polyline[0]
        expected = np.array([2.0, 0.0, alpha.start_height, 0.0])
        if float(np.max(np.abs(first - expected))) > tol:
            ok = False
            notes.append(f"disc {disc.relator_index}: boundary misses the axis line")
    return ok, tuple(notes)
