"""Build configuration and verification tolerances.

All tolerances used by the verification checks live here so that a scene
file fully documents how it was checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances shared by the verification checks.

    coincidence: minimum allowed gap between braiding-critical heights
        (inner heights vs. intersection heights, and profile values at
        intersection heights).
    formula: allowed residual when re-evaluating a defining equation at a
        stored sample (wall radius, loop membership, section curves).
    distance_floor: minimum pairwise 4D distance for injectivity checks.
    scan_match: allowed mismatch between closed-form heights and the
        numeric sign-change scan that cross-checks them.
    sin_match: allowed residual of sin(pi*p_i/z) - sin(pi*p_j/z) at a
        reported intersection height.
    """

    coincidence: float = 1e-9
    formula: float = 1e-12
    distance_floor: float = 1e-9
    scan_match: float = 1e-9
    sin_match: float = 1e-10


@dataclass(frozen=True)
class BuildConfig:
    """Deterministic recipe for building a scene from a presentation.

    z_min: hard lower cutoff for all sampled geometry. The band
        (0, z_min) is never sampled and is recorded in reports.
    phi_steps: number of angular subdivisions of [-pi, pi] per wall mesh.
    oversample: minimum samples per local oscillation period of the wall
        when building the adaptive height grid.
    loop_samples: samples per full angular sweep in a relator path loop.
    vertical_samples: samples per vertical drop in a relator path.
    disc_resolution: grid subdivisions (per side) of an attached disc.
    band_margin: relative gap left between consecutive relator bands.
    bump_margin: amplitude factor of the fourth-coordinate bump on the
        upper half of a disc (the bump peaks at bump_margin/8 of the
        local height).
    independence_depth: inner heights per vase checked against
        intersection heights before a parameter sequence is accepted.
    sample_budget: cap on total wall samples per mesh build.
    depth_gens: number of vases to build (defaults to the presentation's
        generator count; may exceed it to model deeper truncations).
    relator_count: how many relators to attach (None means all).
    include_meshes: whether wall meshes are sampled at build time.
    """

    z_min: float = 0.01
    phi_steps: int = 64
    oversample: int = 8
    loop_samples: int = 128
    vertical_samples: int = 16
    disc_resolution: int = 64
    band_margin: float = 0.05
    bump_margin: float = 0.5
    independence_depth: int = 50
    sample_budget: int = 5_000_000
    depth_gens: int | None = None
    relator_count: int | None = None
    include_meshes: bool = True
    p_scheme: str = "sqrt-prime"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if not 0 < self.z_min < 1:
            raise ValueError(f"z_min must be in (0, 1), got {self.z_min}")
        if self.phi_steps < 4 or self.phi_steps % 2:
            raise ValueError("phi_steps must be an even integer >= 4")
        if self.oversample < 4:
            raise ValueError("oversample must be >= 4")
        if self.disc_resolution < 2 or self.disc_resolution % 2:
            raise ValueError("disc_resolution must be an even integer >= 2")
        if not 0 < self.band_margin < 1:
            raise ValueError("band_margin must be in (0, 1)")
