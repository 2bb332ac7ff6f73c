"""Scene persistence, schema validation, and verification reports.

Scene files are versioned JSON documents carrying the build config, the
parameter decimals, the braiding profiles, the band schedule, and the
sampled relator paths. Wall meshes and disc grids are deterministic
functions of that data and are rebuilt on load, so a round trip through
save/load reproduces the scene bit for bit. Unknown or missing fields
are rejected with the path to the offending key.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .braid import (
    BhvScene,
    PSequence,
    WProfile,
    ZeroInterval,
    build_bhv,
    intersection_heights,
    min_wall_separation,
    scan_intersection_heights,
    verify_independence,
    verify_profile_conditions,
)
from .config import BuildConfig, Tolerances
from .disc import (
    BumpG,
    build_disc,
    disjointness_refinement,
    euler_characteristic,
    verify_injective,
)
from .presentation import Presentation, truncate_presentation
from .realize import (
    BandSchedule,
    Scene,
    bands_disjoint,
    compactness_report,
    connectivity_proxy,
    pi1_report,
    truncate,
)
from .relator_path import AlphaPath, PathSegment, decode_word, verify_monotone

SCENE_VERSION = 1
DEFAULT_EPSILONS = (0.9, 0.5, 0.3, 0.11)
DEFAULT_PI1_EPSILONS = (0.02, 0.1, 0.3)


class SchemaError(ValueError):
    """Scene file violates the schema; the message carries the JSON path."""


class VersionError(SchemaError):
    pass


def config_hash(config: BuildConfig) -> str:
    return hashlib.sha256(
        json.dumps(_config_to_dict(config), sort_keys=True).encode()
    ).hexdigest()


def _config_to_dict(config: BuildConfig) -> dict:
    d = asdict(config)
    d["tolerances"] = asdict(config.tolerances)
    return d


def _require(mapping: dict, keys: dict[str, type | tuple], path: str) -> None:
    unknown = set(mapping) - set(keys)
    if unknown:
        raise SchemaError(f"{path}: unknown field(s) {sorted(unknown)}")
    for key, typ in keys.items():
        if key not in mapping:
            raise SchemaError(f"{path}.{key}: missing field")
        if typ is not None and not isinstance(mapping[key], typ):
            raise SchemaError(
                f"{path}.{key}: expected {typ}, got {type(mapping[key]).__name__}"
            )


def save_scene(scene: Scene, path: str | Path | None = None) -> str:
    """Serialize a scene to canonical JSON; optionally write it to a file."""
    doc = {
        "version": SCENE_VERSION,
        "config": _config_to_dict(scene.config),
        "config_hash": config_hash(scene.config),
        "presentation": {
            "names": list(scene.presentation.names),
            "relators": [
                [[g, s] for g, s in rel] for rel in scene.presentation.relators
            ],
        },
        "p_decimals": list(scene.bhv.ps.decimals),
        "p_provenance": scene.bhv.ps.provenance,
        "p_verified": scene.bhv.ps.verified_no_coincidence,
        "profiles": [
            {
                "vase_index": prof.vase_index,
                "theta": prof.theta,
                "z_min": prof.z_min,
                "intervals": [
                    {"center": iv.center, "radius": iv.radius, "ramp": iv.ramp}
                    for iv in prof.intervals
                ],
            }
            for prof in scene.bhv.profiles
        ],
        "bands": {
            "tops": list(scene.bands.tops),
            "starts": list(scene.bands.starts),
            "terminals": list(scene.bands.terminals),
        },
        "alphas": [
            {
                "start_height": alpha.start_height,
                "terminal_height": alpha.terminal_height,
                "segments": [
                    {
                        "kind": seg.kind,
                        "z_start": seg.z_start,
                        "z_end": seg.z_end,
                        "vase_index": seg.vase_index,
                        "inner_height": seg.inner_height,
                        "orientation": seg.orientation,
                    }
                    for seg in alpha.segments
                ],
                "polyline": alpha.polyline.tolist(),
            }
            for alpha in scene.alphas
        ],
    }
    text = json.dumps(doc, sort_keys=True, indent=1)
    if path is not None:
        Path(path).write_text(text)
    return text


def load_scene(source: str | Path) -> Scene:
    """Load a scene file and deterministically rebuild its derived meshes."""
    if isinstance(source, Path) or (
        isinstance(source, str) and not source.lstrip().startswith("{")
    ):
        text = Path(source).read_text()
    else:
        text = source
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise SchemaError("$: scene file must hold a JSON object")
    _require(
        doc,
        {
            "version": int,
            "config": dict,
            "config_hash": str,
            "presentation": dict,
            "p_decimals": list,
            "p_provenance": str,
            "p_verified": bool,
            "profiles": list,
            "bands": dict,
            "alphas": list,
        },
        "$",
    )
    if doc["version"] != SCENE_VERSION:
        raise VersionError(
            f"$.version: expected {SCENE_VERSION}, got {doc['version']}"
        )
    cfg_keys = {
        "z_min": (int, float),
        "phi_steps": int,
        "oversample": int,
        "loop_samples": int,
        "vertical_samples": int,
        "disc_resolution": int,
        "band_margin": (int, float),
        "bump_margin": (int, float),
        "independence_depth": int,
        "sample_budget": int,
        "depth_gens": None,
        "relator_count": None,
        "include_meshes": bool,
        "p_scheme": str,
        "tolerances": dict,
    }
    _require(doc["config"], cfg_keys, "$.config")
    tol_keys = {
        "coincidence": (int, float),
        "formula": (int, float),
        "distance_floor": (int, float),
        "scan_match": (int, float),
        "sin_match": (int, float),
    }
    _require(doc["config"]["tolerances"], tol_keys, "$.config.tolerances")
    config = BuildConfig(
        **{
            k: (
                Tolerances(**doc["config"]["tolerances"])
                if k == "tolerances"
                else doc["config"][k]
            )
            for k in cfg_keys
        }
    )
    if config_hash(config) != doc["config_hash"]:
        raise SchemaError("$.config_hash: does not match the stored config")
    _require(doc["presentation"], {"names": list, "relators": list}, "$.presentation")
    pres = Presentation(
        names=tuple(doc["presentation"]["names"]),
        relators=tuple(
            tuple((int(g), int(s)) for g, s in rel)
            for rel in doc["presentation"]["relators"]
        ),
    )
    ps = PSequence(
        decimals=tuple(doc["p_decimals"]),
        provenance=doc["p_provenance"],
        verified_no_coincidence=doc["p_verified"],
    )
    profiles = []
    for idx, raw in enumerate(doc["profiles"]):
        _require(
            raw,
            {"vase_index": int, "theta": (int, float), "z_min": (int, float), "intervals": list},
            f"$.profiles[{idx}]",
        )
        ivs = []
        for jdx, riv in enumerate(raw["intervals"]):
            _require(
                riv,
                {"center": (int, float), "radius": (int, float), "ramp": (int, float)},
                f"$.profiles[{idx}].intervals[{jdx}]",
            )
            ivs.append(ZeroInterval(**riv))
        profiles.append(
            WProfile(
                vase_index=raw["vase_index"],
                theta=raw["theta"],
                intervals=tuple(ivs),
                z_min=raw["z_min"],
            )
        )
    _require(doc["bands"], {"tops": list, "starts": list, "terminals": list}, "$.bands")
    bands = BandSchedule(
        tops=tuple(doc["bands"]["tops"]),
        starts=tuple(doc["bands"]["starts"]),
        terminals=tuple(doc["bands"]["terminals"]),
    )
    alphas = []
    for idx, raw in enumerate(doc["alphas"]):
        _require(
            raw,
            {
                "start_height": (int, float),
                "terminal_height": (int, float),
                "segments": list,
                "polyline": list,
            },
            f"$.alphas[{idx}]",
        )
        segments = []
        for jdx, rseg in enumerate(raw["segments"]):
            _require(
                rseg,
                {
                    "kind": str,
                    "z_start": (int, float),
                    "z_end": (int, float),
                    "vase_index": None,
                    "inner_height": None,
                    "orientation": None,
                },
                f"$.alphas[{idx}].segments[{jdx}]",
            )
            segments.append(PathSegment(**rseg))
        alphas.append(
            AlphaPath(
                segments=tuple(segments),
                polyline=np.array(raw["polyline"], dtype=float),
                start_height=raw["start_height"],
                terminal_height=raw["terminal_height"],
            )
        )
    bhv = build_bhv(
        ps,
        tuple(profiles),
        config.z_min,
        phi_steps=config.phi_steps,
        oversample=config.oversample,
        with_meshes=config.include_meshes,
        budget=config.sample_budget,
    )
    bump = BumpG(margin=config.bump_margin)
    discs = tuple(
        build_disc(alpha, config.disc_resolution, relator_index=k + 1, bump=bump)
        for k, alpha in enumerate(alphas)
    )
    return Scene(
        presentation=pres,
        config=config,
        bhv=bhv,
        alphas=tuple(alphas),
        discs=discs,
        bands=bands,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    config_hash: str
    checks: tuple[CheckResult, ...]


def report_to_json(report: VerificationReport, path: str | Path | None = None) -> str:
    doc = {
        "passed": report.passed,
        "config_hash": report.config_hash,
        "checks": [
            {"name": c.name, "passed": c.passed, "details": c.details}
            for c in report.checks
        ],
    }
    text = json.dumps(doc, sort_keys=True, indent=1)
    if path is not None:
        Path(path).write_text(text)
    return text


def _check_wall_formula(scene: Scene, tol: float) -> CheckResult:
    worst = 0.0
    for wm in scene.bhv.meshes or ():
        expect = (
            np.abs(wm.phi)[np.newaxis, :] / math.pi
        ) * np.sin(math.pi * wm.osc / wm.z)[:, np.newaxis] + 2.0
        worst = max(worst, float(np.max(np.abs(expect - wm.radius))))
    return CheckResult(
        name="wall_formula",
        passed=worst <= tol,
        details={"max_residual": worst, "tolerance": tol},
    )


def _check_alphas(scene: Scene, tol: float) -> list[CheckResult]:
    checks: list[CheckResult] = []
    mono_ok = True
    mono_details: dict = {}
    for k, alpha in enumerate(scene.alphas, start=1):
        rep = verify_monotone(alpha)
        if not rep.passed:
            mono_ok = False
            mono_details[f"relator_{k}"] = rep.first_violation
    checks.append(
        CheckResult(name="alpha_monotone", passed=mono_ok, details=mono_details)
    )
    decode_ok = True
    decode_details: dict = {}
    for k, alpha in enumerate(scene.alphas, start=1):
        decoded = decode_word(scene.bhv, alpha.polyline)
        stored = tuple(scene.presentation.relators[k - 1])
        if decoded != stored:
            decode_ok = False
            decode_details[f"relator_{k}"] = {
                "decoded": [list(x) for x in decoded],
                "stored": [list(x) for x in stored],
            }
    checks.append(
        CheckResult(name="decode_round_trip", passed=decode_ok, details=decode_details)
    )
    axis_ok = True
    worst_axis = 0.0
    for alpha in scene.alphas:
        pts = alpha.polyline
        on_axis = np.abs(pts[:, 1]) <= 1e-12
        if np.any(on_axis):
            res = float(
                np.max(
                    np.abs(pts[on_axis][:, [0, 3]] - np.array([2.0, 0.0]))
                )
            )
            worst_axis = max(worst_axis, res)
            if res > tol:
                axis_ok = False
    checks.append(
        CheckResult(
            name="alpha_axis_samples",
            passed=axis_ok,
            details={"max_residual": worst_axis, "tolerance": tol},
        )
    )
    return checks


def _check_h_scan(scene: Scene, tolerances: Tolerances) -> CheckResult:
    values = scene.bhv.ps.floats
    floor = max(scene.z_min, 0.01)
    worst = 0.0
    mismatch = None
    for i in range(2, scene.vase_count + 1):
        for j in range(1, i):
            closed = intersection_heights(values[i - 1], values[j - 1], i, floor)
            scanned = scan_intersection_heights(
                values[i - 1], values[j - 1], i, floor
            )
            if len(closed) != len(scanned):
                mismatch = {
                    "pair": [i, j],
                    "closed_count": len(closed),
                    "scan_count": len(scanned),
                }
                break
            if closed:
                worst = max(
                    worst,
                    float(np.max(np.abs(np.array(closed) - np.array(scanned)))),
                )
        if mismatch:
            break
    passed = mismatch is None and worst <= tolerances.scan_match
    return CheckResult(
        name="intersection_heights_scan",
        passed=passed,
        details={
            "max_mismatch": worst,
            "tolerance": tolerances.scan_match,
            "count_mismatch": mismatch,
            "floor": floor,
        },
    )


def _check_discs(scene: Scene, tolerances: Tolerances) -> list[CheckResult]:
    checks: list[CheckResult] = []
    inj_ok = True
    inj_details: dict = {}
    euler_ok = True
    euler_details: dict = {}
    dis_ok = True
    dis_details: dict = {}
    for disc, alpha in zip(scene.discs, scene.alphas):
        key = f"disc_{disc.relator_index}"
        rep = verify_injective(disc, tolerances.distance_floor)
        inj_details[key] = rep.min_distance
        if not rep.passed:
            inj_ok = False
        chi = euler_characteristic(disc)
        euler_details[key] = chi
        if chi != 1:
            euler_ok = False
        coarse, fine, ratio, stable = disjointness_refinement(
            alpha, scene.bhv, disc.n, disc.relator_index, disc.bump
        )
        dis_details[key] = {
            "min_distance": coarse.min_distance,
            "refined_min_distance": fine.min_distance,
            "ratio": ratio,
        }
        if not (coarse.passed and fine.passed and stable):
            dis_ok = False
    checks.append(CheckResult("disc_injectivity", inj_ok, inj_details))
    checks.append(CheckResult("disc_euler_characteristic", euler_ok, euler_details))
    checks.append(CheckResult("disc_wall_disjointness", dis_ok, dis_details))
    return checks


def _check_pi1(scene: Scene, epsilons: tuple[float, ...]) -> CheckResult:
    ok = True
    details: dict = {}
    for eps in epsilons:
        if eps <= scene.z_min:
            continue
        tc = truncate(scene, eps)
        expected = truncate_presentation(
            scene.presentation, len(tc.disc_indices)
        )
        rep = pi1_report(tc, expected)
        details[f"epsilon_{eps}"] = {
            "included_discs": list(tc.disc_indices),
            "h1_actual": [rep.h1_actual[0], list(rep.h1_actual[1])],
            "h1_expected": [rep.h1_expected[0], list(rep.h1_expected[1])],
            "hom_counts": [list(x) for x in rep.hom_counts],
        }
        if not rep.passed:
            ok = False
    return CheckResult(name="truncation_pi1", passed=ok, details=details)


def verify_scene(
    scene: Scene,
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS,
    pi1_epsilons: tuple[float, ...] = DEFAULT_PI1_EPSILONS,
    separation_exclusion: float = 0.05,
) -> VerificationReport:
    """Run the full verification battery and collect a machine-readable report."""
    tol = scene.config.tolerances
    checks: list[CheckResult] = []
    checks.append(_check_wall_formula(scene, tol.formula))
    comp = compactness_report(scene, tuple(e for e in epsilons if e > scene.z_min))
    checks.append(
        CheckResult(
            name="compactness_box_and_counts",
            passed=comp.passed,
            details={
                "max_radius": comp.max_radius,
                "max_w_over_z": comp.max_w_over_z,
                "levels": [
                    {
                        "epsilon": lv.epsilon,
                        "walls": lv.wall_count,
                        "expected_walls": lv.expected_wall_count,
                        "discs": lv.disc_count,
                        "expected_discs": lv.expected_disc_count,
                    }
                    for lv in comp.levels
                ],
                "unsampled_band": list(comp.unsampled_band),
                "notes": list(comp.notes),
            },
        )
    )
    prof = verify_profile_conditions(
        scene.bhv.profiles, scene.bhv.ps, scene.z_min, tol
    )
    checks.append(
        CheckResult(
            name="profile_conditions",
            passed=prof.passed,
            details={
                "min_separation": prof.min_separation,
                "max_w_over_z_times_pi": prof.max_w_over_z,
                "notes": list(prof.details),
            },
        )
    )
    indep = verify_independence(
        scene.bhv.ps, scene.config.independence_depth, tol.coincidence
    )
    checks.append(
        CheckResult(
            name="independence",
            passed=indep.passed,
            details={
                "min_gap": indep.min_gap,
                "tolerance": indep.tolerance,
                "depth": indep.depth,
                "location": list(indep.location) if indep.location else None,
            },
        )
    )
    checks.append(_check_h_scan(scene, tol))
    sep = min_wall_separation(
        scene.bhv,
        separation_exclusion,
        z_window=(max(0.02, scene.z_min), 1.0),
    )
    checks.append(
        CheckResult(
            name="wall_separation",
            passed=(scene.vase_count < 2) or sep.min_distance > 0,
            details={
                "min_distance": sep.min_distance if math.isfinite(sep.min_distance) else None,
                "pair": list(sep.vase_pair) if sep.vase_pair else None,
                "phi": sep.phi,
                "z": sep.z,
                "exclusion": separation_exclusion,
            },
        )
    )
    checks.extend(_check_alphas(scene, tol.formula))
    checks.extend(_check_discs(scene, tol))
    checks.append(
        CheckResult(
            name="bands_disjoint",
            passed=bands_disjoint(scene),
            details={
                "starts": list(scene.bands.starts),
                "terminals": list(scene.bands.terminals),
            },
        )
    )
    checks.append(_check_pi1(scene, pi1_epsilons))
    conn_ok, conn_notes = connectivity_proxy(scene)
    checks.append(
        CheckResult(
            name="connectivity_proxy",
            passed=conn_ok,
            details={"notes": list(conn_notes)},
        )
    )
    return VerificationReport(
        passed=all(c.passed for c in checks),
        config_hash=config_hash(scene.config),
        checks=tuple(checks),
    )
