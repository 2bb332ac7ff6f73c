"""Command-line surface.

Subcommands:
  vase     inner-heights table (CSV) and cross-section figure (SVG)
  braid    build the braided vases and verify the profile conditions
  realize  build a full scene from a presentation file
  verify   run the verification battery on a scene file
  pi1      compare a truncation against an expected presentation
  export   write a scene as an OBJ or PLY mesh

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from decimal import Decimal, getcontext
from pathlib import Path

from .braid import (
    build_bhv,
    build_w_profiles,
    choose_p_sequence,
    verify_independence,
    verify_profile_conditions,
)
from .config import BuildConfig, Tolerances
from .export import cross_section, export_mesh
from .presentation import ParseError, parse_presentation, truncate_presentation
from .realize import build_space, truncate, pi1_report
from .sceneio import (
    DEFAULT_PI1_EPSILONS,
    load_scene,
    report_to_json,
    save_scene,
    verify_scene,
    SchemaError,
)
from .vase import VaseParams, inner_heights, inner_heights_bisection


class UsageError(ValueError):
    pass


def _parse_p(text: str) -> float:
    """Either a decimal literal or sqrt<int>, e.g. sqrt2."""
    if text.startswith("sqrt"):
        ctx = getcontext().copy()
        ctx.prec = 55
        return float(ctx.sqrt(Decimal(int(text[4:]))))
    return float(text)


def _tolerances(args: argparse.Namespace) -> Tolerances:
    base = Tolerances()
    return Tolerances(
        coincidence=getattr(args, "tolerance_coincidence", None) or base.coincidence,
        formula=getattr(args, "tolerance_formula", None) or base.formula,
        distance_floor=getattr(args, "tolerance_distance_floor", None)
        or base.distance_floor,
        scan_match=base.scan_match,
        sin_match=base.sin_match,
    )


def _config_from_args(args: argparse.Namespace, tolerances: Tolerances) -> BuildConfig:
    relators = None
    if getattr(args, "relators", None) not in (None, "all"):
        relators = int(args.relators)
    return BuildConfig(
        z_min=args.z_min,
        phi_steps=args.resolution,
        oversample=args.oversample,
        disc_resolution=args.disc_resolution,
        depth_gens=getattr(args, "depth_gens", None),
        relator_count=relators,
        tolerances=tolerances,
    )


def _cmd_vase(args: argparse.Namespace) -> int:
    vase = VaseParams(height=args.m, osc=_parse_p(args.p))
    closed = inner_heights(vase, args.count)
    oracle = inner_heights_bisection(vase, args.count)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "inner_height", "bisection", "abs_difference"])
            for k, (h, hb) in enumerate(zip(closed, oracle)):
                writer.writerow([k, repr(h), repr(hb), repr(abs(h - hb))])
        print(f"wrote {args.count} inner heights to {args.out}")
    else:
        for k, h in enumerate(closed):
            print(f"{k}\t{h!r}")
    if args.svg:
        cross_section([vase], args.phi, z_min=args.z_min, path=args.svg)
        print(f"wrote cross-section at phi={args.phi} to {args.svg}")
    return 0


def _cmd_braid(args: argparse.Namespace) -> int:
    tolerances = _tolerances(args)
    ps = choose_p_sequence(args.depth_gens)
    indep = verify_independence(ps, depth=50, tolerance=tolerances.coincidence)
    if not indep.passed:
        print(f"independence check failed: min gap {indep.min_gap}", file=sys.stderr)
        return 1
    ps = ps.mark_verified()
    profiles = build_w_profiles(ps, args.z_min, tolerances)
    prof = verify_profile_conditions(profiles, ps, args.z_min, tolerances)
    print(
        f"vases: {args.depth_gens}  independence min gap: {indep.min_gap:.3e}  "
        f"profile separation: {prof.min_separation:.3e}  "
        f"profiles {'ok' if prof.passed else 'FAILED'}"
    )
    if args.out:
        from .presentation import Presentation

        names = tuple(f"g{i}" for i in range(1, args.depth_gens + 1))
        pres = Presentation(names=names, relators=())
        config = _config_from_args(args, tolerances)
        scene = build_space(pres, config)
        save_scene(scene, args.out)
        print(f"wrote scene to {args.out}")
    return 0 if prof.passed else 1


def _cmd_realize(args: argparse.Namespace) -> int:
    text = Path(args.presentation).read_text()
    pres = parse_presentation(text)
    config = _config_from_args(args, _tolerances(args))
    scene = build_space(pres, config)
    save_scene(scene, args.out)
    print(
        f"built scene: {scene.vase_count} vases, {len(scene.discs)} discs, "
        f"z_min={scene.z_min}; wrote {args.out}"
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    scene = load_scene(Path(args.scene))
    report = verify_scene(scene)
    text = report_to_json(report, args.report)
    if args.report:
        print(f"wrote report to {args.report}")
    else:
        print(text)
    for check in report.checks:
        print(f"  [{'pass' if check.passed else 'FAIL'}] {check.name}")
    print(f"verification {'passed' if report.passed else 'FAILED'}")
    return 0 if report.passed else 1


def _cmd_pi1(args: argparse.Namespace) -> int:
    scene = load_scene(Path(args.scene))
    expected_full = parse_presentation(Path(args.expect).read_text())
    epsilons = [args.epsilon] if args.epsilon else list(DEFAULT_PI1_EPSILONS)
    all_ok = True
    rows = []
    for eps in epsilons:
        tc = truncate(scene, eps)
        expected = truncate_presentation(expected_full, len(tc.disc_indices))
        rep = pi1_report(tc, expected)
        all_ok = all_ok and rep.passed
        rows.append((eps, rep))
        print(
            f"epsilon={eps}: discs={list(tc.disc_indices)} "
            f"H1 actual={rep.h1_actual} expected={rep.h1_expected} "
            f"{'ok' if rep.passed else 'MISMATCH'}"
        )
    if args.report:
        import json

        doc = {
            "passed": all_ok,
            "levels": [
                {
                    "epsilon": eps,
                    "passed": rep.passed,
                    "h1_actual": [rep.h1_actual[0], list(rep.h1_actual[1])],
                    "h1_expected": [rep.h1_expected[0], list(rep.h1_expected[1])],
                    "hom_counts": [list(x) for x in rep.hom_counts],
                    "note": rep.note,
                }
                for eps, rep in rows
            ],
        }
        Path(args.report).write_text(json.dumps(doc, sort_keys=True, indent=1))
        print(f"wrote report to {args.report}")
    return 0 if all_ok else 1


def _cmd_export(args: argparse.Namespace) -> int:
    scene = load_scene(Path(args.scene))
    summary = export_mesh(scene, args.out, fmt=args.format, projection=args.projection)
    print(
        f"wrote {summary.vertex_count} vertices / {summary.face_count} faces "
        f"in {len(summary.patches)} patches to {args.out}"
    )
    return 0


def _add_build_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--z-min", type=float, default=0.01)
    parser.add_argument("--resolution", type=int, default=64, help="angular steps")
    parser.add_argument("--oversample", type=int, default=8)
    parser.add_argument("--disc-resolution", type=int, default=64)


def _add_tolerance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tolerance-coincidence", type=float, default=None)
    parser.add_argument("--tolerance-formula", type=float, default=None)
    parser.add_argument("--tolerance-distance-floor", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmonicvase",
        description="Build and verify sampled 4D vase scenes from group presentations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_vase = sub.add_parser("vase", help="inner-heights table and cross-section")
    p_vase.add_argument("--p", required=True, help="oscillation parameter or sqrtN")
    p_vase.add_argument("--m", type=float, default=1.0, help="vase height")
    p_vase.add_argument("--count", type=int, default=30)
    p_vase.add_argument("--phi", type=float, default=math.pi)
    p_vase.add_argument("--z-min", type=float, default=0.01)
    p_vase.add_argument("--out", default=None, help="CSV output path")
    p_vase.add_argument("--svg", default=None, help="SVG output path")
    p_vase.set_defaults(func=_cmd_vase)

    p_braid = sub.add_parser("braid", help="build braided vases, verify profiles")
    p_braid.add_argument("--depth-gens", type=int, required=True)
    _add_build_flags(p_braid)
    _add_tolerance_flags(p_braid)
    p_braid.add_argument("--out", default=None, help="scene output path")
    p_braid.set_defaults(func=_cmd_braid)

    p_realize = sub.add_parser("realize", help="build a scene from a presentation")
    p_realize.add_argument("presentation", help="presentation file")
    p_realize.add_argument("--depth-gens", type=int, default=None)
    p_realize.add_argument("--relators", default="all", help="K or all")
    _add_build_flags(p_realize)
    _add_tolerance_flags(p_realize)
    p_realize.add_argument("--out", required=True, help="scene output path")
    p_realize.set_defaults(func=_cmd_realize)

    p_verify = sub.add_parser("verify", help="verify a scene file")
    p_verify.add_argument("scene")
    p_verify.add_argument("--report", default=None)
    _add_tolerance_flags(p_verify)
    p_verify.set_defaults(func=_cmd_verify)

    p_pi1 = sub.add_parser("pi1", help="truncation invariants vs expected presentation")
    p_pi1.add_argument("scene")
    p_pi1.add_argument("--epsilon", type=float, default=None)
    p_pi1.add_argument("--expect", required=True, help="expected presentation file")
    p_pi1.add_argument("--report", default=None)
    p_pi1.set_defaults(func=_cmd_pi1)

    p_export = sub.add_parser("export", help="export scene meshes")
    p_export.add_argument("scene")
    p_export.add_argument("--format", choices=["obj", "ply"], default="obj")
    p_export.add_argument(
        "--projection", choices=["drop-w", "w-color"], default="drop-w"
    )
    p_export.add_argument("--out", required=True)
    p_export.set_defaults(func=_cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SchemaError, UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
