"""Mesh export (OBJ, PLY) and cross-section figures (SVG).

Exports are deterministic byte streams for a fixed scene and flags.
The 4D samples are either projected by dropping the fourth coordinate or
carried along as a per-vertex scalar: a float property in PLY, a comment
channel in OBJ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .braid import BhvScene
from .realize import Scene
from .vase import PEDESTAL_RADIUS, VaseParams, adaptive_z_grid, wall_radius

FORMATS = ("obj", "ply")
PROJECTIONS = ("drop-w", "w-color")


@dataclass(frozen=True)
class PatchCounts:
    name: str
    vertices: int
    faces: int


@dataclass(frozen=True)
class ExportSummary:
    fmt: str
    projection: str
    patches: tuple[PatchCounts, ...]

    @property
    def vertex_count(self) -> int:
        return sum(p.vertices for p in self.patches)

    @property
    def face_count(self) -> int:
        return sum(p.faces for p in self.patches)


def _fmt(x: float) -> str:
    return repr(float(x))


def _wall_patch(mesh) -> tuple[np.ndarray, list[list[int]]]:
    """Welded vertices and quad faces of one wall; the phi = +-pi columns
    are the same Cartesian points and collapse to one column."""
    nz = len(mesh.z)
    ncol = len(mesh.phi) - 1
    cart = mesh.cartesian().reshape(nz, ncol + 1, 4)[:, :ncol, :]
    verts = cart.reshape(-1, 4)
    faces = []
    for i in range(nz - 1):
        for j in range(ncol):
            j2 = (j + 1) % ncol
            faces.append(
                [i * ncol + j, i * ncol + j2, (i + 1) * ncol + j2, (i + 1) * ncol + j]
            )
    return verts, faces


def _pedestal_patch(segments: int) -> tuple[np.ndarray, list[list[int]]]:
    phi = np.linspace(-math.pi, math.pi, segments + 1)[:-1]
    ring = np.stack(
        [
            PEDESTAL_RADIUS * np.cos(phi),
            PEDESTAL_RADIUS * np.sin(phi),
            np.zeros_like(phi),
            np.zeros_like(phi),
        ],
        axis=1,
    )
    verts = np.concatenate([np.zeros((1, 4)), ring], axis=0)
    faces = [[0, 1 + j, 1 + (j + 1) % segments] for j in range(segments)]
    return verts, faces


def _disc_patch(disc) -> tuple[np.ndarray, list[list[int]]]:
    n = disc.n
    ids: dict[tuple[int, int], int] = {}
    verts: list[np.ndarray] = []

    def vid(a: int, b: int) -> int:
        key = disc.canonical_index(a, b)
        if key not in ids:
            ids[key] = len(verts)
            verts.append(disc.points[key[0], key[1]])
        return ids[key]

    faces = []
    for a in range(n):
        for b in range(n):
            quad = [vid(a, b), vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1)]
            faces.append(quad)
    return np.array(verts), faces


def _collect_patches(scene: Scene | BhvScene, pedestal_segments: int):
    patches: list[tuple[str, np.ndarray, list[list[int]]]] = []
    bhv = scene.bhv if isinstance(scene, Scene) else scene
    if bhv.meshes is None:
        raise ValueError("no sampled meshes to export")
    verts, faces = _pedestal_patch(pedestal_segments)
    patches.append(("pedestal", verts, faces))
    for mesh in bhv.meshes:
        verts, faces = _wall_patch(mesh)
        patches.append((f"vase_{mesh.vase_index}", verts, faces))
    if isinstance(scene, Scene):
        for disc in scene.discs:
            verts, faces = _disc_patch(disc)
            patches.append((f"disc_{disc.relator_index}", verts, faces))
    return patches


def export_mesh(
    scene: Scene | BhvScene,
    path: str | Path,
    fmt: str = "obj",
    projection: str = "drop-w",
    pedestal_segments: int = 64,
) -> ExportSummary:
    """Write all patches of a scene as one mesh file with named groups."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if projection not in PROJECTIONS:
        raise ValueError(f"projection must be one of {PROJECTIONS}, got {projection!r}")
    patches = _collect_patches(scene, pedestal_segments)
    if fmt == "obj":
        text = _to_obj(patches, projection)
    else:
        text = _to_ply(patches, projection)
    Path(path).write_text(text)
    return ExportSummary(
        fmt=fmt,
        projection=projection,
        patches=tuple(
            PatchCounts(name=name, vertices=len(v), faces=len(f))
            for name, v, f in patches
        ),
    )


def _to_obj(patches, projection: str) -> str:
    lines = ["# harmonicvase mesh export"]
    offset = 1  # OBJ indices are 1-based
    for name, verts, faces in patches:
        lines.append(f"g {name}")
        for v in verts:
            lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
            if projection == "w-color":
                lines.append(f"# w {_fmt(v[3])}")
        for f in faces:
            lines.append("f " + " ".join(str(i + offset) for i in f))
        offset += len(verts)
    return "\n".join(lines) + "\n"


def _to_ply(patches, projection: str) -> str:
    total_v = sum(len(v) for _, v, _ in patches)
    total_f = sum(len(f) for _, _, f in patches)
    header = [
        "ply",
        "format ascii 1.0",
        "comment harmonicvase mesh export",
    ]
    for name, verts, faces in patches:
        header.append(f"comment patch {name} vertices {len(verts)} faces {len(faces)}")
    header += [
        f"element vertex {total_v}",
        "property float x",
        "property float y",
        "property float z",
    ]
    if projection == "w-color":
        header.append("property float quality")
    header += [
        f"element face {total_f}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    lines = list(header)
    for _, verts, _ in patches:
        for v in verts:
            row = f"{_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}"
            if projection == "w-color":
                row += f" {_fmt(v[3])}"
            lines.append(row)
    offset = 0
    for _, verts, faces in patches:
        for f in faces:
            lines.append(f"{len(f)} " + " ".join(str(i + offset) for i in f))
        offset += len(verts)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SectionCurve:
    vase_index: int
    radius: np.ndarray
    z: np.ndarray


def cross_section(
    scene: Scene | BhvScene | list[VaseParams],
    phi: float,
    z_min: float | None = None,
    path: str | Path | None = None,
    oversample: int = 16,
) -> tuple[list[SectionCurve], str]:
    """Planar curves z -> (r(phi, z), z), one per vase, plus an SVG figure.

    At phi = 0 every curve degenerates to the straight segment r = 2.
    """
    if abs(phi) > math.pi:
        raise ValueError("phi must lie in [-pi, pi]")
    if isinstance(scene, (Scene, BhvScene)):
        bhv = scene.bhv if isinstance(scene, Scene) else scene
        vases = [
            (i, bhv.vase(i)) for i in range(1, bhv.vase_count + 1)
        ]
        floor = bhv.z_min if z_min is None else z_min
    else:
        vases = [(i + 1, v) for i, v in enumerate(scene)]
        floor = 0.01 if z_min is None else z_min
    curves = []
    for index, vase in vases:
        zs = adaptive_z_grid(vase.osc, vase.height, floor, oversample)
        r = np.asarray(wall_radius(vase.osc, phi, zs))
        curves.append(SectionCurve(vase_index=index, radius=r, z=zs))
    svg = _section_svg(curves, phi)
    if path is not None:
        Path(path).write_text(svg)
    return curves, svg


def _section_svg(curves: list[SectionCurve], phi: float) -> str:
    width, height = 640, 480
    pad = 50
    r_max = 3.2
    z_max = max(float(np.max(c.z)) for c in curves) if curves else 1.0

    def sx(r: float) -> float:
        return pad + (r / r_max) * (width - 2 * pad)

    def sy(z: float) -> float:
        return height - pad - (z / z_max) * (height - 2 * pad)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<!-- section at phi = {_fmt(phi)} -->',
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(r_max)}" y2="{sy(0)}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(0)}" y2="{sy(z_max)}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for curve in curves:
        coords = " ".join(
            f"{'M' if i == 0 else 'L'} {_fmt(sx(float(r)))} {_fmt(sy(float(z)))}"
            for i, (r, z) in enumerate(zip(curve.radius, curve.z))
        )
        lines.append(
            f'<path d="{coords}" fill="none" stroke="steelblue" '
            f'stroke-width="1" id="vase-{curve.vase_index}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
