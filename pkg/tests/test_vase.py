import math

import numpy as np
import pytest

from harmonicvase.vase import (
    CylPoint4,
    SampleBudgetError,
    VaseParams,
    adaptive_z_grid,
    cyl_to_cartesian,
    inner_curve,
    inner_heights,
    inner_heights_bisection,
    pedestal_contains,
    sample_wall,
    wall_radius,
)


# -------------------------------------------------------------- wall radius

def test_wall_radius_on_axis():
    assert wall_radius(1.0, 0.0, 0.37) == pytest.approx(2.0, abs=1e-15)


def test_wall_radius_inner_point():
    # sin(3*pi/2) = -1 at z = 2/3 for osc = 1
    assert wall_radius(1.0, math.pi, 2.0 / 3.0) == pytest.approx(1.0, abs=1e-12)


def test_wall_radius_quarter_turn():
    # (1/2) * sin(pi/2) + 2
    assert wall_radius(1.0, math.pi / 2.0, 2.0) == pytest.approx(2.5, abs=1e-15)


def test_wall_radius_range_and_symmetry():
    rng = np.random.default_rng(5)
    phi = rng.uniform(-math.pi, math.pi, 500)
    z = rng.uniform(1e-3, 1.0, 500)
    p = math.sqrt(2)
    r = wall_radius(p, phi, z)
    assert np.all(r >= 1.0 - 1e-12) and np.all(r <= 3.0 + 1e-12)
    np.testing.assert_allclose(r, wall_radius(p, -phi, z), rtol=0, atol=0)


def test_wall_radius_rejects_bad_inputs():
    with pytest.raises(ValueError, match="z > 0"):
        wall_radius(1.0, 0.0, 0.0)
    with pytest.raises(ValueError, match="phi"):
        wall_radius(1.0, 4.0, 0.5)


# ------------------------------------------------------------ inner heights

def test_inner_heights_unit_parameters():
    hs = inner_heights(VaseParams(1.0, 1.0), 3)
    assert hs == pytest.approx([2 / 3, 2 / 7, 2 / 11], abs=1e-15)


def test_inner_heights_respect_height_cap():
    hs = inner_heights(VaseParams(0.5, 1.0), 2)
    assert hs == pytest.approx([2 / 7, 2 / 11], abs=1e-15)


def test_inner_heights_irrational_parameter():
    hs = inner_heights(VaseParams(1.0, math.sqrt(2)), 1)
    assert hs[0] == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-15)
    assert hs[0] == pytest.approx(0.942809, abs=1e-6)


def test_inner_heights_are_sine_minima():
    vase = VaseParams(1.0, math.sqrt(3))
    for h in inner_heights(vase, 30):
        assert abs(math.sin(math.pi * vase.osc / h) + 1.0) < 1e-12


def test_inner_heights_interleaving_ratio():
    vase = VaseParams(1.0, math.sqrt(5))
    hs = inner_heights(vase, 20)
    # 2p/(4k+3) ratios: consecutive heights relate by (4k+3)/(4k+7)
    k0 = round((2 * vase.osc / hs[0] - 3) / 4)
    for i, (a, b) in enumerate(zip(hs, hs[1:])):
        k = k0 + i
        assert b / a == pytest.approx((4 * k + 3) / (4 * k + 7), rel=1e-13)


def test_inner_heights_bisection_agrees():
    for p in (1.0, math.sqrt(2), 1.7):
        closed = inner_heights(VaseParams(1.0, p), 10)
        oracle = inner_heights_bisection(VaseParams(1.0, p), 10)
        np.testing.assert_allclose(closed, oracle, rtol=0, atol=1e-12)


def test_wall_is_pinched_at_inner_heights():
    vase = VaseParams(1.0, math.sqrt(2))
    phi = np.linspace(-math.pi, math.pi, 33)
    for h in inner_heights(vase, 10):
        np.testing.assert_allclose(
            wall_radius(vase.osc, phi, h), 2.0 - np.abs(phi) / math.pi, atol=1e-12
        )


# -------------------------------------------------------------- inner curve

def test_inner_curve_values():
    vase = VaseParams(1.0, 1.0)
    pts = inner_curve(vase, 2.0 / 3.0, 9)
    # phi = +-pi ends have r = 1, the midpoint phi = 0 has r = 2
    assert pts[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert pts[-1, 0] == pytest.approx(1.0, abs=1e-12)
    assert pts[4, 0] == pytest.approx(2.0, abs=1e-15)
    assert np.all(pts[:, 3] == 0.0)


def test_inner_curve_degenerate_circle():
    vase = VaseParams(1.0, 0.77)
    pts = inner_curve(vase, 0.77, 17)  # sin(pi) = 0
    np.testing.assert_allclose(pts[:, 0], 2.0, atol=1e-12)


def test_inner_curve_closes():
    vase = VaseParams(1.0, math.sqrt(2))
    pts = inner_curve(vase, 0.5, 33)
    cart = cyl_to_cartesian(pts)
    np.testing.assert_allclose(cart[0], cart[-1], atol=1e-12)


def test_inner_curve_rejects_out_of_range():
    with pytest.raises(ValueError, match="outside"):
        inner_curve(VaseParams(1.0, 1.0), 1.5, 8)


# ----------------------------------------------------------------- pedestal

def test_pedestal_contains_boundary():
    assert pedestal_contains(CylPoint4(r=3.0, phi=1.2, z=0.0, w=0.0))


def test_pedestal_excludes_outside_radius():
    assert not pedestal_contains(CylPoint4(r=3.01, phi=0.0, z=0.0, w=0.0))


def test_pedestal_excludes_off_plane():
    assert not pedestal_contains(CylPoint4(r=2.0, phi=0.0, z=0.1, w=0.0))


# ---------------------------------------------------------------- wall mesh

def test_sample_wall_without_profile():
    mesh = sample_wall(VaseParams(1.0, 1.0), None, 1, phi_steps=16, z_min=0.2)
    assert np.all(mesh.w == 0.0)
    assert np.all(mesh.radius >= 1.0 - 1e-12)
    assert np.all(mesh.radius <= 3.0 + 1e-12)
    assert np.all(np.diff(mesh.z) < 0)
    assert mesh.z[0] == 1.0
    assert np.all(mesh.z > 0.2)


def test_sample_wall_covers_every_oscillation():
    # For osc = 1 there are exactly 10 inner heights at or above 0.05
    # (2/39 ~ 0.0513 counts, 2/43 ~ 0.0465 does not), and the grid puts a
    # sample within one local period of each.
    vase = VaseParams(1.0, 1.0)
    heights = [h for h in inner_heights(vase, 30) if h >= 0.05]
    assert len(heights) == 10
    mesh = sample_wall(vase, None, 1, phi_steps=8, z_min=0.05)
    for h in heights:
        period = 2.0 * h * h / vase.osc
        assert np.min(np.abs(mesh.z - h)) <= period


def test_sample_wall_formula_residual():
    mesh = sample_wall(VaseParams(0.5, math.sqrt(3)), None, 2, phi_steps=16, z_min=0.05)
    expect = (np.abs(mesh.phi)[np.newaxis, :] / math.pi) * np.sin(
        math.pi * mesh.osc / mesh.z
    )[:, np.newaxis] + 2.0
    np.testing.assert_allclose(mesh.radius, expect, atol=1e-12)


def test_sample_wall_budget():
    with pytest.raises(SampleBudgetError, match="budget"):
        sample_wall(VaseParams(1.0, 1.0), None, 1, z_min=1e-6, budget=1000)


def test_adaptive_grid_validates():
    with pytest.raises(ValueError):
        adaptive_z_grid(1.0, 1.0, 1.5, 8)
    with pytest.raises(ValueError):
        adaptive_z_grid(1.0, 1.0, 0.1, 2)
