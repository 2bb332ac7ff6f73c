import math

import numpy as np
import pytest

from harmonicvase.braid import (
    CoincidenceError,
    PSequence,
    build_bhv,
    build_w_profiles,
    choose_p_sequence,
    intersection_heights,
    min_wall_separation,
    scan_intersection_heights,
    verify_independence,
    verify_profile_conditions,
    w_eval,
)
from harmonicvase.config import Tolerances
from harmonicvase.vase import VaseParams, inner_heights

SQRT2 = math.sqrt(2)
SQRT3 = math.sqrt(3)


# ---------------------------------------------------------------- p sequence

def test_choose_p_sequence_values():
    ps = choose_p_sequence(3)
    assert ps.floats == pytest.approx((SQRT2, SQRT3, math.sqrt(5)), abs=1e-15)
    assert ps.provenance == "sqrt-prime"
    assert not ps.verified_no_coincidence


def test_choose_p_sequence_precision():
    ps = choose_p_sequence(2)
    digits = ps.decimals[0].replace(".", "").lstrip("0")
    assert len(digits) >= 50
    assert ps.decimals[0].startswith("1.4142135623730950488016887242096980785696718753769")


def test_p_sequence_distinctness_enforced():
    with pytest.raises(ValueError, match="distinct"):
        PSequence(decimals=("2", "2.0"), provenance="test")


# ------------------------------------------------------ intersection heights

def test_intersection_heights_reference_pair():
    pts = intersection_heights(SQRT3, SQRT2, 2, z_floor=0.05)
    diff = SQRT3 - SQRT2
    total = SQRT3 + SQRT2
    for expected in (diff / 2, diff / 4, total / 7, total / 9):
        assert any(abs(z - expected) < 1e-13 for z in pts)
    # (sqrt3 + sqrt2)/5 ~ 0.629 exceeds the vase height 1/2
    assert all(z <= 0.5 for z in pts)
    assert not any(abs(z - total / 5) < 1e-9 for z in pts)
    assert pts == sorted(pts, reverse=True)


def test_intersection_heights_satisfy_defining_equation():
    pts = intersection_heights(math.sqrt(5), SQRT2, 3, z_floor=0.02)
    assert pts
    for z in pts:
        lhs = math.sin(math.pi * math.sqrt(5) / z)
        rhs = math.sin(math.pi * SQRT2 / z)
        assert abs(lhs - rhs) < 1e-10


def test_intersection_heights_rejects_equal_parameters():
    with pytest.raises(ValueError, match="distinct"):
        intersection_heights(1.5, 1.5, 2, z_floor=0.1)


def test_scan_matches_closed_form():
    closed = intersection_heights(SQRT3, SQRT2, 2, z_floor=0.05)
    scanned = scan_intersection_heights(SQRT3, SQRT2, 2, z_floor=0.05)
    assert len(closed) == len(scanned)
    np.testing.assert_allclose(closed, scanned, rtol=0, atol=1e-9)


# --------------------------------------------------------------- independence

def test_independence_sqrt_primes_passes():
    rep = verify_independence(choose_p_sequence(4), depth=30)
    assert rep.passed
    assert rep.min_gap > 1e-9


def test_independence_single_vase_trivial():
    rep = verify_independence(choose_p_sequence(1), depth=10)
    assert rep.passed
    assert rep.min_gap == math.inf
    assert rep.location is None


def test_independence_exact_rational_collision_fails():
    # For p = (3, 7): 2*7/(4k+3) = (7-3)/(2n) has the exact solution
    # k = 8, n = 5, both heights equal to 2/5, inside vase 2's domain.
    rep = verify_independence(PSequence(decimals=("3", "7"), provenance="test"), depth=30)
    assert not rep.passed
    assert rep.min_gap == 0.0
    i, j, h, z = rep.location
    assert (i, j) == (2, 1)
    assert h == pytest.approx(0.4, abs=1e-15)
    assert z == pytest.approx(0.4, abs=1e-15)


def test_independence_reports_margin_for_rational_pair():
    # (1, 3) has no exact collision; the check still runs and reports a
    # finite margin, which at this depth clears the default tolerance.
    rep = verify_independence(PSequence(decimals=("1", "3"), provenance="test"), depth=30)
    assert math.isfinite(rep.min_gap)
    assert rep.min_gap > 0


# -------------------------------------------------------------- w profiles

@pytest.fixture(scope="module")
def profiles4():
    ps = choose_p_sequence(4)
    return ps, build_w_profiles(ps, 0.01)


def test_profiles_vanish_at_inner_heights(profiles4):
    ps, profiles = profiles4
    for prof in profiles:
        vase = VaseParams(height=prof.height, osc=ps.floats[prof.vase_index - 1])
        for h in inner_heights(vase, 5):
            if h < 0.01:
                break
            assert w_eval(prof, h) == 0.0


def test_profiles_stay_below_height(profiles4):
    ps, profiles = profiles4
    for prof in profiles:
        zs = np.linspace(0.01, prof.height, 1000)
        w = np.asarray(w_eval(prof, zs))
        assert np.all(w <= prof.theta * zs + 1e-15)
        assert np.all(math.pi * w < zs)


def test_profiles_separate_at_intersection_heights(profiles4):
    ps, profiles = profiles4
    values = ps.floats
    for i in range(2, 5):
        for j in range(1, i):
            for z in intersection_heights(values[i - 1], values[j - 1], i, 0.01):
                gap = abs(w_eval(profiles[i - 1], z) - w_eval(profiles[j - 1], z))
                assert gap > 1e-9


def test_profile_intervals_disjoint_and_contain_one_height(profiles4):
    ps, profiles = profiles4
    for prof in profiles:
        vase = VaseParams(height=prof.height, osc=ps.floats[prof.vase_index - 1])
        heights = [h for h in inner_heights(vase, 200) if h >= 0.01]
        ordered = sorted(prof.intervals, key=lambda iv: -iv.center)
        for above, below in zip(ordered, ordered[1:]):
            assert below.hi < above.lo
        for iv in ordered:
            inside = [h for h in heights if iv.lo <= h <= iv.hi]
            assert len(inside) == 1
        assert len(ordered) == len(heights)


def test_verify_profile_conditions_passes(profiles4):
    ps, profiles = profiles4
    rep = verify_profile_conditions(profiles, ps, 0.01)
    assert rep.passed
    assert rep.min_separation > 1e-9
    assert rep.max_w_over_z < 1.0


def test_profile_repair_budget_exhausts():
    # An absurd coincidence tolerance forces endless shrinking.
    ps = choose_p_sequence(2)
    with pytest.raises(CoincidenceError, match="repair budget"):
        build_w_profiles(ps, 0.01, Tolerances(coincidence=0.5))


# ------------------------------------------------------------------- w_eval

def test_w_eval_plateau_value(profiles4):
    _, profiles = profiles4
    prof = profiles[0]
    # far from every interval: at least one sampled point saturates
    zs = np.linspace(0.01, prof.height, 4000)
    w = np.asarray(w_eval(prof, zs))
    assert np.max(w / (prof.theta * zs)) == pytest.approx(1.0, abs=1e-12)


def test_w_eval_continuity_bound(profiles4):
    _, profiles = profiles4
    prof = profiles[1]
    ramp = min(iv.ramp for iv in prof.intervals)
    delta = ramp / 50
    zs = np.arange(0.02, prof.height - delta, delta / 3)
    w1 = np.asarray(w_eval(prof, zs))
    w2 = np.asarray(w_eval(prof, zs + delta))
    bound = (prof.theta + prof.theta * (zs + delta) / ramp) * delta
    assert np.all(np.abs(w2 - w1) <= bound + 1e-15)


def test_w_eval_domain():
    prof = build_w_profiles(choose_p_sequence(1), 0.05)[0]
    with pytest.raises(ValueError, match="height outside"):
        w_eval(prof, 1.5)
    with pytest.raises(ValueError, match="height outside"):
        w_eval(prof, 0.0)


# ---------------------------------------------------------------- bhv scene

def test_build_bhv_heights_and_bounds():
    ps = choose_p_sequence(3).mark_verified()
    profiles = build_w_profiles(ps, 0.02)
    scene = build_bhv(ps, profiles, 0.02, phi_steps=16)
    assert [m.height for m in scene.meshes] == [1.0, 0.5, 1.0 / 3.0]
    for mesh in scene.meshes:
        z = mesh.z[:, np.newaxis]
        assert np.all(mesh.w >= 0.0)
        assert np.all(mesh.w < z)
        assert np.all(mesh.radius <= 3.0 + 1e-12)
        assert float(np.max(mesh.w / z)) <= 1.0 / (mesh.vase_index + 1) + 1e-12


# ---------------------------------------------------------- wall separation

def test_min_wall_separation_positive_with_exclusion(bhv3):
    rep = min_wall_separation(bhv3, 0.05, z_window=(0.05, 1.0), z_samples=256)
    assert rep.min_distance > 0
    assert rep.vase_pair is not None


def test_min_wall_separation_zero_without_exclusion(bhv3):
    rep = min_wall_separation(bhv3, 0.0, z_window=(0.05, 1.0), z_samples=64)
    assert rep.min_distance == pytest.approx(0.0, abs=1e-15)


def test_min_wall_separation_at_intersection_heights(bhv3):
    # At an intersection height the radial parts agree and the distance is
    # |phi| * |w_i - w_j|; the reported minimum can never undercut the
    # smallest such product over the excluded grid.
    delta = 0.05
    rep = min_wall_separation(bhv3, delta, z_window=(0.05, 1.0), z_samples=256)
    values = bhv3.ps.floats
    floor = math.inf
    for i in range(2, 4):
        for j in range(1, i):
            for z in intersection_heights(values[i - 1], values[j - 1], i, 0.05):
                gap = abs(
                    w_eval(bhv3.profiles[i - 1], z) - w_eval(bhv3.profiles[j - 1], z)
                )
                floor = min(floor, delta * gap)
    assert rep.min_distance <= floor + 1e-12
    assert rep.min_distance > 0
