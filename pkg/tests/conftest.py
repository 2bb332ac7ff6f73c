import pytest

import harmonicvase as hv


@pytest.fixture(scope="session")
def bhv5():
    """Five braided vases without meshes, for path round trips."""
    ps = hv.choose_p_sequence(5).mark_verified()
    profiles = hv.build_w_profiles(ps, 0.01)
    return hv.build_bhv(ps, profiles, 0.01, with_meshes=False)


@pytest.fixture(scope="session")
def bhv3():
    """Three braided vases with meshes, for disc disjointness checks."""
    ps = hv.choose_p_sequence(3).mark_verified()
    profiles = hv.build_w_profiles(ps, 0.01)
    return hv.build_bhv(ps, profiles, 0.01)


@pytest.fixture(scope="session")
def scene_two_relators():
    """Scene for <a, b | aba'b', a^3> with meshes and two discs."""
    pres = hv.parse_presentation("gens: a b\nrel: a b a' b'\nrel: a a a")
    return hv.build_space(pres, hv.BuildConfig(disc_resolution=64))
