"""Sampled 4D vase geometry realizing group presentations, with verification."""

from .braid import (
    BhvScene,
    PSequence,
    WProfile,
    ZeroInterval,
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
from .config import BuildConfig, Tolerances
from .disc import (
    BumpG,
    DiscMesh,
    build_disc,
    disc_point_f,
    disjointness_refinement,
    euler_characteristic,
    verify_disjoint,
    verify_injective,
)
from .export import cross_section, export_mesh
from .presentation import (
    FiniteGroupTable,
    ParseError,
    Presentation,
    Word,
    count_homomorphisms,
    cyclic_group,
    dihedral_group_4,
    first_homology,
    free_reduce,
    parse_presentation,
    relator_matrix,
    smith_normal_form,
    standard_oracle_groups,
    symmetric_group_3,
    truncate_presentation,
)
from .realize import (
    BandSchedule,
    CompactnessReport,
    Scene,
    TruncationComplex,
    bands_disjoint,
    build_space,
    compactness_report,
    pi1_report,
    truncate,
)
from .relator_path import (
    AlphaPath,
    HeadroomError,
    PathSegment,
    build_alpha,
    decode_word,
    schedule_inner_heights,
    verify_monotone,
)
from .sceneio import (
    SchemaError,
    VerificationReport,
    VersionError,
    load_scene,
    report_to_json,
    save_scene,
    verify_scene,
)
from .vase import (
    CylPoint4,
    VaseParams,
    WallMesh,
    inner_curve,
    inner_heights,
    inner_heights_bisection,
    pedestal_contains,
    sample_wall,
    wall_radius,
)

__version__ = "0.1.0"
