"""tilesub: substitution tilings, orientation statistics, and spectral estimators.

The package generates finite patches of planar substitution tilings, measures
how tile orientations distribute on the circle, estimates autocorrelation and
diffraction of tile control points, and computes a metric distance between
patches based on agreement inside large balls.
"""

from .errors import (
    CapExceededError,
    GeometryError,
    NotPrimitiveError,
    ParseError,
    RuleError,
    TilesubError,
    UsageError,
)
from .geometry import (
    EPS_ANG,
    EPS_GEO,
    Angle,
    Polygon,
    RigidMotion,
    Vec2,
    apply_motion,
    canon_angle,
    circular_distance,
    intersection_area,
    point_in_polygon,
    polygon_area,
)
from .substitution import (
    FrequencyEstimate,
    Patch,
    Prototile,
    SubstitutionRule,
    TilePlacement,
    ValidationReport,
    bundled_rule,
    empirical_frequency,
    expand_translation_classes,
    is_primitive,
    load_rule,
    load_rule_file,
    orientation_census,
    pf_eigen,
    substitute,
    substitution_matrix,
    supertile,
    validate_rule,
)
from .orientstats import (
    OrientationSequence,
    circle_discrepancy,
    equidistribution_report,
    hierarchical_sequence,
    orientation_histogram,
    weyl_sums,
)
from .spectral import (
    IntensityGrid,
    PointSet,
    PolarHistogram,
    autocorrelation,
    ball_window,
    circular_symmetry_stat,
    control_points,
    diffraction,
    integer_lattice_ball,
    intensity_at,
    radial_profile,
    rotation_covariance_check,
)
from .hull import (
    PatchDistance,
    Witness,
    ball_restriction,
    patch_distance,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "Angle",
    "CapExceededError",
    "EPS_ANG",
    "EPS_GEO",
    "FrequencyEstimate",
    "GeometryError",
    "IntensityGrid",
    "NotPrimitiveError",
    "OrientationSequence",
    "ParseError",
    "Patch",
    "PatchDistance",
    "PointSet",
    "PolarHistogram",
    "Polygon",
    "Prototile",
    "RigidMotion",
    "RuleError",
    "SubstitutionRule",
    "TilePlacement",
    "TilesubError",
    "UsageError",
    "ValidationReport",
    "Vec2",
    "Witness",
    "apply_motion",
    "autocorrelation",
    "ball_restriction",
    "ball_window",
    "bundled_rule",
    "canon_angle",
    "circle_discrepancy",
    "circular_distance",
    "circular_symmetry_stat",
    "control_points",
    "diffraction",
    "empirical_frequency",
    "equidistribution_report",
    "expand_translation_classes",
    "hierarchical_sequence",
    "integer_lattice_ball",
    "intensity_at",
    "intersection_area",
    "is_primitive",
    "load_rule",
    "load_rule_file",
    "orientation_census",
    "orientation_histogram",
    "patch_distance",
    "pf_eigen",
    "point_in_polygon",
    "polygon_area",
    "radial_profile",
    "rotation_covariance_check",
    "substitute",
    "substitution_matrix",
    "supertile",
    "validate_rule",
    "verify_witness",
    "weyl_sums",
]
