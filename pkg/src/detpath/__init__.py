"""Certified paths in GL+(n) and the intrinsic/extrinsic distance ratio.

The functional core builds, for two matrices with positive determinant, a
polyline that stays in GL+(n) and reports its length against the Frobenius
distance. Estimator wrappers live in :mod:`detpath.estimators`.
"""

from .bench import ConstantEstimate, adversarial_family, estimate_constant, sample_glplus
from .cone2 import TorusPoint, cone_path, surgery2, torus_geodesic
from .matspace import (
    ConeCoords2,
    DetPolynomial,
    SvdFactorization,
    cofactor_matrix,
    det,
    det_along_segment,
    frobenius_dist,
    from_cone_coords,
    svd,
    to_cone_coords,
)
from .paths import PathCertificate, PolylinePath, certify
from .shorten import (
    RegionOracle,
    cusp_oracle,
    cusp_ratio,
    glplus_oracle,
    grid_intrinsic_distance,
    shorten_path,
)
from .strata import (
    NormalForm,
    StratumLabel,
    classify_rank,
    distance_to_variety,
    normalize_stratum_point,
    project_to_rank,
    rank_bump_direction,
    stratum_jacobian_spectrum,
    stratum_parametrization,
)
from .surgery import (
    InfeasiblePathError,
    SegmentDecomposition,
    ascend_stratum,
    build_path,
    pushout_to_glplus,
    sphere_connect,
    split_segment,
    variety_arc,
)

__all__ = [
    "adversarial_family",
    "ascend_stratum",
    "build_path",
    "certify",
    "classify_rank",
    "cofactor_matrix",
    "cone_path",
    "ConeCoords2",
    "ConstantEstimate",
    "cusp_oracle",
    "cusp_ratio",
    "det",
    "det_along_segment",
    "DetPolynomial",
    "distance_to_variety",
    "estimate_constant",
    "frobenius_dist",
    "from_cone_coords",
    "glplus_oracle",
    "grid_intrinsic_distance",
    "InfeasiblePathError",
    "NormalForm",
    "normalize_stratum_point",
    "PathCertificate",
    "PolylinePath",
    "project_to_rank",
    "pushout_to_glplus",
    "rank_bump_direction",
    "RegionOracle",
    "sample_glplus",
    "SegmentDecomposition",
    "shorten_path",
    "sphere_connect",
    "split_segment",
    "stratum_jacobian_spectrum",
    "stratum_parametrization",
    "StratumLabel",
    "surgery2",
    "svd",
    "SvdFactorization",
    "to_cone_coords",
    "torus_geodesic",
    "TorusPoint",
    "variety_arc",
]

__version__ = "0.1.0"
