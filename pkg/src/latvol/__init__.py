"""Volume bounds and spanning tree entropy for biperiodic planar graphs."""
from .hyp import V_OCT, V_TET, bipyramid_volume, lobachevsky
from .kernels import BACKEND
from .torus_map import (
    PlanarGraph,
    ToroidalMap,
    cover,
    dual,
    faces,
    medial,
    parallel_edges,
    planar_patch,
    temperleyan,
    truncate,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PlanarGraph",
    "ToroidalMap",
    "V_OCT",
    "V_TET",
    "bipyramid_volume",
    "cover",
    "dual",
    "faces",
    "lobachevsky",
    "medial",
    "parallel_edges",
    "planar_patch",
    "temperleyan",
    "truncate",
    "validate",
]
