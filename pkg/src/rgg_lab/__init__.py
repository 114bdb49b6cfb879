"""Unit-ball random geometric graphs under l_p metrics."""
from .errors import RegimeError, ResourceError, UsageError
from .lp_geometry import INFINITY, LpExponent, as_exponent, lp_distance
from .sampler import PointSet, Seed, sample_d1, sample_unit_ball
from .graph_core import RggGraph, build_graph, build_graph_naive
from .analysis import UNDEFINED, connected_components, exact_diameter, hitting_radii

__version__ = "0.1.0"
