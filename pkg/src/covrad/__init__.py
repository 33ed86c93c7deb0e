"""covrad: covering radii of random point configurations.

Sampling on a catalog of metric-measure domains, certified covering-radius
bounds via probe nets, occupancy probabilities, and Monte Carlo studies of
the asymptotic covering behavior of random points.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    InvalidGeometryError,
    ResourceLimitError,
    UnsupportedDomainError,
)
from .spaces import (
    ArcsineInterval,
    Ball,
    Cantor,
    Cube,
    IntervalUniform,
    Polyhedron3,
    Polyline,
    RegularityWitness,
    Sphere,
    domain_from_json,
    domain_to_json,
    hausdorff_mass,
    limit_constant,
    min_dihedral_angle,
    regularity_witness,
    unit_ball_volume,
    unit_box_polyhedron,
)
from .sampler import SampleSet, SeedSpec, sample, sample_stream
from .nets import ProbeNet, SpatialIndex, build_index, build_probe_net, greedy_separated_net, nearest
from .covering import (
    CoveringRadiusInterval,
    NetVerdict,
    Verdict,
    WindowSpec,
    ball_measure,
    covering_radius_1d,
    covering_radius_bounds,
    covering_radius_window,
    is_eps_net,
    is_measure_eps_net,
)
from .auxfn import OccupancyParams, RegimeSpec, f_dp, f_exact, f_lower_bound, regime_params
