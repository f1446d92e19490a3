"""mmconc: mass transportation, observable diameters, and invariance defects
on finite metric measure spaces and finite groups."""

__version__ = "0.1.0"

from .concentration import (
    AtomicRealMeasure,
    ConcentrationReport,
    LevyScanReport,
    ObsDiamReport,
    assert_metric_dominated,
    concentration_report,
    levy_scan,
    lipschitz_partdiam_optimum,
    median,
    median_deviation_profile,
    observable_diameter,
    partial_diameter,
    pushforward_on_line,
)
from .core import (
    FiniteMetricSpace,
    Measure,
    MmSpace,
    PointMap,
    pushforward,
    restrict,
    support,
)
from .distances import (
    ky_fan_distance,
    lip11_family_gap,
    mass_transport_distance,
    prokhorov_distance,
    prokhorov_distance_exhaustive,
)
from .dynamics import (
    FlowInstance,
    OrbitBoundReport,
    average_orbit_displacement,
    flow_orbit_metric,
    haar_average,
    min_displacement_point,
    orbit_bound_report,
    point_orbit_metric,
)
from .errors import MmconcError
from .groups import (
    FiniteGroup,
    RightInvariantMetric,
    difference_set_union,
    invariance_defect,
    pushforward_hom,
    translation,
)
from .lipschitz import (
    LipschitzApproximation,
    clamp,
    inf_convolution,
    lip1_candidates,
    lip_constant,
    lipschitz_extension,
    mcshane_nearest,
    uniform_lipschitz_approximation,
)
from .scenarios import run_scenario, scenario_names

__all__ = [
    "AtomicRealMeasure",
    "ConcentrationReport",
    "FiniteGroup",
    "FiniteMetricSpace",
    "FlowInstance",
    "LevyScanReport",
    "LipschitzApproximation",
    "Measure",
    "MmSpace",
    "MmconcError",
    "ObsDiamReport",
    "OrbitBoundReport",
    "PointMap",
    "RightInvariantMetric",
    "assert_metric_dominated",
    "average_orbit_displacement",
    "clamp",
    "concentration_report",
    "difference_set_union",
    "flow_orbit_metric",
    "haar_average",
    "inf_convolution",
    "invariance_defect",
    "ky_fan_distance",
    "levy_scan",
    "lip11_family_gap",
    "lip1_candidates",
    "lip_constant",
    "lipschitz_extension",
    "lipschitz_partdiam_optimum",
    "mass_transport_distance",
    "mcshane_nearest",
    "median",
    "median_deviation_profile",
    "min_displacement_point",
    "observable_diameter",
    "orbit_bound_report",
    "partial_diameter",
    "point_orbit_metric",
    "prokhorov_distance",
    "prokhorov_distance_exhaustive",
    "pushforward",
    "pushforward_hom",
    "pushforward_on_line",
    "restrict",
    "run_scenario",
    "scenario_names",
    "support",
    "translation",
    "uniform_lipschitz_approximation",
    "__version__",
]
