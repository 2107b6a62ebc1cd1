"""Central-charge paths and wall/chamber analysis on blowup surfaces.

The package simulates the time-dependent central charges driven by the
truncated quantum differential equation of a one-point blowup, classifies
the walls and glued regions they traverse, runs quasi-convergence
diagnostics along them, and tracks the induced two-component
semiorthogonal decompositions symbolically.
"""

from .lattice import (
    CatalogObject,
    ChernClass,
    DivisorClass,
    SurfaceModel,
    build_catalog,
    c_multiple,
    chern_of,
    default_model,
    euler_pairing_point_curve,
    make_surface_model,
    oc_class,
    pullback_divisor,
    pullback_line_class,
    pullback_structure_class,
    skyscraper_class,
    twist,
)
from .specfun import EiValue, ei, ei_derivative, ei_value, find_T0
from .charges import (
    CentralCharge,
    PathConfig,
    YCharge,
    YClass,
    decompose_class,
    geometric_charge,
    glued_charge,
    normalized_charge,
    path_charge,
    recompose_class,
)
from .qde import (
    QdeParams,
    QdeState,
    QdeTrajectory,
    closed_form,
    closed_form_trajectory,
    gw_correction,
    integrate,
    q_from_psi_c,
    qde_rhs,
    second_order_residual,
)
from .chambers import (
    LePotierModel,
    RegionLabel,
    WallCrossing,
    ck_window,
    classify_glued,
    default_le_potier,
    find_wall_crossing,
    geometric_test,
    sector_constant,
    w2_membership,
)
from .paths import (
    AssumptionReport,
    PathEvaluator,
    QcReport,
    Trajectory,
    boundary_path_config,
    build_path,
    check_assumptions,
    extend_into_geometric,
    induced_sod,
    intro_path_config,
    quasi_convergence_report,
    resolve_weight,
    sample_trajectory,
    trajectories_csv,
    w2_path_config,
)
from .sod import (
    RecollementLabel,
    SodLabel,
    lower_recollement,
    mutate,
    mutation_orbit,
    recollement_of,
    twist_by_oc,
    upper_recollement,
)

__version__ = "0.1.0"
