"""Sunada cover diagrams, geodesic flows, and Guillemin-Ruelle L-functions.

Subpackages:

- :mod:`sunada_zeta.groups` -- exact finite-group algebra, Gassmann
  certification, unitary intertwining kernels on double cosets.
- :mod:`sunada_zeta.sunada` -- finite free cover models, lifted Radon
  transforms, Koopman intertwining and flat-trace equality checks.
- :mod:`sunada_zeta.geoflow` -- geodesic flow with variational equations,
  closed-orbit search, Poincare maps on builtin surfaces.
- :mod:`sunada_zeta.zeta` -- clean fixed components, transverse determinants,
  canonical volumes, L-function partial sums.
- :mod:`sunada_zeta.statphase` -- Bott-Morse stationary phase and
  mollification rate checks on periodic model problems.
- :mod:`sunada_zeta.cli` -- the ``sunada-zeta`` command line front end.
"""

from .groups import (
    FiniteGroup,
    GassmannCertificate,
    GroupError,
    IntertwinerKernel,
    Subgroup,
    conjugacy_classes,
    cosets,
    double_cosets,
    gassmann_search,
    intertwiner_solve,
    is_gassmann,
    parse_group,
    parse_group_file,
    permutation_character,
    subgroups_conjugate,
    verify_intertwiner,
)
from .sunada import (
    CoverDiagram,
    EquivariantDynamics,
    RadonMatrix,
    build_cover,
    equivariant_dynamics,
    flat_trace_discrete,
    lift_radon,
    random_equivariant_dynamics,
    trace_equality_sweep,
    verify_intertwining,
    verify_trace_equality,
)
from .geoflow import (
    ClosedOrbit,
    FlatTorus,
    PhasePoint,
    RoundSphere,
    RevolutionProfile,
    SurfaceOfRevolution,
    det_I_minus_P,
    find_closed_orbits,
    hamilton_rhs,
    integrate_flow,
    integrate_monodromy,
    manifold_from_spec,
    orbit_from_start,
    poincare_map,
)
from .zeta import (
    FixedComponent,
    LSeries,
    canonical_volume,
    classify_fixed_set,
    flat_trace_weights,
    l_function_eval,
    oracle_flat_torus,
    transverse_determinant,
)
from .statphase import (
    PhaseProblem,
    builtin_problem,
    mollification_error_order,
    mollify,
    oscillatory_integral,
    stationary_phase_prediction,
    transverse_weight_from_phase,
    validate_stationary_phase,
)

__version__ = "0.1.0"
