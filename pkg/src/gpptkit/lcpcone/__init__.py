from .cones import (
    ClassVerdict,
    DEFAULT_SIZE_CAP,
    LcpInstance,
    Method,
    SizeCapError,
    build_m0,
    build_m1,
    is_lcp_solution,
    is_p_dagger,
    is_p_dagger_witness,
    is_r_dagger,
    is_r_dagger_witness,
    p_dagger_violation,
    r_dagger_violation,
    restricted_row_space_projector,
    solve_lcp_enumerate,
)
from .simplex import LpIterationError, find_feasible
