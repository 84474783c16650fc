"""Low-order spectral-Galerkin thermal model of cylindrical lithium-ion cells."""

from .assembly import (
    CASE1_FACES,
    CASE2_FACES,
    REFERENCE_GEOMETRY,
    REFERENCE_PROPS,
    CellGeometry,
    Face,
    FaceCondition,
    StateSpaceModel,
    ThermalProps,
    assemble_2d,
    bc_constants,
    build_1d_model,
    scale_problem,
    uniform_faces,
)
from .dynamics import (
    LoadProfile,
    SimulationResult,
    biot_number,
    frequency_response,
    project_initial_condition,
    reconstruct_field,
    simulate,
    steady_state,
)
from .errors import DegenerateBC, DegenerateLifting, DomainError, NumericError
from .reference_fd import fd_solve_steady, fd_solve_transient

__version__ = "0.1.0"
