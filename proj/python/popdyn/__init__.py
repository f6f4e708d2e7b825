"""Two-sex age-structured population projections.

Thin wrapper around the compiled ``_popdyn`` extension.
"""

from ._popdyn import (  # noqa: F401
    AgeGrid,
    Error,
    ExtrapolationError,
    FactorizationFailed,
    InvalidArgument,
    InvalidState,
    IoError,
    NotApplicable,
    ParseError,
    convergence_study,
    disaggregate,
    error_norms,
    generator_matrix,
    interpolate_to_grid,
    load_population,
    omega0,
    project_constant,
    run_scenario,
    stability_window,
    survival_from_life_table,
    verify,
)

__version__ = "0.1.0"
