"""Trapped-surface criteria, Jang graphs and quasilocal energy for spherical initial data."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    CriterionReport,
    malec_omurchadha_criterion,
    soundness_sweep,
    trapped_surface_criterion,
)
from .energy import misner_sharp, theorem3_check, verify_dE_identity  # noqa: E402
from .geometry import GeometryProfile, dec_check, geometry_profile  # noqa: E402
from .horizon import HorizonScan, contains_horizon, scan  # noqa: E402
from .jang import (  # noqa: E402
    BoundaryCondition,
    JangSolution,
    jang_diagnostics,
    solve_jang,
    verify_geroch_identity,
    verify_mass_inequality_chain,
)
from .kernels import BACKEND  # noqa: E402
from .radial_data import (  # noqa: E402
    DataError,
    FamilySpec,
    InitialData,
    build_family,
    load_data,
    save_data,
    tabulate,
    validate,
)

__all__ = [
    "BACKEND", "BoundaryCondition", "CriterionReport", "DataError", "FamilySpec", "GeometryProfile",
    "HorizonScan", "InitialData", "JangSolution", "build_family", "contains_horizon", "dec_check",
    "geometry_profile", "jang_diagnostics", "load_data", "malec_omurchadha_criterion",
    "misner_sharp", "save_data", "scan", "solve_jang", "soundness_sweep", "tabulate",
    "theorem3_check", "trapped_surface_criterion", "validate", "verify_dE_identity",
    "verify_geroch_identity", "verify_mass_inequality_chain",
]
