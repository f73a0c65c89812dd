"""Structure-preserving simulator for reactive micro-macro polymer flows.

Thin wrapper over the compiled extension: two Fokker-Planck species coupled
by breakage/reforming kinetics and an incompressible solvent, with discrete
conservation, dissipation, and coercivity diagnostics.
"""

from ._core import (
    ConfigurationError,
    EnergyReport,
    InvariantViolation,
    PotentialKind,
    Session,
    SimConfig,
    SobolevReport,
    __version__,
    eigenvalues,
    manifest_hash,
    parse_config,
    spectral_gap,
)

__all__ = [
    "ConfigurationError",
    "EnergyReport",
    "InvariantViolation",
    "PotentialKind",
    "Session",
    "SimConfig",
    "SobolevReport",
    "__version__",
    "eigenvalues",
    "manifest_hash",
    "parse_config",
    "spectral_gap",
]
