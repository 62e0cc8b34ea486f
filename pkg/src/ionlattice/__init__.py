"""Harmonic ring chain near the buckling transition.

Equilibrium configurations, normal-mode spectra, thermal covariance
matrices, pair and block entanglement measures, and an energy-based
entanglement witness, for a ring of transversely trapped charges with
nearest-neighbour or longer-range quadratic couplings. hbar = k_B = 1
throughout.
"""

from .covariance import (
    CovarianceMatrix,
    PairMoments,
    block_covariance,
    direct_covariance_oracle,
    pair_moments,
    td_pair_criteria,
    td_single_site_eigenvalue,
)
from .entanglement import (
    BlockEntropyReport,
    EntanglementReport,
    Violation,
    block_entropy,
    block_entropy_profile,
    negativity,
    negativity_cross_check,
    pair_entanglement,
    separability_criteria,
    symplectic_spectrum,
    von_neumann_entropy,
)
from .errors import (
    ConfigError,
    DegenerateCoupling,
    DivergentIntegral,
    DomainError,
    ImaginaryFrequency,
    NoConvergence,
    NumericalFailure,
    QuadratureFailure,
    SizeLimitExceeded,
)
from .lattice import (
    Configuration,
    CouplingCoefficients,
    LatticeParams,
    Model,
    Variant,
    critical_potential,
    equilibrium_residual,
    solve_equilibrium,
    taylor_coefficients,
)
from .quadrature import Divergent
from .spectrum import (
    ModeEntry,
    ModeSpectrum,
    build_spectrum,
    coupling_matrix,
    linear_dispersion,
    symplectic_diagonalize,
    tilde_frequencies,
)
from .witness import (
    WitnessReport,
    critical_temperature,
    effective_frequencies,
    internal_energy,
    separability_bound,
    witness_report,
)

__version__ = "0.1.0"

__all__ = [
    "BlockEntropyReport",
    "Configuration",
    "ConfigError",
    "CouplingCoefficients",
    "CovarianceMatrix",
    "DegenerateCoupling",
    "Divergent",
    "DivergentIntegral",
    "DomainError",
    "EntanglementReport",
    "ImaginaryFrequency",
    "LatticeParams",
    "Model",
    "ModeEntry",
    "ModeSpectrum",
    "NoConvergence",
    "NumericalFailure",
    "PairMoments",
    "QuadratureFailure",
    "SizeLimitExceeded",
    "Variant",
    "Violation",
    "WitnessReport",
    "block_covariance",
    "block_entropy",
    "block_entropy_profile",
    "build_spectrum",
    "coupling_matrix",
    "critical_potential",
    "critical_temperature",
    "direct_covariance_oracle",
    "effective_frequencies",
    "equilibrium_residual",
    "internal_energy",
    "linear_dispersion",
    "negativity",
    "negativity_cross_check",
    "pair_entanglement",
    "pair_moments",
    "separability_bound",
    "separability_criteria",
    "solve_equilibrium",
    "symplectic_diagonalize",
    "symplectic_spectrum",
    "taylor_coefficients",
    "td_pair_criteria",
    "td_single_site_eigenvalue",
    "tilde_frequencies",
    "von_neumann_entropy",
    "witness_report",
]
