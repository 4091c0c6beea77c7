"""Life-span bounds, simulation and energy certificates for Kirchhoff-type wave equations."""

from .bounds import (
    BoundReport,
    Verdict,
    classical_bound,
    compare_bounds,
    compute_K,
    eta_prime,
    gevrey_bound,
)
from .kirchhoff import (
    SimulationResult,
    ThetaResult,
    direct_solve,
    energy_32,
    fixed_point_solve,
    hamiltonian,
    lifespan_probe,
    theta_map,
)
from .linear import (
    CertificateReport,
    ClassKParams,
    CoefficientPath,
    check_class_membership,
    energy_certificate,
    oscillating_path,
    solve_mode,
)
from .nonlinearity import (
    AffinePhi,
    DataConstants,
    SampledPhi,
    compute_data_constants,
    eval_phi,
    phi_star,
)
from .spectral import (
    FrequencyShell,
    GevreyParams,
    SpectralProfile,
    from_radial_samples,
    pair_gevrey_norm_sq,
    weighted_norm_sq,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Verdict",
    "classical_bound",
    "compare_bounds",
    "compute_K",
    "eta_prime",
    "gevrey_bound",
    "SimulationResult",
    "ThetaResult",
    "direct_solve",
    "energy_32",
    "fixed_point_solve",
    "hamiltonian",
    "lifespan_probe",
    "theta_map",
    "CertificateReport",
    "ClassKParams",
    "CoefficientPath",
    "check_class_membership",
    "energy_certificate",
    "oscillating_path",
    "solve_mode",
    "AffinePhi",
    "DataConstants",
    "SampledPhi",
    "compute_data_constants",
    "eval_phi",
    "phi_star",
    "FrequencyShell",
    "GevreyParams",
    "SpectralProfile",
    "from_radial_samples",
    "pair_gevrey_norm_sq",
    "weighted_norm_sq",
]
