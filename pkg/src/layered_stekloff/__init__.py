"""Spectral solver for delta-Stekloff eigenvalues of radially layered balls."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AssumptionViolated,
    InteriorResonance,
    InvalidInput,
    NumericalFailure,
    StekloffError,
)
from .radial import LayeredMedium, Polarization, check_assumption  # noqa: E402
from .scattering import detect_eigenvalues, mie_coefficients  # noqa: E402
from .specfun import BesselKind, riccati_derivative, sph_bessel  # noqa: E402
from .stekloff import EigRecord, Flavor, psi_operator, spectrum  # noqa: E402
from .surface import SurfaceSpectrum, TangentialField  # noqa: E402

__all__ = [
    "AssumptionViolated",
    "BesselKind",
    "EigRecord",
    "Flavor",
    "InteriorResonance",
    "InvalidInput",
    "LayeredMedium",
    "NumericalFailure",
    "Polarization",
    "StekloffError",
    "SurfaceSpectrum",
    "TangentialField",
    "check_assumption",
    "detect_eigenvalues",
    "mie_coefficients",
    "psi_operator",
    "riccati_derivative",
    "sph_bessel",
    "spectrum",
]
