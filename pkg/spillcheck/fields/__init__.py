from spillcheck.fields.spectra import FactorizationError, FactorSpectrum, factor_spectrum
from spillcheck.fields.stcar import (
    StcarStructure,
    car_log_density,
    sample_car,
    sample_stcar,
    stcar_log_density,
)

__all__ = [
    "FactorSpectrum",
    "FactorizationError",
    "StcarStructure",
    "car_log_density",
    "factor_spectrum",
    "sample_car",
    "sample_stcar",
    "stcar_log_density",
]
