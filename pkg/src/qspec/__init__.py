"""Time-varying quantile (copula) spectral analysis of locally stationary series."""
from .analysis import (BandwidthInputs, asymptotic_mse, best_match, field_l2_distance,
                       ground_truth, optimal_parameters, theoretical_iid_spectrum, wigner_ville)
from .calibration import (CalibrationBands, calibrate, colorize, extend_scale, load_bands,
                          save_bands)
from .core import (BARTLETT, PARZEN, EstimationPlan, FrequencyGrid, LagWindow, SpectralField,
                   fourier_snap, get_kernel, neighborhood)
from .errors import (BoundaryError, ConfigError, DomainError, ParseError, QSpecError,
                     SimulationError)
from .estimator import indicator_ccov, lag_window_estimate, local_ecdf, local_quantile, sweep
from .models import (IID, TvAR2, TvARCHInf, TvGARCH, TvMA, TvQAR1, estimate_local_variance,
                     lss_distance, preset, simulate, simulate_stationary, tvarch0_bootstrap,
                     tvarch1)

__all__ = [
    "BandwidthInputs",
    "asymptotic_mse",
    "best_match",
    "field_l2_distance",
    "ground_truth",
    "optimal_parameters",
    "theoretical_iid_spectrum",
    "wigner_ville",
    "CalibrationBands",
    "calibrate",
    "colorize",
    "extend_scale",
    "load_bands",
    "save_bands",
    "BARTLETT",
    "PARZEN",
    "EstimationPlan",
    "FrequencyGrid",
    "LagWindow",
    "SpectralField",
    "fourier_snap",
    "get_kernel",
    "neighborhood",
    "BoundaryError",
    "ConfigError",
    "DomainError",
    "ParseError",
    "QSpecError",
    "SimulationError",
    "indicator_ccov",
    "lag_window_estimate",
    "local_ecdf",
    "local_quantile",
    "sweep",
    "IID",
    "TvAR2",
    "TvARCHInf",
    "TvGARCH",
    "TvMA",
    "TvQAR1",
    "estimate_local_variance",
    "lss_distance",
    "preset",
    "simulate",
    "simulate_stationary",
    "tvarch0_bootstrap",
    "tvarch1",
]

__version__ = "0.1.0"
