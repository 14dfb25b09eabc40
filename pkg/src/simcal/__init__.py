"""simcal: eligibility-set calibration for black-box stochastic simulators."""

__version__ = "0.1.0"
