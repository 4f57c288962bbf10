"""Adaptive Bayesian quantum process tomography simulator."""

from ._aqpt import (
    __version__,
    apply_channel,
    average_transmittance,
    bures_distance_sq,
    chi_to_kraus,
    fit_waveplate,
    haar_random_unitary,
    kraus_to_chi,
    make_channel,
    measurement_povm,
    outcome_prob,
    plateau_detect,
    power_law_fit,
    prepared_state,
    process_distance,
    purity,
    run_tomography,
)

__all__ = [
    "__version__",
    "apply_channel",
    "average_transmittance",
    "bures_distance_sq",
    "chi_to_kraus",
    "fit_waveplate",
    "haar_random_unitary",
    "kraus_to_chi",
    "make_channel",
    "measurement_povm",
    "outcome_prob",
    "plateau_detect",
    "power_law_fit",
    "prepared_state",
    "process_distance",
    "purity",
    "run_tomography",
]
