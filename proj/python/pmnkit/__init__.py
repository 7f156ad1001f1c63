"""Perceptive mobile network simulation and sensing toolkit."""

from ._core import (  # noqa: F401
    ClutterState,
    OfdmGrid,
    PathEstimate,
    PathParams,
    Scene,
    UlaConfig,
    dbm_to_watts,
    freq_channel,
    nr_type_b_indexes,
    pathloss,
    residual_noise_var,
    rho_closed_form,
    run_experiment_json,
    sample_scene_json,
    steering,
    thermal_noise_power,
    watts_to_dbm,
)
