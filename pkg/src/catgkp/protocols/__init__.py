"""Protocol runners, schedules, closed-form oracles, grid correction and breeding."""

from .breeding import GATES, breed, breed_tree, matched_gkp
from .config import (
    InputSpec,
    NoiseConfig,
    ProtocolConfig,
    RunRecord,
    eta_schedule_constant,
    eta_schedule_equal_light,
    min_amplitude,
    reflected_fractions,
    squeeze_angles,
)
from .oracles import homodyne_closed_form, predict_components, scheme1_closed_form, squeeze_element
from .phase_approx import (
    best_phase_offset,
    fit_round_phases,
    phase_dist_approx_scheme2,
    top_peaks,
)
from .schemes import enumerate_scheme1, run, run_homodyne, run_scheme1, run_scheme2, squeezed_ancilla
from .transforms import (
    align_to_q,
    correct_to_grid,
    correct_to_grid_fitted,
    expected_delta,
    grid_squeezing,
    prepared_amplitude,
    prepared_squeezing,
    unsqueeze,
    unsqueezed_cat_amplitude,
)

__all__ = [
    "GATES",
    "InputSpec",
    "NoiseConfig",
    "ProtocolConfig",
    "RunRecord",
    "align_to_q",
    "best_phase_offset",
    "breed",
    "breed_tree",
    "correct_to_grid",
    "correct_to_grid_fitted",
    "enumerate_scheme1",
    "eta_schedule_constant",
    "eta_schedule_equal_light",
    "expected_delta",
    "fit_round_phases",
    "grid_squeezing",
    "homodyne_closed_form",
    "matched_gkp",
    "min_amplitude",
    "phase_dist_approx_scheme2",
    "predict_components",
    "prepared_amplitude",
    "prepared_squeezing",
    "reflected_fractions",
    "run",
    "run_homodyne",
    "run_scheme1",
    "run_scheme2",
    "scheme1_closed_form",
    "squeeze_angles",
    "squeeze_element",
    "squeezed_ancilla",
    "top_peaks",
    "unsqueeze",
    "unsqueezed_cat_amplitude",
]
