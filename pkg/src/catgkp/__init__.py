"""Deterministic squeezed-cat and GKP state preparation in a truncated Fock space."""

from .fock import (
    CutoffExceeded,
    DensityState,
    ModeOperator,
    PureState,
    apply,
    load_state,
    make_fock,
    partial_trace,
    project_mode,
    save_state,
    tensor,
    vacuum,
)
from .kernels import BACKEND

__version__ = "0.1.0"
