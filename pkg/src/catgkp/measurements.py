"""Photon counting and homodyne measurements, plus their squeezed variants.

All projections return the *unnormalized* conditional state together with its
weight (a probability for PNRD, a probability density for homodyne).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .fock import (
    DensityState,
    PureState,
    State,
    apply,
    partial_trace,
    project_fock,
    project_mode,
    tensor,
    vacuum,
)
from .gaussian import beamsplitter, squeeze

HOMODYNE_STEP = 0.01
HOMODYNE_RANGE = 6.0

RngLike = Union[None, int, np.random.Generator]


def as_rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class MeasurementOutcome:
    kind: str  # "pnrd" or "homodyne"
    value: float
    probability_density: float
    post_state: State


# -- quadrature wavefunctions -------------------------------------------------

def quadrature_wavefunctions(x, cutoff: int) -> np.ndarray:
    """psi_n(x) = <x|n> for the q quadrature at hbar = 1/2, shape (len(x), cutoff).

    Upward recurrence on normalized Hermite functions, so no factorials appear;
    psi_0 is the Gaussian (2/pi)^{1/4} e^{-x^2}.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = math.sqrt(2.0) * x
    out = np.zeros((x.size, cutoff))
    out[:, 0] = math.pi**-0.25 * np.exp(-0.5 * xi * xi)
    if cutoff > 1:
        out[:, 1] = math.sqrt(2.0) * xi * out[:, 0]
    for n in range(1, cutoff - 1):
        out[:, n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[:, n] - math.sqrt(n / (n + 1)) * out[:, n - 1]
    return out * 2.0**0.25


def quadrature_bras(x, theta: float, cutoff: int) -> np.ndarray:
    """Rows <x_theta|n> = e^{-i theta n} psi_n(x) for x_theta = q cos(theta) + p sin(theta)."""
    psi = quadrature_wavefunctions(x, cutoff)
    return psi * np.exp(-1j * theta * np.arange(cutoff))


def quadrature_density(state: State, mode: int, x, theta: float = 0.0) -> np.ndarray:
    """Marginal probability density of x_theta on ``mode`` at the points ``x``."""
    bras = quadrature_bras(x, theta, state.cutoff)
    if isinstance(state, PureState):
        t = np.moveaxis(state.tensor, mode, 0).reshape(state.cutoff, -1)
        amps = bras @ t
        return np.sum(np.abs(amps) ** 2, axis=1)
    rho = state.matrix if state.modes == 1 else partial_trace(state, [mode]).matrix
    return np.real(np.einsum("xi,ij,xj->x", bras, rho, bras.conj()))


# -- photon counting ----------------------------------------------------------

def pnrd_weights(state: State, mode: int) -> np.ndarray:
    return np.clip(np.asarray(state.populations(mode), dtype=float), 0.0, None)


def pnrd_enumerate(state: State, mode: int, m_max: int | None = None) -> list[MeasurementOutcome]:
    """Every outcome 0..m_max with its exact (unnormalized) weight and post-state."""
    m_max = state.cutoff - 1 if m_max is None else m_max
    if not 0 <= m_max < state.cutoff:
        raise ValueError(f"m_max must lie in [0, {state.cutoff - 1}]")
    out = []
    for m in range(m_max + 1):
        post, w = project_fock(state, mode, m)
        out.append(MeasurementOutcome("pnrd", m, w, post))
    return out


def pnrd_sample(state: State, mode: int, rng: RngLike = None) -> MeasurementOutcome:
    """Draw m from the exact branch weights; reproducible for a fixed seed."""
    gen = as_rng(rng)
    w = pnrd_weights(state, mode)
    total = w.sum()
    if total <= 0:
        raise ValueError("state has zero norm")
    m = int(gen.choice(w.size, p=w / total))
    post, weight = project_fock(state, mode, m)
    return MeasurementOutcome("pnrd", m, weight, post)


def squeezed_pnrd(state: State, mode: int, r: float, theta: float, m: int) -> tuple[State, float]:
    """Apply S(r, theta) to ``mode`` and project it on <m|."""
    squeezed = apply(squeeze(r, theta, state.cutoff), state, mode) if r != 0 else state
    return project_fock(squeezed, mode, m)


# -- homodyne -----------------------------------------------------------------

def homodyne_project(state: State, mode: int, x: float, theta: float = 0.0) -> tuple[State, float]:
    """Contract ``mode`` with <x_theta|; the weight is the probability density at x."""
    if not math.isfinite(x):
        raise ValueError("homodyne outcome must be finite")
    bra = quadrature_bras([x], theta, state.cutoff)[0]
    return project_mode(state, mode, bra)


def homodyne_sample(
    state: State,
    mode: int,
    theta: float = 0.0,
    rng: RngLike = None,
    step: float = HOMODYNE_STEP,
    extent: float = HOMODYNE_RANGE,
) -> MeasurementOutcome:
    """Sample x from the marginal discretized on a grid of spacing ``step`` in [-extent, extent]."""
    gen = as_rng(rng)
    grid = np.arange(-extent, extent + 0.5 * step, step)
    dens = np.clip(quadrature_density(state, mode, grid, theta), 0.0, None)
    x = float(grid[gen.choice(grid.size, p=dens / dens.sum())])
    post, w = homodyne_project(state, mode, x, theta)
    return MeasurementOutcome("homodyne", x, w, post)


# -- two-squeezer 4-cat measurement -------------------------------------------

@dataclass(frozen=True)
class FourCatSpec:
    """Outcome pair of the 4-cat measurement and the projector it approximates.

    ``m1`` is counted behind the q-squeezer (imaginary parts of the
    components), ``m2`` behind the p-squeezer (real parts).
    """

    m1: int
    m2: int
    r: float

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise ValueError("photon counts must be nonnegative")

    @property
    def beta_amplitude(self) -> float:
        return math.sqrt(2.0 * (self.m1 + self.m2)) * math.exp(-abs(self.r))

    @property
    def theta1(self) -> float:
        if self.m2 == 0:
            return math.pi / 2 if self.m1 > 0 else 0.0
        return math.atan(math.sqrt(self.m1 / self.m2))

    def components(self) -> list[tuple[complex, float]]:
        """Four (amplitude, sign) pairs: sqrt(2) e^{-|r|} (+-sqrt(m2) +- i sqrt(m1))."""
        s = math.sqrt(2.0) * math.exp(-abs(self.r))
        re, im = math.sqrt(self.m2) * s, math.sqrt(self.m1) * s
        return [
            (complex(re, im), 1.0),
            (complex(re, -im), (-1.0) ** self.m1),
            (complex(-re, im), (-1.0) ** self.m2),
            (complex(-re, -im), (-1.0) ** (self.m1 + self.m2)),
        ]


def fourcat_circuit(state: State, spec: FourCatSpec) -> tuple[State, float]:
    """Run the measurement on mode 0 of a one-mode ``state``.

    A vacuum probe joins on a balanced beamsplitter; the signal arm passes a
    p-squeezer S(r, pi/2) and is counted (m2), the probe arm a q-squeezer
    S(r, 0) and is counted (m1). Returns the zero-mode residual and its weight.
    """
    if state.modes != 1:
        raise ValueError("the 4-cat measurement acts on a single-mode state")
    d = state.cutoff
    joint = tensor(state, vacuum(d))
    joint = apply(beamsplitter(0.5, d), joint, (0, 1))
    joint = apply(squeeze(spec.r, math.pi / 2, d), joint, 0)
    joint = apply(squeeze(spec.r, 0.0, d), joint, 1)
    joint, _ = project_fock(joint, 1, spec.m1)
    return project_fock(joint, 0, spec.m2)


def fourcat_povm(spec: FourCatSpec, cutoff: int) -> np.ndarray:
    """Vector v with outcome amplitude <v|psi>, built one Fock input at a time.

    The POVM element is |v><v|. Costs ``cutoff`` circuit evaluations.
    """
    v = np.zeros(cutoff, dtype=complex)
    for n in range(cutoff):
        e = np.zeros(cutoff, dtype=complex)
        e[n] = 1.0
        out, _ = fourcat_circuit(PureState(e, 1, cutoff), spec)
        v[n] = np.conj(out.amplitudes[0])
    return v


def fourcat_measurement(state: State, spec: FourCatSpec) -> MeasurementOutcome:
    out, w = fourcat_circuit(state, spec)
    return MeasurementOutcome("pnrd", spec.m1 * 10**6 + spec.m2, w, out)


__all__ = [
    "FourCatSpec",
    "MeasurementOutcome",
    "DensityState",
    "as_rng",
    "fourcat_circuit",
    "fourcat_measurement",
    "fourcat_povm",
    "homodyne_project",
    "homodyne_sample",
    "pnrd_enumerate",
    "pnrd_sample",
    "pnrd_weights",
    "quadrature_bras",
    "quadrature_density",
    "quadrature_wavefunctions",
    "squeezed_pnrd",
]
