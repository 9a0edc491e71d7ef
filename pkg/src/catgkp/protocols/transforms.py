"""Turning prepared squeezed cats into unsqueezed cats or grid-aligned GKP seeds.

A squeezed cat N(|a, r> +- |-a, r>) with real a equals S(r) applied to an
unsqueezed cat of amplitude a e^r (reorder D(a)S(r) = S(r)D(a e^r)). Extra
squeezing S(z) maps it to the cat with amplitude a e^{-z} and squeezing z + r.
"""

from __future__ import annotations

import math

from ..analysis import dominant_parity, fit_cat
from ..fock import State, apply
from ..gaussian import displacement, rotation, squeeze
from ..states import SQRT_HALF_PI


def prepared_amplitude(n: int, eta_total: float) -> float:
    """sqrt(n eta_total), the typical component amplitude of a Scheme I output."""
    return math.sqrt(n * eta_total)


def prepared_squeezing(eta_total: float) -> float:
    """-ln(1 - eta_total) / 2, the component squeezing of a Scheme I output."""
    if not 0.0 <= eta_total < 1.0:
        raise ValueError("eta_total must lie in [0, 1)")
    return -0.5 * math.log1p(-eta_total)


def expected_delta(n: int, eta_total: float) -> float:
    """Component width after grid correction: sqrt(pi (1 - T) / (2 n T))."""
    if n <= 0 or not 0.0 < eta_total <= 1.0:
        raise ValueError("need n > 0 and eta_total in (0, 1]")
    return math.sqrt(math.pi * (1.0 - eta_total) / (2.0 * n * eta_total))


def unsqueezed_cat_amplitude(n: int, eta_total: float) -> float:
    """Amplitude after undoing the component squeezing: sqrt(n T / (1 - T))."""
    if n < 0 or not 0.0 <= eta_total < 1.0:
        raise ValueError("need n >= 0 and eta_total in [0, 1)")
    return math.sqrt(n * eta_total / (1.0 - eta_total))


def grid_squeezing(n: int, eta_total: float) -> float:
    """z = ln(sqrt(n T) / sqrt(pi/2)), the extra squeezing that lands components on +-sqrt(pi/2)."""
    return math.log(prepared_amplitude(n, eta_total) / SQRT_HALF_PI)


def odd_parity_kick() -> complex:
    """p displacement turning the odd-cat fringe sin(2 a p) into cos(2 a p) at a = sqrt(pi/2)."""
    return 1j * math.pi / (4.0 * SQRT_HALF_PI)


def align_to_q(state: State, phi: float | None = None) -> tuple[State, float]:
    """Rotate the cat axis onto q.

    The axis defaults to that of the best cat fit; the bare peak of P(phi)
    drifts off-axis once the components are strongly squeezed along it.
    """
    phi = fit_cat(state).phi_fit if phi is None else phi
    return apply(rotation(-phi, state.cutoff), state, 0), phi


def unsqueeze(state: State, n: int, eta_total: float) -> State:
    """Align, then apply S(-r) with r = prepared_squeezing(eta_total)."""
    aligned, _ = align_to_q(state)
    return apply(squeeze(-prepared_squeezing(eta_total), 0.0, state.cutoff), aligned, 0)


def correct_to_grid(state: State, n: float, eta_total_effective: float, parity: str | None = None) -> State:
    """Align the cat axis with q, squeeze the components onto +-sqrt(pi/2), fix odd fringes.

    ``parity`` defaults to the dominant photon-number parity of ``state``.
    """
    return _to_grid(state, grid_squeezing(n, eta_total_effective), parity)


def correct_to_grid_fitted(state: State, parity: str | None = None) -> State:
    """As :func:`correct_to_grid`, with z taken from the fitted cat amplitude instead of sqrt(n T)."""
    fit = fit_cat(state)
    if fit.alpha_fit <= 0:
        raise ValueError("state has no cat structure to align")
    return _to_grid(state, math.log(fit.alpha_fit / SQRT_HALF_PI), parity, fit.phi_fit)


def _to_grid(state: State, z: float, parity: str | None, phi: float | None = None) -> State:
    d = state.cutoff
    aligned, _ = align_to_q(state, phi)
    out = apply(squeeze(z, 0.0, d), aligned, 0) if z != 0.0 else aligned
    parity = dominant_parity(state) if parity is None else parity
    if parity == "odd":
        out = apply(displacement(odd_parity_kick(), d), out, 0)
    return out


__all__ = [
    "align_to_q",
    "correct_to_grid",
    "correct_to_grid_fitted",
    "expected_delta",
    "grid_squeezing",
    "odd_parity_kick",
    "prepared_amplitude",
    "prepared_squeezing",
    "unsqueeze",
    "unsqueezed_cat_amplitude",
]
