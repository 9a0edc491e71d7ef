"""Product-of-fringes approximation to the Scheme II phase distribution.

Each odd outcome multiplies P(phi) by 1 - cos(2 phi - phi_j / 2); even
outcomes leave it unchanged. Only phi_j / 2 mod 2 pi is identifiable, so fitted
phi_j are reported in [0, 4 pi).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..analysis import PhaseDistribution, phase_amplitude
from ..fock import State


def _grid(resolution: int) -> np.ndarray:
    return 2 * math.pi * np.arange(resolution) / resolution


def phase_dist_approx_scheme2(parities: Sequence[int], phis: Sequence[float], resolution: int = 512) -> PhaseDistribution:
    """P_out proportional to prod_j P_j, normalized on a periodic grid.

    ``parities[j]`` is m_j mod 2 (or the outcome itself); ``phis[j]`` is the
    effective phase phi_j of round j, ignored for even rounds.
    """
    if len(parities) != len(phis):
        raise ValueError("need one phase per round")
    phi = _grid(resolution)
    log_p = np.zeros(resolution)
    zero = np.zeros(resolution, dtype=bool)
    for bit, pj in zip(parities, phis):
        if int(bit) % 2 == 0:
            continue
        fringe = 1.0 - np.cos(2 * phi - 0.5 * pj)
        zero |= fringe <= 0.0
        log_p += np.log(np.where(fringe > 0.0, fringe, 1.0))
    vals = np.exp(log_p - log_p[~zero].max()) if (~zero).any() else np.ones(resolution)
    vals[zero] = 0.0
    vals /= vals.sum() * 2 * math.pi / resolution
    return PhaseDistribution(phi, vals)


def fit_round_phase(before: State, after: State, resolution: int = 512) -> float:
    """phi_j in [0, 4 pi) with P_after ~ c P_before (1 - cos(2 phi - phi_j / 2)).

    Linear least squares in (c, c cos psi, c sin psi), psi = phi_j / 2.
    """
    phi = _grid(resolution)
    pb = phase_amplitude(before, phi)
    pa = phase_amplitude(after, phi)
    pb = pb / pb.sum()
    pa = pa / pa.sum()
    design = np.column_stack([pb, pb * np.cos(2 * phi), pb * np.sin(2 * phi)])
    (c0, cc, cs), *_ = np.linalg.lstsq(design, pa, rcond=None)
    psi = math.atan2(-cs, -cc) % (2 * math.pi)
    return 2.0 * psi


def fit_round_phases(history: Sequence[State], outcomes: Sequence[int], resolution: int = 512) -> list[float]:
    """phi_j for every round from consecutive exact states (0.0 for even rounds)."""
    if len(history) != len(outcomes) + 1:
        raise ValueError("history must hold the input plus one state per round")
    return [
        fit_round_phase(history[j], history[j + 1], resolution) if outcomes[j] % 2 else 0.0
        for j in range(len(outcomes))
    ]


def best_phase_offset(approx: PhaseDistribution, exact: PhaseDistribution) -> float:
    """Shift delta maximizing the circular correlation of approx(phi - delta) with exact."""
    if approx.phi_axis.size != exact.phi_axis.size:
        raise ValueError("distributions must share a grid")
    corr = np.fft.ifft(np.fft.fft(exact.values) * np.conj(np.fft.fft(approx.values))).real
    return float(approx.phi_axis[int(np.argmax(corr))])


def top_peaks(dist: PhaseDistribution, count: int = 2, min_separation: float = math.pi / 2) -> list[float]:
    """Locations of the ``count`` largest circular local maxima at least ``min_separation`` apart."""
    v = dist.values
    local = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    order = [i for i in np.argsort(-v) if local[i]]
    picked: list[float] = []
    for i in order:
        f = float(dist.phi_axis[i])
        if all(circular_distance(f, g) >= min_separation for g in picked):
            picked.append(f)
        if len(picked) == count:
            break
    return picked


def circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


__all__ = [
    "best_phase_offset",
    "circular_distance",
    "fit_round_phase",
    "fit_round_phases",
    "phase_dist_approx_scheme2",
    "top_peaks",
]
