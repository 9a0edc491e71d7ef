"""Wigner functions, phase distributions, moments, fidelity and cat fitting."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage, optimize

from . import kernels
from .fock import DensityState, PureState, State, apply, expectation
from .gaussian import quadrature_op, rotation
from .measurements import quadrature_density
from .states import CatSpec, cat

HBAR = 0.5
COARSE_STEP = 0.2


def _single_mode(state: State) -> None:
    if state.modes != 1:
        raise ValueError(f"expected a single-mode state, got {state.modes} modes")


def _pure_ensemble(state: State) -> tuple[np.ndarray, np.ndarray]:
    """(vectors, weights) with sum_k w_k |v_k><v_k| = state / trace."""
    if isinstance(state, PureState):
        return state.normalize().amplitudes[None, :], np.ones(1)
    rho = state.normalize().matrix
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-14 * max(w.max(), 1e-300)
    return np.ascontiguousarray(v[:, keep].T), np.ascontiguousarray(w[keep])


# -- Wigner -------------------------------------------------------------------

@dataclass(frozen=True)
class WignerGrid:
    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # values[i, j] = W(q_i, p_j)
    hbar: float = HBAR

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.p_axis, axis=1), self.q_axis))

    def q_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, self.p_axis, axis=1)

    def p_marginal(self) -> np.ndarray:
        return np.trapezoid(self.values, self.q_axis, axis=0)

    def value_at(self, q: float, p: float) -> float:
        i = int(np.argmin(np.abs(self.q_axis - q)))
        j = int(np.argmin(np.abs(self.p_axis - p)))
        return float(self.values[i, j])


def default_axis(extent: float = 6.0, step: float = 0.05) -> np.ndarray:
    n = int(round(2 * extent / step))
    return np.linspace(-extent, extent, n + 1)


def wigner(state: State, q_axis=None, p_axis=None, *, extent: float = 6.0, step: float = 0.05) -> WignerGrid:
    """W(q, p) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag], alpha = q + i p (hbar = 1/2)."""
    _single_mode(state)
    q_axis = default_axis(extent, step) if q_axis is None else np.asarray(q_axis, dtype=float)
    p_axis = q_axis if p_axis is None else np.asarray(p_axis, dtype=float)
    for ax in (q_axis, p_axis):
        if ax.size > 1 and np.max(np.diff(ax)) > COARSE_STEP:
            warnings.warn(f"Wigner grid step {np.max(np.diff(ax)):.3g} > {COARSE_STEP} is coarse", stacklevel=2)
    vecs, weights = _pure_ensemble(state)
    vals = kernels.wigner_pure(vecs, weights, np.ascontiguousarray(q_axis), np.ascontiguousarray(p_axis))
    return WignerGrid(q_axis, p_axis, vals)


def find_wigner_peaks(grid: WignerGrid, rel_threshold: float = 0.05) -> list[tuple[float, float, float]]:
    """8-neighbour local maxima above ``rel_threshold`` of the global maximum, largest first."""
    vals = grid.values
    top = vals.max()
    if top <= 0:
        return []
    local = ndimage.maximum_filter(vals, size=3, mode="constant", cval=-np.inf)
    mask = (vals == local) & (vals >= rel_threshold * top)
    idx = np.argwhere(mask)
    peaks = [(float(grid.q_axis[i]), float(grid.p_axis[j]), float(vals[i, j])) for i, j in idx]
    return sorted(peaks, key=lambda t: -t[2])


def marginal_peaks(x: np.ndarray, density: np.ndarray, rel_threshold: float = 0.05) -> list[tuple[float, float]]:
    """Interior local maxima of a sampled 1-D density above a fraction of its maximum."""
    top = density.max()
    out = []
    for i in range(1, density.size - 1):
        if density[i] >= density[i - 1] and density[i] > density[i + 1] and density[i] >= rel_threshold * top:
            out.append((float(x[i]), float(density[i])))
    return sorted(out, key=lambda t: -t[1])


def quadrature_marginal(state: State, x, theta: float = 0.0) -> np.ndarray:
    """Normalized density of x_theta on a single-mode state."""
    _single_mode(state)
    return quadrature_density(state, 0, x, theta) / state.norm_sq


# -- phase distribution -------------------------------------------------------

@dataclass(frozen=True)
class PhaseDistribution:
    phi_axis: np.ndarray
    values: np.ndarray

    @property
    def step(self) -> float:
        return 2 * math.pi / self.phi_axis.size

    def integral(self) -> float:
        return float(self.values.sum() * self.step)

    def peak(self) -> float:
        return float(self.phi_axis[int(np.argmax(self.values))])

    def max_min_ratio(self) -> float:
        lo = self.values.min()
        return math.inf if lo <= 0 else float(self.values.max() / lo)


def phase_amplitude(state: State, phi) -> np.ndarray:
    """Unnormalized P(phi) = (1/2pi) sum_nm rho_nm e^{-i(n-m)phi}."""
    _single_mode(state)
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    e = np.exp(-1j * np.outer(phi, np.arange(state.cutoff)))
    if isinstance(state, PureState):
        return np.abs(e @ state.amplitudes) ** 2 / (2 * math.pi)
    return np.real(np.einsum("fn,nm,fm->f", e, state.matrix, e.conj())) / (2 * math.pi)


def phase_distribution(state: State, n_phi: int = 512) -> PhaseDistribution:
    """Truncated (Pegg-Barnett) phase distribution on a uniform periodic grid.

    With ``n_phi >= 2 cutoff - 1`` the rectangle rule integrates it exactly, so
    the normalization uses the grid sum.
    """
    n_phi = max(int(n_phi), 2 * state.cutoff - 1)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    vals = phase_amplitude(state, phi)
    vals = np.clip(vals, 0.0, None)
    vals = vals / (vals.sum() * 2 * math.pi / n_phi)
    return PhaseDistribution(phi, vals)


def phase_peak(state: State, n_phi: int = 720) -> float:
    """Location of the maximum of P(phi), refined by bounded Brent search."""
    dist = phase_distribution(state, n_phi)
    i = int(np.argmax(dist.values))
    h = dist.step
    phi0 = dist.phi_axis[i]
    res = optimize.minimize_scalar(
        lambda f: -float(phase_amplitude(state, [f])[0]),
        bounds=(phi0 - h, phi0 + h),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x % (2 * math.pi))


# -- moments and fidelity -----------------------------------------------------

def quadrature_moments(state: State, theta: float = 0.0) -> tuple[float, float]:
    """(mean, variance) of x_theta = q cos(theta) + p sin(theta)."""
    _single_mode(state)
    x = quadrature_op(theta, state.cutoff)
    if isinstance(state, PureState):
        v = state.amplitudes / state.norm
        xv = x @ v
        mean = float(np.vdot(v, xv).real)
        second = float(np.vdot(xv, xv).real)
    else:
        rho = state.matrix / state.trace
        mean = float(np.trace(x @ rho).real)
        second = float(np.trace(x @ x @ rho).real)
    return mean, second - mean**2


def quadrature_variance(state: State, theta: float = 0.0) -> float:
    return quadrature_moments(state, theta)[1]


def mean_photon_number(state: State) -> float:
    _single_mode(state)
    n = np.arange(state.cutoff)
    return float(np.dot(n, state.populations(0)) / state.norm_sq)


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity(a: State, b: State) -> float:
    """|<a|b>|^2 for pure states, Uhlmann (Tr sqrt(sqrt(a) b sqrt(a)))^2 otherwise; inputs normalized."""
    if a.cutoff != b.cutoff or a.modes != b.modes:
        raise ValueError("states live in different spaces")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / (a.norm_sq * b.norm_sq))
    if isinstance(a, PureState) or isinstance(b, PureState):
        psi, rho = (a, b) if isinstance(a, PureState) else (b, a)
        v = psi.amplitudes
        return float(np.vdot(v, rho.matrix @ v).real / (psi.norm_sq * rho.trace))
    ra, rb = a.matrix / a.trace, b.matrix / b.trace
    s = _sqrtm_psd(ra)
    ev = np.linalg.eigvalsh(s @ rb @ s)
    return float(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2)


# -- cat fitting --------------------------------------------------------------

@dataclass(frozen=True)
class CatFit:
    alpha_fit: float
    r_fit: float
    parity_fit: str
    fidelity: float
    delta_measured: float
    phi_fit: float

    def to_dict(self) -> dict:
        return {
            "alpha_fit": self.alpha_fit,
            "r_fit": self.r_fit,
            "parity_fit": self.parity_fit,
            "fidelity": self.fidelity,
            "delta_measured": self.delta_measured,
            "phi_fit": self.phi_fit,
        }


def dominant_parity(state: State) -> str:
    even, odd = state.parity_populations()
    return "even" if even >= odd else "odd"


def _candidate_axes(state: State) -> list[float]:
    """Phase-distribution peak and second-moment principal axis, each with its perpendicular."""
    d = state.cutoff
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    a2 = expectation(a @ a, state)
    base = [phase_peak(state), 0.5 * math.atan2(a2.imag, a2.real)]
    out: list[float] = []
    for phi in base:
        for cand in (phi, phi + math.pi / 2):
            cand %= math.pi  # a cat is symmetric under a pi rotation
            if all(min(abs(cand - c), math.pi - abs(cand - c)) > 1e-6 for c in out):
                out.append(cand)
    return out


def fit_cat(state: State, r: float | None = None, alpha_max: float | None = None) -> CatFit:
    """Best squeezed cat N(|a, r> +- |-a, r>) with its axis along q.

    Candidate axes are the peak of P(phi), the principal axis of the quadrature
    second moments and their perpendiculars; the fit with the highest fidelity
    wins. For each axis ``r`` defaults to 0.5 ln(4 Var_p) of the aligned state
    (components anti-squeezed along p) and ``alpha`` maximizes the fidelity: a
    coarse scan brackets the optimum, then golden-section search refines it.
    delta_measured = sqrt(pi/2) / (2 alpha_fit std_p) is the component width
    after squeezing the fitted cat onto the +-sqrt(pi/2) grid.
    """
    _single_mode(state)
    parity = dominant_parity(state)
    if alpha_max is None:
        alpha_max = math.sqrt(max(mean_photon_number(state), 0.0)) + 2.0
    # coarse scan on every axis, refine only the most promising one
    scans = [_scan_axis(state, phi, parity, r, alpha_max) for phi in _candidate_axes(state)]
    return _refine(min(scans, key=lambda sc: sc[4].min()), parity)


def _scan_axis(state: State, phi: float, parity: str, r: float | None, alpha_max: float):
    d = state.cutoff
    aligned = apply(rotation(-phi, d), state, 0)
    _, var_p = quadrature_moments(aligned, math.pi / 2)
    r_fit = 0.5 * math.log(4 * var_p) if r is None else float(r)
    grid = np.linspace(0.0, alpha_max, 48)
    vals = np.array([_infidelity(aligned, a, r_fit, parity) for a in grid])
    return phi, aligned, var_p, r_fit, vals, grid


def _infidelity(aligned: State, a: float, r_fit: float, parity: str) -> float:
    return 1.0 - fidelity(cat(CatSpec(abs(a), r_fit, parity, aligned.cutoff)), aligned)


def _refine(scan, parity: str) -> CatFit:
    phi, aligned, var_p, r_fit, vals, grid = scan

    def infid(a: float) -> float:
        return _infidelity(aligned, a, r_fit, parity)

    i = int(np.argmin(vals))
    h = grid[1] - grid[0]
    if i == 0:
        res = optimize.minimize_scalar(infid, bounds=(0.0, h), method="bounded", options={"xatol": 1e-10})
        alpha = float(res.x)
        if vals[0] <= res.fun:
            alpha = 0.0
    else:
        hi = grid[i + 1] if i + 1 < grid.size else grid[i] + h
        res = optimize.minimize_scalar(infid, bracket=(grid[i - 1], grid[i], hi), method="golden", tol=1e-10)
        alpha = abs(float(res.x))
    fid = 1.0 - infid(alpha)
    std_p = math.sqrt(var_p)
    delta = math.sqrt(math.pi / 2) / (2 * alpha * std_p) if alpha > 0 else math.inf
    return CatFit(alpha, r_fit, parity, fid, delta, phi)


# -- CSV ----------------------------------------------------------------------

def write_wigner_csv(grid: WignerGrid, path: str | Path) -> None:
    qq, pp = np.meshgrid(grid.q_axis, grid.p_axis, indexing="ij")
    rows = np.column_stack([qq.ravel(), pp.ravel(), grid.values.ravel()])
    _write_csv(path, "q,p,value", rows)


def write_phase_csv(dist: PhaseDistribution, path: str | Path) -> None:
    _write_csv(path, "phi,value", np.column_stack([dist.phi_axis, dist.values]))


def _write_csv(path, header: str, rows: np.ndarray) -> None:
    lines = [header]
    lines.extend(",".join(f"{v:.12g}" for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


__all__ = [
    "CatFit",
    "DensityState",
    "PhaseDistribution",
    "WignerGrid",
    "fidelity",
    "find_wigner_peaks",
    "fit_cat",
    "marginal_peaks",
    "phase_distribution",
    "phase_peak",
    "quadrature_marginal",
    "quadrature_moments",
    "quadrature_variance",
    "wigner",
    "write_phase_csv",
    "write_wigner_csv",
]
