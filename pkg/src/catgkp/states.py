"""Named states: coherent, displaced-squeezed, squeezed cats, GKP, squeezed Fock.

Constructors evaluate untruncated Fock amplitudes (Laguerre displacement
elements applied to an analytic squeezed vacuum) on ``cutoff + pad`` rows,
keep the first ``cutoff`` and renormalize. The discarded mass is the
truncation tail; :func:`truncation_tail` reports it for any constructor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import CutoffExceeded, PureState
from .gaussian import gkp_db, squeeze
from . import kernels

SQRT_HALF_PI = math.sqrt(math.pi / 2)
GKP_TAIL_LIMIT = 1e-4


def _squeezed_vacuum_column(r: float, size: int) -> np.ndarray:
    """<m|S(r)|0>, m < size: (-tanh r)^k sqrt((2k)!)/(2^k k!) / sqrt(cosh r) on m = 2k."""
    out = np.zeros(size)
    out[0] = 1.0 / math.sqrt(math.cosh(r))
    t = math.tanh(r)
    for m in range(2, size, 2):
        out[m] = -t * math.sqrt((m - 1) / m) * out[m - 2]
    return out


def _sqvac_support(r: float) -> int:
    t = abs(math.tanh(r))
    if t < 1e-300:
        return 1
    # |tanh r|^{m/2} below 1e-20
    return int(min(6000, math.ceil(2 * 46.0 / -math.log(t)) + 2))


def _displaced_squeezed_rows(alpha: complex, r: float, rows: int) -> np.ndarray:
    cols = _sqvac_support(r)
    sv = _squeezed_vacuum_column(r, cols)
    d = kernels.displacement_elements(complex(alpha), rows, cols)
    return d @ sv


def _pad(cutoff: int) -> int:
    return max(40, cutoff)


def _finish(full: np.ndarray, cutoff: int) -> tuple[PureState, float]:
    total = float(np.vdot(full, full).real)
    kept = full[:cutoff]
    kept_mass = float(np.vdot(kept, kept).real)
    if kept_mass == 0.0:
        raise CutoffExceeded("no amplitude below the cutoff")
    tail = max(0.0, 1.0 - kept_mass / total)
    return PureState(kept / math.sqrt(kept_mass), 1, cutoff), tail


def coherent(alpha: complex, cutoff: int) -> PureState:
    """|alpha> = D(alpha)|0>, truncated and renormalized."""
    state, _ = _finish(kernels.displacement_elements(complex(alpha), cutoff + _pad(cutoff), 1)[:, 0], cutoff)
    return state


def displaced_squeezed(alpha: complex, r: float, cutoff: int) -> PureState:
    """|alpha, r> = D(alpha) S(r) |0>."""
    state, _ = _finish(_displaced_squeezed_rows(alpha, r, cutoff + _pad(cutoff)), cutoff)
    return state


# -- cats ---------------------------------------------------------------------

def _parity_sign(parity) -> int:
    if parity in ("even", "+", 1, "+1"):
        return 1
    if parity in ("odd", "-", -1, "-1"):
        return -1
    raise ValueError(f"parity must be even/odd, got {parity!r}")


@dataclass(frozen=True)
class CatSpec:
    """N(|alpha, r> +- |-alpha, r>) with real alpha >= 0."""

    alpha: float
    r: float
    parity: str
    cutoff: int

    def __post_init__(self):
        if self.alpha < 0 or not math.isfinite(self.alpha):
            raise ValueError("cat amplitude must be real and nonnegative")
        sign = _parity_sign(self.parity)
        object.__setattr__(self, "parity", "even" if sign > 0 else "odd")


def cat_rows(spec: CatSpec, rows: int) -> np.ndarray:
    # parity maps |alpha, r> to |-alpha, r>, so the cat is a parity projection
    if spec.alpha == 0.0 and spec.parity == "odd":
        return np.asarray(squeeze(spec.r, 0.0, rows).dense[:, 1]).copy()
    psi = _displaced_squeezed_rows(spec.alpha, spec.r, rows)
    keep = 0 if spec.parity == "even" else 1
    psi[(np.arange(rows) % 2) != keep] = 0.0
    return psi


def cat(spec: CatSpec) -> PureState:
    """Normalized squeezed cat; at alpha = 0 the odd cat is its limit S(r)|1>."""
    state, _ = _finish(cat_rows(spec, spec.cutoff + _pad(spec.cutoff)), spec.cutoff)
    return state


def target_state(delta: float, cutoff: int) -> PureState:
    """|-sqrt(pi/2), -ln delta> + |sqrt(pi/2), -ln delta>, normalized."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return cat(CatSpec(SQRT_HALF_PI, -math.log(delta), "even", cutoff))


# -- GKP ----------------------------------------------------------------------

def default_u_max(delta: float) -> int:
    """Smallest u with envelope e^{-(pi/2) delta^2 (2u)^2} < 1e-8."""
    u = 0
    while math.exp(-0.5 * math.pi * delta**2 * (2 * u) ** 2) >= 1e-8:
        u += 1
    return u


@dataclass(frozen=True)
class GkpSpec:
    delta: float
    logical: int
    cutoff: int
    u_max: int | None = None

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if self.logical not in (0, 1):
            raise ValueError("logical must be 0 or 1")
        if self.u_max is None:
            object.__setattr__(self, "u_max", default_u_max(self.delta))
        if self.u_max < 0:
            raise ValueError("u_max must be nonnegative")

    @property
    def db(self) -> float:
        return gkp_db(self.delta)

    def lattice_indices(self) -> np.ndarray:
        """Integers s = 2u + logical for u in [-u_max - logical, u_max]."""
        u = np.arange(-self.u_max - self.logical, self.u_max + 1)
        return 2 * u + self.logical


def gkp_rows(spec: GkpSpec, rows: int) -> np.ndarray:
    r = -math.log(spec.delta)
    acc = np.zeros(rows, dtype=complex)
    for s in spec.lattice_indices():
        w = math.exp(-0.5 * math.pi * spec.delta**2 * s * s)
        acc += w * _displaced_squeezed_rows(s * SQRT_HALF_PI, r, rows)
    return acc


def gkp_with_tail(spec: GkpSpec) -> tuple[PureState, float]:
    return _finish(gkp_rows(spec, spec.cutoff + _pad(spec.cutoff)), spec.cutoff)


def gkp(spec: GkpSpec) -> PureState:
    """Physical square GKP codeword: a Gaussian-weighted comb of |s sqrt(pi/2), -ln delta>."""
    state, tail = gkp_with_tail(spec)
    if tail > GKP_TAIL_LIMIT:
        raise CutoffExceeded(
            f"GKP delta={spec.delta:g} loses {tail:.2e} of its norm above cutoff {spec.cutoff}"
        )
    return state


# -- squeezed Fock ------------------------------------------------------------

def squeezed_fock_rows(n: int, r: float, rows: int) -> np.ndarray:
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if n >= rows:
        raise CutoffExceeded(f"Fock level {n} needs more than {rows} levels")
    return np.asarray(squeeze(r, 0.0, rows).dense[:, n]).copy()


def squeezed_fock(n: int, r: float, cutoff: int) -> PureState:
    """S(r)|n>, truncated and renormalized."""
    if n >= cutoff:
        raise CutoffExceeded(f"Fock level {n} needs cutoff > {n}, got {cutoff}")
    state, _ = _finish(squeezed_fock_rows(n, r, cutoff + _pad(cutoff)), cutoff)
    return state


def squeezed_fock_mean_photons(n: int, r: float) -> float:
    """(2n + 1) sinh^2 r + n."""
    return (2 * n + 1) * math.sinh(r) ** 2 + n


def cutoff_probability(n: int, r: float, n_cutoff: int, cutoff: int) -> float:
    """P(at least n_cutoff photons) for S(r)|n>, i.e. sum_{k >= n_cutoff} |c_k|^2.

    Uses the exact amplitudes below ``n_cutoff``, so the mass above ``cutoff``
    is counted too.
    """
    if n_cutoff < 0:
        raise ValueError("n_cutoff must be nonnegative")
    if n_cutoff > cutoff:
        raise ValueError("n_cutoff cannot exceed the cutoff")
    col = squeezed_fock_rows(n, r, max(cutoff, n + 1))
    below = float(np.sum(np.abs(col[:n_cutoff]) ** 2))
    return min(1.0, max(0.0, 1.0 - below))


def truncation_tail(rows_fn, cutoff: int) -> float:
    """Norm fraction a ``rows_fn(rows)`` amplitude vector loses above ``cutoff``."""
    return _finish(np.asarray(rows_fn(cutoff + _pad(cutoff))), cutoff)[1]
