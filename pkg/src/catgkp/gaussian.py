"""Gaussian unitaries as truncated Fock-basis matrices (hbar = 1/2).

Quadratures are ``q = (a + a^dag)/2`` and ``p = i(a^dag - a)/2``.

Displacement and squeezing default to the *untruncated* matrix elements
restricted to the retained levels: Laguerre recurrences for D(alpha) and a
two-direction ladder recurrence for S(r, theta). ``method="expm"`` instead
exponentiates the truncated generator (scipy scaling-and-squaring). Either
way the cropped matrix is unitary only away from the top levels; tests
exclude the top 10%.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import kernels
from .fock import ModeOperator, _frozen

DB_PER_NEPER = 20.0 / math.log(10.0)


def r_from_db(db: float) -> float:
    """Squeezing parameter for a squeezing level in dB (dB = 20 r / ln 10)."""
    return db / DB_PER_NEPER


def db_from_r(r: float) -> float:
    return r * DB_PER_NEPER


def gkp_db(delta: float) -> float:
    """GKP squeezing -10 log10(delta^2) in dB."""
    return -10.0 * math.log10(delta**2)


@lru_cache(maxsize=None)
def _ladder(cutoff: int) -> np.ndarray:
    return _frozen(np.diag(np.sqrt(np.arange(1, cutoff)), 1))


def annihilation(cutoff: int) -> np.ndarray:
    return _ladder(cutoff)


def number_op(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff, dtype=float)).astype(complex)


def quadrature_op(theta: float, cutoff: int) -> np.ndarray:
    """q cos(theta) + p sin(theta) = (a e^{-i theta} + a^dag e^{i theta}) / 2."""
    a = annihilation(cutoff)
    x = a * np.exp(-1j * theta)
    return (x + x.conj().T) / 2


@dataclass(frozen=True)
class GaussianSpec:
    kind: str
    alpha: complex = 0.0
    r: float = 0.0
    theta: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("displace", "squeeze", "rotate", "beamsplitter", "sum_gate"):
            raise ValueError(f"unknown Gaussian kind {self.kind!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not math.isfinite(self.r):
            raise ValueError("r must be finite")
        period = math.pi if self.kind == "squeeze" else 2 * math.pi
        object.__setattr__(self, "theta", math.fmod(self.theta, period) % period)

    def build(self, cutoff: int) -> ModeOperator:
        if self.kind == "displace":
            return displacement(self.alpha, cutoff)
        if self.kind == "squeeze":
            return squeeze(self.r, self.theta, cutoff)
        if self.kind == "rotate":
            return rotation(self.theta, cutoff)
        if self.kind == "beamsplitter":
            return beamsplitter(self.eta, cutoff)
        return sum_gate(cutoff)


@lru_cache(maxsize=256)
def _displacement(re: float, im: float, cutoff: int, method: str) -> np.ndarray:
    alpha = complex(re, im)
    if method == "expm":
        a = annihilation(cutoff)
        return _frozen(sla.expm(alpha * a.T - np.conj(alpha) * a))
    return _frozen(kernels.displacement_elements(alpha, cutoff, cutoff))


def displacement(alpha: complex, cutoff: int, method: str = "exact") -> ModeOperator:
    """D(alpha) = exp(alpha a^dag - alpha^* a)."""
    alpha = complex(alpha)
    if abs(alpha) ** 2 > cutoff / 4:
        warnings.warn(f"|alpha|^2 = {abs(alpha) ** 2:.3g} is large for cutoff {cutoff}", stacklevel=2)
    return ModeOperator(_displacement(alpha.real, alpha.imag, cutoff, _check_method(method)), 1, cutoff, "D")


def _check_method(method: str) -> str:
    if method not in ("exact", "expm"):
        raise ValueError(f"method must be 'exact' or 'expm', got {method!r}")
    return method


def _squeeze_lower(r: float, cutoff: int) -> np.ndarray:
    # <m|S(r)|n> for m >= n. Diagonal from the column ladder, then down each
    # column with the row ladder, which is the stable direction below the diagonal.
    d = cutoff
    low = np.zeros((d, d))
    ch, sh = math.cosh(r), math.sinh(r)
    sq = np.sqrt(np.arange(d + 1.0))
    low[0, 0] = 1.0 / math.sqrt(ch)
    for m in range(2, d, 2):
        low[m, 0] = -(sh / ch) * sq[m - 1] / sq[m] * low[m - 2, 0]
    for n in range(1, d):
        v = sq[n] * low[n - 1, n - 1]
        if n >= 2:
            v += sh * sq[n - 1] * low[n, n - 2]
        low[n, n] = v / (ch * sq[n])
        m = np.arange(n + 1, d - 1, 2)
        for mm in m:
            low[mm + 1, n] = (sq[n] * low[mm, n - 1] - sh * sq[mm] * low[mm - 1, n]) / (ch * sq[mm + 1])
    return low


@lru_cache(maxsize=256)
def _squeeze0(r: float, cutoff: int, method: str) -> np.ndarray:
    if method == "expm":
        # real generator (r/2)(a^2 - a^dag^2); even and odd levels decouple
        a = annihilation(cutoff).real
        gen = 0.5 * r * (a @ a - a.T @ a.T)
        out = np.zeros((cutoff, cutoff))
        for par in (0, 1):
            idx = np.arange(par, cutoff, 2)
            out[np.ix_(idx, idx)] = sla.expm(gen[np.ix_(idx, idx)])
        return _frozen(out)
    # S(r)^dag = S(-r) supplies the upper triangle
    lo = _squeeze_lower(r, cutoff)
    up = _squeeze_lower(-r, cutoff).T
    return _frozen(np.tril(lo) + np.triu(up, 1))


def squeeze(r: float, theta: float, cutoff: int, method: str = "exact") -> ModeOperator:
    """S(r, theta) = exp((r/2)(a^2 e^{-2i theta} - a^dag^2 e^{2i theta})).

    Built as R(theta) S(r) R(-theta); r > 0 squeezes the quadrature at angle theta.
    """
    if abs(r) > 3:
        warnings.warn(f"|r| = {abs(r):.3g} strains cutoff {cutoff}", stacklevel=2)
    base = _squeeze0(float(r), cutoff, _check_method(method))
    if theta == 0.0:
        return ModeOperator(base, 1, cutoff, "S")
    n = np.arange(cutoff)
    ph = np.exp(1j * theta * (n[:, None] - n[None, :]))
    return ModeOperator(_frozen(base * ph), 1, cutoff, "S")


def rotation(theta: float, cutoff: int) -> ModeOperator:
    """R(theta) = exp(i theta n)."""
    return ModeOperator(_frozen(np.diag(np.exp(1j * theta * np.arange(cutoff)))), 1, cutoff, "R")


@lru_cache(maxsize=64)
def _beamsplitter(eta: float, cutoff: int) -> sp.csr_matrix:
    # exp(theta (a1^dag a2 - a1 a2^dag)), cos(theta) = sqrt(eta); block-diagonal in n1 + n2
    angle = math.acos(math.sqrt(eta))
    d = cutoff
    rows, cols, vals = [], [], []
    for total in range(2 * d - 1):
        n1 = np.arange(max(0, total - d + 1), min(total, d - 1) + 1)
        size = n1.size
        gen = np.zeros((size, size))
        # a1^dag a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
        up = angle * np.sqrt((n1[:-1] + 1.0) * (total - n1[:-1]))
        gen[np.arange(1, size), np.arange(size - 1)] = up
        gen -= gen.T
        block = sla.expm(gen) if size > 1 else np.ones((1, 1))
        flat = n1 * d + (total - n1)
        rr, cc = np.meshgrid(flat, flat, indexing="ij")
        keep = np.abs(block) > 0
        rows.append(rr[keep])
        cols.append(cc[keep])
        vals.append(block[keep])
    mat = sp.csr_matrix(
        (np.concatenate(vals).astype(complex), (np.concatenate(rows), np.concatenate(cols))),
        shape=(d * d, d * d),
    )
    mat.data.flags.writeable = False
    return mat


def beamsplitter(eta: float, cutoff: int) -> ModeOperator:
    """Two-mode beamsplitter with transmissivity ``eta``.

    Heisenberg action: a1 -> sqrt(eta) a1 + sqrt(1-eta) a2,
    a2 -> -sqrt(1-eta) a1 + sqrt(eta) a2. Stored sparse (photon-number blocks).
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    return ModeOperator(_beamsplitter(float(eta), cutoff), 2, cutoff, "BS")


@lru_cache(maxsize=8)
def _sum_factors(cutoff: int, sign: float) -> tuple:
    x, v = np.linalg.eigh(quadrature_op(0.0, cutoff))
    y, w = np.linalg.eigh(quadrature_op(math.pi / 2, cutoff))
    phase = np.exp(-2j * sign * np.outer(x, y))
    return (_frozen(v), _frozen(w), _frozen(phase))


def sum_gate(cutoff: int, inverse: bool = False) -> ModeOperator:
    """SUM (GKP-CNOT) gate exp(-2i q1 p2): q2 -> q2 + q1, p1 -> p1 - p2.

    Mode 0 of the pair is the control, mode 1 the target. Applied through the
    eigenbases of the truncated q and p, which is the exact exponential of the
    truncated generator.
    """
    factors = _sum_factors(cutoff, -1.0 if inverse else 1.0)
    return ModeOperator(None, 2, cutoff, "SUM", factors)
