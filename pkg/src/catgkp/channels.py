"""Pure loss and Gaussian dephasing as Kraus maps, with independent oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_hermite

from .fock import DensityState, ModeOperator, State, _frozen, apply, partial_trace, tensor, vacuum
from .gaussian import beamsplitter


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators of a single-mode channel.

    ``diagonal`` marks sets whose operators are all diagonal in the Fock basis
    (dephasing); :func:`apply_channel` then sums them as one elementwise mask.
    """

    operators: tuple
    label: str
    cutoff: int
    diagonal: bool = False
    _mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def truncation_k(self) -> int:
        return len(self.operators)

    def completeness(self) -> np.ndarray:
        """sum_k K^dag K, the identity for a trace-preserving channel."""
        acc = np.zeros((self.cutoff, self.cutoff), dtype=complex)
        for op in self.operators:
            k = op.dense
            acc += k.conj().T @ k
        return acc

    def mask(self) -> np.ndarray:
        """sum_k d_k[n] d_k[m]^* for diagonal sets (rho_nm is multiplied by it)."""
        if not self.diagonal:
            raise ValueError("mask is defined for diagonal Kraus sets only")
        if self._mask is None:
            diags = np.array([np.diag(op.dense) for op in self.operators])
            object.__setattr__(self, "_mask", _frozen(diags.T @ diags.conj()))
        return self._mask


def loss_kraus(eta: float, cutoff: int) -> KrausSet:
    """K_k |n> = sqrt(C(n,k) eta^{n-k} (1-eta)^k) |n-k>, k = 0..cutoff-1."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("loss transmissivity must lie in [0, 1]")
    n = np.arange(cutoff)
    ops = []
    kmax = 0 if eta == 1.0 else cutoff - 1
    for k in range(kmax + 1):
        nn = n[k:]
        with np.errstate(divide="ignore"):
            logc = gammaln(nn + 1) - gammaln(k + 1) - gammaln(nn - k + 1)
            # 0 * log(0) counts as 0 at eta = 0 or 1
            logw = logc + _xlog(nn - k, eta) + _xlog(k, 1.0 - eta)
        mat = np.zeros((cutoff, cutoff))
        mat[nn - k, nn] = np.exp(0.5 * logw)
        if not mat.any():
            continue
        ops.append(ModeOperator(_frozen(mat), 1, cutoff, f"L{k}"))
    return KrausSet(tuple(ops), f"loss({eta:g})", cutoff)


def _xlog(power, x: float):
    power = np.asarray(power, dtype=float)
    if x > 0:
        return power * math.log(x)
    return np.where(power == 0, 0.0, -np.inf)


def dephasing_kraus(eps_phi: float, cutoff: int, k_max: int | None = None) -> KrausSet:
    """K_k = sqrt(eps^k / k!) n^k e^{-eps n^2 / 2}: rotations averaged over N(0, eps).

    ``eps_phi`` is the variance of the rotation angle, so rho_nm picks up
    e^{-eps (n-m)^2 / 2}. The default ``k_max`` keeps the Poisson(eps n^2) tail
    of the top level below 1e-16.
    """
    if eps_phi < 0:
        raise ValueError("dephasing variance must be nonnegative")
    n = np.arange(cutoff, dtype=float)
    if eps_phi == 0:
        return KrausSet((ModeOperator(_frozen(np.eye(cutoff)), 1, cutoff, "I"),), "dephasing(0)", cutoff, True)
    if k_max is None:
        mu = eps_phi * (cutoff - 1) ** 2
        k_max = int(math.ceil(mu + 12.0 * math.sqrt(mu) + 40))
    ops = []
    logn = np.log(np.maximum(n, 1.0))
    for k in range(k_max + 1):
        logd = 0.5 * (k * math.log(eps_phi) - gammaln(k + 1)) + k * logn - 0.5 * eps_phi * n * n
        d = np.exp(logd)
        if k > 0:
            d[0] = 0.0  # 0^k
        ops.append(ModeOperator(_frozen(np.diag(d)), 1, cutoff, f"Z{k}"))
    return KrausSet(tuple(ops), f"dephasing({eps_phi:g})", cutoff, True)


def apply_channel(rho: State, kraus: KrausSet, mode: int = 0) -> DensityState:
    """sum_k K_k rho K_k^dag on one mode (pure inputs are promoted)."""
    rho = rho.to_density()
    if kraus.cutoff != rho.cutoff:
        raise ValueError("Kraus cutoff does not match the state")
    if kraus.diagonal:
        t = np.moveaxis(rho.tensor, (mode, rho.modes + mode), (0, 1))
        t = t * kraus.mask().reshape((rho.cutoff, rho.cutoff) + (1,) * (t.ndim - 2))
        t = np.moveaxis(t, (0, 1), (mode, rho.modes + mode))
        return DensityState(t.reshape(rho.matrix.shape), rho.modes, rho.cutoff)
    acc = np.zeros_like(rho.matrix)
    for op in kraus.operators:
        acc += apply(op, rho, mode).matrix
    return DensityState(acc, rho.modes, rho.cutoff)


# -- oracles ------------------------------------------------------------------

def loss_by_dilation(rho: State, eta: float) -> DensityState:
    """Single-mode loss as a beamsplitter with a vacuum environment, then a partial trace."""
    rho = rho.to_density()
    if rho.modes != 1:
        raise ValueError("dilation oracle is single-mode")
    joint = tensor(rho, vacuum(rho.cutoff).to_density())
    joint = apply(beamsplitter(eta, rho.cutoff), joint, (0, 1))
    return partial_trace(joint, [0])


def dephasing_by_quadrature(rho: State, eps_phi: float, nodes: int = 201) -> DensityState:
    """Average R(theta) rho R(theta)^dag over theta ~ N(0, eps_phi) by Gauss-Hermite quadrature."""
    rho = rho.to_density()
    if rho.modes != 1:
        raise ValueError("quadrature oracle is single-mode")
    x, w = roots_hermite(nodes)
    theta = math.sqrt(2.0 * eps_phi) * x
    n = np.arange(rho.cutoff)
    acc = np.zeros_like(rho.matrix)
    for th, wt in zip(theta, w / math.sqrt(math.pi)):
        ph = np.exp(1j * th * n)
        acc += wt * (ph[:, None] * rho.matrix * ph.conj()[None, :])
    return DensityState(acc, 1, rho.cutoff)
