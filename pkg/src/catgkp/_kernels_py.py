"""Pure-numpy versions of the compiled kernels (same signatures and results)."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

_BIG = 1e150
_LOG_BIG = math.log(_BIG)


def _laguerre_seq(k: int, x: np.ndarray, logb: np.ndarray, J: int) -> np.ndarray:
    """f_j^(k)(x) = sqrt(j!/(j+k)!) |b|^k e^{-x/2} L_j^(k)(x) for j < J, vectorized over x."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((J,) + x.shape)
    if J <= 0:
        return out
    scale = -0.5 * x + k * logb - 0.5 * gammaln(k + 1.0)
    out[0] = np.exp(scale)
    if J == 1:
        return out
    g0 = np.ones_like(x)
    g1 = (1.0 + k - x) / math.sqrt(k + 1.0)
    out[1] = g1 * np.exp(scale)
    for j in range(1, J - 1):
        g2 = ((2.0 * j + 1.0 + k - x) * g1 - math.sqrt(j * (j + k)) * g0) / math.sqrt((j + 1.0) * (j + k + 1.0))
        big = np.abs(g2) > _BIG
        if big.any():
            g2 = np.where(big, g2 / _BIG, g2)
            g1 = np.where(big, g1 / _BIG, g1)
            scale = scale + np.where(big, _LOG_BIG, 0.0)
        g0, g1 = g1, g2
        out[j + 1] = g2 * np.exp(scale)
    return out


def displacement_elements(beta: complex, rows: int, cols: int) -> np.ndarray:
    """<m|D(beta)|n> for m < rows, n < cols (untruncated matrix elements)."""
    beta = complex(beta)
    out = np.zeros((rows, cols), dtype=np.complex128)
    x = abs(beta) ** 2
    if x == 0.0:
        idx = np.arange(min(rows, cols))
        out[idx, idx] = 1.0
        return out
    logb = 0.5 * math.log(x)
    ang = math.atan2(beta.imag, beta.real)
    for k in range(max(rows, cols)):
        lo = min(rows - k, cols) if rows > k else 0
        hi = min(cols - k, rows) if cols > k else 0
        J = max(lo, hi)
        if J <= 0:
            continue
        f = _laguerre_seq(k, np.float64(x), np.float64(logb), J)
        j = np.arange(J)
        if lo > 0:
            out[j[:lo] + k, j[:lo]] = np.exp(1j * k * ang) * f[:lo]
        if k > 0 and hi > 0:
            out[j[:hi], j[:hi] + k] = np.exp(1j * k * (math.pi - ang)) * f[:hi]
    return out


def wigner_pure(vecs, weights, q_axis, p_axis) -> np.ndarray:
    """W = (2/pi) sum_k w_k <v_k|D(2 alpha) Pi|v_k>, vectorized over the grid."""
    vecs = np.asarray(vecs, dtype=np.complex128)
    weights = np.asarray(weights, dtype=float)
    qq, pp = np.meshgrid(np.asarray(q_axis, float), np.asarray(p_axis, float), indexing="ij")
    cols = vecs.shape[1]
    x = (4.0 * (qq**2 + pp**2)).ravel()
    with np.errstate(divide="ignore"):
        logb = np.where(x > 0, 0.5 * np.log(np.where(x > 0, x, 1.0)), -np.inf)
    ang = np.arctan2(pp, qq).ravel()
    sgn = (-1.0) ** np.arange(cols)
    acc = np.zeros(x.size)
    for k in range(cols):
        J = cols - k
        with np.errstate(invalid="ignore"):
            f = _laguerre_seq(k, x, logb, J)
        if k == 0:
            f[:, x == 0] = 1.0
            dens = weights @ (np.abs(vecs) ** 2 * sgn)
            acc += dens @ f
        else:
            f[:, x == 0] = 0.0
            cross = weights @ (vecs[:, k:].conj() * vecs[:, :J] * sgn[:J])
            acc += 2.0 * np.real(np.exp(1j * k * ang) * (cross @ f))
    return (2.0 / np.pi * acc).reshape(qq.shape)
