"""Closed-form single-round outputs and the circle/ellipse component predictor.

These are written from the analytic expansions, not from the operator
matrices, so they serve as oracles for the simulated pipeline.

Conventions (hbar = 1/2, beamsplitter a1 -> sqrt(eta) a1 + sqrt(1-eta) a2):

    B |j, 0> = sum_N (-1)^N sqrt(C(j, N)) eta^{(j-N)/2} (1-eta)^{N/2} |j-N, N>.

The Scheme I detector with inline squeezing ``r`` at angle ``theta`` projects
the tapped mode onto S(r, theta)|m>, so the detected factor is
<m|S(-r, theta)|N> = e^{i theta (m-N)} <m|S(-r)|N>.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import eval_hermite, gammaln

from ..fock import PureState


def _split_coeff(j: int, big_n: int, eta: float) -> float:
    """(-1)^N sqrt(C(j,N)) eta^{(j-N)/2} (1-eta)^{N/2}, evaluated in log space."""
    if big_n > j:
        return 0.0
    if (eta == 0.0 and big_n < j) or (eta == 1.0 and big_n > 0):
        return 0.0
    logc = 0.5 * (gammaln(j + 1) - gammaln(big_n + 1) - gammaln(j - big_n + 1))
    if j - big_n:
        logc += 0.5 * (j - big_n) * math.log(eta)
    if big_n:
        logc += 0.5 * big_n * math.log(1.0 - eta)
    return (-1.0) ** big_n * math.exp(logc)


def squeeze_element(m: int, n: int, rho: float) -> float:
    """<m|S(rho)|n> from the disentangled (normal-ordered) form of S.

    sum over l = m, m-2, ... with l <= min(m, n) and l = n (mod 2) of
    (-t/2)^{(m-l)/2} (t/2)^{(n-l)/2} sqrt(m! n!) / (l! ((m-l)/2)! ((n-l)/2)!) sech^{l+1/2},
    t = tanh(rho).
    """
    if (m - n) % 2:
        return 0.0
    t = math.tanh(rho)
    logsech = -math.log(math.cosh(rho))
    total = 0.0
    half = 0.5 * (gammaln(m + 1) + gammaln(n + 1))
    for l in range(m % 2, min(m, n) + 1, 2):
        a, b = (m - l) // 2, (n - l) // 2
        if (a + b) and t == 0.0:
            continue
        log_mag = half - gammaln(l + 1) - gammaln(a + 1) - gammaln(b + 1) + (l + 0.5) * logsech
        if a + b:
            log_mag += (a + b) * math.log(abs(t) / 2.0)
        sign = (-1.0) ** a * (1.0 if t >= 0 or (a + b) % 2 == 0 else -1.0)
        total += sign * math.exp(log_mag)
    return total


def scheme1_closed_form(
    coeffs, eta: float, r: float, m: int, theta: float = 0.0, cutoff: int | None = None
) -> PureState:
    """Unnormalized kept-mode state after one Scheme I round with outcome ``m``.

    The input is sum_j c_j |j> with ``coeffs`` = (c_0, ..., c_n). The squared
    norm of the result is the branch probability.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    d = cutoff if cutoff is not None else n + 1
    if d <= n:
        raise ValueError("cutoff must exceed the largest input photon number")
    out = np.zeros(d, dtype=complex)
    for j in range(n + 1):
        if c[j] == 0:
            continue
        for big_n in range(j + 1):
            det = squeeze_element(m, big_n, -r)
            if det == 0.0:
                continue
            out[j - big_n] += c[j] * _split_coeff(j, big_n, eta) * det * np.exp(1j * theta * (m - big_n))
    return PureState(out, 1, d)


def hermite_function(big_n: int, x) -> np.ndarray:
    """<x|N> for the q quadrature at hbar = 1/2: (2/pi)^{1/4} H_N(sqrt2 x) e^{-x^2} / sqrt(2^N N!)."""
    x = np.asarray(x, dtype=float)
    log_norm = 0.25 * math.log(2.0 / math.pi) - 0.5 * (big_n * math.log(2.0) + gammaln(big_n + 1))
    return math.exp(log_norm) * eval_hermite(big_n, math.sqrt(2.0) * x) * np.exp(-x * x)


def homodyne_closed_form(
    coeffs, eta: float, x: float, theta: float = math.pi / 2, cutoff: int | None = None
) -> PureState:
    """Unnormalized kept-mode state when the tapped arm is measured in x_theta with outcome ``x``.

    <x_theta|N> = e^{-i theta N} <x|N>; the default measures p. The squared
    norm is the outcome's probability density.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    d = cutoff if cutoff is not None else n + 1
    if d <= n:
        raise ValueError("cutoff must exceed the largest input photon number")
    out = np.zeros(d, dtype=complex)
    for j in range(n + 1):
        if c[j] == 0:
            continue
        for big_n in range(j + 1):
            bra = float(hermite_function(big_n, x)) * np.exp(-1j * theta * big_n)
            out[j - big_n] += c[j] * _split_coeff(j, big_n, eta) * bra
    return PureState(out, 1, d)


def predict_components(n: int, eta: float, r: float, m: int, theta: float = 0.0) -> list[complex]:
    """Component locations of a one-round Scheme I output.

    They sit where the input circle |alpha|^2 = n eta meets the detector
    ellipse e^{2r} u^2 + e^{-2r} v^2 = b, b = m eta / (1 - eta), with (u, v) the
    coordinates rotated by ``theta``. Without an intersection the nearest
    circle points (on the u or v axis) are returned.
    """
    if r == 0:
        raise ValueError("an unsqueezed detector has a circle, not an ellipse")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    radius_sq = n * eta
    b = m * eta / (1.0 - eta)
    re_sq = (b - math.exp(-2 * r) * radius_sq) / (2.0 * math.sinh(2 * r))
    re_sq = min(max(re_sq, 0.0), radius_sq)
    re = math.sqrt(re_sq)
    im = math.sqrt(max(radius_sq - re_sq, 0.0))
    rot = complex(math.cos(theta), math.sin(theta))
    pts = {complex(sr * re, si * im) for sr in (1, -1) for si in (1, -1)}
    return sorted((p * rot for p in pts), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


__all__ = [
    "hermite_function",
    "homodyne_closed_form",
    "predict_components",
    "scheme1_closed_form",
    "squeeze_element",
]
