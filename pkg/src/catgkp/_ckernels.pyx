# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: displacement matrix elements and displaced-parity Wigner.

Both use the normalized Laguerre sequence

    f_j^(k)(x) = sqrt(j!/(j+k)!) |beta|^k e^{-x/2} L_j^(k)(x),  x = |beta|^2,

so that <j+k|D(beta)|j> = e^{ik arg beta} f_j^(k). The forward recurrence in j
is stable; a running log-scale keeps it clear of under- and overflow.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, log, lgamma, fabs, atan2, cos, sin

cnp.import_array()

cdef double _BIG = 1e150
cdef double _LOG_BIG = 345.38776394910684  # ln(1e150)


cdef void _laguerre_seq(int k, double x, double logb, int J, double* f) noexcept nogil:
    cdef double scale = -0.5 * x + k * logb - 0.5 * lgamma(k + 1.0)
    cdef double g0 = 1.0, g1, g2
    cdef double e = exp(scale)
    cdef int j
    if J <= 0:
        return
    f[0] = e
    if J == 1:
        return
    g1 = (1.0 + k - x) / sqrt(k + 1.0)
    f[1] = g1 * e
    for j in range(1, J - 1):
        g2 = ((2.0 * j + 1.0 + k - x) * g1 - sqrt(j * (j + <double>k)) * g0) / sqrt((j + 1.0) * (j + k + 1.0))
        if fabs(g2) > _BIG:
            g2 = g2 / _BIG
            g1 = g1 / _BIG
            scale = scale + _LOG_BIG
            e = exp(scale)
        g0 = g1
        g1 = g2
        f[j + 1] = g2 * e


def displacement_elements(double complex beta, int rows, int cols):
    """<m|D(beta)|n> for m < rows, n < cols (untruncated matrix elements)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((rows, cols), dtype=np.complex128)
    cdef double complex[:, ::1] D = out
    cdef double x = beta.real * beta.real + beta.imag * beta.imag
    cdef double logb, ang
    cdef int span = rows if rows > cols else cols
    cdef double[::1] buf = np.zeros(span, dtype=np.float64)
    cdef int k, j, J
    cdef double complex ph_lo, ph_hi
    if x == 0.0:
        for j in range(min(rows, cols)):
            D[j, j] = 1.0
        return out
    logb = 0.5 * log(x)
    ang = atan2(beta.imag, beta.real)
    for k in range(span):
        # lower triangle m = j + k >= n = j, upper triangle n = j + k
        J = min(rows - k, cols) if rows - k > 0 else 0
        if min(cols - k, rows) > J:
            J = min(cols - k, rows)
        if J <= 0:
            continue
        _laguerre_seq(k, x, logb, J, &buf[0])
        ph_lo = cos(k * ang) + 1j * sin(k * ang)
        ph_hi = cos(k * (3.141592653589793 - ang)) + 1j * sin(k * (3.141592653589793 - ang))
        for j in range(J):
            if j + k < rows and j < cols:
                D[j + k, j] = ph_lo * buf[j]
            if k > 0 and j < rows and j + k < cols:
                D[j, j + k] = ph_hi * buf[j]
    return out


def wigner_pure(const double complex[:, ::1] vecs, const double[::1] weights,
                const double[::1] q_axis, const double[::1] p_axis):
    """W(q, p) = (2/pi) sum_k w_k <v_k| D(2 alpha) Pi |v_k>, alpha = q + i p.

    D(alpha) Pi D(alpha)^dag = D(2 alpha) Pi is the displaced parity; its
    elements come from the Laguerre sequence, O(cols^2) work per grid point.
    """
    cdef int nk = vecs.shape[0]
    cdef int cols = vecs.shape[1]
    cdef int nq = q_axis.shape[0]
    cdef int np_ = p_axis.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((nq, np_), dtype=np.float64)
    cdef double[:, ::1] W = out
    # point-independent pieces: (-1)^j sum_v w_v conj(v_{j+k}) v_j, recurrence coefficients
    arr = np.asarray(vecs)
    cross_np = np.zeros((cols, cols), dtype=np.complex128)
    sgn_np = (-1.0) ** np.arange(cols)
    for kk in range(cols):
        cross_np[kk, : cols - kk] = (np.asarray(weights) @ (arr[:, kk:].conj() * arr[:, : cols - kk])) * sgn_np[: cols - kk]
    cross_np[1:] *= 2.0
    jj_np = np.arange(cols, dtype=np.float64)[None, :]
    kk_np = np.arange(cols, dtype=np.float64)[:, None]
    cdef double complex[:, ::1] cross = cross_np
    cdef double[:, ::1] ca = 1.0 / np.sqrt((jj_np + 1.0) * (jj_np + kk_np + 1.0))
    cdef double[:, ::1] cb = np.sqrt(jj_np * (jj_np + kk_np))
    cdef double[::1] halflg = 0.5 * np.array([lgamma(k + 1.0) for k in range(cols)])
    cdef int i, jj, k, j, J
    cdef double x, logb, acc, scale, e, g0, g1, g2, sr, si, c, sn, phr, phi, tr
    with nogil:
        for i in range(nq):
            for jj in range(np_):
                x = 4.0 * (q_axis[i] * q_axis[i] + p_axis[jj] * p_axis[jj])
                if x == 0.0:
                    acc = 0.0
                    for j in range(cols):
                        acc = acc + cross[0, j].real
                    W[i, jj] = acc * 0.6366197723675814
                    continue
                logb = 0.5 * log(x)
                c = 2.0 * q_axis[i] / sqrt(x)
                sn = 2.0 * p_axis[jj] / sqrt(x)
                phr = 1.0
                phi = 0.0
                acc = 0.0
                for k in range(cols):
                    J = cols - k
                    scale = -0.5 * x + k * logb - halflg[k]
                    e = exp(scale)
                    g0 = 1.0
                    sr = cross[k, 0].real
                    si = cross[k, 0].imag
                    if J > 1:
                        g1 = (1.0 + k - x) * ca[k, 0]
                        sr = sr + g1 * cross[k, 1].real
                        si = si + g1 * cross[k, 1].imag
                        for j in range(1, J - 1):
                            g2 = ((2.0 * j + 1.0 + k - x) * g1 - cb[k, j] * g0) * ca[k, j]
                            if fabs(g2) > _BIG:
                                g2 = g2 / _BIG
                                g1 = g1 / _BIG
                                sr = sr / _BIG
                                si = si / _BIG
                                scale = scale + _LOG_BIG
                                e = exp(scale)
                            g0 = g1
                            g1 = g2
                            sr = sr + g2 * cross[k, j + 1].real
                            si = si + g2 * cross[k, j + 1].imag
                    acc = acc + e * (phr * sr - phi * si)
                    tr = phr * c - phi * sn
                    phi = phr * sn + phi * c
                    phr = tr
                W[i, jj] = acc * 0.6366197723675814
    return out
