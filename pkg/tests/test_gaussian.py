import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from catgkp.fock import apply, make_fock, tensor, vacuum
from catgkp.gaussian import (
    GaussianSpec,
    annihilation,
    beamsplitter,
    db_from_r,
    displacement,
    gkp_db,
    number_op,
    quadrature_op,
    r_from_db,
    rotation,
    squeeze,
    sum_gate,
)

BIG = 160


def _expm_block(gen_fn, d):
    """Top-left d x d block of the exponential computed at a much larger cutoff."""
    return sla.expm(gen_fn(BIG))[:d, :d]


def _disp_gen(alpha):
    def f(c):
        a = annihilation(c)
        return alpha * a.T - np.conj(alpha) * a
    return f


def _sq_gen(r, theta):
    def f(c):
        a = annihilation(c)
        return 0.5 * r * (a @ a * np.exp(-2j * theta) - a.T @ a.T * np.exp(2j * theta))
    return f


@pytest.mark.parametrize("alpha", [0.3, 1.2 - 0.7j, 2.5j])
def test_displacement_exact_elements(alpha):
    d = 30
    assert np.allclose(displacement(alpha, d).dense, _expm_block(_disp_gen(alpha), d), atol=1e-10)


@pytest.mark.parametrize("r,theta", [(0.4, 0.0), (-0.9, 0.3), (1.2, math.pi / 2)])
def test_squeeze_exact_elements(r, theta):
    d = 30
    assert np.allclose(squeeze(r, theta, d).dense, _expm_block(_sq_gen(r, theta), d), atol=1e-10)


def test_expm_method_is_the_truncated_exponential():
    d = 12
    assert np.allclose(displacement(0.8j, d, method="expm").dense, sla.expm(_disp_gen(0.8j)(d)))
    assert np.allclose(squeeze(0.5, 0.2, d, method="expm").dense, sla.expm(_sq_gen(0.5, 0.2)(d)))
    with pytest.raises(ValueError):
        displacement(0.1, d, method="taylor")


def test_squeeze_inverse():
    d = 150  # the matrix product sums over the truncated middle index
    prod = squeeze(0.7, 0.4, d).dense @ squeeze(-0.7, 0.4, d).dense
    assert np.allclose(prod[:10, :10], np.eye(10), atol=1e-10)


def test_quadrature_convention():
    # hbar = 1/2: vacuum variance 1/4, [q, p] = i/2
    d = 30
    q, p = quadrature_op(0.0, d), quadrature_op(math.pi / 2, d)
    v = vacuum(d).amplitudes
    assert np.vdot(v, q @ q @ v).real == pytest.approx(0.25)
    comm = (q @ p - p @ q)[:10, :10]
    assert np.allclose(comm, 0.5j * np.eye(10))


def test_squeezing_direction():
    # r > 0 at theta = 0 squeezes q
    d = 60
    s = apply(squeeze(0.5, 0.0, d), vacuum(d))
    q = quadrature_op(0.0, d)
    var = np.vdot(s.amplitudes, q @ q @ s.amplitudes).real
    assert var == pytest.approx(0.25 * math.exp(-1.0), rel=1e-9)


def test_displacement_moves_q_mean():
    d = 60
    s = apply(displacement(1.5 + 0.5j, d), vacuum(d))
    q, p = quadrature_op(0.0, d), quadrature_op(math.pi / 2, d)
    assert np.vdot(s.amplitudes, q @ s.amplitudes).real == pytest.approx(1.5, abs=1e-9)
    assert np.vdot(s.amplitudes, p @ s.amplitudes).real == pytest.approx(0.5, abs=1e-9)


def test_rotation_is_diagonal_phase():
    r = rotation(0.3, 5).dense
    assert np.allclose(r, np.diag(np.exp(0.3j * np.arange(5))))


def _bs_oracle(eta, d):
    a = annihilation(d)
    eye = np.eye(d)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    th = math.acos(math.sqrt(eta))
    return sla.expm(th * (a1.conj().T @ a2 - a1 @ a2.conj().T))


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.5, 0.9, 1.0])
def test_beamsplitter_against_kron_expm(eta):
    d = 7
    ours = beamsplitter(eta, d).dense
    ref = _bs_oracle(eta, d)
    n1, n2 = np.divmod(np.arange(d * d), d)
    low = (n1 + n2) < d  # blocks fully inside the truncation
    assert np.allclose(ours[np.ix_(low, low)], ref[np.ix_(low, low)], atol=1e-12)


def test_beamsplitter_heisenberg_action():
    # <1,0| B |1,0> = sqrt(eta), <0,1| B |1,0> = -sqrt(1-eta)
    d, eta = 5, 0.3
    out = apply(beamsplitter(eta, d), tensor(make_fock(1, d), vacuum(d)), (0, 1)).tensor
    assert out[1, 0] == pytest.approx(math.sqrt(eta))
    assert abs(out[0, 1]) == pytest.approx(math.sqrt(1 - eta))


def test_sum_gate_is_truncated_generator_exponential():
    d = 8
    q, p = quadrature_op(0.0, d), quadrature_op(math.pi / 2, d)
    ref = sla.expm(-2j * np.kron(q, p))
    assert np.allclose(sum_gate(d).dense, ref, atol=1e-10)
    assert np.allclose(sum_gate(d).dense @ sum_gate(d, inverse=True).dense, np.eye(d * d), atol=1e-10)


def test_sum_gate_shifts_target_q():
    d = 60
    x0 = 0.7
    ctrl = apply(displacement(x0, d), vacuum(d))
    out = apply(sum_gate(d), tensor(ctrl, vacuum(d)), (0, 1))
    q = np.kron(np.eye(d), quadrature_op(0.0, d))
    assert np.vdot(out.amplitudes, q @ out.amplitudes).real == pytest.approx(x0, abs=1e-6)


def test_spec_builds_and_normalizes_angle():
    spec = GaussianSpec("squeeze", r=0.3, theta=math.pi + 0.1)
    assert spec.theta == pytest.approx(0.1)
    assert np.allclose(spec.build(10).dense, squeeze(0.3, 0.1, 10).dense)
    with pytest.raises(ValueError):
        GaussianSpec("shear")
    with pytest.raises(ValueError):
        GaussianSpec("beamsplitter", eta=1.5)


def test_large_parameters_warn():
    with pytest.warns(UserWarning):
        displacement(5.0, 20)
    with pytest.warns(UserWarning):
        squeeze(3.5, 0.0, 20)


def test_db_conversions():
    assert r_from_db(6.0) == pytest.approx(6.0 / (20 / math.log(10)))
    assert gkp_db(0.5) == pytest.approx(db_from_r(math.log(2)))
    assert number_op(4)[3, 3] == 3


@given(st.floats(-30, 30))
def test_db_roundtrip(db):
    assert db_from_r(r_from_db(db)) == pytest.approx(db, abs=1e-12)


@given(st.floats(0.0, 1.0))
def test_beamsplitter_is_unitary(eta):
    d = 6
    b = beamsplitter(eta, d).dense
    assert np.allclose(b.conj().T @ b, np.eye(d * d), atol=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_displacement_composition(x, y):
    # D(x) D(iy) = e^{-i x y} D(x + iy) on low levels
    d = 40
    lhs = displacement(x, d).dense @ displacement(1j * y, d).dense
    rhs = np.exp(-1j * x * y) * displacement(complex(x, y), d).dense
    assert np.allclose(lhs[:8, :8], rhs[:8, :8], atol=1e-8)
