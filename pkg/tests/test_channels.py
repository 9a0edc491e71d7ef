import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catgkp.channels import (
    apply_channel,
    dephasing_by_quadrature,
    dephasing_kraus,
    loss_by_dilation,
    loss_kraus,
)
from catgkp.fock import DensityState, make_fock, tensor
from catgkp.states import coherent
from conftest import random_density, random_pure


def test_loss_completeness():
    k = loss_kraus(0.4, 10)
    assert np.allclose(k.completeness(), np.eye(10), atol=1e-13)
    assert k.truncation_k == 10
    assert loss_kraus(1.0, 10).truncation_k == 1


def test_dephasing_completeness_and_mask():
    k = dephasing_kraus(0.05, 12)
    assert np.allclose(k.completeness(), np.eye(12), atol=1e-10)
    n = np.arange(12)
    assert np.allclose(k.mask(), np.exp(-0.05 * (n[:, None] - n[None, :]) ** 2 / 2), atol=1e-12)
    with pytest.raises(ValueError):
        loss_kraus(0.5, 4).mask()


def test_loss_of_coherent_state_shrinks_amplitude():
    # loss maps |alpha> to |sqrt(eta) alpha>
    d = 40
    out = apply_channel(coherent(1.5, d), loss_kraus(0.36, d))
    ref = coherent(0.9, d).to_density().matrix
    assert np.allclose(out.matrix, ref, atol=1e-10)


def test_loss_on_fock_is_binomial():
    out = apply_channel(make_fock(3, 6), loss_kraus(0.5, 6))
    assert np.allclose(np.diag(out.matrix).real[:4], [1 / 8, 3 / 8, 3 / 8, 1 / 8])


def test_dephasing_factor_exact():
    d = 8
    probe = np.zeros((d, d), complex)
    probe[0, 3] = 1
    out = apply_channel(DensityState(probe, 1, d), dephasing_kraus(0.1, d))
    assert out.matrix[0, 3].real == pytest.approx(math.exp(-0.1 * 9 / 2), abs=1e-12)


def test_channel_acts_on_selected_mode(rng):
    d = 5
    a, b = random_pure(rng, d, 3), random_pure(rng, d, 3)
    joint = tensor(a, b)
    out = apply_channel(joint, loss_kraus(0.5, d), mode=1)
    ref = tensor(a.to_density(), apply_channel(b, loss_kraus(0.5, d)))
    assert np.allclose(out.matrix, ref.matrix, atol=1e-13)
    out = apply_channel(joint, dephasing_kraus(0.2, d), mode=0)
    ref = tensor(apply_channel(a, dephasing_kraus(0.2, d)), b.to_density())
    assert np.allclose(out.matrix, ref.matrix, atol=1e-13)


def test_cutoff_mismatch_rejected(rng):
    with pytest.raises(ValueError):
        apply_channel(random_pure(rng, 4), loss_kraus(0.5, 5))
    with pytest.raises(ValueError):
        loss_kraus(1.2, 4)
    with pytest.raises(ValueError):
        dephasing_kraus(-0.1, 4)


@given(st.floats(0.0, 1.0), st.integers(0, 10_000))
def test_loss_matches_dilation(eta, seed):
    d = 10
    rho = random_density(np.random.default_rng(seed), d, support=d // 2)
    a = apply_channel(rho, loss_kraus(eta, d)).matrix
    b = loss_by_dilation(rho, eta).matrix
    assert np.abs(a - b).max() < 1e-10


@given(st.floats(0.0, 0.5), st.integers(0, 10_000))
def test_dephasing_matches_quadrature(eps, seed):
    d = 10
    rho = random_density(np.random.default_rng(seed), d)
    a = apply_channel(rho, dephasing_kraus(eps, d)).matrix
    b = dephasing_by_quadrature(rho, eps).matrix
    assert np.abs(a - b).max() < 1e-6


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 10_000))
def test_channels_preserve_trace_and_positivity(eta, eps, seed):
    d = 8
    rho = random_density(np.random.default_rng(seed), d)
    out = apply_channel(apply_channel(rho, loss_kraus(eta, d)), dephasing_kraus(eps, d))
    assert out.trace == pytest.approx(1.0, abs=1e-8)
    assert out.is_physical(1e-9)


@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_loss_composes(e1, e2):
    d = 8
    rho = make_fock(5, d).to_density()
    a = apply_channel(apply_channel(rho, loss_kraus(e1, d)), loss_kraus(e2, d)).matrix
    b = apply_channel(rho, loss_kraus(e1 * e2, d)).matrix
    assert np.allclose(a, b, atol=1e-12)
