import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catgkp.fock import (
    CutoffExceeded,
    DensityState,
    ModeOperator,
    PureState,
    apply,
    expectation,
    load_state,
    make_fock,
    partial_trace,
    project_fock,
    project_mode,
    save_state,
    tensor,
    vacuum,
)
from conftest import random_density, random_pure


def test_fock_basis_and_cutoff():
    s = make_fock(3, 5)
    assert s.amplitudes[3] == 1 and s.norm_sq == 1
    with pytest.raises(CutoffExceeded):
        make_fock(5, 5)
    with pytest.raises(ValueError):
        make_fock(-1, 5)
    assert isinstance(CutoffExceeded("x"), ValueError)


def test_amplitude_count_checked():
    with pytest.raises(ValueError):
        PureState(np.ones(5), 2, 3)


def test_row_major_mode_order():
    # mode 0 is the slowest index
    s = tensor(make_fock(1, 4), make_fock(2, 4))
    assert s.amplitudes[1 * 4 + 2] == 1
    assert s.tensor[1, 2] == 1


def test_apply_targets_the_named_mode():
    d = 4
    shift = np.diag(np.ones(d - 1), -1)  # |n> -> |n+1>
    op = ModeOperator(shift, 1, d)
    s = apply(op, vacuum(d, 2), 1)
    assert s.tensor[0, 1] == 1
    s = apply(op, vacuum(d, 2), 0)
    assert s.tensor[1, 0] == 1


def test_density_apply_matches_pure(rng):
    d = 6
    psi = random_pure(rng, d)
    u, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    op = ModeOperator(u, 1, d)
    a = apply(op, psi).to_density().matrix
    b = apply(op, psi.to_density()).matrix
    assert np.allclose(a, b, atol=1e-13)


def test_projection_weights_sum_to_norm(rng):
    d = 5
    v = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
    joint = PureState(v / np.linalg.norm(v), 2, d)
    total = sum(project_fock(joint, 1, m)[1] for m in range(d))
    assert total == pytest.approx(1.0, abs=1e-13)
    # project_fock equals projecting on a basis bra
    a, wa = project_fock(joint, 0, 2)
    b, wb = project_mode(joint, 0, np.eye(d)[2])
    assert np.allclose(a.amplitudes, b.amplitudes) and wa == pytest.approx(wb)


def test_density_projection_matches_pure(rng):
    d = 4
    v = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
    joint = PureState(v, 2, d)
    p, wp = project_fock(joint, 1, 3)
    r, wr = project_fock(joint.to_density(), 1, 3)
    assert wp == pytest.approx(wr)
    assert np.allclose(p.to_density().matrix, r.matrix)


def test_partial_trace_of_product(rng):
    d = 4
    a, b = random_pure(rng, d), random_pure(rng, d)
    joint = tensor(a, b)
    assert np.allclose(partial_trace(joint, [0]).matrix, a.to_density().matrix, atol=1e-13)
    assert np.allclose(partial_trace(joint, [1]).matrix, b.to_density().matrix, atol=1e-13)


def test_populations_and_tail(rng):
    s = random_pure(rng, 8)
    assert s.populations().sum() == pytest.approx(1.0)
    assert s.tail_mass() == pytest.approx(abs(s.amplitudes[-1]) ** 2)
    even, odd = s.parity_populations()
    assert even + odd == pytest.approx(1.0)


def test_density_physicality(rng):
    rho = random_density(rng, 6)
    assert rho.is_physical()
    bad = DensityState(np.diag([1.5, -0.5]), 1, 2)
    assert not bad.is_physical()


def test_expectation_number_operator():
    n = np.diag(np.arange(6))
    assert expectation(n, make_fock(4, 6)).real == pytest.approx(4)


@pytest.mark.parametrize("kind", ["pure", "density"])
def test_state_file_roundtrip(tmp_path, rng, kind):
    s = random_pure(rng, 7) if kind == "pure" else random_density(rng, 7)
    path = tmp_path / "s.state"
    save_state(s, path)
    back = load_state(path)
    assert type(back) is type(s)
    data = s.amplitudes if kind == "pure" else s.matrix
    got = back.amplitudes if kind == "pure" else back.matrix
    assert np.array_equal(data, got)


def test_states_are_immutable(rng):
    s = random_pure(rng, 4)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


@given(st.integers(2, 7), st.integers(0, 10_000))
def test_unitary_preserves_norm(d, seed):
    g = np.random.default_rng(seed)
    u, _ = np.linalg.qr(g.normal(size=(d, d)) + 1j * g.normal(size=(d, d)))
    psi = random_pure(g, d)
    out = apply(ModeOperator(u, 1, d), tensor(psi, psi), 1)
    assert out.norm_sq == pytest.approx(1.0, abs=1e-12)


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_partial_trace_keeps_trace(d, seed):
    g = np.random.default_rng(seed)
    v = g.normal(size=d * d) + 1j * g.normal(size=d * d)
    joint = PureState(v / np.linalg.norm(v), 2, d)
    red = partial_trace(joint, [1])
    assert red.trace == pytest.approx(1.0, abs=1e-12)
    assert red.is_physical()
