"""Homodyne baseline, Scheme I (inline-squeezed PNRD) and Scheme II (squeezed ancillas).

Mode 0 carries the evolving state, mode 1 the tapped (or ancilla) arm. Each
round mixes them on B(eta_j) and measures mode 1. States are renormalized
after every round; the product of per-round outcome probabilities is kept as
the branch probability.

Truncation is audited per round: the norm lost when the squeezer or ancilla
pushes amplitude above the cutoff, and the top-level population of the kept
mode. The larger of the two accumulates into ``tail_mass``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..channels import apply_channel, dephasing_kraus, loss_kraus
from ..fock import (
    TAIL_FLAG,
    CutoffExceeded,
    DensityState,
    PureState,
    State,
    apply,
    project_fock,
    tensor,
    vacuum,
)
from ..gaussian import beamsplitter, squeeze
from ..measurements import as_rng, homodyne_project, quadrature_density, HOMODYNE_RANGE, HOMODYNE_STEP
from .config import ProtocolConfig, RunRecord, parity_label, squeeze_angles


class _Audit:
    def __init__(self, limit: float):
        self.limit = limit
        self.tail = 0.0

    def record(self, value: float, where: str, enforce: bool = True) -> None:
        self.tail = max(self.tail, float(value))
        if enforce and value > self.limit:
            raise CutoffExceeded(f"{where}: truncation tail {value:.2e} exceeds limit {self.limit:.1e}")

    @property
    def flagged(self) -> bool:
        return self.tail > TAIL_FLAG


def _initial(config: ProtocolConfig, initial: PureState | None, mu: int | None) -> tuple[State, int]:
    if initial is None:
        return config.input.build(config.cutoff), config.input.parity
    if initial.modes != 1 or initial.cutoff != config.cutoff:
        raise ValueError("initial state must be single-mode at the configured cutoff")
    if mu is None:
        even, odd = initial.parity_populations()
        mu = 0 if even >= odd else 1
    return initial, int(mu) % 2


def _normalized(state: State) -> State:
    return state.normalize()


def _top_population(state: State) -> float:
    return float(state.populations(0)[-1] / state.norm_sq)


def _choose(weights: np.ndarray, forced: int | None, rng: np.random.Generator) -> int:
    if forced is not None:
        if not 0 <= forced < weights.size:
            raise ValueError(f"forced outcome {forced} outside 0..{weights.size - 1}")
        return int(forced)
    w = np.clip(weights, 0.0, None)
    return int(rng.choice(w.size, p=w / w.sum()))


def _noise_ops(config: ProtocolConfig) -> dict:
    noise = config.noise
    if noise is None or noise.is_trivial():
        return {}
    ops: dict = {}
    for loc in ("a", "b", "c"):
        chain = []
        if noise.loss_eta.get(loc, 1.0) != 1.0:
            chain.append(loss_kraus(noise.loss_eta[loc], config.cutoff))
        if noise.dephasing_eps.get(loc, 0.0) != 0.0:
            chain.append(dephasing_kraus(noise.dephasing_eps[loc], config.cutoff))
        if chain:
            ops[loc] = chain
    return ops


def _apply_noise(state: State, ops: dict, loc: str, mode: int) -> State:
    for kraus in ops.get(loc, ()):
        state = apply_channel(state, kraus, mode)
    return state


def _record(config, outcomes, prob, out, parity_bit, audit, angles, etas, seed) -> RunRecord:
    return RunRecord(
        outcomes=tuple(outcomes),
        branch_probability=float(prob),
        output=out,
        parity=parity_label(parity_bit),
        config=config.to_dict(),
        seed=seed,
        tail_mass=audit.tail,
        flagged=audit.flagged,
        angles=tuple(angles),
        etas=tuple(etas),
    )


# -- homodyne baseline --------------------------------------------------------

def run_homodyne(
    config: ProtocolConfig,
    x: float | None = None,
    *,
    theta: float = math.pi / 2,
    initial: PureState | None = None,
    mu: int | None = None,
) -> RunRecord:
    """Mix the input with vacuum on B(eta) and homodyne the tapped arm.

    ``x=None`` samples the outcome (grid of spacing HOMODYNE_STEP on
    [-HOMODYNE_RANGE, HOMODYNE_RANGE]) with the config seed; otherwise the run
    is conditioned on ``x``. The record's branch probability is the density at x.
    """
    if config.scheme != "homodyne":
        raise ValueError("run_homodyne needs scheme='homodyne'")
    d = config.cutoff
    state, mu = _initial(config, initial, mu)
    audit = _Audit(config.tail_limit)
    eta = config.eta_total
    joint = apply(beamsplitter(eta, d), tensor(state, vacuum(d)), (0, 1))
    if x is None:
        rng = as_rng(config.seed)
        grid = np.arange(-HOMODYNE_RANGE, HOMODYNE_RANGE + 0.5 * HOMODYNE_STEP, HOMODYNE_STEP)
        dens = np.clip(quadrature_density(joint, 1, grid, theta), 0.0, None)
        x = float(grid[rng.choice(grid.size, p=dens / dens.sum())])
    post, w = homodyne_project(joint, 1, float(x), theta)
    out = _normalized(post)
    audit.record(_top_population(out), "homodyne output")
    even, odd = out.parity_populations()
    bit = 0 if even >= odd else 1
    return _record(config, [float(x)], w / joint.norm_sq, out, bit, audit, [theta], [eta], config.seed)


# -- Scheme I -----------------------------------------------------------------

def run_scheme1(
    config: ProtocolConfig,
    outcomes: Sequence[int] | None = None,
    *,
    angles: Sequence[float] | None = None,
    initial: PureState | None = None,
    mu: int | None = None,
) -> RunRecord:
    """k rounds of B(eta_j), inline squeezing S(r, theta_j) on the tapped arm, PNRD.

    The detector thereby projects onto S(r, theta_j)|m_j>. Pass ``outcomes`` to
    post-select a branch; otherwise outcomes are sampled with the config seed.
    With a NoiseConfig the run switches to density matrices.
    """
    if config.scheme != "scheme1":
        raise ValueError("run_scheme1 needs scheme='scheme1'")
    d = config.cutoff
    k = config.k
    if outcomes is not None and len(outcomes) != k:
        raise ValueError(f"expected {k} outcomes, got {len(outcomes)}")
    rng = as_rng(config.seed)
    thetas = list(angles) if angles is not None else squeeze_angles(config.angle_policy, k, rng)
    etas = config.etas()
    state, mu = _initial(config, initial, mu)
    noise = _noise_ops(config)
    if noise:
        state = state.to_density()
    audit = _Audit(config.tail_limit)
    prob = 1.0
    ms: list[int] = []
    for j in range(k):
        joint = apply(beamsplitter(etas[j], d), tensor(state, vacuum(d) if not noise else vacuum(d).to_density()), (0, 1))
        joint = _apply_noise(joint, noise, "a", 0)
        joint = _apply_noise(joint, noise, "b", 1)
        before = joint.norm_sq
        if config.inline_r != 0.0:
            # projecting onto S(r, theta)|m> = applying S(-r, theta), then <m|
            joint = apply(squeeze(-config.inline_r, thetas[j], d), joint, 1)
        joint = _apply_noise(joint, noise, "c", 1)
        weights = np.asarray(joint.populations(1), dtype=float) / before
        # a forced outcome uses exact elements, so leakage only matters when sampling
        audit.record(max(0.0, 1.0 - weights.sum()), f"round {j + 1} detector", outcomes is None)
        m = _choose(weights, None if outcomes is None else outcomes[j], rng)
        post, w = project_fock(joint, 1, m)
        if w <= 0.0:
            raise ValueError(f"round {j + 1}: outcome {m} has zero probability")
        prob *= w / before
        ms.append(m)
        state = _normalized(post)
        audit.record(_top_population(state), f"round {j + 1} kept mode")
    bit = (mu + sum(ms)) % 2
    return _record(config, ms, prob, state, bit, audit, thetas, etas, config.seed)


def _tap_round(state: PureState, eta: float, r: float, theta: float) -> tuple[PureState, float]:
    d = state.cutoff
    joint = apply(beamsplitter(eta, d), tensor(state, vacuum(d)), (0, 1))
    before = joint.norm_sq
    if r != 0.0:
        joint = apply(squeeze(-r, theta, d), joint, 1)
    return joint, before


def enumerate_scheme1(config: ProtocolConfig, m_max: int | None = None) -> list[RunRecord]:
    """Every outcome tuple with nonzero weight (m_j <= m_max), depth-first.

    Branch probabilities of a noiseless run sum to 1 minus the truncation tail.
    """
    if config.noise is not None and not config.noise.is_trivial():
        raise ValueError("enumeration is implemented for pure runs")
    d = config.cutoff
    m_max = d - 1 if m_max is None else m_max
    thetas = squeeze_angles(config.angle_policy, config.k, as_rng(config.seed))
    etas = config.etas()
    state0, mu = _initial(config, None, None)
    records: list[RunRecord] = []

    def recurse(state: PureState, prefix: list[int], prob: float, tail: float) -> None:
        j = len(prefix)
        joint, before = _tap_round(state, etas[j], config.inline_r, thetas[j])
        weights = np.asarray(joint.populations(1), dtype=float) / before
        tail = max(tail, 1.0 - weights.sum())
        for m in range(m_max + 1):
            if weights[m] <= 1e-300:
                continue
            post, w = project_fock(joint, 1, m)
            out = post.normalize()
            if j + 1 < config.k:
                recurse(out, prefix + [m], prob * w / before, tail)
                continue
            audit = _Audit(math.inf)
            audit.record(max(tail, _top_population(out)), "enumeration")
            ms = prefix + [m]
            records.append(
                _record(config, ms, prob * w / before, out, (mu + sum(ms)) % 2, audit, thetas, etas, config.seed)
            )

    recurse(state0, [], 1.0, 0.0)
    return records


# -- Scheme II ----------------------------------------------------------------

def squeezed_ancilla(r: float, theta: float, cutoff: int) -> PureState:
    """S(r, theta)|0>, truncated without renormalization (the lost norm is tail)."""
    col = np.asarray(squeeze(r, theta, cutoff).dense[:, 0]).copy()
    return PureState(col, 1, cutoff)


def run_scheme2(
    config: ProtocolConfig,
    outcomes: Sequence[int] | None = None,
    *,
    angles: Sequence[float] | None = None,
    initial: PureState | None = None,
    mu: int | None = None,
    keep_history: bool = False,
):
    """k rounds: ancilla S(ancilla_r, theta_j)|0> joins on B(eta_j), PNRD on the ancilla arm.

    The default angle policy for Scheme II is random. With ``keep_history`` the
    normalized state after every round is returned alongside the record.
    """
    if config.scheme != "scheme2":
        raise ValueError("run_scheme2 needs scheme='scheme2'")
    if config.noise is not None and not config.noise.is_trivial():
        raise ValueError("noise insertion is modelled for Scheme I only")
    d = config.cutoff
    k = config.k
    if outcomes is not None and len(outcomes) != k:
        raise ValueError(f"expected {k} outcomes, got {len(outcomes)}")
    rng = as_rng(config.seed)
    policy = "random" if config.angle_policy == "auto" else config.angle_policy
    thetas = list(angles) if angles is not None else squeeze_angles(policy, k, rng)
    etas = config.etas()
    state, mu = _initial(config, initial, mu)
    audit = _Audit(config.tail_limit)
    history = [state] if keep_history else None
    prob = 1.0
    ms: list[int] = []
    for j in range(k):
        anc = squeezed_ancilla(config.ancilla_r, thetas[j], d)
        audit.record(max(0.0, 1.0 - anc.norm_sq), f"round {j + 1} ancilla")
        joint = apply(beamsplitter(etas[j], d), tensor(state, anc), (0, 1))
        before = joint.norm_sq
        weights = np.asarray(joint.populations(1), dtype=float) / before
        audit.record(float(weights[-1]), f"round {j + 1} ancilla arm")
        m = _choose(weights, None if outcomes is None else outcomes[j], rng)
        post, w = project_fock(joint, 1, m)
        if w <= 0.0:
            raise ValueError(f"round {j + 1}: outcome {m} has zero probability")
        prob *= w / before
        ms.append(m)
        state = _normalized(post)
        audit.record(_top_population(state), f"round {j + 1} kept mode")
        if keep_history:
            history.append(state)
    bit = (mu + sum(ms)) % 2
    rec = _record(config, ms, prob, state, bit, audit, thetas, etas, config.seed)
    return (rec, history) if keep_history else rec


def run(config: ProtocolConfig, **kwargs) -> RunRecord:
    """Dispatch on ``config.scheme``."""
    runner = {"homodyne": run_homodyne, "scheme1": run_scheme1, "scheme2": run_scheme2}[config.scheme]
    return runner(config, **kwargs)


__all__ = [
    "DensityState",
    "enumerate_scheme1",
    "run",
    "run_homodyne",
    "run_scheme1",
    "run_scheme2",
    "squeezed_ancilla",
]
