"""GKP breeding: entangle two grid states, homodyne p on one, keep the other.

With the SUM gate (control = second input, target = first) and p = x on the
control, the kept wavefunction is the q-convolution of the inputs, so peaks at
+-sqrt(pi/2) combine into 0 and +-2 sqrt(pi/2). The beamsplitter variant mixes
on B(1/2), measures p and stretches q back by sqrt(2) with S(-ln sqrt 2).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import optimize

from ..analysis import fidelity
from ..fock import CutoffExceeded, PureState, State, apply, tensor
from ..gaussian import beamsplitter, squeeze, sum_gate
from ..measurements import as_rng, homodyne_project, quadrature_density, HOMODYNE_RANGE, HOMODYNE_STEP
from ..states import GkpSpec, gkp
from .config import RunRecord, parity_label
from .schemes import _Audit, _top_population

GATES = ("sum_gate", "beamsplitter")


def breed(
    a: State,
    b: State,
    gate: str = "sum_gate",
    x: float | None = 0.0,
    *,
    rng=None,
    tail_limit: float = 1e-4,
) -> RunRecord:
    """Breed ``a`` with ``b``; ``x=None`` samples the p outcome, a number post-selects it."""
    if gate not in GATES:
        raise ValueError(f"gate must be one of {GATES}")
    if a.cutoff != b.cutoff or a.modes != 1 or b.modes != 1:
        raise ValueError("breeding needs two single-mode states at one cutoff")
    d = a.cutoff
    a, b = a.normalize(), b.normalize()
    joint = tensor(a, b)
    if gate == "sum_gate":
        joint = apply(sum_gate(d), joint, (1, 0))
    else:
        joint = apply(beamsplitter(0.5, d), joint, (0, 1))
    if x is None:
        gen = as_rng(rng)
        grid = np.arange(-HOMODYNE_RANGE, HOMODYNE_RANGE + 0.5 * HOMODYNE_STEP, HOMODYNE_STEP)
        dens = np.clip(quadrature_density(joint, 1, grid, math.pi / 2), 0.0, None)
        x = float(grid[gen.choice(grid.size, p=dens / dens.sum())])
    post, w = homodyne_project(joint, 1, float(x), math.pi / 2)
    if w <= 0.0:
        raise ValueError("homodyne outcome has zero density")
    out = post.normalize()
    if gate == "beamsplitter":
        out = apply(squeeze(-0.5 * math.log(2.0), 0.0, d), out, 0).normalize()
    audit = _Audit(tail_limit)
    audit.record(_top_population(out), "bred state")
    even, odd = out.parity_populations()
    return RunRecord(
        outcomes=(float(x),),
        branch_probability=float(w),
        output=out,
        parity=parity_label(0 if even >= odd else 1),
        config={"gate": gate, "x": float(x)},
        seed=None,
        tail_mass=audit.tail,
        flagged=audit.flagged,
    )


def breed_tree(
    states: Sequence[State],
    depth: int,
    pairing: str = "ordered",
    gate: str = "sum_gate",
    x: float | None = 0.0,
    rng=None,
) -> list[list]:
    """Breed ``2**depth`` states level by level.

    Returns ``[level_0, level_1, ...]``: level 0 holds the inputs, later
    levels hold RunRecords. ``random`` pairing shuffles each level first.
    """
    if depth < 0 or depth > 3:
        raise ValueError("tree depth must lie in 0..3")
    if len(states) != 2**depth:
        raise ValueError(f"depth {depth} needs {2 ** depth} states, got {len(states)}")
    if pairing not in ("ordered", "random"):
        raise ValueError("pairing must be 'ordered' or 'random'")
    gen = as_rng(rng)
    levels: list[list] = [list(states)]
    current = list(states)
    for _ in range(depth):
        order = gen.permutation(len(current)) if pairing == "random" else np.arange(len(current))
        current = [current[i] for i in order]
        bred = [breed(current[i], current[i + 1], gate, x, rng=gen) for i in range(0, len(current), 2)]
        levels.append(bred)
        current = [rec.output for rec in bred]
    return levels


def matched_gkp(
    state: State, delta_bounds: tuple[float, float] = (0.2, 1.0), logicals=(0, 1)
) -> tuple[GkpSpec, float]:
    """The physical GKP codeword (over delta and logical value) closest to ``state``.

    Deltas the cutoff cannot hold count as fidelity 0.
    """
    d = state.cutoff

    def infid(delta: float, logical: int) -> float:
        try:
            return 1.0 - fidelity(gkp(GkpSpec(float(delta), logical, d)), state)
        except CutoffExceeded:
            return 1.0

    best: tuple[float, GkpSpec] | None = None
    lo, hi = delta_bounds
    for logical in logicals:
        grid = np.linspace(lo, hi, 17)
        vals = [infid(dl, logical) for dl in grid]
        i = int(np.argmin(vals))
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        res = optimize.minimize_scalar(lambda t: infid(t, logical), bounds=(a, b), method="bounded",
                                       options={"xatol": 1e-6})
        cand = (float(res.fun), GkpSpec(float(res.x), logical, d))
        if vals[i] < cand[0]:
            cand = (vals[i], GkpSpec(float(grid[i]), logical, d))
        if best is None or cand[0] < best[0]:
            best = cand
    assert best is not None
    return best[1], 1.0 - best[0]


__all__ = ["GATES", "PureState", "breed", "breed_tree", "matched_gkp"]
