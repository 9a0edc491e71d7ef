"""Protocol configuration, noise placement, run records, schedules and angle policies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..analysis import CatFit
from ..fock import CutoffExceeded, DensityState, PureState, State, make_fock
from ..states import squeezed_fock

SCHEMES = ("homodyne", "scheme1", "scheme2")
SCHEDULES = ("constant", "equal_light")
ANGLE_POLICIES = ("auto", "uniform", "pair", "random")
NOISE_LOCATIONS = ("a", "b", "c")
DEFAULT_TAIL_LIMIT = 1e-4


INPUT_KINDS = ("fock", "squeezed_fock", "random_even")


@dataclass(frozen=True)
class InputSpec:
    """Input resource.

    ``fock``: |n>. ``squeezed_fock``: S(r)|n>. ``random_even``:
    sum_{j<=n} c_j base^{2j} |2j> with c_j uniform on [0, 1) drawn from ``seed``.
    """

    kind: str = "fock"
    n: int = 0
    r: float = 0.0
    base: float = 1.2
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("photon number must be nonnegative")

    @property
    def parity(self) -> int:
        return 0 if self.kind == "random_even" else self.n % 2

    @property
    def max_photons(self) -> int:
        return 2 * self.n if self.kind == "random_even" else self.n

    def build(self, cutoff: int) -> PureState:
        if self.kind == "fock":
            return make_fock(self.n, cutoff)
        if self.kind == "squeezed_fock":
            return squeezed_fock(self.n, self.r, cutoff)
        if 2 * self.n >= cutoff:
            raise CutoffExceeded(f"random_even input needs cutoff > {2 * self.n}")
        c = np.random.default_rng(self.seed).uniform(0.0, 1.0, self.n + 1)
        amps = np.zeros(cutoff)
        amps[0 : 2 * self.n + 1 : 2] = c * self.base ** (2.0 * np.arange(self.n + 1))
        return PureState(amps, 1, cutoff).normalize()

    def mean_photons(self, cutoff: int) -> float:
        state = self.build(cutoff)
        return float(np.dot(np.arange(cutoff), state.populations(0)))


@dataclass(frozen=True)
class NoiseConfig:
    """Loss and dephasing inserted each round at locations a (kept arm), b (tapped arm
    before the squeezer) and c (tapped arm before the detector)."""

    loss_eta: dict = field(default_factory=dict)
    dephasing_eps: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, table in (("loss_eta", self.loss_eta), ("dephasing_eps", self.dephasing_eps)):
            for loc, val in table.items():
                if loc not in NOISE_LOCATIONS:
                    raise ValueError(f"{name}: unknown noise location {loc!r}")
                if name == "loss_eta" and not 0.0 <= val <= 1.0:
                    raise ValueError(f"loss_eta[{loc}] must lie in [0, 1]")
                if name == "dephasing_eps" and val < 0:
                    raise ValueError(f"dephasing_eps[{loc}] must be nonnegative")

    @property
    def locations(self) -> frozenset:
        return frozenset(self.loss_eta) | frozenset(self.dephasing_eps)

    def is_trivial(self) -> bool:
        return all(v == 1.0 for v in self.loss_eta.values()) and all(
            v == 0.0 for v in self.dephasing_eps.values()
        )


@dataclass(frozen=True)
class ProtocolConfig:
    scheme: str
    input: InputSpec
    k: int = 1
    eta_total: float = 0.5
    eta_schedule: str = "constant"
    inline_r: float = 0.0
    ancilla_r: float = 0.0
    angle_policy: str = "auto"
    cutoff: int = 60
    seed: int | None = None
    noise: NoiseConfig | None = None
    tail_limit: float = DEFAULT_TAIL_LIMIT

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not 0.0 < self.eta_total <= 1.0:
            raise ValueError("eta_total must lie in (0, 1]")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.scheme == "homodyne" and self.k != 1:
            raise ValueError("the homodyne scheme has a single round")
        if self.eta_schedule not in SCHEDULES:
            raise ValueError(f"eta_schedule must be one of {SCHEDULES}")
        if self.angle_policy not in ANGLE_POLICIES:
            raise ValueError(f"angle_policy must be one of {ANGLE_POLICIES}")
        if self.angle_policy == "pair" and self.k != 2:
            raise ValueError("the pair angle policy needs k = 2")
        if self.cutoff < 2:
            raise ValueError("cutoff must be >= 2")
        if self.input.kind != "squeezed_fock" and self.input.max_photons >= self.cutoff:
            raise ValueError(f"cutoff {self.cutoff} cannot hold {self.input.max_photons} input photons")

    def etas(self) -> list[float]:
        if self.eta_schedule == "equal_light":
            return eta_schedule_equal_light(self.k, self.eta_total)
        return eta_schedule_constant(self.k, self.eta_total)

    def to_dict(self) -> dict:
        out = {
            "scheme": self.scheme,
            "input": {
                "kind": self.input.kind, "n": self.input.n, "r": self.input.r,
                "base": self.input.base, "seed": self.input.seed,
            },
            "k": self.k,
            "eta_total": self.eta_total,
            "eta_schedule": self.eta_schedule,
            "inline_r": self.inline_r,
            "ancilla_r": self.ancilla_r,
            "angle_policy": self.angle_policy,
            "cutoff": self.cutoff,
            "seed": self.seed,
            "tail_limit": self.tail_limit,
        }
        if self.noise is not None:
            out["noise"] = {"loss_eta": dict(self.noise.loss_eta), "dephasing_eps": dict(self.noise.dephasing_eps)}
        return out


@dataclass(frozen=True)
class RunRecord:
    """One protocol run: outcomes, branch probability, normalized output and metrics.

    ``branch_probability`` is a probability for photon counting and a density
    (per unit x) when a homodyne outcome is involved.
    """

    outcomes: tuple
    branch_probability: float
    output: State
    parity: str
    config: dict
    seed: int | None
    tail_mass: float = 0.0
    flagged: bool = False
    angles: tuple = ()
    etas: tuple = ()
    metrics: CatFit | None = None

    def with_metrics(self, fit: CatFit) -> RunRecord:
        return RunRecord(
            self.outcomes, self.branch_probability, self.output, self.parity, self.config,
            self.seed, self.tail_mass, self.flagged, self.angles, self.etas, fit,
        )

    def to_dict(self) -> dict:
        return {
            "outcomes": list(self.outcomes),
            "branch_probability": self.branch_probability,
            "parity": self.parity,
            "seed": self.seed,
            "tail_mass": self.tail_mass,
            "flagged": self.flagged,
            "angles": list(self.angles),
            "etas": list(self.etas),
            "config": self.config,
            "metrics": None if self.metrics is None else self.metrics.to_dict(),
        }


Predicate = Callable[[RunRecord], bool]


def min_amplitude(alpha_min: float) -> Predicate:
    """Post-selection predicate keeping runs whose fitted cat amplitude reaches ``alpha_min``."""

    def accept(rec: RunRecord) -> bool:
        return rec.metrics is not None and rec.metrics.alpha_fit >= alpha_min

    return accept


# -- transmissivity schedules -------------------------------------------------

def _check_total(k: int, eta_total: float) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < eta_total < 1.0:
        raise ValueError("eta_total must lie in (0, 1) for a schedule with reflected light")


def eta_schedule_constant(k: int, eta_total: float) -> list[float]:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < eta_total <= 1.0:
        raise ValueError("eta_total must lie in (0, 1]")
    return [eta_total ** (1.0 / k)] * k


def eta_schedule_equal_light(k: int, eta_total: float) -> list[float]:
    """eta_j with equal reflected power R_j = (1 - eta_j) prod_{i<j} eta_i on every detector.

    All reflected light sums to 1 - eta_total, so R_j = c = (1 - eta_total)/k and
    the light left before round j is 1 - (j-1)c.
    """
    _check_total(k, eta_total)
    c = (1.0 - eta_total) / k
    return [(1.0 - j * c) / (1.0 - (j - 1) * c) for j in range(1, k + 1)]


def reflected_fractions(etas) -> list[float]:
    out, kept = [], 1.0
    for eta in etas:
        out.append((1.0 - eta) * kept)
        kept *= eta
    return out


# -- squeezing angles ---------------------------------------------------------

def squeeze_angles(policy: str, k: int, rng: np.random.Generator | None = None) -> list[float]:
    """theta_j for j = 1..k. ``auto`` is ``pair`` for k = 2 and ``uniform`` otherwise."""
    if policy == "auto":
        policy = "pair" if k == 2 else "uniform"
    if policy == "uniform":
        return [j * math.pi / k for j in range(1, k + 1)]
    if policy == "pair":
        return [j * math.pi / 4 for j in range(1, k + 1)]
    if policy == "random":
        gen = rng if rng is not None else np.random.default_rng()
        return [float(x) for x in gen.uniform(0.0, math.pi, size=k)]
    raise ValueError(f"unknown angle policy {policy!r}")


def parity_label(bit: int) -> str:
    return "even" if bit % 2 == 0 else "odd"


__all__ = [
    "DensityState",
    "InputSpec",
    "NoiseConfig",
    "ProtocolConfig",
    "RunRecord",
    "eta_schedule_constant",
    "eta_schedule_equal_light",
    "min_amplitude",
    "parity_label",
    "reflected_fractions",
    "squeeze_angles",
]
