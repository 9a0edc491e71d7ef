"""Experiment files: schema, seeded ensembles, breeding trees and CSV/JSON artifacts.

An experiment file is YAML validated by pydantic with unknown keys rejected.
Per-run seeds are derived, never drawn in sequence::

    seed(master, point, run) = first 8 bytes (little endian) of
        blake2b("catgkp:{master}:{point}:{run}", digest_size=8)

so any subset of runs can be repeated on its own.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .analysis import fit_cat, phase_distribution, wigner, write_phase_csv, write_wigner_csv
from .fock import load_state, save_state
from .gaussian import r_from_db
from .protocols import (
    InputSpec,
    NoiseConfig,
    ProtocolConfig,
    breed_tree,
    correct_to_grid_fitted,
    expected_delta,
    run,
)

SCHEMA_VERSION = 1
SEED_DOMAIN = "catgkp"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InputModel(_Strict):
    kind: Literal["fock", "squeezed_fock", "random_even"] = "fock"
    n: int = Field(ge=0)
    r: float = 0.0
    db: Optional[float] = None
    base: float = 1.2

    def spec(self, seed: int | None) -> InputSpec:
        r = r_from_db(self.db) if self.db is not None else self.r
        return InputSpec(self.kind, self.n, r, self.base, seed if self.kind == "random_even" else None)


class NoiseModel(_Strict):
    loss_eta: dict[Literal["a", "b", "c"], float] = Field(default_factory=dict)
    dephasing_eps: dict[Literal["a", "b", "c"], float] = Field(default_factory=dict)

    @field_validator("loss_eta")
    @classmethod
    def _loss_range(cls, v):
        for loc, eta in v.items():
            if not 0.0 <= eta <= 1.0:
                raise ValueError(f"loss_eta.{loc} must lie in [0, 1]")
        return v

    @field_validator("dephasing_eps")
    @classmethod
    def _deph_range(cls, v):
        for loc, eps in v.items():
            if eps < 0:
                raise ValueError(f"dephasing_eps.{loc} must be nonnegative")
        return v


class ProtocolModel(_Strict):
    scheme: Literal["homodyne", "scheme1", "scheme2"]
    input: InputModel
    k: int = Field(default=1, ge=1)
    eta_total: Union[float, list[float]]
    eta_schedule: Literal["constant", "equal_light"] = "constant"
    inline_r: float = 0.0
    inline_db: Optional[float] = None
    ancilla_r: float = 0.0
    ancilla_db: Optional[float] = None
    angle_policy: Literal["auto", "uniform", "pair", "random"] = "auto"
    homodyne_x: Optional[float] = None
    cutoff: int = Field(ge=2)
    tail_limit: float = Field(default=1e-4, gt=0)
    noise: Optional[NoiseModel] = None

    @field_validator("eta_total")
    @classmethod
    def _eta_range(cls, v):
        for eta in v if isinstance(v, list) else [v]:
            if not 0.0 < eta <= 1.0:
                raise ValueError("eta_total values must lie in (0, 1]")
        return v

    def etas(self) -> list[float]:
        return list(self.eta_total) if isinstance(self.eta_total, list) else [self.eta_total]

    def config(self, eta_total: float, seed: int) -> ProtocolConfig:
        inline = r_from_db(self.inline_db) if self.inline_db is not None else self.inline_r
        anc = r_from_db(self.ancilla_db) if self.ancilla_db is not None else self.ancilla_r
        noise = None
        if self.noise is not None:
            noise = NoiseConfig(dict(self.noise.loss_eta), dict(self.noise.dephasing_eps))
        return ProtocolConfig(
            scheme=self.scheme,
            input=self.input.spec(seed),
            k=self.k,
            eta_total=eta_total,
            eta_schedule=self.eta_schedule,
            inline_r=inline,
            ancilla_r=anc,
            angle_policy=self.angle_policy,
            cutoff=self.cutoff,
            seed=seed,
            noise=noise,
            tail_limit=self.tail_limit,
        )


class EnsembleModel(_Strict):
    runs: int = Field(default=1, ge=1)
    master_seed: int = 0


class WignerOut(_Strict):
    enabled: bool = False
    extent: float = Field(default=6.0, gt=0)
    step: float = Field(default=0.05, gt=0)


class PhaseOut(_Strict):
    enabled: bool = False
    resolution: int = Field(default=512, ge=8)


class OutputsModel(_Strict):
    wigner: WignerOut = Field(default_factory=WignerOut)
    phase: PhaseOut = Field(default_factory=PhaseOut)
    fit: bool = True
    save_states: bool = False


class BreedingModel(_Strict):
    depth: int = Field(default=1, ge=0, le=3)
    pairing: Literal["random", "ordered"] = "random"
    gate: Literal["sum_gate", "beamsplitter"] = "sum_gate"
    x: Optional[float] = 0.0
    correct: bool = True


class ExperimentFile(_Strict):
    schema_version: Literal[1] = 1
    protocol: ProtocolModel
    ensemble: EnsembleModel = Field(default_factory=EnsembleModel)
    outputs: OutputsModel = Field(default_factory=OutputsModel)
    breeding: Optional[BreedingModel] = None

    @model_validator(mode="after")
    def _homodyne_single_round(self):
        if self.protocol.scheme == "homodyne" and self.protocol.k != 1:
            raise ValueError("protocol.k must be 1 for the homodyne scheme")
        return self


# -- loading ------------------------------------------------------------------

def set_path(data: dict, dotted: str, value) -> None:
    """Assign ``value`` at a dotted key path, creating intermediate tables."""
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        nxt = node.get(key)
        if not isinstance(nxt, dict):
            nxt = {}
            node[key] = nxt
        node = nxt
    node[keys[-1]] = value


def parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ValueError(f"override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    return key.strip(), yaml.safe_load(raw)


def load_experiment(path: str | Path, overrides=()) -> ExperimentFile:
    data = yaml.safe_load(Path(path).read_text()) or {}
    if not isinstance(data, dict):
        raise ValueError("experiment file must be a mapping")
    for item in overrides:
        key, val = parse_override(item) if isinstance(item, str) else item
        set_path(data, key, val)
    return ExperimentFile.model_validate(data)


def derive_seed(master: int, point: int, index: int) -> int:
    digest = hashlib.blake2b(f"{SEED_DOMAIN}:{master}:{point}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


# -- running ------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _one_run(task):
    """Worker: one seeded run plus requested metrics (module level so it pickles)."""
    model, eta_total, seed, fit = task
    cfg = model.config(eta_total, seed)
    kwargs = {}
    if model.scheme == "homodyne":
        kwargs["x"] = model.homodyne_x
    rec = run(cfg, **kwargs)
    if fit:
        rec = rec.with_metrics(fit_cat(rec.output))
    return rec


def _map(tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [_one_run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one_run, tasks))


def default_jobs() -> int:
    return os.cpu_count() or 1


SUMMARY_COLUMNS = (
    "eta_total", "runs", "mean_fidelity", "std_fidelity", "mean_alpha", "std_alpha",
    "mean_delta", "std_delta", "expected_delta", "flagged",
)


def prepare(exp: ExperimentFile, out_dir: str | Path, jobs: int = 1) -> Path:
    """Run the ensemble for every eta_total point; write records, CSVs and ``summary.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    proto = exp.protocol
    fit = exp.outputs.fit
    rows = []
    for point, eta in enumerate(proto.etas()):
        seeds = [derive_seed(exp.ensemble.master_seed, point, i) for i in range(exp.ensemble.runs)]
        # validate the config eagerly so schema-level problems surface before work starts
        proto.config(eta, seeds[0])
        records = _map([(proto, eta, s, fit) for s in seeds], jobs)
        point_dir = out / f"point_{point:02d}"
        point_dir.mkdir(exist_ok=True)
        for i, rec in enumerate(records):
            payload = rec.to_dict()
            if exp.outputs.save_states:
                name = f"run_{i:04d}.state"
                save_state(rec.output, point_dir / name)
                payload["state_file"] = name
            _dump_json(point_dir / f"run_{i:04d}.json", payload)
            if exp.outputs.wigner.enabled:
                grid = wigner(rec.output, extent=exp.outputs.wigner.extent, step=exp.outputs.wigner.step)
                write_wigner_csv(grid, point_dir / f"run_{i:04d}_wigner.csv")
            if exp.outputs.phase.enabled:
                write_phase_csv(phase_distribution(rec.output, exp.outputs.phase.resolution),
                                point_dir / f"run_{i:04d}_phase.csv")
        rows.append(_summary_row(proto, eta, records))
    path = out / "summary.csv"
    lines = [",".join(SUMMARY_COLUMNS)]
    lines.extend(",".join(_fmt(r[c]) for c in SUMMARY_COLUMNS) for r in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def _summary_row(proto: ProtocolModel, eta: float, records) -> dict:
    fits = [r.metrics for r in records if r.metrics is not None]

    def stats(vals):
        vals = np.asarray([v for v in vals if math.isfinite(v)], dtype=float)
        if vals.size == 0:
            return None, None
        return float(vals.mean()), float(vals.std(ddof=1)) if vals.size > 1 else 0.0

    mf, sf = stats([f.fidelity for f in fits])
    ma, sa = stats([f.alpha_fit for f in fits])
    md, sd = stats([f.delta_measured for f in fits])
    n = proto.input.n
    exp_delta = expected_delta(n, eta) if proto.input.kind == "fock" and n > 0 else None
    return {
        "eta_total": eta, "runs": len(records), "mean_fidelity": mf, "std_fidelity": sf,
        "mean_alpha": ma, "std_alpha": sa, "mean_delta": md, "std_delta": sd,
        "expected_delta": exp_delta, "flagged": sum(bool(r.flagged) for r in records),
    }


def breed_experiment(exp: ExperimentFile, out_dir: str | Path, jobs: int = 1, states=None) -> list[list]:
    """Generate (or load) 2**depth states, optionally grid-correct them, breed as a tree.

    Writes ``level_<L>_<i>_wigner.csv`` and ``.state`` files per tree node and
    returns the tree levels (inputs first, then bred RunRecords).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = exp.breeding or BreedingModel()
    proto = exp.protocol
    count = 2**spec.depth
    eta = proto.etas()[0]
    if states is None:
        seeds = [derive_seed(exp.ensemble.master_seed, 0, i) for i in range(count)]
        records = _map([(proto, eta, s, False) for s in seeds], jobs)
        leaves = [r.output for r in records]
        if spec.correct:
            leaves = [correct_to_grid_fitted(s).normalize() for s in leaves]
    else:
        leaves = [load_state(p) if not hasattr(p, "cutoff") else p for p in states]
        if len(leaves) != count:
            raise ValueError(f"depth {spec.depth} needs {count} states, got {len(leaves)}")
    rng = np.random.default_rng(derive_seed(exp.ensemble.master_seed, 1, 0))
    levels = breed_tree(leaves, spec.depth, spec.pairing, spec.gate, spec.x, rng)
    grid_kw = {"extent": exp.outputs.wigner.extent, "step": exp.outputs.wigner.step}
    for lvl, nodes in enumerate(levels):
        for i, node in enumerate(nodes):
            state = node if lvl == 0 else node.output
            stem = f"level_{lvl}_{i}"
            save_state(state, out / f"{stem}.state")
            write_wigner_csv(wigner(state, **grid_kw), out / f"{stem}_wigner.csv")
            if lvl > 0:
                _dump_json(out / f"{stem}.json", node.to_dict())
    return levels


__all__ = [
    "ExperimentFile",
    "SUMMARY_COLUMNS",
    "breed_experiment",
    "default_jobs",
    "derive_seed",
    "load_experiment",
    "parse_override",
    "prepare",
    "set_path",
]
