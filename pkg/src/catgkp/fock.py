"""Truncated Fock-space states, operators and contractions.

Multi-mode amplitudes are stored row-major: mode 0 is the slowest index, so a
two-mode amplitude ``psi[i * cutoff + j]`` belongs to ``|i>_0 |j>_1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp

TAIL_FLAG = 1e-6


class CutoffExceeded(ValueError):
    """Raised when a state does not fit in the requested Fock cutoff."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector over ``cutoff**modes`` Fock levels.

    States are kept unnormalized through measurement cascades; call
    :meth:`normalize` explicitly.
    """

    amplitudes: np.ndarray
    modes: int
    cutoff: int

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if self.modes < 0 or self.cutoff < 1:
            raise ValueError("modes must be >= 0 and cutoff >= 1")
        if amps.size != self.cutoff**self.modes:
            raise ValueError(
                f"expected {self.cutoff ** self.modes} amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq))

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff,) * self.modes)

    def normalize(self) -> PureState:
        nrm = self.norm
        if nrm == 0.0:
            raise ZeroDivisionError("cannot normalize a zero state")
        return PureState(self.amplitudes / nrm, self.modes, self.cutoff)

    def to_density(self) -> DensityState:
        return DensityState(np.outer(self.amplitudes, self.amplitudes.conj()), self.modes, self.cutoff)

    def populations(self, mode: int = 0) -> np.ndarray:
        """Photon-number distribution of one mode (unnormalized)."""
        t = np.abs(self.tensor) ** 2
        others = tuple(i for i in range(self.modes) if i != mode)
        return t.sum(axis=others) if others else t

    def tail_mass(self) -> float:
        """Largest top-level population over all modes, relative to the norm."""
        if self.modes == 0:
            return 0.0
        total = self.norm_sq or 1.0
        return max(float(self.populations(m)[-1]) for m in range(self.modes)) / total

    def parity_populations(self) -> tuple[float, float]:
        """(even, odd) total photon-number populations."""
        idx = np.indices((self.cutoff,) * self.modes).sum(axis=0).ravel()
        p = np.abs(self.amplitudes) ** 2
        return float(p[idx % 2 == 0].sum()), float(p[idx % 2 == 1].sum())


@dataclass(frozen=True)
class DensityState:
    """Density matrix over ``cutoff**modes`` Fock levels (row-major modes)."""

    matrix: np.ndarray
    modes: int
    cutoff: int

    def __post_init__(self):
        dim = self.cutoff**self.modes
        mat = _frozen(np.asarray(self.matrix).reshape(dim, dim))
        object.__setattr__(self, "matrix", mat)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def norm_sq(self) -> float:
        return self.trace

    @property
    def tensor(self) -> np.ndarray:
        return self.matrix.reshape((self.cutoff,) * (2 * self.modes))

    def normalize(self) -> DensityState:
        tr = self.trace
        if tr == 0.0:
            raise ZeroDivisionError("cannot normalize a zero density matrix")
        return DensityState(self.matrix / tr, self.modes, self.cutoff)

    def to_density(self) -> DensityState:
        return self

    def populations(self, mode: int = 0) -> np.ndarray:
        return np.real(np.diag(partial_trace(self, [mode]).matrix))

    def tail_mass(self) -> float:
        if self.modes == 0:
            return 0.0
        total = self.trace or 1.0
        return max(float(self.populations(m)[-1]) for m in range(self.modes)) / total

    def parity_populations(self) -> tuple[float, float]:
        idx = np.indices((self.cutoff,) * self.modes).sum(axis=0).ravel()
        p = np.real(np.diag(self.matrix))
        return float(p[idx % 2 == 0].sum()), float(p[idx % 2 == 1].sum())

    def is_physical(self, tol: float = 1e-9) -> bool:
        herm = np.max(np.abs(self.matrix - self.matrix.conj().T)) < 1e-10
        return bool(herm and np.linalg.eigvalsh(self.matrix).min() > -tol)


State = Union[PureState, DensityState]


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Operator on one or two modes.

    ``matrix`` is a dense array or a scipy sparse matrix of dimension
    ``cutoff**arity``. Operators built from a Kronecker eigen-factorisation
    (the SUM gate) carry ``factors`` and are applied without materialising the
    ``cutoff**2``-square matrix; :attr:`dense` builds it on demand.
    """

    matrix: object
    arity: int
    cutoff: int
    label: str = ""
    factors: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.cutoff**self.arity

    @property
    def dense(self) -> np.ndarray:
        if self.matrix is None:
            (v, w, phase) = self.factors
            vw = np.kron(v, w)
            mat = (vw * phase.ravel()) @ vw.conj().T
            object.__setattr__(self, "matrix", _frozen(mat))
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def adjoint(self) -> ModeOperator:
        if self.factors is not None:
            v, w, phase = self.factors
            return ModeOperator(None, self.arity, self.cutoff, self.label + "^dag", (v, w, phase.conj()))
        mat = self.matrix.conj().T
        if sp.issparse(mat):
            mat = mat.tocsr()
        else:
            mat = _frozen(mat)
        return ModeOperator(mat, self.arity, self.cutoff, self.label + "^dag")

    def __matmul__(self, other: ModeOperator) -> ModeOperator:
        if self.arity != other.arity or self.cutoff != other.cutoff:
            raise ValueError("operator shapes differ")
        return ModeOperator(_frozen(self.dense @ other.dense), self.arity, self.cutoff)

    def apply_to_axes(self, tensor: np.ndarray, axes: Sequence[int], conjugate: bool = False) -> np.ndarray:
        """Contract the operator with ``tensor`` along ``axes`` (each of size cutoff)."""
        axes = list(axes)
        if len(axes) != self.arity:
            raise ValueError(f"operator acts on {self.arity} mode(s), got {len(axes)} axes")
        d = self.cutoff
        moved = np.moveaxis(tensor, axes, list(range(self.arity)))
        rest = moved.shape[self.arity :]
        flat = moved.reshape(self.dim, -1)
        if self.factors is not None:
            out = _apply_factored(self.factors, flat, d, conjugate)
        else:
            mat = self.matrix.conj() if conjugate else self.matrix
            out = mat @ flat
        out = np.asarray(out).reshape((d,) * self.arity + rest)
        return np.moveaxis(out, list(range(self.arity)), axes)


def _apply_factored(factors, flat: np.ndarray, d: int, conjugate: bool) -> np.ndarray:
    v, w, phase = factors
    if conjugate:
        v, w, phase = v.conj(), w.conj(), phase.conj()
    t = flat.reshape(d, d, -1)
    t = np.einsum("ai,bj,abk->ijk", v.conj(), w.conj(), t, optimize=True)
    t = t * phase[:, :, None]
    t = np.einsum("ia,jb,abk->ijk", v, w, t, optimize=True)
    return t.reshape(d * d, -1)


def make_fock(n: int, cutoff: int) -> PureState:
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    if n >= cutoff:
        raise CutoffExceeded(f"Fock level {n} needs cutoff > {n}, got {cutoff}")
    amps = np.zeros(cutoff, dtype=np.complex128)
    amps[n] = 1.0
    return PureState(amps, 1, cutoff)


def vacuum(cutoff: int, modes: int = 1) -> PureState:
    amps = np.zeros(cutoff**modes, dtype=np.complex128)
    amps[0] = 1.0
    return PureState(amps, modes, cutoff)


def tensor(a: State, b: State) -> State:
    """Kronecker product; modes of ``a`` come first."""
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.modes + b.modes, a.cutoff)
    ra, rb = a.to_density(), b.to_density()
    return DensityState(np.kron(ra.matrix, rb.matrix), a.modes + b.modes, a.cutoff)


def _check_modes(state: State, modes: Sequence[int]) -> None:
    for m in modes:
        if not 0 <= m < state.modes:
            raise IndexError(f"mode {m} out of range for a {state.modes}-mode state")
    if len(set(modes)) != len(modes):
        raise ValueError("target modes must be distinct")


def apply(op: ModeOperator, state: State, modes: int | Sequence[int] = 0) -> State:
    """Apply ``op`` to the given mode(s); density matrices are conjugated."""
    modes = [modes] if isinstance(modes, (int, np.integer)) else list(modes)
    if op.arity != len(modes):
        raise ValueError(f"operator arity {op.arity} does not match {len(modes)} target mode(s)")
    if op.cutoff != state.cutoff:
        raise ValueError(f"cutoff mismatch: operator {op.cutoff}, state {state.cutoff}")
    _check_modes(state, modes)
    if isinstance(state, PureState):
        out = op.apply_to_axes(state.tensor, modes)
        return PureState(out.ravel(), state.modes, state.cutoff)
    t = op.apply_to_axes(state.tensor, modes)
    t = op.apply_to_axes(t, [m + state.modes for m in modes], conjugate=True)
    return DensityState(t.reshape(state.matrix.shape), state.modes, state.cutoff)


def project_mode(state: State, mode: int, bra: np.ndarray) -> tuple[State, float]:
    """Contract ``mode`` with the row vector ``bra`` (entries ``<b|n>``).

    Returns the unnormalized residual state on the remaining modes together
    with its weight (squared norm, or trace for density matrices).
    """
    _check_modes(state, [mode])
    bra = np.asarray(bra, dtype=np.complex128)
    if bra.shape != (state.cutoff,):
        raise ValueError(f"bra must have length {state.cutoff}")
    if isinstance(state, PureState):
        t = np.tensordot(state.tensor, bra, axes=([mode], [0]))
        out = PureState(np.ravel(t), state.modes - 1, state.cutoff)
        return out, out.norm_sq
    t = np.tensordot(state.tensor, bra, axes=([mode], [0]))
    t = np.tensordot(t, bra.conj(), axes=([state.modes - 1 + mode], [0]))
    dim = state.cutoff ** (state.modes - 1)
    out = DensityState(t.reshape(dim, dim), state.modes - 1, state.cutoff)
    return out, out.trace


def project_fock(state: State, mode: int, m: int) -> tuple[State, float]:
    """Project ``mode`` onto ``<m|`` without building a bra vector."""
    _check_modes(state, [mode])
    if isinstance(state, PureState):
        t = np.take(state.tensor, m, axis=mode)
        out = PureState(np.ravel(t), state.modes - 1, state.cutoff)
        return out, out.norm_sq
    t = np.take(state.tensor, m, axis=mode)
    t = np.take(t, m, axis=state.modes - 1 + mode)
    dim = state.cutoff ** (state.modes - 1)
    out = DensityState(t.reshape(dim, dim), state.modes - 1, state.cutoff)
    return out, out.trace


def partial_trace(rho: State, keep: Sequence[int]) -> DensityState:
    rho = rho.to_density()
    keep = sorted(keep)
    _check_modes(rho, keep)
    m = rho.modes
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = list(letters[:m])
    bra = [letters[m + i] if i in keep else ket[i] for i in range(m)]
    out = "".join(ket[i] for i in keep) + "".join(bra[i] for i in keep)
    t = np.einsum("".join(ket) + "".join(bra) + "->" + out, rho.tensor)
    dim = rho.cutoff ** len(keep)
    return DensityState(t.reshape(dim, dim), len(keep), rho.cutoff)


def expectation(op: np.ndarray, state: State) -> complex:
    """<op> for a single-mode dense operator (unnormalized states are normalized)."""
    if isinstance(state, PureState):
        v = state.amplitudes
        return complex(np.vdot(v, op @ v) / state.norm_sq)
    return complex(np.trace(op @ state.matrix) / state.trace)


# -- state files -------------------------------------------------------------

def save_state(state: State, path: str | Path) -> None:
    """Write ``modes=.. cutoff=.. kind=..`` then ``index re im`` lines."""
    kind = "pure" if isinstance(state, PureState) else "density"
    data = state.amplitudes if kind == "pure" else state.matrix.ravel()
    lines = [f"modes={state.modes} cutoff={state.cutoff} kind={kind}"]
    lines.extend(f"{i} {z.real:.17e} {z.imag:.17e}" for i, z in enumerate(data))
    Path(path).write_text("\n".join(lines) + "\n")


def load_state(path: str | Path) -> State:
    text = Path(path).read_text().splitlines()
    header = dict(tok.split("=", 1) for tok in text[0].split())
    try:
        modes, cutoff, kind = int(header["modes"]), int(header["cutoff"]), header["kind"]
    except KeyError as exc:
        raise ValueError(f"state file header missing {exc}") from None
    dim = cutoff**modes
    size = dim if kind == "pure" else dim * dim
    data = np.zeros(size, dtype=np.complex128)
    for line in text[1:]:
        if not line.strip():
            continue
        idx, re, im = line.split()
        data[int(idx)] = complex(float(re), float(im))
    if kind == "pure":
        return PureState(data, modes, cutoff)
    if kind == "density":
        return DensityState(data.reshape(dim, dim), modes, cutoff)
    raise ValueError(f"unknown state kind {kind!r}")
