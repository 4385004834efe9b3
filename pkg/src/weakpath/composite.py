"""Brute-force oracle: the system and its pointers as one tensor-product state.

The composite amplitude array has the system index first and one index per
pointer after it, in step order.  A finite pointer lives on a uniform grid
whose spacing divides every eigenvalue difference, so each coupling is an
exact index translation.  A delta pointer is a register of orthogonal
states, one per distinct eigenvalue.  Nothing here uses path amplitudes; the
results are compared against :mod:`weakpath.pointers` to validate it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotNormalized, ResourceLimit, ShiftNotCommensurate, ShiftOffGrid, ValidationError
from .pathways import Scenario, SpectralDecomposition
from .pointers import GRID_SPAN, ReadingDistribution, pointer_grid
from .profiles import PointerSpec, pointer_wavefunction

MAX_POINTS = 1024
MAX_COMPOSITE_DIM = 2**24


@dataclass(frozen=True, eq=False)
class DiscretizedPointer:
    """Pointer wavefunction sampled on a grid, scaled so that sum |amps|^2 = 1.

    ``origin`` is where the initial wavefunction is centred: coupling an
    eigenvalue B translates it by ``(B - origin) / h`` cells.  Cells above
    ``origin + span * width`` are exact zeros and form the shift margin.
    """

    grid: np.ndarray
    wavefunction: np.ndarray
    origin: float

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def size(self) -> int:
        return self.grid.size

    @classmethod
    def from_spec(cls, spec: PointerSpec, eigenvalues: Sequence[float], h: float | None = None,
                  span: float = GRID_SPAN, max_points: int = MAX_POINTS) -> "DiscretizedPointer":
        grid = pointer_grid(eigenvalues, spec, h=h, span=span, commensurate=True, max_points=max_points)
        origin = float(np.min(eigenvalues))
        step = grid[1] - grid[0]
        amps = pointer_wavefunction(spec, grid - origin).astype(complex) * math.sqrt(step)
        amps[grid - origin > span * spec.width + 0.5 * step] = 0.0
        amps /= np.linalg.norm(amps)
        return cls(grid, amps, origin)


@dataclass(frozen=True, eq=False)
class CompositeState:
    amps: np.ndarray    # (N, d_1, ..., d_K)

    @property
    def factors(self) -> tuple[int, ...]:
        return self.amps.shape

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _shift_axis(block: np.ndarray, k: int, axis: int) -> np.ndarray:
    """Translate ``block`` by ``k`` cells along ``axis``; only exact zeros may fall off."""
    if k == 0:
        return block
    n = block.shape[axis]
    if abs(k) >= n:
        raise ShiftOffGrid(f"shift of {k} cells exceeds an axis of {n} cells")
    lost = np.take(block, range(n - k, n) if k > 0 else range(0, -k), axis=axis)
    if np.any(lost != 0):
        raise ShiftOffGrid(f"shift of {k} cells pushes amplitude off the grid")
    return np.roll(block, k, axis=axis)


def couple(state: CompositeState, observable: SpectralDecomposition, pointer_index: int,
           pointer: DiscretizedPointer | None = None) -> CompositeState:
    """Impulsive von Neumann coupling of ``observable`` to one pointer.

    Each eigencomponent of the system translates the pointer by its
    eigenvalue.  With ``pointer=None`` the pointer is a register and the
    translation is by the outcome-group index.
    """
    axis = 1 + pointer_index
    vecs = np.asarray(observable.eigenvectors)
    comps = np.tensordot(vecs.conj().T, state.amps, axes=(1, 0))
    out = np.empty_like(comps)
    for l in range(vecs.shape[1]):
        if pointer is None:
            k = int(observable.membership[l])
        else:
            r = (observable.eigenvalues[l] - pointer.origin) / pointer.h
            k = int(round(r))
            if abs(r - k) > 1e-9 * max(1.0, abs(r)):
                raise ShiftNotCommensurate(
                    f"eigenvalue {observable.eigenvalues[l]} is not on the pointer grid (h={pointer.h})")
        out[l] = _shift_axis(comps[l], k, axis - 1)
    return CompositeState(np.tensordot(vecs, out, axes=(1, 0)))


def _apply_system(state: CompositeState, u: np.ndarray) -> CompositeState:
    return CompositeState(np.tensordot(u, state.amps, axes=(1, 0)))


def default_pointers(s: Scenario, h: float | None = None, span: float = GRID_SPAN,
                     max_points: int = MAX_POINTS) -> list[DiscretizedPointer | None]:
    return [None if st.pointer.is_delta else
            DiscretizedPointer.from_spec(st.pointer, st.observable.eigenvalues, h=h, span=span,
                                         max_points=max_points)
            for st in s.steps]


def evolve(s: Scenario, pointers: Sequence[DiscretizedPointer | None] | None = None,
           max_dim: int = MAX_COMPOSITE_DIM) -> tuple[CompositeState, list[float]]:
    """Run the composite from preparation to just before post-selection.

    Returns the final state and the norm after every evolution and coupling.
    """
    pointers = default_pointers(s) if pointers is None else list(pointers)
    if len(pointers) != len(s.steps):
        raise ValidationError(f"need {len(s.steps)} pointers, got {len(pointers)}")
    dims = [st.observable.n_outcomes if p is None else p.size for st, p in zip(s.steps, pointers)]
    total = s.dim * math.prod(dims)
    if total > max_dim:
        raise ResourceLimit(f"composite dimension {total} exceeds {max_dim}")
    amps = np.asarray(s.initial, dtype=complex)
    for st, p, d in zip(s.steps, pointers, dims):
        if p is None:
            reg = np.zeros(d, dtype=complex)
            reg[0] = 1.0
        else:
            reg = p.wavefunction
        amps = np.multiply.outer(amps, reg)
    state = CompositeState(amps)
    norms = [state.norm()]
    for i, (st, p) in enumerate(zip(s.steps, pointers)):
        state = _apply_system(state, s.evolution(i))
        norms.append(state.norm())
        state = couple(state, st.observable, i, p)
        norms.append(state.norm())
    state = _apply_system(state, s.final())
    norms.append(state.norm())
    return state, norms


def run_composite(s: Scenario, pointers: Sequence[DiscretizedPointer | None] | None = None, *,
                  normalize: bool = True, max_dim: int = MAX_COMPOSITE_DIM) -> ReadingDistribution:
    """Joint pointer-reading distribution from the full composite evolution.

    The system index is projected on the post-selection rows (all of the
    final basis when there is no post-selection) and the probabilities are
    summed over them.
    """
    pointers = default_pointers(s) if pointers is None else list(pointers)
    state, _ = evolve(s, pointers, max_dim)
    proj = np.tensordot(s.post_states.conj(), state.amps, axes=(1, 0))
    prob = np.sum(np.abs(proj) ** 2, axis=0)
    fin = [i for i, p in enumerate(pointers) if p is not None]
    strong = [i for i, p in enumerate(pointers) if p is None]
    prob = np.transpose(prob, fin + strong)
    cell = math.prod(pointers[i].h for i in fin)
    branches = {}
    for key in itertools.product(*(range(s.steps[j].observable.n_outcomes) for j in strong)):
        branches[key] = prob[(Ellipsis,) + key] / cell if key else prob / cell
    dist = ReadingDistribution(
        axes=tuple(pointers[i].grid for i in fin),
        steps=tuple(fin),
        strong_steps=tuple(strong),
        strong_values=tuple(s.steps[j].observable.distinct_values for j in strong),
        branches=branches,
        normalized=False,
    )
    return dist.normalize() if normalize else dist


def max_deviation(a: ReadingDistribution, b: ReadingDistribution) -> float:
    """Largest pointwise difference over all branches, relative to the largest density."""
    if a.branches.keys() != b.branches.keys():
        raise ValidationError("distributions have different accurate-outcome branches")
    scale = max(float(np.max(np.abs(v))) for v in a.branches.values())
    dev = max(float(np.max(np.abs(a.branches[k] - b.branches[k]))) for k in a.branches)
    return dev / scale if scale > 0 else dev


# ---------------------------------------------------------------- Monte Carlo trials

@dataclass(frozen=True, eq=False)
class TrialSample:
    """Simulated pointer records, one row per trial.

    ``readings[t, i]`` is the reading of scenario step ``steps[i]`` in trial
    ``t``: a grid coordinate for finite pointers, an eigenvalue for delta
    pointers.  All trials are post-selected by construction.
    """

    readings: np.ndarray
    postselected: np.ndarray
    steps: tuple[int, ...]
    means: np.ndarray
    std_errors: np.ndarray


def sample_trials(dist: ReadingDistribution, trials: int, seed: int) -> TrialSample:
    """Draw ``trials`` records by inverse-CDF sampling on the grid.

    Uniform variates come from numpy's counter-based Philox generator keyed
    by ``seed``, so a given seed reproduces the same records bit for bit.
    """
    if trials < 1:
        raise ValidationError("need at least one trial")
    if not dist.normalized or abs(dist.total() - 1.0) > 1e-6:
        raise NotNormalized("sampling needs a normalized distribution")
    cell = math.prod(dist.spacing)
    keys = sorted(dist.branches)
    masses = np.concatenate([np.clip(dist.branches[k], 0, None).reshape(-1) * cell for k in keys])
    cdf = np.cumsum(masses)
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = rng.random(trials) * cdf[-1]
    flat = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    per_branch = max(1, math.prod(a.size for a in dist.axes))
    branch_idx, cell_idx = np.divmod(flat, per_branch)
    steps = tuple(sorted(dist.steps + dist.strong_steps))
    readings = np.empty((trials, len(steps)))
    if dist.axes:
        grid_idx = np.unravel_index(cell_idx, tuple(a.size for a in dist.axes))
        for axis, step, idx in zip(dist.axes, dist.steps, grid_idx):
            readings[:, steps.index(step)] = axis[idx]
    key_arr = np.array(keys, dtype=int).reshape(len(keys), len(dist.strong_steps))
    for j, step in enumerate(dist.strong_steps):
        readings[:, steps.index(step)] = dist.strong_values[j][key_arr[branch_idx, j]]
    means = readings.mean(axis=0)
    errs = readings.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(len(steps))
    return TrialSample(readings, np.ones(trials, dtype=bool), steps, means, errs)
