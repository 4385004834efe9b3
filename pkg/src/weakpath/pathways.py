"""Virtual-path amplitudes for pre- and post-selected measurement chains.

A scenario prepares the system in ``|a>``, lets it evolve, couples a pointer
to one observable after another, evolves again and finally post-selects.  A
*path* is one eigenvector label per intermediate measurement; its amplitude
is the product of transition matrix elements along the chain.
"""
from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DarkFringe,
    OutcomeIndexOutOfRange,
    ValidationError,
    ZeroDenominator,
)
from .hilbert import (
    EPS_NORM,
    as_hermitian,
    as_state,
    as_unitary,
    complete_basis,
    eigensystem,
)
from .profiles import PointerSpec

DEGENERACY_TOL = 1e-9
DARK_RELATIVE = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """An observable together with its eigenbasis and degenerate groups.

    ``eigenvectors[:, l]`` has eigenvalue ``eigenvalues[l]`` and belongs to the
    group ``membership[l]``, whose value is ``distinct_values[membership[l]]``.
    The eigenvector order is the path-label order.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    distinct_values: np.ndarray
    membership: np.ndarray
    projectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.distinct_values)

    def rank(self, outcome: int) -> int:
        return int(np.sum(self.membership == outcome))

    def index_of(self, value: float, tol: float = 1e-9) -> int:
        """Outcome index of the distinct eigenvalue closest to ``value``."""
        k = int(np.argmin(np.abs(self.distinct_values - value)))
        if abs(self.distinct_values[k] - value) > tol:
            raise OutcomeIndexOutOfRange(f"{value} is not an eigenvalue of this observable")
        return k


def _cluster(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    membership = np.empty(len(values), dtype=int)
    groups: list[list[float]] = []
    prev = None
    for idx in order:
        v = values[idx]
        if prev is None or v - prev > tol:
            groups.append([])
        groups[-1].append(v)
        membership[idx] = len(groups) - 1
        prev = v
    distinct = np.array([np.mean(g) for g in groups])
    return distinct, membership


def _decomposition(matrix, values, vectors, tol) -> SpectralDecomposition:
    distinct, membership = _cluster(np.asarray(values, dtype=float), tol)
    projectors = np.zeros((len(distinct), len(values), len(values)), dtype=complex)
    for l, m in enumerate(membership):
        v = vectors[:, l]
        projectors[m] += np.outer(v, v.conj())
    return SpectralDecomposition(
        matrix=_frozen(matrix),
        eigenvalues=_frozen(np.asarray(values, dtype=float)),
        eigenvectors=_frozen(vectors),
        distinct_values=_frozen(distinct),
        membership=_frozen(membership),
        projectors=_frozen(projectors),
    )


def spectral(observable, degeneracy_tol: float = DEGENERACY_TOL) -> SpectralDecomposition:
    """Group the eigenvectors of a Hermitian matrix by (nearly) equal eigenvalue.

    Eigenvalues are swept in ascending order and a new group starts whenever
    the gap to the previous eigenvalue exceeds ``degeneracy_tol``.
    """
    h = as_hermitian(observable)
    values, vectors = eigensystem(h)
    return _decomposition(h, values, vectors, degeneracy_tol)


def spectral_from_basis(basis: Sequence, eigenvalues: Sequence[float],
                        degeneracy_tol: float = DEGENERACY_TOL) -> SpectralDecomposition:
    """Observable ``sum_l B_l |b_l><b_l|`` with the eigenbasis order kept as given.

    ``basis`` lists the eigenvectors ``|b_l>`` (one per row).
    """
    vecs = np.array(basis, dtype=complex)
    values = np.asarray(eigenvalues, dtype=float)
    if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
        raise ValidationError(f"eigenbasis must be N vectors of length N, got shape {vecs.shape}")
    if values.shape != (vecs.shape[0],):
        raise ValidationError("need exactly one eigenvalue per basis vector")
    gram = vecs.conj() @ vecs.T
    if np.max(np.abs(gram - np.eye(len(values)))) > EPS_NORM:
        raise ValidationError("eigenbasis is not orthonormal")
    vectors = np.ascontiguousarray(vecs.T)
    matrix = (vectors * values) @ vectors.conj().T
    return _decomposition(matrix, values, vectors, degeneracy_tol)


@dataclass(frozen=True, eq=False)
class MeasurementStep:
    """Evolve with ``evolution`` (identity when None), then couple a pointer."""

    observable: SpectralDecomposition
    pointer: PointerSpec = PointerSpec.delta()
    evolution: np.ndarray | None = None
    name: str = ""


@dataclass(frozen=True, eq=False)
class Scenario:
    """Preparation, measurement chain and post-selection of an N-level system.

    ``postselect`` holds orthonormal rows: a single row for a pure final
    state, several rows for a degenerate outcome, or None for no
    post-selection (all of ``final_basis``).  ``observables`` bundles named
    observables that can be swapped into the chain.
    """

    initial: np.ndarray
    steps: tuple[MeasurementStep, ...] = ()
    final_evolution: np.ndarray | None = None
    postselect: np.ndarray | None = None
    final_basis: np.ndarray | None = None
    observables: Mapping[str, SpectralDecomposition] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        init = as_state(self.initial)
        n = init.size
        object.__setattr__(self, "initial", _frozen(init))
        object.__setattr__(self, "steps", tuple(self.steps))
        for i, step in enumerate(self.steps):
            if step.observable.dim != n:
                raise ValidationError(f"step {i}: observable dimension {step.observable.dim} != {n}")
            if step.evolution is not None:
                u = as_unitary(step.evolution)
                if u.shape[0] != n:
                    raise ValidationError(f"step {i}: evolution dimension {u.shape[0]} != {n}")
        if self.final_evolution is not None:
            u = as_unitary(self.final_evolution)
            if u.shape[0] != n:
                raise ValidationError(f"final evolution dimension {u.shape[0]} != {n}")
            object.__setattr__(self, "final_evolution", _frozen(u))
        if self.postselect is not None:
            post = np.atleast_2d(np.array(self.postselect, dtype=complex))
            if post.shape[1] != n:
                raise ValidationError(f"post-selection dimension {post.shape[1]} != {n}")
            if np.max(np.abs(post.conj() @ post.T - np.eye(len(post)))) > EPS_NORM:
                raise ValidationError("post-selection states are not orthonormal")
            object.__setattr__(self, "postselect", _frozen(post))
        fb = np.eye(n, dtype=complex) if self.final_basis is None else np.array(self.final_basis, dtype=complex)
        if fb.shape != (n, n) or np.max(np.abs(fb.conj() @ fb.T - np.eye(n))) > EPS_NORM:
            raise ValidationError("final basis must be N orthonormal rows")
        object.__setattr__(self, "final_basis", _frozen(fb))
        for key, obs in self.observables.items():
            if obs.dim != n:
                raise ValidationError(f"observable {key!r} has dimension {obs.dim} != {n}")
        object.__setattr__(self, "observables", dict(self.observables))

    @property
    def dim(self) -> int:
        return self.initial.size

    @property
    def post_states(self) -> np.ndarray:
        """Rows summed over incoherently at the end of the chain."""
        return self.final_basis if self.postselect is None else self.postselect

    @property
    def pure_postselect(self) -> np.ndarray:
        if self.postselect is None or len(self.postselect) != 1:
            raise ValidationError("this operation needs post-selection on a single pure state")
        return self.postselect[0]

    def evolution(self, i: int) -> np.ndarray:
        u = self.steps[i].evolution
        return np.eye(self.dim, dtype=complex) if u is None else np.asarray(u)

    def final(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex) if self.final_evolution is None else self.final_evolution

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def with_postselect(self, state) -> "Scenario":
        return self.replace(postselect=None if state is None else np.atleast_2d(as_state(state)))

    def with_pointers(self, pointers: Sequence[PointerSpec]) -> "Scenario":
        if len(pointers) != len(self.steps):
            raise ValidationError(f"need {len(self.steps)} pointers, got {len(pointers)}")
        steps = tuple(dataclasses.replace(s, pointer=p) for s, p in zip(self.steps, pointers))
        return self.replace(steps=steps)

    def measuring(self, names: Sequence[str], pointers: Sequence[PointerSpec] | None = None) -> "Scenario":
        """Same preparation and post-selection, measuring bundled observables.

        The first step keeps the evolution of the current first step; later
        steps are instantaneous (no evolution in between), and the evolution
        after the current last step is folded into ``final_evolution``.
        """
        if not names:
            raise ValidationError("need at least one observable name")
        missing = [n for n in names if n not in self.observables]
        if missing:
            raise ValidationError(f"unknown observable(s) {missing}; have {sorted(self.observables)}")
        pointers = list(pointers) if pointers is not None else [PointerSpec.delta()] * len(names)
        before = self.evolution(0) if self.steps else np.eye(self.dim, dtype=complex)
        between = np.eye(self.dim, dtype=complex)
        for i in range(1, len(self.steps)):
            between = self.evolution(i) @ between
        final = self.final() @ between
        steps = [MeasurementStep(self.observables[names[0]], pointers[0], before, names[0])]
        steps += [MeasurementStep(self.observables[n], p, None, n) for n, p in zip(names[1:], pointers[1:])]
        return self.replace(steps=tuple(steps), final_evolution=final)


def postselect_outcome(observable: SpectralDecomposition, outcome: int) -> np.ndarray:
    """Post-selection rows for a (possibly degenerate) outcome of a final observable."""
    if not 0 <= outcome < observable.n_outcomes:
        raise OutcomeIndexOutOfRange(f"outcome {outcome} out of range 0..{observable.n_outcomes - 1}")
    cols = np.flatnonzero(observable.membership == outcome)
    return observable.eigenvectors[:, cols].T.copy()


@dataclass(frozen=True, eq=False)
class PathAmplitudeSet:
    labels: np.ndarray       # (P, K) eigenvector index per step
    amps: np.ndarray         # (P,) complex path amplitudes
    normalized: np.ndarray   # (P,) amplitudes divided by their sum

    @property
    def total(self) -> complex:
        return complex(np.sum(self.amps))


def path_labels(s: Scenario) -> np.ndarray:
    k = len(s.steps)
    if k == 0:
        return np.zeros((1, 0), dtype=int)
    return np.array(list(itertools.product(range(s.dim), repeat=k)), dtype=int)


def amplitude_table(s: Scenario, post_states=None) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes of every path toward every post-selection row.

    Returns ``labels`` of shape (P, K) and ``amps`` of shape (C, P) where C is
    the number of post-selection rows; paths are enumerated in C order of
    their label tuples.
    """
    post = s.post_states if post_states is None else np.atleast_2d(post_states)
    if not s.steps:
        amps = post.conj() @ (s.final() @ s.initial)
        return path_labels(s), amps[:, None]
    first = s.steps[0].observable.eigenvectors
    table = first.conj().T @ (s.evolution(0) @ s.initial)
    prev = first
    for i in range(1, len(s.steps)):
        cur = s.steps[i].observable.eigenvectors
        hop = cur.conj().T @ s.evolution(i) @ prev      # hop[l', l] = <b'_l'|U|b_l>
        table = table[..., None] * hop.T
        prev = cur
    last = post.conj() @ s.final() @ prev               # last[c, l] = <c|U_f|b_l>
    amps = np.stack([(table * row).reshape(-1) for row in last])
    return path_labels(s), amps


def _check_dark(amps: np.ndarray) -> complex:
    total = complex(np.sum(amps))
    scale = float(np.max(np.abs(amps))) if amps.size else 0.0
    if abs(total) <= DARK_RELATIVE * scale or scale == 0.0:
        raise DarkFringe(
            f"path amplitudes sum to {total:.3g} (largest path {scale:.3g}); "
            "normalized amplitudes and weak values are undefined"
        )
    return total


def path_amplitudes(s: Scenario) -> PathAmplitudeSet:
    if not s.steps:
        raise ValidationError("need at least one intermediate measurement")
    c = s.pure_postselect
    labels, amps = amplitude_table(s, c[None, :])
    amps = amps[0]
    total = _check_dark(amps)
    return PathAmplitudeSet(_frozen(labels), _frozen(amps), _frozen(amps / total))


def _check_outcomes(s: Scenario, outcomes: Sequence[int]) -> tuple[int, ...]:
    outcomes = tuple(int(o) for o in outcomes)
    if len(outcomes) != len(s.steps):
        raise OutcomeIndexOutOfRange(f"need {len(s.steps)} outcome indices, got {len(outcomes)}")
    for i, (o, step) in enumerate(zip(outcomes, s.steps)):
        if not 0 <= o < step.observable.n_outcomes:
            raise OutcomeIndexOutOfRange(
                f"step {i}: outcome {o} out of range 0..{step.observable.n_outcomes - 1}")
    return outcomes


def _joint_strong(s: Scenario, outcomes: tuple[int, ...]) -> float:
    psi = s.initial.astype(complex)
    for i, (o, step) in enumerate(zip(outcomes, s.steps)):
        psi = step.observable.projectors[o] @ (s.evolution(i) @ psi)
    psi = s.final() @ psi
    return float(np.sum(np.abs(s.post_states.conj() @ psi) ** 2))


def strong_outcome_probabilities(s: Scenario, conditional: bool = False) -> dict[tuple[int, ...], float]:
    """Probability of every outcome tuple when all steps are accurate."""
    ranges = [range(step.observable.n_outcomes) for step in s.steps]
    probs = {o: _joint_strong(s, o) for o in itertools.product(*ranges)}
    if conditional:
        total = sum(probs.values())
        if total <= 1e-300:
            raise ZeroDenominator("post-selection probability vanishes")
        probs = {o: p / total for o, p in probs.items()}
    return probs


def strong_sequence_probability(s: Scenario, outcomes: Sequence[int], conditional: bool = False) -> float:
    """Probability of a sequence of accurate outcomes and a successful post-selection.

    Each step inserts the projector on its outcome group between evolutions;
    degenerate post-selection rows are summed incoherently.  With
    ``conditional`` the result is normalized over all outcome tuples for the
    same post-selection.
    """
    outcomes = _check_outcomes(s, outcomes)
    p = _joint_strong(s, outcomes)
    if not conditional:
        return p
    total = sum(strong_outcome_probabilities(s).values())
    if total <= 1e-300:
        raise ZeroDenominator("post-selection probability vanishes")
    return p / total


def interference_intensities(s: Scenario, final_states=None) -> tuple[np.ndarray, np.ndarray]:
    """Arrival weights per final state with and without resolving the paths.

    Returns ``(|sum_l A_l|^2, sum_l |A_l|^2)`` for every row of
    ``final_states``; the default is the post-selection rows completed to a
    basis, or ``final_basis`` without post-selection.
    """
    if not s.steps:
        raise ValidationError("interference intensities need an intermediate measurement")
    if final_states is None:
        final_states = s.final_basis if s.postselect is None else complete_basis(s.postselect)
    _, amps = amplitude_table(s, final_states)
    return np.abs(amps.sum(axis=1)) ** 2, np.sum(np.abs(amps) ** 2, axis=1)


def conditional_path_probability(s: Scenario, path_label: int) -> float:
    """Frequency of the path through ``|b_j>`` among accurately resolved arrivals.

    ``|A_j|^2 / (|A_j|^2 + |sum_{l != j} A_l|^2)`` for the single intermediate
    measurement, the binary coarse-graining {j} vs the rest.
    """
    if len(s.steps) != 1:
        raise ValidationError("need exactly one intermediate measurement")
    if not 0 <= path_label < s.dim:
        raise OutcomeIndexOutOfRange(f"path label {path_label} out of range 0..{s.dim - 1}")
    _, amps = amplitude_table(s, s.pure_postselect[None, :])
    amps = amps[0]
    num = abs(amps[path_label]) ** 2
    den = num + abs(amps.sum() - amps[path_label]) ** 2
    if den <= 1e-300:
        raise ZeroDenominator("both routes to the final state vanish")
    return float(num / den)


def postselection_probability(s: Scenario) -> float:
    """Probability of the final post-selection with accurate intermediate steps."""
    return sum(strong_outcome_probabilities(s).values())
