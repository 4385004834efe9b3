"""Pointer readings for pre- and post-selected scenarios.

Every finite-width pointer contributes one reading coordinate.  The amplitude
of a set of readings is the sum over paths of the path amplitude times the
product of pointer wavefunctions, each translated by the eigenvalue the path
carries through that step.  Delta pointers have no coordinate; they split
the paths into incoherent outcome channels instead.

Two independent routes are provided for moments: pairwise overlap integrals
of the pointer profiles (closed form) and quadrature of the gridded density.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    AlphaConstraintViolated,
    ProfileUnsupported,
    ResourceLimit,
    ShiftNotCommensurate,
    ValidationError,
    VanishingOverlap,
    WidthTooSmall,
    ZeroReferenceAlpha,
    ZeroTotalWeight,
)
from .pathways import PathAmplitudeSet, Scenario, _check_dark, amplitude_table
from .profiles import (
    GAUSSIAN,
    RECTANGULAR,
    PointerSpec,
    derivative_overlap,
    first_moment,
    overlap,
    pointer_density_derivative,
    pointer_wavefunction,
)

GRID_SPAN = 6.0
GRID_DIVISIONS = 40
ZERO_WEIGHT = 1e-300


# ---------------------------------------------------------------- grids

def _distinct_gap(values: np.ndarray) -> float:
    d = np.diff(np.unique(np.round(values, 12)))
    d = d[d > 1e-12]
    return float(d.min()) if d.size else math.inf


def commensurate_unit(values: Sequence[float], tol: float = 1e-9, max_denominator: int = 1000) -> float:
    """Largest u such that every difference ``values[i] - min(values)`` is an integer multiple of u.

    Returns ``inf`` when all values coincide.
    """
    v = np.asarray(values, dtype=float)
    diffs = np.unique(np.round(v - v.min(), 12))
    diffs = diffs[diffs > 1e-12]
    if not diffs.size:
        return math.inf
    base = diffs.min()
    for q in range(1, max_denominator + 1):
        u = base / q
        r = diffs / u
        if np.all(np.abs(r - np.round(r)) <= tol * np.maximum(1.0, r)):
            return u
    raise ShiftNotCommensurate(f"eigenvalue differences {diffs} have no common unit within {tol:g}")


def pointer_grid(eigenvalues: Sequence[float], spec: PointerSpec, h: float | None = None,
                 span: float = GRID_SPAN, commensurate: bool = False,
                 max_points: int | None = None) -> np.ndarray:
    """Uniform reading axis covering ``[min B - span*w, max B + span*w]``.

    The default spacing is ``min(w, gap) / 40`` with ``gap`` the smallest
    nonzero eigenvalue difference.  The axis is anchored on ``min B``.  With
    ``commensurate`` every eigenvalue lands exactly on a grid point, and the
    spacing is coarsened (keeping that property) until the axis has at most
    ``max_points`` points.
    """
    if spec.is_delta:
        raise ProfileUnsupported("delta pointers are not gridded")
    vals = np.asarray(eigenvalues, dtype=float)
    lo, hi = float(vals.min()), float(vals.max())
    w = spec.width
    target = h if h is not None else min(w, _distinct_gap(vals)) / GRID_DIVISIONS

    def count(step: float) -> tuple[int, int]:
        n_lo = math.ceil(span * w / step - 1e-9)
        n_hi = math.ceil((hi - lo + span * w) / step - 1e-9)
        return n_lo, n_hi

    if commensurate:
        unit = commensurate_unit(vals)
        if h is not None:
            if math.isfinite(unit):
                r = unit / h
                if abs(r - round(r)) > 1e-9 * max(1.0, r):
                    raise ShiftNotCommensurate(f"spacing {h} does not divide eigenvalue unit {unit}")
            step = h
        elif not math.isfinite(unit):
            step = target
        else:
            k = max(1, math.ceil(unit / target - 1e-9))
            step = unit / k
            while max_points is not None and k > 1 and sum(count(step)) + 1 > max_points:
                k -= 1
                step = unit / k
    else:
        step = target
    n_lo, n_hi = count(step)
    if max_points is not None and n_lo + n_hi + 1 > max_points:
        raise ResourceLimit(f"axis needs {n_lo + n_hi + 1} points, limit is {max_points}")
    return lo + step * np.arange(-n_lo, n_hi + 1)


def _spacing(axis: np.ndarray) -> float:
    return float(axis[1] - axis[0]) if axis.size > 1 else 1.0


def _integrate(values: np.ndarray, axes: Sequence[np.ndarray]) -> np.ndarray:
    out = values
    for axis in reversed(axes):
        out = np.trapezoid(out, dx=_spacing(axis), axis=-1)
    return out


# ---------------------------------------------------------------- distributions

@dataclass(frozen=True, eq=False)
class ReadingDistribution:
    """Density of pointer readings on a grid, split by accurate outcomes.

    ``axes[i]`` is the reading coordinate of scenario step ``steps[i]``.
    ``branches`` maps a tuple of outcome indices, one per entry of
    ``strong_steps``, to the density restricted to that outcome; the empty
    tuple is the only key when no step is a delta pointer.
    """

    axes: tuple[np.ndarray, ...]
    steps: tuple[int, ...]
    strong_steps: tuple[int, ...]
    strong_values: tuple[np.ndarray, ...]
    branches: dict
    normalized: bool

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(_spacing(a) for a in self.axes)

    @property
    def density(self) -> np.ndarray:
        return sum(self.branches.values())

    def total(self) -> float:
        return float(sum(_integrate(b, self.axes) for b in self.branches.values()))

    def normalize(self) -> "ReadingDistribution":
        total = self.total()
        if not total > ZERO_WEIGHT:
            raise ZeroTotalWeight(f"distribution integrates to {total:.3g}")
        branches = {k: v / total for k, v in self.branches.items()}
        return ReadingDistribution(self.axes, self.steps, self.strong_steps, self.strong_values,
                                   branches, True)

    def strong_weights(self) -> dict[tuple[int, ...], float]:
        return {k: float(_integrate(v, self.axes)) for k, v in self.branches.items()}

    def marginal(self, step: int) -> tuple[np.ndarray, np.ndarray]:
        """Axis and marginal density of the reading of scenario step ``step``."""
        i = self.steps.index(step)
        dens = self.density
        others = [j for j in range(self.ndim) if j != i]
        for j in reversed(others):
            dens = np.trapezoid(dens, dx=_spacing(self.axes[j]), axis=j)
        return self.axes[i], dens

    def mean(self, step: int) -> float:
        """First moment of the reading of ``step`` (finite or delta pointer)."""
        total = self.total()
        if not total > ZERO_WEIGHT:
            raise ZeroTotalWeight(f"distribution integrates to {total:.3g}")
        if step in self.strong_steps:
            j = self.strong_steps.index(step)
            vals = self.strong_values[j]
            return sum(vals[k[j]] * w for k, w in self.strong_weights().items()) / total
        axis, dens = self.marginal(step)
        return float(np.trapezoid(axis * dens, dx=_spacing(axis)) / total)


@dataclass(frozen=True, eq=False)
class _Paths:
    amps: np.ndarray     # (C, P)
    shifts: np.ndarray   # (P, K) eigenvalue carried through each step
    groups: np.ndarray   # (P, K) outcome group through each step


def _paths(s: Scenario, post_states=None) -> _Paths:
    labels, amps = amplitude_table(s, post_states)
    k = len(s.steps)
    shifts = np.empty(labels.shape, dtype=float)
    groups = np.empty(labels.shape, dtype=int)
    for j in range(k):
        obs = s.steps[j].observable
        shifts[:, j] = obs.eigenvalues[labels[:, j]]
        groups[:, j] = obs.membership[labels[:, j]]
    return _Paths(amps, shifts, groups)


def finite_steps(s: Scenario) -> tuple[int, ...]:
    return tuple(i for i, st in enumerate(s.steps) if not st.pointer.is_delta)


def strong_steps(s: Scenario) -> tuple[int, ...]:
    return tuple(i for i, st in enumerate(s.steps) if st.pointer.is_delta)


def reading_terms(s: Scenario) -> dict[tuple[float, ...], np.ndarray]:
    """Amplitude multiplying each product of translated pointer states.

    Keys are the eigenvalue shifts of every step (rounded to 12 digits);
    values hold one summed amplitude per post-selection row.
    """
    p = _paths(s)
    terms: dict[tuple[float, ...], np.ndarray] = {}
    for i, row in enumerate(np.round(p.shifts, 12)):
        key = tuple(float(x) + 0.0 for x in row)
        terms[key] = terms.get(key, 0) + p.amps[:, i]
    return terms


def reading_amplitude(s: Scenario, f, strong_outcome: Sequence[int] = ()) -> np.ndarray | complex:
    """Amplitude of readings ``f`` (one coordinate per finite pointer).

    Requires a pure post-selection.  With delta pointers present, the
    amplitude belongs to one accurate outcome tuple ``strong_outcome``.
    """
    c = s.pure_postselect
    p = _paths(s, c[None, :])
    fin, strong = finite_steps(s), strong_steps(s)
    if len(fin) == 1 and not isinstance(f, (list, tuple)):
        f = [f]
    f = [np.asarray(x, dtype=float) for x in f]
    if len(f) != len(fin):
        raise ValidationError(f"need {len(fin)} reading coordinates, got {len(f)}")
    if len(strong_outcome) != len(strong):
        raise ValidationError(f"need {len(strong)} accurate outcome indices, got {len(strong_outcome)}")
    keep = np.ones(p.amps.shape[1], dtype=bool)
    for j, o in zip(strong, strong_outcome):
        keep &= p.groups[:, j] == o
    out = 0j
    for i in np.flatnonzero(keep):
        term = p.amps[0, i]
        for k, j in enumerate(fin):
            term = term * pointer_wavefunction(s.steps[j].pointer, f[k], p.shifts[i, j])
        out = out + term
    return out


def default_axes(s: Scenario, h: float | None = None, span: float = GRID_SPAN) -> list[np.ndarray]:
    return [pointer_grid(s.steps[j].observable.eigenvalues, s.steps[j].pointer, h=h, span=span)
            for j in finite_steps(s)]


def _channel_densities(s: Scenario, axes, split: Sequence[int], backend=None) -> dict:
    """Unnormalized densities keyed by the outcome groups of the ``split`` steps."""
    p = _paths(s)
    fin = finite_steps(s)
    if len(axes) != len(fin):
        raise ValidationError(f"need {len(fin)} axes, got {len(axes)}")
    out = {}
    keys = sorted({tuple(row) for row in p.groups[:, list(split)]}) if split else [()]
    for key in keys:
        mask = np.ones(p.amps.shape[1], dtype=bool)
        for j, o in zip(split, key):
            mask &= p.groups[:, j] == o
        # merge paths sharing the same translations of every finite pointer
        shifts = np.round(p.shifts[mask][:, list(fin)], 12)
        uniq, inv = np.unique(shifts, axis=0, return_inverse=True)
        inv = np.asarray(inv).reshape(-1)
        merged = np.zeros((p.amps.shape[0], len(uniq)), dtype=complex)
        np.add.at(merged.T, inv, p.amps[:, mask].T)
        live = np.any(merged != 0, axis=0)
        if not live.any():
            out[key] = np.zeros(tuple(a.size for a in axes))
            continue
        merged, uniq = merged[:, live], uniq[live]
        tables = [pointer_wavefunction(s.steps[j].pointer, axes[k][None, :], uniq[:, k][:, None])
                  for k, j in enumerate(fin)]
        out[key] = kernels.density(merged, tables, backend=backend)
    return out


def reading_distribution(s: Scenario, axes: Sequence[np.ndarray] | None = None, *,
                         h: float | None = None, span: float = GRID_SPAN,
                         normalize: bool = True, backend: str | None = None) -> ReadingDistribution:
    """Joint density of all finite pointer readings, conditional on post-selection.

    Degenerate post-selection rows (and, without post-selection, the whole
    final basis) are summed incoherently; so are the outcomes of delta
    pointers, which are kept as separate branches.
    """
    axes = tuple(np.asarray(a, dtype=float) for a in (axes if axes is not None else default_axes(s, h, span)))
    strong = strong_steps(s)
    branches = _channel_densities(s, axes, strong, backend)
    dist = ReadingDistribution(
        axes=axes,
        steps=finite_steps(s),
        strong_steps=strong,
        strong_values=tuple(s.steps[j].observable.distinct_values for j in strong),
        branches=branches,
        normalized=False,
    )
    return dist.normalize() if normalize else dist


def branch_densities(s: Scenario, step: int, axes: Sequence[np.ndarray] | None = None, *,
                     h: float | None = None, span: float = GRID_SPAN) -> tuple[tuple[np.ndarray, ...], dict]:
    """Unnormalized densities of the incoherent branches of an accurate ``step``.

    The paths are split by the outcome group they carry through ``step`` and
    the interference between groups is dropped, as it is when that pointer
    is accurate enough to resolve them.  Returns ``(axes, {group: density})``.
    """
    axes = tuple(np.asarray(a, dtype=float) for a in (axes if axes is not None else default_axes(s, h, span)))
    split = tuple(sorted(set(strong_steps(s)) | {step}))
    chans = _channel_densities(s, axes, split)
    pos = split.index(step)
    out: dict[int, np.ndarray] = {}
    for key, dens in chans.items():
        out[key[pos]] = out.get(key[pos], 0) + dens
    return axes, out


# ---------------------------------------------------------------- closed-form moments

def _gram(s: Scenario, step: int | None, kind: str) -> tuple[float, complex]:
    """``(total weight, weighted moment)`` from pairwise pointer overlaps.

    kind is ``"mean"`` (first moment of the reading of ``step``) or
    ``"momentum"`` (integral of psi* d psi / df for ``step``).
    """
    p = _paths(s)
    npath = p.amps.shape[1]
    base = np.ones((npath, npath))
    special = np.ones((npath, npath), dtype=complex)
    for j, st in enumerate(s.steps):
        x = p.shifts[:, j]
        if st.pointer.is_delta:
            same = (p.groups[:, j][:, None] == p.groups[:, j][None, :]).astype(float)
            o = same
            m = x[:, None] * same
        else:
            o = overlap(st.pointer, x[:, None], x[None, :])
            m = first_moment(st.pointer, x[:, None], x[None, :]) if j == step else None
        base = base * o
        if j == step:
            if kind == "mean":
                special = special * m
            else:
                special = special * derivative_overlap(st.pointer, x[:, None], x[None, :])
        else:
            special = special * o
    total = float(np.real(np.einsum("cp,pq,cq->", p.amps.conj(), base, p.amps)))
    moment = complex(np.einsum("cp,pq,cq->", p.amps.conj(), special, p.amps))
    return total, moment


def postselected_weight(s: Scenario) -> float:
    """Probability of the post-selection with the scenario's pointers attached."""
    return _gram(s, None, "mean")[0]


def mean_reading(s: Scenario, step: int = 0, method: str = "analytic", **grid) -> float:
    """Mean reading of the pointer of ``step``, conditional on post-selection.

    ``method="analytic"`` uses closed-form overlap integrals of the pointer
    profiles; ``method="grid"`` integrates the gridded density (keyword
    arguments go to :func:`reading_distribution`).
    """
    if not 0 <= step < len(s.steps):
        raise ValidationError(f"step {step} out of range")
    if method == "grid":
        return reading_distribution(s, **grid).mean(step)
    total, moment = _gram(s, step, "mean")
    if not total > ZERO_WEIGHT:
        raise ZeroTotalWeight(f"post-selected weight is {total:.3g}")
    return float(moment.real / total)


def mean_momentum(s: Scenario, step: int = 0) -> float:
    """Mean final momentum conjugate to the reading of a Gaussian pointer."""
    if s.steps[step].pointer.profile != GAUSSIAN:
        raise ProfileUnsupported("mean momentum needs a Gaussian pointer")
    total, moment = _gram(s, step, "momentum")
    if not total > ZERO_WEIGHT:
        raise ZeroTotalWeight(f"post-selected weight is {total:.3g}")
    return float(moment.imag / total)


# ---------------------------------------------------------------- weak values

def weak_value(paths: PathAmplitudeSet, eigenvalues: Sequence[float]) -> complex:
    """Eigenvalue-weighted sum of the normalized path amplitudes.

    ``eigenvalues`` has one entry per path; for a single measurement step it
    may also be given per eigenvector of that step's observable.
    """
    _check_dark(np.asarray(paths.amps))
    vals = np.asarray(eigenvalues, dtype=float)
    if vals.shape[0] != len(paths.amps):
        if paths.labels.shape[1] == 1:
            vals = vals[paths.labels[:, 0]]
        else:
            raise ValidationError("need one eigenvalue per path")
    return complex(np.sum(vals * paths.normalized))


def observable_weak_value(s: Scenario, observable) -> complex:
    """Weak value of an observable measured at the first step of ``s``.

    ``observable`` is the name of a bundled observable or a decomposition.
    """
    from .pathways import path_amplitudes

    if isinstance(observable, str):
        single = s.measuring([observable])
        obs = s.observables[observable]
    else:
        if len(s.steps) != 1:
            raise ValidationError("pass an observable name for multi-step scenarios")
        obs = observable
        single = s.replace(steps=(dataclasses.replace(s.steps[0], observable=obs),))
    return weak_value(path_amplitudes(single), obs.eigenvalues)


@dataclass(frozen=True, eq=False)
class WeakExpansion:
    axis: np.ndarray
    exact: np.ndarray
    w0: np.ndarray
    delta_w: np.ndarray

    @property
    def first_order(self) -> np.ndarray:
        return self.w0 + self.delta_w


def weak_expansion(s: Scenario, step: int = 0, axis: np.ndarray | None = None, *,
                   h: float | None = None, span: float = GRID_SPAN) -> WeakExpansion:
    """Density of a weak pointer split into its unmeasured part and first-order change.

    With ``S = sum_l A_l`` and ``T = sum_l B_l A_l`` per post-selection row,
    ``W0 = |G|^2 |S|^2`` and ``dW = -d|G|^2/df Re[T S*]``.  Densities are
    unnormalized (they carry the post-selection probability).
    """
    if len(s.steps) != 1 or step != 0:
        raise ValidationError("the weak expansion needs a single-step scenario")
    spec = s.steps[0].pointer
    if spec.profile not in (GAUSSIAN, RECTANGULAR):
        raise ProfileUnsupported("the weak expansion needs a Gaussian or rectangular pointer")
    obs = s.steps[0].observable
    if axis is None:
        axis = pointer_grid(obs.eigenvalues, spec, h=h, span=span)
    axis = np.asarray(axis, dtype=float)
    _, amps = amplitude_table(s)
    g2 = pointer_wavefunction(spec, axis) ** 2
    if spec.profile == GAUSSIAN:
        dg2 = pointer_density_derivative(spec, axis)
    else:
        dg2 = np.gradient(g2, _spacing(axis))
    total = amps.sum(axis=1)
    tilted = amps @ obs.eigenvalues
    w0 = g2 * float(np.sum(np.abs(total) ** 2))
    dw = -dg2 * float(np.sum(np.real(tilted * total.conj())))
    tables = [pointer_wavefunction(spec, axis[None, :], obs.eigenvalues[:, None])]
    exact = kernels.density(amps, tables)
    return WeakExpansion(axis, exact, w0, dw)


# ---------------------------------------------------------------- rectangular mixture

@dataclass(frozen=True)
class MixtureFit:
    beta: float               # least-squares weight of the no-interference pattern
    residual: float           # norm of W - (beta W_noint + (1 - beta) W_int)
    overlap_fraction: float   # |B2 - B1| / width
    beta_quoted: float        # 2 |B2 - B1| / width
    weights: np.ndarray       # exact W_n
    interference: np.ndarray
    no_interference: np.ndarray


def _rect_probability(amps: np.ndarray, shifts: np.ndarray, width: float) -> float:
    """Exact integral of |sum_l a_l G(f - B_l)|^2 for a rectangular G.

    The integrand is piecewise constant between window edges, so evaluating
    it at each segment midpoint is exact.
    """
    edges = np.unique(np.concatenate([shifts - width / 2, shifts + width / 2]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    inside = np.abs(mids[None, :] - shifts[:, None]) < width / 2
    psi = (amps[:, None] * inside).sum(axis=0) / math.sqrt(width)
    return float(np.sum(np.abs(psi) ** 2 * np.diff(edges)))


def rectangular_mixture_weight(s: Scenario, final_states=None) -> MixtureFit:
    """Fit exact rectangular-pointer arrival weights as a mix of the two limits.

    Computes ``W_n`` for each final state and the least-squares ``beta`` in
    ``W_n = beta W_n(no interference) + (1 - beta) W_n(interference)``.
    """
    from .hilbert import complete_basis
    from .pathways import interference_intensities

    if s.dim != 2 or len(s.steps) != 1:
        raise ValidationError("the mixture fit needs a two-level system with one measurement")
    spec = s.steps[0].pointer
    if spec.profile != RECTANGULAR:
        raise ProfileUnsupported("the mixture fit needs a rectangular pointer")
    vals = s.steps[0].observable.eigenvalues
    sep = abs(vals[1] - vals[0])
    if spec.width <= sep:
        raise WidthTooSmall(f"width {spec.width} does not exceed the eigenvalue separation {sep}")
    if final_states is None:
        final_states = s.final_basis if s.postselect is None else complete_basis(s.postselect)
    _, amps = amplitude_table(s, final_states)
    weights = np.array([_rect_probability(a, vals, spec.width) for a in amps])
    w_int, w_no = interference_intensities(s, final_states)
    d = w_no - w_int
    denom = float(np.dot(d, d))
    beta = float(np.dot(weights - w_int, d) / denom) if denom > 0 else math.nan
    fit = w_int + (0.0 if math.isnan(beta) else beta) * d
    return MixtureFit(
        beta=beta,
        residual=float(np.linalg.norm(weights - fit)),
        overlap_fraction=sep / spec.width,
        beta_quoted=2 * sep / spec.width,
        weights=weights,
        interference=w_int,
        no_interference=w_no,
    )


# ---------------------------------------------------------------- post-selection design

def minimal_alpha(eigenvalues: Sequence[float], target: complex) -> np.ndarray:
    """Smallest-norm normalized amplitudes with unit sum and weak value ``target``."""
    vals = np.asarray(eigenvalues, dtype=float)
    a = np.vstack([np.ones_like(vals), vals]).astype(complex)
    y = np.array([1.0, target], dtype=complex)
    alpha, *_ = np.linalg.lstsq(a, y, rcond=None)
    if np.max(np.abs(a @ alpha - y)) > 1e-9 * max(1.0, abs(target)):
        raise AlphaConstraintViolated(f"no amplitudes reach weak value {target} with eigenvalues {vals}")
    return alpha


def design_postselection(s: Scenario, target: complex, alpha: Sequence[complex] | None = None,
                         eigenvalues: Sequence[float] | None = None, reference: int | None = None,
                         tol: float = 1e-9) -> np.ndarray:
    """Final state for which the first step's observable has weak value ``target``.

    ``alpha`` are the desired normalized path amplitudes (unit sum, weighted
    sum equal to ``target``); the smallest-norm choice is used when omitted.
    The state at the measurement time has components
    ``alpha_l* / <b_l|U|a>*`` in the eigenbasis, normalized, and is then
    propagated by the evolution after the measurement.
    """
    if len(s.steps) != 1:
        raise ValidationError("post-selection design needs exactly one measurement step")
    obs = s.steps[0].observable
    vals = obs.eigenvalues if eigenvalues is None else np.asarray(eigenvalues, dtype=float)
    alpha = minimal_alpha(vals, target) if alpha is None else np.asarray(alpha, dtype=complex)
    if alpha.shape != (s.dim,):
        raise AlphaConstraintViolated(f"need {s.dim} amplitudes, got shape {alpha.shape}")
    scale = max(1.0, float(np.sum(np.abs(alpha))), abs(target))
    if abs(alpha.sum() - 1) > tol * scale:
        raise AlphaConstraintViolated(f"amplitudes sum to {alpha.sum():.12g}, not 1")
    if abs(np.dot(vals, alpha) - target) > tol * scale * max(1.0, float(np.max(np.abs(vals)))):
        raise AlphaConstraintViolated(f"amplitudes give weak value {np.dot(vals, alpha):.12g}, not {target}")
    if reference is not None and alpha[reference] == 0:
        raise ZeroReferenceAlpha(f"alpha[{reference}] is zero")
    overlaps = obs.eigenvectors.conj().T @ (s.evolution(0) @ s.initial)
    small = np.abs(overlaps) <= 1e-12
    if np.any(small & (alpha != 0)):
        raise VanishingOverlap(f"<b_l|a(t1)> vanishes for l in {np.flatnonzero(small).tolist()}")
    comps = np.zeros(s.dim, dtype=complex)
    live = ~small
    comps[live] = np.conj(alpha[live]) / np.conj(overlaps[live])
    comps /= np.linalg.norm(comps)
    return s.final() @ (obs.eigenvectors @ comps)


def alpha_for_target(eigenvalues: Sequence[float], target: complex, rng: np.random.Generator,
                     spread: float = 1.0) -> np.ndarray:
    """Random normalized amplitudes reaching ``target``; free entries are drawn from ``rng``."""
    vals = np.asarray(eigenvalues, dtype=float)
    n = vals.size
    order = np.argsort(vals)
    i, j = int(order[0]), int(order[-1])
    if vals[j] - vals[i] <= 1e-12:
        raise AlphaConstraintViolated("eigenvalues coincide; weak value is fixed")
    alpha = np.zeros(n, dtype=complex)
    free = [k for k in range(n) if k not in (i, j)]
    alpha[free] = spread * (rng.normal(size=len(free)) + 1j * rng.normal(size=len(free)))
    rest_sum = 1 - alpha[free].sum()
    rest_val = target - np.dot(vals[free], alpha[free])
    # alpha_i + alpha_j = rest_sum,  B_i alpha_i + B_j alpha_j = rest_val
    alpha[j] = (rest_val - vals[i] * rest_sum) / (vals[j] - vals[i])
    alpha[i] = rest_sum - alpha[j]
    return alpha


__all__ = [
    "GRID_SPAN", "MixtureFit", "ReadingDistribution", "WeakExpansion",
    "alpha_for_target", "branch_densities", "commensurate_unit", "default_axes",
    "design_postselection", "finite_steps", "mean_momentum", "mean_reading",
    "minimal_alpha", "observable_weak_value", "pointer_grid", "postselected_weight",
    "reading_amplitude", "reading_distribution", "reading_terms", "rectangular_mixture_weight",
    "strong_steps", "weak_expansion", "weak_value",
]
