"""Pointer profiles: initial pointer wavefunctions and their overlap integrals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DeltaNotEvaluable, ProfileUnsupported

GAUSSIAN = "gaussian"
RECTANGULAR = "rectangular"
DELTA = "delta"
PROFILES = (GAUSSIAN, RECTANGULAR, DELTA)


@dataclass(frozen=True)
class PointerSpec:
    """Initial state of a von Neumann pointer.

    ``gaussian``:    G(f) = (pi w^2 / 2)^(-1/4) exp(-f^2 / w^2)
    ``rectangular``: G(f) = 1/sqrt(w) on [-w/2, w/2], zero elsewhere
    ``delta``:       the w -> 0 limit; only used analytically, never gridded
    """

    profile: str = GAUSSIAN
    width: float = 1.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown pointer profile {self.profile!r}; expected one of {PROFILES}")
        if self.profile != DELTA and not (self.width > 0 and np.isfinite(self.width)):
            raise ValueError(f"pointer width must be positive and finite, got {self.width}")

    @classmethod
    def gaussian(cls, width: float) -> "PointerSpec":
        return cls(GAUSSIAN, float(width))

    @classmethod
    def rectangular(cls, width: float) -> "PointerSpec":
        return cls(RECTANGULAR, float(width))

    @classmethod
    def delta(cls) -> "PointerSpec":
        return cls(DELTA, 0.0)

    @property
    def is_delta(self) -> bool:
        return self.profile == DELTA


def pointer_wavefunction(spec: PointerSpec, f, shift: float = 0.0):
    """Evaluate G(f - shift) for the given profile. Real valued."""
    if spec.is_delta:
        raise DeltaNotEvaluable("a delta pointer has no pointwise wavefunction")
    x = np.asarray(f, dtype=float) - shift
    w = spec.width
    if spec.profile == GAUSSIAN:
        out = (np.pi * w * w / 2) ** -0.25 * np.exp(-(x * x) / (w * w))
    else:
        out = np.where(np.abs(x) <= w / 2, 1.0 / np.sqrt(w), 0.0)
    return out if out.ndim else float(out)


def pointer_density_derivative(spec: PointerSpec, f) -> np.ndarray:
    """d/df |G(f)|^2; closed form for the Gaussian profile only."""
    if spec.profile != GAUSSIAN:
        raise ProfileUnsupported(f"no closed-form derivative for the {spec.profile} profile")
    f = np.asarray(f, dtype=float)
    return -4.0 * f / spec.width**2 * pointer_wavefunction(spec, f) ** 2


def overlap(spec: PointerSpec, x, y):
    """Integral of G(f - x) G(f - y) over f."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    w = spec.width
    if spec.profile == GAUSSIAN:
        return np.exp(-d * d / (2 * w * w))
    if spec.profile == RECTANGULAR:
        return np.clip(1.0 - np.abs(d) / w, 0.0, None)
    raise DeltaNotEvaluable("delta overlaps are label equalities, not integrals")


def first_moment(spec: PointerSpec, x, y):
    """Integral of f G(f - x) G(f - y); both real profiles are symmetric."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * (x + y) * overlap(spec, x, y)


def derivative_overlap(spec: PointerSpec, x, y):
    """Integral of G(f - x) dG(f - y)/df, Gaussian profile only."""
    if spec.profile != GAUSSIAN:
        raise ProfileUnsupported(f"momentum moments need a Gaussian profile, got {spec.profile}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -(x - y) / spec.width**2 * overlap(spec, x, y)
