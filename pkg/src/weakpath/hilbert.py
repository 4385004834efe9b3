"""Dense complex linear algebra for small systems.

States are 1-d complex arrays, operators are square 2-d complex arrays.
Everything here is a pure function of its inputs; returned arrays are fresh.
Units have hbar = 1.
"""
from __future__ import annotations

import numpy as np

from .errors import NotHermitian, NotUnitary, ValidationError

EPS_NORM = 1e-9
EPS_HERM = 1e-9
EPS_UNIT = 1e-9
EPS_EIG = 1e-9


def _inf_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def as_state(amps, *, normalize: bool = False, tol: float = EPS_NORM) -> np.ndarray:
    """Return ``amps`` as a complex state vector, checking its norm."""
    v = np.array(amps, dtype=complex).reshape(-1)
    if v.size < 2:
        raise ValidationError(f"state dimension must be >= 2, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("state has non-finite amplitudes")
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return v / norm
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"state is not normalized (norm={norm:.12g})")
    return v


def is_hermitian(m: np.ndarray, tol: float = EPS_HERM) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and _inf_norm(m - m.conj().T) <= tol


def as_hermitian(m, tol: float = EPS_HERM) -> np.ndarray:
    h = np.array(m, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"operator must be square, got shape {h.shape}")
    if not is_hermitian(h, tol):
        raise NotHermitian(f"||H - H^dagger||_inf = {_inf_norm(h - h.conj().T):.3g} exceeds {tol:g}")
    return h


def as_unitary(m, tol: float = EPS_UNIT) -> np.ndarray:
    u = np.array(m, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"operator must be square, got shape {u.shape}")
    err = _inf_norm(u.conj().T @ u - np.eye(u.shape[0]))
    if err > tol:
        raise NotUnitary(f"||U^dagger U - I||_inf = {err:.3g} exceeds {tol:g}")
    return u


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude component is real and positive.

    Ties go to the first such component.
    """
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
    if mags[k] == 0:
        return v.copy()
    return v * (np.conj(v[k]) / mags[k])


def eigensystem(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns
    -------
    values : (N,) float array
    vectors : (N, N) complex array, one eigenvector per **column**, each with
        its largest-magnitude component made real positive.
    """
    h = as_hermitian(h)
    values, vectors = np.linalg.eigh(h)
    vectors = np.column_stack([fix_phase(vectors[:, i]) for i in range(vectors.shape[1])])
    return values, vectors


def propagator(h, dt: float) -> np.ndarray:
    """``exp(-i H dt)`` through the eigen-decomposition of ``H``."""
    values, vectors = eigensystem(h)
    return (vectors * np.exp(-1j * values * dt)) @ vectors.conj().T


def tensor(*factors) -> np.ndarray:
    """Kronecker product; the first factor carries the slowest index."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def complete_basis(states) -> np.ndarray:
    """Orthonormal basis (rows) whose leading rows span ``states``.

    Rows of ``states`` must already be orthonormal; they are kept verbatim and
    the remainder is filled in by Gram-Schmidt against the standard basis.
    """
    states = np.atleast_2d(np.asarray(states, dtype=complex))
    n = states.shape[1]
    basis = [row for row in states]
    for e in np.eye(n, dtype=complex):
        if len(basis) == n:
            break
        w = e - sum(np.vdot(b, e) * b for b in basis)
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis.append(w / nrm)
    return np.array(basis)


# -- random generators used by tests, the acceptance suite and the benchmark --

def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.conj().T) / 2
