import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakpath.errors import NotHermitian, NotUnitary, ValidationError
from weakpath.hilbert import (as_state, as_unitary, complete_basis, eigensystem, fix_phase, propagator,
                              random_hermitian, random_state, random_unitary, tensor)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def taylor_exp(m, terms=60):
    out = np.eye(len(m), dtype=complex)
    term = np.eye(len(m), dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_propagator_zero_hamiltonian():
    assert np.allclose(propagator(np.zeros((3, 3)), 1.0), np.eye(3), atol=1e-15)


def test_propagator_diagonal():
    u = propagator(np.diag([0, np.pi]), 1.0)
    assert np.max(np.abs(u - np.diag([1, -1]))) < 1e-12


def test_propagator_matches_power_series():
    u = propagator(SX, np.pi / 2)
    assert np.max(np.abs(u - taylor_exp(-1j * SX * np.pi / 2))) < 1e-12


def test_propagator_random_against_series(rng):
    h = random_hermitian(rng, 5, 0.7)
    assert np.max(np.abs(propagator(h, 0.9) - taylor_exp(-1j * h * 0.9))) < 1e-11


def test_propagator_group_property(rng):
    h = random_hermitian(rng, 4)
    lhs = propagator(h, 0.3) @ propagator(h, 1.1)
    assert np.max(np.abs(lhs - propagator(h, 1.4))) < 1e-10


def test_propagator_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        propagator(np.array([[0, 1], [0, 0]]), 1.0)


def test_eigensystem_diagonal():
    vals, vecs = eigensystem(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(vals, [1, 2, 3])
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]])


def test_eigensystem_sigma_x():
    vals, vecs = eigensystem(SX)
    assert np.allclose(vals, [-1, 1])
    # phase convention: first largest component real positive
    assert np.allclose(vecs[:, 0], np.array([1, -1]) / math.sqrt(2))
    assert np.allclose(vecs[:, 1], np.array([1, 1]) / math.sqrt(2))


@pytest.mark.parametrize("n", [2, 5, 8])
def test_eigensystem_reconstruction(rng, n):
    h = random_hermitian(rng, n)
    vals, vecs = eigensystem(h)
    assert np.max(np.abs((vecs * vals) @ vecs.conj().T - h)) <= 1e-10
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))) <= 1e-9
    assert np.all(np.diff(vals) >= 0)


def test_fix_phase_makes_largest_component_positive(rng):
    v = random_state(rng, 4)
    w = fix_phase(v * np.exp(0.7j))
    k = np.argmax(np.abs(w))
    assert abs(w[k].imag) < 1e-15 and w[k].real > 0


def test_tensor_basis_bookkeeping():
    e0, e1 = np.eye(2)
    assert np.allclose(tensor(e0, e1), np.eye(4)[1])
    assert np.allclose(tensor(np.eye(2), np.eye(3)), np.eye(6))


def test_tensor_factorizes(rng):
    v, w = random_state(rng, 2), random_state(rng, 3)
    lhs = tensor(SZ, np.eye(3)) @ tensor(v, w)
    assert np.allclose(lhs, tensor(SZ @ v, w))


def test_tensor_associative(rng):
    a, b, c = (rng.integers(-9, 10, size=(k, k)) for k in (2, 3, 2))
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


def test_state_validation():
    with pytest.raises(ValidationError):
        as_state([1.0])
    with pytest.raises(ValidationError):
        as_state([0.9, 0.0])
    with pytest.raises(ValidationError):
        as_state([np.nan, 1.0])
    assert np.allclose(as_state([3, 4], normalize=True), [0.6, 0.8])


def test_unitary_validation(rng):
    as_unitary(random_unitary(rng, 4))
    with pytest.raises(NotUnitary):
        as_unitary(np.diag([1.0, 1.1]))


def test_complete_basis_keeps_rows(rng):
    v = random_state(rng, 4)
    b = complete_basis(v)
    assert np.allclose(b[0], v)
    assert np.max(np.abs(b.conj() @ b.T - np.eye(4))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_propagator_is_unitary(n, dt, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    u = propagator(h, dt)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-9
