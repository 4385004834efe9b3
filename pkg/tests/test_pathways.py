import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakpath.errors import DarkFringe, NotHermitian, OutcomeIndexOutOfRange, ValidationError, ZeroDenominator
from weakpath.hilbert import random_state, random_unitary
from weakpath.pathways import (MeasurementStep, amplitude_table, Scenario, conditional_path_probability, interference_intensities,
                               path_amplitudes, postselect_outcome, postselection_probability, spectral,
                               spectral_from_basis, strong_outcome_probabilities, strong_sequence_probability)
from weakpath.scenarios import build_double_slit, build_three_box, random_scenario


def brute_clusters(values, tol):
    """Groups by transitive closure of |x - y| <= tol, brute force."""
    n = len(values)
    label = list(range(n))
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(n), 2):
            if abs(values[i] - values[j]) <= tol and label[i] != label[j]:
                lo = min(label[i], label[j])
                label[i] = label[j] = lo
                changed = True
    return sorted(sorted(values[k] for k in range(n) if label[k] == g) for g in set(label))


def test_spectral_projector_example():
    d = spectral(np.diag([1.0, 0.0, 0.0]))
    assert np.allclose(d.distinct_values, [0, 1])
    assert [d.rank(m) for m in range(2)] == [2, 1]


def test_spectral_identity():
    d = spectral(np.eye(4))
    assert np.allclose(d.distinct_values, [1])
    assert np.allclose(d.projectors[0], np.eye(4))


def test_spectral_near_degenerate():
    vals = [1.0, 1.0 + 1e-12, 5.0]
    d = spectral(np.diag(vals), 1e-9)
    assert [d.rank(m) for m in range(d.n_outcomes)] == [2, 1]
    assert len(brute_clusters(vals, 1e-9)) == d.n_outcomes


def test_spectral_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        spectral(np.array([[0, 1j], [1j, 0]]))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.5]), min_size=2, max_size=6), st.integers(0, 2**32 - 1))
def test_spectral_invariants(values, seed):
    rng = np.random.default_rng(seed)
    n = len(values)
    u = random_unitary(rng, n)
    h = (u * values) @ u.conj().T
    d = spectral(h)
    assert np.max(np.abs(d.projectors.sum(axis=0) - np.eye(n))) <= 1e-9
    for p in d.projectors:
        assert np.max(np.abs(p @ p - p)) <= 1e-9
    recon = np.einsum("m,mij->ij", d.distinct_values, d.projectors)
    assert np.max(np.abs(recon - h)) <= 1e-9
    assert [len(g) for g in brute_clusters(values, 1e-9)] == [d.rank(m) for m in range(d.n_outcomes)]


def test_three_box_amplitudes():
    p = path_amplitudes(build_three_box())
    assert np.allclose(p.amps, [1 / 3, -1 / 3, 1 / 3], atol=1e-15)
    assert np.allclose(p.normalized, [1, -1, 1], atol=1e-12)
    assert p.normalized.sum() == pytest.approx(1, abs=1e-9)


def test_three_box_two_steps_three_paths():
    p = path_amplitudes(build_three_box(["B", "Bprime"]))
    assert len(p.amps) == 9
    nz = np.abs(p.amps) > 1e-15
    assert nz.sum() == 3
    assert np.all(p.labels[nz, 0] == p.labels[nz, 1])


def test_strong_three_box():
    s = build_three_box(["B"])
    assert strong_sequence_probability(s, [1], conditional=True) == pytest.approx(1, abs=1e-9)
    s = build_three_box(["Bprime"])
    assert strong_sequence_probability(s, [1], conditional=True) == pytest.approx(0, abs=1e-9)
    probs = strong_outcome_probabilities(build_three_box(["B", "Bprime"]), conditional=True)
    assert probs[(1, 0)] == pytest.approx(0, abs=1e-9)
    for k in [(0, 0), (0, 1), (1, 1)]:
        assert probs[k] == pytest.approx(1 / 3, abs=1e-9)


def test_outcome_index_checked():
    with pytest.raises(OutcomeIndexOutOfRange):
        strong_sequence_probability(build_three_box(["B"]), [2])
    with pytest.raises(OutcomeIndexOutOfRange):
        strong_sequence_probability(build_three_box(["B"]), [0, 1])


def test_double_slit_intensities():
    w_int, w_no = interference_intensities(build_double_slit())
    assert np.allclose(w_int, [1, 0], atol=1e-12)
    assert np.allclose(w_no, [0.5, 0.5], atol=1e-12)
    with pytest.raises(DarkFringe):
        path_amplitudes(build_double_slit(target=2))


def test_three_box_arrival_weights():
    s = build_three_box(["B", "Bprime"])
    w_int, w_no = interference_intensities(s, np.atleast_2d(s.postselect))
    assert w_int[0] == pytest.approx(1 / 9)
    assert w_no[0] == pytest.approx(3 / 9)
    assert postselection_probability(build_three_box()) == pytest.approx(1 / 9)


def test_conditional_path_probability():
    assert conditional_path_probability(build_three_box(["B"]), 0) == pytest.approx(1.0)
    s = Scenario(initial=[1, 0, 0], steps=(MeasurementStep(spectral(np.diag([1.0, 2.0, 3.0]))),),
                 postselect=[[1, 0, 0]])
    assert conditional_path_probability(s, 0) == pytest.approx(1.0)
    with pytest.raises(ZeroDenominator):
        conditional_path_probability(s.with_postselect([0, 1, 0]), 0)


def test_conditional_path_matches_binary_coarse_graining(rng):
    s = random_scenario(rng, 4, 1)
    obs = s.steps[0].observable
    for l in range(4):
        proj = np.zeros(4)
        proj[l] = 1.0
        binary = spectral_from_basis(obs.eigenvectors.T, proj)
        coarse = s.replace(steps=(MeasurementStep(binary, evolution=s.steps[0].evolution),))
        want = strong_sequence_probability(coarse, [binary.index_of(1.0)], conditional=True)
        assert conditional_path_probability(s, l) == pytest.approx(want, abs=1e-12)


def test_completeness(rng):
    for n, k in [(2, 1), (3, 2), (4, 2)]:
        s = random_scenario(rng, n, k, postselect=False)
        total = sum(strong_outcome_probabilities(s).values())
        assert total == pytest.approx(1.0, abs=1e-9)


def test_degeneracy_coarse_graining(rng):
    """Merging eigenvalues equals summing amplitudes of the merged paths first."""
    for _ in range(10):
        s = random_scenario(rng, 4, 1)
        obs = s.steps[0].observable
        merged_vals = obs.eigenvalues.copy()
        merged_vals[1] = merged_vals[0]
        merged = spectral_from_basis(obs.eigenvectors.T, merged_vals)
        ms = s.replace(steps=(MeasurementStep(merged, evolution=s.steps[0].evolution),))
        amps = path_amplitudes(s).amps
        post = postselection_probability(s)
        for m in range(merged.n_outcomes):
            members = np.flatnonzero(merged.membership == m)
            brute = abs(amps[members].sum()) ** 2 / 1.0
            assert strong_sequence_probability(ms, [m]) == pytest.approx(brute, abs=1e-12)
        assert post > 0


def test_postselect_outcome_degenerate():
    d = spectral(np.diag([1.0, 1.0, 0.0]))
    rows = postselect_outcome(d, d.index_of(1.0))
    assert rows.shape == (2, 3)
    with pytest.raises(OutcomeIndexOutOfRange):
        postselect_outcome(d, 5)


def test_scenario_validation(rng):
    d = spectral(np.diag([1.0, 0.0]))
    with pytest.raises(ValidationError):
        Scenario(initial=[1, 0, 0], steps=(MeasurementStep(d),))
    with pytest.raises(ValidationError):
        Scenario(initial=[1, 0], postselect=[[1, 0], [1, 0]])
    with pytest.raises(Exception):
        Scenario(initial=[1, 0], final_evolution=np.diag([1.0, 2.0]))


def test_degenerate_postselection_sums_incoherently():
    s = build_three_box(["B"])
    d = spectral(np.diag([1.0, 1.0, 0.0]))
    rows = postselect_outcome(d, d.index_of(1.0))
    s2 = s.replace(postselect=rows)
    # project onto span{e0, e1}: outcome B=1 only from e0 with weight 1/3
    assert strong_sequence_probability(s2, [1]) == pytest.approx(1 / 3)
    assert strong_sequence_probability(s2, [0]) == pytest.approx(1 / 3)


def test_zero_steps_single_path(rng):
    a = random_state(rng, 3)
    c = random_state(rng, 3)
    labels, amps = amplitude_table(Scenario(initial=a, postselect=[c]))
    assert amps.shape == (1, 1) and labels.shape == (1, 0)
    assert amps[0, 0] == pytest.approx(np.vdot(c, a))
