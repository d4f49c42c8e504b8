import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fockgate.elements import BeamSplitter, random_unitary, transfer_matrix
from fockgate.fock import CapacityError, StateVector, enumerate_basis
from fockgate.lift import lift
from fockgate.postselect import (
    EffectiveOperator,
    PostSelectError,
    PostSelectSpec,
    effective_operator,
    outcome_distribution,
    success_probability,
)

R_GRID = [k / 10 for k in range(1, 10)]


def splitter_op(R, cutoff=4):
    return lift(transfer_matrix(BeamSplitter(0, 1, R), 2), enumerate_basis(2, cutoff))


def sign_element(R, cutoff=4):
    return effective_operator(splitter_op(R, cutoff), PostSelectSpec((0,), (1,), (1,), (1,)))


def closed_form(R, n):
    return math.sqrt(R) ** (n - 1) * (R - (1 - R) * n)


@pytest.mark.parametrize("R", [0.25, 0.5, 0.75])
def test_vacuum_attenuation(R):
    S = effective_operator(splitter_op(R), PostSelectSpec((0,), (1,), (0,), (0,)))
    np.testing.assert_allclose(S.matrix, np.diag([math.sqrt(R) ** n for n in range(5)]), atol=1e-12)


def test_sign_element_quarter():
    S = sign_element(0.25)
    np.testing.assert_allclose(S.diagonal()[:3], [0.5, -0.5, -0.625], atol=1e-12)


def test_sign_element_half():
    S = sign_element(0.5)
    np.testing.assert_allclose(S.diagonal()[:3], [1 / math.sqrt(2), 0, -1 / (2 * math.sqrt(2))], atol=1e-12)


@pytest.mark.parametrize("R", R_GRID)
def test_sign_element_closed_form(R):
    S = sign_element(R, cutoff=5)
    for n in range(5):
        assert S.element((n,), (n,)) == pytest.approx(closed_form(R, n), abs=1e-10)


@pytest.mark.parametrize("R", R_GRID)
def test_sign_change_at_threshold(R):
    S = sign_element(R)
    threshold = R / (1 - R)
    for n in range(4):
        value = S.element((n,), (n,)).real
        if n < threshold - 1e-9:
            assert value > 0
        elif n > threshold + 1e-9:
            assert value < 0
        else:
            assert abs(value) < 1e-12


@pytest.mark.parametrize("n_anc", [0, 1])
def test_post_selected_operators_are_diagonal(n_anc):
    for R in R_GRID:
        S = effective_operator(splitter_op(R), PostSelectSpec((0,), (1,), (n_anc,), (n_anc,)))
        off = S.matrix - np.diag(S.diagonal())
        assert np.all(off == 0)


def test_signal_basis_excludes_ancilla_photons():
    S = sign_element(0.25, cutoff=4)
    assert S.signal_basis.states == ((0,), (1,), (2,), (3,))


def test_success_probability_examples():
    S = sign_element(0.5)
    one = StateVector.basis_state(S.signal_basis, (1,))
    assert success_probability(S, one) == pytest.approx(0, abs=1e-30)
    b = enumerate_basis(2, 2)
    ident = EffectiveOperator(b, np.eye(len(b)))
    psi = StateVector(b, np.arange(1, 7) / np.linalg.norm(np.arange(1, 7)))
    assert success_probability(ident, psi) == pytest.approx(1)


def test_success_probability_rejects_unnormalized():
    S = sign_element(0.5)
    with pytest.raises(ValueError):
        success_probability(S, StateVector(S.signal_basis, [1, 1, 0, 0]))


def test_outcome_distribution_hong_ou_mandel():
    # detecting exactly one photon is forbidden; symmetry splits the rest evenly
    U = splitter_op(0.5, cutoff=2)
    spec = PostSelectSpec((0,), (1,), (1,), None)
    psi = StateVector.basis_state(enumerate_basis(1, 1), (1,))
    probs = dict(outcome_distribution(U, spec, psi))
    assert probs[(1,)] == pytest.approx(0, abs=1e-15)
    assert probs[(0,)] == pytest.approx(0.5)
    assert probs[(2,)] == pytest.approx(0.5)


def test_outcome_distribution_vacuum():
    U = splitter_op(0.3, cutoff=2)
    spec = PostSelectSpec((0,), (1,), (0,), None)
    psi = StateVector.basis_state(enumerate_basis(1, 0), (0,))
    probs = dict(outcome_distribution(U, spec, psi))
    assert probs[(0,)] == pytest.approx(1)
    assert sum(probs.values()) == pytest.approx(1)


def test_outcome_distribution_single_photon_at_quarter():
    U = splitter_op(0.25, cutoff=2)
    spec = PostSelectSpec((0,), (1,), (1,), None)
    psi = StateVector.basis_state(enumerate_basis(1, 0), (0,))
    probs = dict(outcome_distribution(U, spec, psi))
    assert probs[(1,)] == pytest.approx(0.25)
    assert probs[(0,)] == pytest.approx(0.75)


def random_network(seed):
    rng = np.random.default_rng(seed)
    M = int(rng.integers(2, 4))
    n_anc = int(rng.integers(1, M))
    modes = rng.permutation(M)
    anc_modes = tuple(int(m) for m in modes[:n_anc])
    sig_modes = tuple(sorted(int(m) for m in modes[n_anc:]))
    anc_in = tuple(int(x) for x in rng.integers(0, 2, size=n_anc))
    cutoff = sum(anc_in) + 2
    U = lift(random_unitary(M, rng), enumerate_basis(M, cutoff))
    return rng, U, sig_modes, anc_modes, anc_in


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_outcome_completeness(seed):
    rng, U, sig, anc, anc_in = random_network(seed)
    b = enumerate_basis(len(sig), 2)
    psi = StateVector(b, rng.normal(size=len(b)) + 1j * rng.normal(size=len(b))).normalized()
    probs = outcome_distribution(U, PostSelectSpec(sig, anc, anc_in, None), psi)
    assert sum(p for _, p in probs) == pytest.approx(1, abs=1e-10)
    # photon-conserving branches agree with the matching effective operator
    for outcome, p in probs:
        if sum(outcome) == sum(anc_in):
            S = effective_operator(U, PostSelectSpec(sig, anc, anc_in, outcome))
            assert success_probability(S, psi) == pytest.approx(p, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_contraction(seed):
    rng, U, sig, anc, anc_in = random_network(seed)
    out = tuple(int(x) for x in rng.integers(0, 2, size=len(anc)))
    S = effective_operator(U, PostSelectSpec(sig, anc, anc_in, out))
    assert np.all(S.singular_values() <= 1 + 1e-10)


def test_postselect_validation():
    with pytest.raises(PostSelectError):
        PostSelectSpec((0, 1), (1,), (0,), (0,))
    with pytest.raises(PostSelectError):
        PostSelectSpec((0,), (1,), (0, 0), (0,))
    with pytest.raises(PostSelectError):
        effective_operator(splitter_op(0.5), PostSelectSpec((0,), (2,), (0,), (0,)))


def test_ancilla_preparation_beyond_cutoff():
    with pytest.raises(CapacityError):
        effective_operator(splitter_op(0.5, cutoff=1), PostSelectSpec((0,), (1,), (2,), (2,)))
