import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permcoh.core import OccupationVector, ValidationError
from permcoh.distinguishability import gram_from_states
from permcoh.fockoracle import collision_free_outputs, internal_coordinates, simulate
from permcoh.generators import haar_unitary, random_states
from permcoh.transition import probability_bruteforce, scattering_matrix
from permcoh.verify import HOM


def test_hom_identical_photons():
    dist = simulate(HOM, [[1, 0], [1, 0]], (1, 1))
    assert dist.get(OccupationVector((1, 1)), 0.0) == pytest.approx(0, abs=1e-15)
    assert dist[OccupationVector((2, 0))] == pytest.approx(0.5)
    assert dist[OccupationVector((0, 2))] == pytest.approx(0.5)


def test_hom_orthogonal_photons():
    dist = simulate(HOM, [[1, 0], [0, 1]], (1, 1))
    assert dist[OccupationVector((1, 1))] == pytest.approx(0.5)
    assert dist[OccupationVector((2, 0))] == pytest.approx(0.25)


@settings(max_examples=30)
@given(st.integers(1, 3), st.integers(0, 2), st.integers(1, 3), st.integers(0, 10_000))
def test_matches_permutation_formula(N, extra, d, seed):
    M = min(N + extra, 4)
    U = haar_unitary(M, seed)
    states = random_states(N, d, seed + 1)
    n = tuple([1] * N + [0] * (M - N))
    dist = simulate(U, states, n)
    assert sum(dist.values()) == pytest.approx(1, abs=1e-9)
    S = gram_from_states(states)
    for m in collision_free_outputs(M, N):
        P = probability_bruteforce(scattering_matrix(U, n, m), S).probability
        assert dist.get(m, 0.0) == pytest.approx(P, abs=1e-9)


def test_basis_invariance():
    U = haar_unitary(4, 7)
    states = random_states(3, 3, 8)
    a = simulate(U, states, (1, 1, 1, 0), basis="gram")
    b = simulate(U, states, (1, 1, 1, 0), basis="svd")
    for key in set(a) | set(b):
        assert a.get(key, 0) == pytest.approx(b.get(key, 0), abs=1e-12)


def test_internal_coordinates_reproduce_overlaps():
    states = random_states(4, 2, 3)
    for basis in ("gram", "svd"):
        c = internal_coordinates(states, basis)
        assert c.shape == (4, 2)
        assert np.allclose(c.conj() @ c.T, gram_from_states(states).gram, atol=1e-10)
    with pytest.raises(ValueError):
        internal_coordinates(states, "qr")


def test_scale_limits():
    with pytest.raises(ValidationError):
        simulate(haar_unitary(6, 0), random_states(2, 2, 0), (1, 1, 0, 0, 0, 0))
    with pytest.raises(ValidationError):
        simulate(haar_unitary(3, 0), random_states(2, 2, 0), (2, 0, 0))
    with pytest.raises(ValidationError):
        simulate(haar_unitary(3, 0), random_states(3, 2, 0), (1, 1, 0))


def test_collision_free_outputs():
    outs = collision_free_outputs(4, 2)
    assert len(outs) == 6 and all(o.collision_free and o.photons == 2 for o in outs)
