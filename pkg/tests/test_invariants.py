import numpy as np
import pytest
from hypothesis import given

from conftest import gaussian, rep_of, seeds
from knflow.errors import DimensionMismatch
from knflow.groups import Word, word_ball
from knflow.invariants import (
    InvariantVector,
    Verdict,
    ball_invariants,
    compare,
    quotient_compare,
    trace_invariants,
    unitary_orbit_distance,
)
from knflow.sampling import random_conjugator, random_unitary, sample
from knflow.scaling import scale_rep

D = np.diag([2.0, 0.5])
E = np.diag([3.0, 1 / 3])


def su2_grid_distance(a, b, k=48):
    """Brute-force min over an SU(2) grid of ||a - u b u^†||_F (an upper bound)."""
    th = np.linspace(0, np.pi / 2, k)
    ph = np.linspace(0, 2 * np.pi, k, endpoint=False)
    T, P, S = np.meshgrid(th, ph, ph, indexing="ij")
    x = np.cos(T) * np.exp(1j * P)
    y = np.sin(T) * np.exp(1j * S)
    u = np.stack([np.stack([x, -y.conj()], -1), np.stack([y, x.conj()], -1)], -2).reshape(-1, 2, 2)
    conj = u @ b @ u.conj().transpose(0, 2, 1)
    return float(np.min(np.linalg.norm(a - conj, axis=(1, 2))))


def test_trace_invariants_examples(rng):
    rep = rep_of("abelian:2", [D, E])
    v = trace_invariants(rep, [Word.of((0, 1)), Word.of((1, 1)), Word.of((0, 1), (1, 1)), Word()])
    np.testing.assert_allclose(v.values, [2.5, 10 / 3, 37 / 6, 2.0], atol=1e-14)
    u = random_unitary(rng, 2)
    w = trace_invariants(rep.conjugate(u, u.conj().T), v.words)
    np.testing.assert_allclose(w.values, v.values, atol=1e-10)
    assert InvariantVector.from_json(v.to_json()).words == v.words


def test_ball_invariants_cover_ball():
    rep = rep_of("abelian:2", [D, E])
    v = ball_invariants(rep, 2)
    assert list(v.words) == word_ball(2, 2)


def test_orbit_distance_examples(rng):
    a = rep_of("free:2", [gaussian(rng, 3) for _ in range(2)], ambient="GL")
    u = random_unitary(rng, 3)
    assert unitary_orbit_distance(a, a.conjugate(u, u.conj().T), restarts=8) <= 1e-7
    one = rep_of("free:1", [D])
    assert unitary_orbit_distance(one, rep_of("free:1", [np.diag([0.5, 2.0])])) <= 1e-7
    d = unitary_orbit_distance(one, rep_of("free:1", [E]))
    assert d >= 1 - 1e-6
    # Hoffman-Wielandt: the optimum pairs sorted eigenvalues
    assert d == pytest.approx(np.sqrt(1 + (0.5 - 1 / 3) ** 2), abs=1e-9)
    with pytest.raises(DimensionMismatch):
        unitary_orbit_distance(one, rep_of("free:1", [np.eye(3)], ambient="GL"))


def test_orbit_distance_against_grid_oracle(rng):
    for _ in range(3):
        a, b = gaussian(rng, 2), gaussian(rng, 2)
        d = unitary_orbit_distance(rep_of("free:1", [a], ambient="GL"), rep_of("free:1", [b], ambient="GL"))
        grid = su2_grid_distance(a, b)
        # the grid is an upper bound with O(spacing) error
        assert d <= grid + 1e-9
        assert d >= grid - 0.1 * (np.linalg.norm(a) + np.linalg.norm(b))


def test_orbit_distance_parallel_matches_sequential(rng):
    a = rep_of("free:2", [gaussian(rng, 3) for _ in range(2)], ambient="GL")
    b = rep_of("free:2", [gaussian(rng, 3) for _ in range(2)], ambient="GL")
    seq = unitary_orbit_distance(a, b, seed=3)
    par = unitary_orbit_distance(a, b, seed=3, workers=4)
    assert par <= seq + 1e-12


def test_quotient_examples(rng):
    a = sample("abelian-conjugated:2,2", 1, 11)[0]
    g = random_conjugator(rng, 2)
    assert quotient_compare(a, a.conjugate(g)) is Verdict.SAME_POINT
    x, y, z = np.eye(3), np.eye(3), np.eye(3)
    x[0, 1] = y[1, 2] = z[0, 2] = 1.0
    h = rep_of("heisenberg3", [x, y, z])
    assert quotient_compare(h, h.with_matrices([np.eye(3)] * 3)) is Verdict.SAME_POINT
    c = compare(rep_of("abelian:1", [D]), rep_of("abelian:1", [E]))
    assert c.verdict is Verdict.DIFFERENT_POINT and c.orbit_distance is None
    assert c.invariant_gap > 1e-6


def test_quotient_rejects_mismatched_presentations():
    with pytest.raises(ValueError):
        quotient_compare(rep_of("abelian:1", [D]), rep_of("free:1", [D]))


# ----------------------------------------------------------- properties


@given(seed=seeds)
def test_trace_invariants_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    rep = rep_of("free:2", [np.eye(3) + 0.5 * gaussian(rng, 3) for _ in range(2)], ambient="GL")
    g = random_conjugator(rng, 3)
    words = word_ball(2, 2)
    v = trace_invariants(rep, words).values
    w = trace_invariants(rep.conjugate(g), words).values
    assert np.max(np.abs(v - w)) <= 1e-10 * (1 + np.max(np.abs(v)))


@given(seed=seeds)
def test_quotient_reflexive(seed):
    rep = sample("abelian-conjugated:2,2", 1, seed)[0]
    assert quotient_compare(rep, rep) is Verdict.SAME_POINT


@given(seed=seeds)
def test_scaling_descends_to_quotient(seed):
    rng = np.random.default_rng(seed)
    a = sample("abelian-normal:3,2", 1, seed)[0]
    u = random_unitary(rng, 3)
    b = a.conjugate(u, u.conj().T)
    assert quotient_compare(a, b) is Verdict.SAME_POINT
    assert quotient_compare(scale_rep(a, 1.0), scale_rep(b, 1.0)) is Verdict.SAME_POINT
