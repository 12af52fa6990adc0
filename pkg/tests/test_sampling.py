import numpy as np
import pytest

from knflow import matcore
from knflow.groups import relation_residual
from knflow.kempfness import moment_map
from knflow.sampling import PRESETS, random_conjugator, random_unitary, sample


@pytest.mark.parametrize("preset", [
    "abelian-normal:3,2", "abelian-conjugated:3,2", "heisenberg-unipotent:3",
    "free-generic:2,2", "heisenberg-normal-conjugated:3", "real-abelian-conjugated:3,2",
])
def test_presets_valid_and_deterministic(preset):
    a, b = sample(preset, 4, 9), sample(preset, 4, 9)
    assert len(a) == 4
    for x, y in zip(a, b):
        assert x.allclose(y, atol=0)
        x.validate()


def test_abelian_normal_relations():
    for rep in sample("abelian-normal:2,2", 3, 7):
        assert relation_residual(rep) <= 1e-12
        assert moment_map(rep).norm <= 1e-12


def test_free_generic_has_no_relators():
    assert sample("free-generic:2,2", 1, 0)[0].presentation.relators == ()


def test_real_presets_are_real():
    for rep in sample("real-abelian-conjugated:4,2", 3, 1):
        assert all(m.dtype == np.float64 for m in rep.matrices)


def test_conjugator_condition_bounded(rng):
    for n in (2, 3, 5):
        for real in (False, True):
            g = random_conjugator(rng, n, real)
            assert np.linalg.cond(g) <= 10 + 1e-9
            assert abs(abs(np.linalg.det(g)) - 1) <= 1e-12


def test_random_unitary(rng):
    assert matcore.unitarity_residual(random_unitary(rng, 4)) < 1e-13
    q = random_unitary(rng, 3, real=True)
    assert q.dtype == np.float64 and np.linalg.det(q) == pytest.approx(1.0)


def test_unknown_preset():
    for bad in ("nope", "heisenberg-unipotent:4", "abelian-normal:2"):
        with pytest.raises(ValueError):
            sample(bad, 1, 0)
    assert len(PRESETS) == 6
