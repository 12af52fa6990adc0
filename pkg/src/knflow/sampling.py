"""Seeded random instances: unitaries, bounded-condition conjugators, preset reps."""
from __future__ import annotations

import numpy as np

from .groups import Representation, builtin_presentation
from .matcore import GroupSpec

COND_MAX = 10.0

PRESETS = (
    "abelian-normal:n,r",
    "abelian-conjugated:n,r",
    "heisenberg-unipotent:3",
    "free-generic:n,r",
    "heisenberg-normal-conjugated:3",
    "real-abelian-conjugated:n,r",
)


def random_unitary(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary (or special orthogonal when ``real``)."""
    z = rng.normal(size=(n, n))
    if not real:
        z = z + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    if real and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_conjugator(
    rng: np.random.Generator, n: int, real: bool = False, cond_max: float = COND_MAX
) -> np.ndarray:
    """Determinant-one matrix with 2-norm condition number at most ``cond_max``."""
    u = random_unitary(rng, n, real)
    v = random_unitary(rng, n, real)
    s = np.exp(rng.uniform(0.0, np.log(cond_max), size=n))
    if n > 1:
        s[0] = 1.0
    g = (u * s) @ v
    det = np.linalg.det(g)
    if real:
        return g / abs(det) ** (1.0 / n)
    return g / det ** (1.0 / n)


def random_spectrum(rng: np.random.Generator, n: int, unimodular: bool = True) -> np.ndarray:
    """Random nonzero eigenvalues; product 1 when ``unimodular``.

    Half the time the moduli are all 1, otherwise log-moduli are N(0, 0.6).
    """
    theta = rng.uniform(0.0, 2 * np.pi, size=n)
    if rng.random() < 0.5:
        mod = np.ones(n)
    else:
        mod = np.exp(rng.normal(0.0, 0.6, size=n))
    lam = mod * np.exp(1j * theta)
    if unimodular:
        lam = lam / np.prod(lam) ** (1.0 / n)
    return lam


def commuting_normal_tuple(rng: np.random.Generator, n: int, r: int) -> list[np.ndarray]:
    q = random_unitary(rng, n)
    return [(q * random_spectrum(rng, n)) @ q.conj().T for _ in range(r)]


def real_commuting_normal_tuple(rng: np.random.Generator, n: int, r: int) -> list[np.ndarray]:
    """Real commuting normal matrices: a shared orthogonal basis and 2x2
    rotation-scaling blocks (plus one positive 1x1 block for odd n)."""
    q = random_unitary(rng, n, real=True)
    out = []
    for _ in range(r):
        d = np.zeros((n, n))
        for k in range(0, n - 1, 2):
            rho = np.exp(rng.normal(0.0, 0.6)) if rng.random() < 0.7 else 1.0
            phi = rng.uniform(0.0, 2 * np.pi)
            c, s = rho * np.cos(phi), rho * np.sin(phi)
            d[k:k + 2, k:k + 2] = [[c, -s], [s, c]]
        if n % 2:
            d[-1, -1] = np.exp(rng.normal(0.0, 0.6))
        d /= np.linalg.det(d) ** (1.0 / n)
        out.append(q @ d @ q.T)
    return out


def _conjugate_all(rng, mats, real=False):
    g = random_conjugator(rng, mats[0].shape[0], real)
    g_inv = np.linalg.inv(g)
    return [g @ m @ g_inv for m in mats]


def _parse_nr(spec: str) -> tuple[int, int]:
    n, r = (int(x) for x in spec.split(","))
    if n < 1 or r < 1:
        raise ValueError(spec)
    return n, r


def heisenberg_unipotent(rng: np.random.Generator, conjugate: bool = False) -> list[np.ndarray]:
    a, b = rng.uniform(0.5, 2.0, size=2) * rng.choice([-1.0, 1.0], size=2)
    x, y, z = np.eye(3), np.eye(3), np.eye(3)
    x[0, 1], y[1, 2], z[0, 2] = a, b, a * b
    mats = [x, y, z]
    return _conjugate_all(rng, mats) if conjugate else mats


def heisenberg_normal(rng: np.random.Generator) -> list[np.ndarray]:
    """Normal images of the Heisenberg group in GL_3.

    Either a scaled clock/shift pair (central commutator a cube root of
    unity) or a commuting normal pair with trivial commutator.
    """
    if rng.random() < 0.5:
        omega = np.exp(2j * np.pi / 3)
        shift = np.roll(np.eye(3), 1, axis=0)
        clock = np.diag([1.0, omega, omega**2])
        q = random_unitary(rng, 3)
        alpha, beta = np.exp(rng.normal(0.0, 0.6, size=2) + 1j * rng.uniform(0, 2 * np.pi, size=2))
        x = q @ (alpha * shift) @ q.conj().T
        y = q @ (beta * clock) @ q.conj().T
    else:
        x, y = commuting_normal_tuple(rng, 3, 2)
    z = x @ y @ np.linalg.inv(x) @ np.linalg.inv(y)
    return [x, y, z]


def sample(preset: str, count: int, seed: int) -> list[Representation]:
    """Deterministic list of ``count`` representations for a preset name."""
    rng = np.random.default_rng(seed)
    kind, _, arg = preset.partition(":")
    out = []
    if kind in ("abelian-normal", "abelian-conjugated", "real-abelian-conjugated"):
        n, r = _parse_nr(arg)
        real = kind.startswith("real")
        pres, group = builtin_presentation(f"abelian:{r}"), GroupSpec("SL", n, "real" if real else "complex")
        for _ in range(count):
            mats = real_commuting_normal_tuple(rng, n, r) if real else commuting_normal_tuple(rng, n, r)
            if kind != "abelian-normal":
                mats = _conjugate_all(rng, mats, real)
            out.append(Representation(pres, group, tuple(mats)))
    elif kind == "heisenberg-unipotent" and arg == "3":
        pres, group = builtin_presentation("heisenberg3"), GroupSpec("SL", 3)
        for _ in range(count):
            out.append(Representation(pres, group, tuple(heisenberg_unipotent(rng))))
    elif kind == "heisenberg-normal-conjugated" and arg == "3":
        pres, group = builtin_presentation("heisenberg3"), GroupSpec("GL", 3)
        for _ in range(count):
            out.append(Representation(pres, group, tuple(_conjugate_all(rng, heisenberg_normal(rng)))))
    elif kind == "free-generic":
        n, r = _parse_nr(arg)
        pres, group = builtin_presentation(f"free:{r}"), GroupSpec("GL", n)
        for _ in range(count):
            mats = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(r)]
            out.append(Representation(pres, group, tuple(m / np.sqrt(n) for m in mats)))
    else:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    return out
