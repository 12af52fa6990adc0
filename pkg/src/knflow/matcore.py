"""Dense matrix primitives: Frobenius geometry, decompositions, residual tests.

Matrices are plain ``numpy.ndarray`` objects.  Real input stays ``float64``
wherever the mathematics permits, so realness is preserved exactly rather
than up to roundoff.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT, ToleranceConfig
from .errors import (
    DimensionMismatch,
    InvalidRepresentation,
    NonSemisimple,
    NotHermitian,
    NotNormal,
    Singular,
)

TWO_PI = 2.0 * math.pi


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite square 2-D array, keeping real data real."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if np.iscomplexobj(a):
        a = a.astype(np.complex128, copy=False)
    else:
        a = a.astype(np.float64, copy=False)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frobenius_inner(a, b) -> complex:
    """trace(a^† b)."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(m))


def tuple_norm_sq(matrices) -> float:
    return float(sum(np.vdot(m, m).real for m in matrices))


def normality_residual(m) -> float:
    """||m m^† - m^† m||_F."""
    m = as_matrix(m)
    md = dagger(m)
    return frobenius_norm(m @ md - md @ m)


def imag_max(m) -> float:
    m = np.asarray(m)
    if not np.iscomplexobj(m):
        return 0.0
    return float(np.max(np.abs(m.imag))) if m.size else 0.0


def realify(m: np.ndarray, tol: float) -> np.ndarray:
    """Drop an imaginary part that is pure roundoff (max |Im| <= tol)."""
    if np.iscomplexobj(m) and imag_max(m) <= tol:
        return np.ascontiguousarray(m.real)
    return m


@dataclass(frozen=True)
class EigenDecomp:
    eigenvalues: np.ndarray
    basis: np.ndarray
    basis_condition: float

    def reconstruct(self) -> np.ndarray:
        p = self.basis
        return p @ np.diag(self.eigenvalues) @ np.linalg.inv(p)


def spectral_order(eigenvalues, rel_tol: float = 1e-9) -> np.ndarray:
    """Permutation sorting by modulus descending, then argument in [0, 2pi) ascending.

    Moduli that agree to ``rel_tol`` (relative to the largest) count as equal,
    so roundoff does not reshuffle eigenvalues of equal size.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    if lam.size == 0:
        return np.zeros(0, dtype=int)
    mod = np.abs(lam)
    scale = max(float(mod.max()), 1e-300)

    def arg(z):
        a = cmath.phase(z) % TWO_PI
        return 0.0 if TWO_PI - a < 1e-12 else a

    by_mod = sorted(range(lam.size), key=lambda i: -mod[i])
    order: list[int] = []
    group = [by_mod[0]]
    for i in by_mod[1:]:
        if mod[group[0]] - mod[i] <= rel_tol * scale:
            group.append(i)
        else:
            order.extend(sorted(group, key=lambda j: arg(lam[j])))
            group = [i]
    order.extend(sorted(group, key=lambda j: arg(lam[j])))
    return np.array(order, dtype=int)


def eigendecompose(m, tol: ToleranceConfig = DEFAULT) -> EigenDecomp:
    """General eigendecomposition with unit-norm eigenvector columns.

    Raises NonSemisimple when the eigenvector basis condition number reaches
    ``tol.cond_cap`` or the reconstruction misses by more than ``tol.tol_recon``.
    """
    m = as_matrix(m)
    lam, p = np.linalg.eig(m)
    p = p / np.linalg.norm(p, axis=0, keepdims=True)
    order = spectral_order(lam)
    lam, p = lam[order], p[:, order]
    cond = float(np.linalg.cond(p))
    if not np.isfinite(cond) or cond >= tol.cond_cap:
        raise NonSemisimple(f"eigenvector basis condition {cond:.3g} >= {tol.cond_cap:.3g}")
    dec = EigenDecomp(lam, p, cond)
    err = frobenius_norm(dec.reconstruct() - m)
    if err > tol.tol_recon * max(frobenius_norm(m), 1.0):
        raise NonSemisimple(f"eigendecomposition reconstruction error {err:.3g}")
    return dec


def spectral_decompose(m, tol: ToleranceConfig = DEFAULT) -> EigenDecomp:
    """Unitary eigendecomposition of a normal matrix via complex Schur form.

    The strictly upper part of the Schur factor is of the order of the
    normality residual and is discarded.
    """
    m = as_matrix(m)
    nrm2 = frobenius_norm(m) ** 2
    res = normality_residual(m)
    if res > tol.tol_normal * (1.0 + nrm2):
        raise NotNormal(f"normality residual {res:.3g} exceeds tolerance")
    t, q = scipy.linalg.schur(m.astype(complex), output="complex")
    lam = np.diag(t).copy()
    order = spectral_order(lam)
    return EigenDecomp(lam[order], q[:, order], 1.0)


def _check_hermitian(h: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    skew = frobenius_norm(h - dagger(h))
    if skew > tol.tol_herm * (1.0 + frobenius_norm(h)):
        raise NotHermitian(f"||h - h^†||_F = {skew:.3g}")
    return 0.5 * (h + dagger(h))


def _hermitian_fn(h, fn, tol: ToleranceConfig) -> np.ndarray:
    h = _check_hermitian(as_matrix(h), tol)
    w, v = np.linalg.eigh(h)
    return (v * fn(w)) @ dagger(v)


def hermitian_exp(h, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """exp(h) for Hermitian h; real symmetric input gives real output."""
    return _hermitian_fn(h, np.exp, tol)


def hermitian_expm1(h, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """exp(h) - I, accurate when h is small."""
    return _hermitian_fn(h, np.expm1, tol)


def polar_decompose(m, tol: ToleranceConfig = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """m = unitary @ positive with positive = sqrt(m^† m)."""
    m = as_matrix(m)
    w, v = np.linalg.eigh(dagger(m) @ m)
    w = np.clip(w, 0.0, None)
    s = np.sqrt(w)
    if s.max() == 0.0 or s.min() <= tol.tol_sing * s.max():
        raise Singular("matrix is not invertible within tolerance")
    positive = (v * s) @ dagger(v)
    unitary = m @ ((v / s) @ dagger(v))
    return unitary, positive


def inverse(m: np.ndarray, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= tol.tol_sing * s[0]:
        raise Singular("matrix is not invertible within tolerance")
    return np.linalg.inv(m)


def unitarity_residual(m) -> float:
    m = as_matrix(m)
    return frobenius_norm(dagger(m) @ m - np.eye(m.shape[0]))


# ----------------------------------------------------------------- groups


AMBIENTS = ("GL", "SL")
FIELDS = ("complex", "real")


@dataclass(frozen=True)
class GroupSpec:
    ambient: str
    dim: int
    field: str = "complex"

    def __post_init__(self):
        if self.ambient not in AMBIENTS:
            raise ValueError(f"ambient must be one of {AMBIENTS}")
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")
        if int(self.dim) < 1:
            raise ValueError("dim must be positive")

    @property
    def is_real(self) -> bool:
        return self.field == "real"

    def validate(self, m, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
        """Check one matrix for membership; returns it as an array.

        GL membership does not test invertibility here; operations that need
        an inverse raise Singular themselves.
        """
        m = as_matrix(m)
        if m.shape[0] != self.dim:
            raise DimensionMismatch(f"expected dim {self.dim}, got {m.shape[0]}")
        if self.ambient == "SL":
            det = np.linalg.det(m)
            if abs(det - 1.0) > tol.tol_det:
                raise InvalidRepresentation(f"|det - 1| = {abs(det - 1.0):.3g} for SL member")
        if self.is_real:
            if imag_max(m) > tol.tol_real:
                raise InvalidRepresentation("real group member has imaginary entries")
            m = realify(m, np.inf)
        return m

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "dim": self.dim, "field": "R" if self.is_real else "C"}

    @classmethod
    def from_json(cls, data: dict) -> "GroupSpec":
        field = {"C": "complex", "R": "real"}.get(data.get("field", "C"), data.get("field"))
        return cls(str(data["ambient"]), int(data["dim"]), field)


# ------------------------------------------------------------------- JSON


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    z = m.astype(complex).ravel()
    return {"dim": int(m.shape[0]), "entries": [[float(c.real), float(c.imag)] for c in z]}


def matrix_from_json(data: dict) -> np.ndarray:
    n = int(data["dim"])
    entries = np.asarray(data["entries"], dtype=float)
    if entries.shape != (n * n, 2):
        raise ValueError(f"matrix JSON needs {n * n} [re, im] pairs")
    z = (entries[:, 0] + 1j * entries[:, 1]).reshape(n, n)
    return as_matrix(realify(z, 0.0))
