"""Conjugation-invariant coordinates and point comparison in the quotient."""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matcore
from .config import DEFAULT, ToleranceConfig
from .errors import DimensionMismatch
from .groups import Representation, Word, evaluate_ball, word_evaluate
from .matcore import dagger
from .sampling import random_unitary
from .scaling import stage_one

QUOTIENT_BALL_RADIUS = 3


@dataclass(frozen=True)
class InvariantVector:
    words: tuple[Word, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.words) != len(self.values):
            raise ValueError("words and values differ in length")

    def to_json(self) -> dict:
        return {
            "words": [w.to_json() for w in self.words],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "InvariantVector":
        vals = np.array([complex(re, im) for re, im in data["values"]], dtype=complex)
        return cls(tuple(Word.from_json(w) for w in data["words"]), vals)


def trace_invariants(
    rep: Representation, words: Sequence[Word], tol: ToleranceConfig = DEFAULT
) -> InvariantVector:
    vals = np.array([np.trace(word_evaluate(rep, w, tol)) for w in words], dtype=complex)
    return InvariantVector(tuple(words), vals)


def ball_invariants(rep: Representation, radius: int, tol: ToleranceConfig = DEFAULT) -> InvariantVector:
    words, vals = [], []
    for w, img in evaluate_ball(rep, radius, tol):
        words.append(w)
        vals.append(np.trace(img))
    return InvariantVector(tuple(words), np.array(vals, dtype=complex))


# --------------------------------------------------------- orbit distance


def _cayley(w: np.ndarray) -> np.ndarray:
    """(I - w/2)^-1 (I + w/2); unitary for skew-Hermitian w."""
    eye = np.eye(w.shape[0])
    return np.linalg.solve(eye - 0.5 * w, eye + 0.5 * w)


def _residuals(a_mats, b_mats, u):
    ud = dagger(u)
    conj = [u @ b @ ud for b in b_mats]
    return conj, [a - c for a, c in zip(a_mats, conj)]


# a start whose residual is below this (relative) is an exact match
EXACT_MATCH = 1e-24


def _descend(a_mats, b_mats, u: np.ndarray, max_iters: int = 3000) -> tuple[float, np.ndarray]:
    """Riemannian descent of sum_j ||a_j - u b_j u^†||^2 with Cayley steps.

    Stops at an exact match, or at a stationary point of positive value.
    """
    scale = max(matcore.tuple_norm_sq(a_mats) + matcore.tuple_norm_sq(b_mats), 1e-300)
    conj, res = _residuals(a_mats, b_mats, u)
    f = matcore.tuple_norm_sq(res)
    eta = 0.1 / (1.0 + scale)
    for _ in range(max_iters):
        if f <= EXACT_MATCH * scale:
            break
        # d/ds f(exp(sX) u) = Re <grad, X> over skew-Hermitian X
        e = -2.0 * sum(r @ dagger(c) - dagger(c) @ r for r, c in zip(res, conj))
        grad = 0.5 * (e - dagger(e))
        gn2 = np.vdot(grad, grad).real
        if gn2 <= 1e-32 * scale * scale or gn2 <= 1e-16 * scale * f:
            break
        eta *= 2.0
        while eta > 1e-20:
            u_new = _cayley(-eta * grad) @ u
            conj_new, res_new = _residuals(a_mats, b_mats, u_new)
            f_new = matcore.tuple_norm_sq(res_new)
            if f_new <= f - 1e-4 * eta * gn2:
                break
            eta *= 0.5
        else:
            break
        u, conj, res, f = u_new, conj_new, res_new, f_new
    return f, u


def _aligned_starts(a_mats, b_mats, tol: ToleranceConfig) -> list[np.ndarray]:
    """Unitaries matching the sorted spectral bases of paired normal generators."""
    starts = []
    for a, b in zip(a_mats, b_mats):
        try:
            qa = matcore.spectral_decompose(a, tol).basis
            qb = matcore.spectral_decompose(b, tol).basis
        except Exception:
            continue
        starts.append(qa @ dagger(qb))
    return starts


def unitary_orbit_distance(
    a: Representation,
    b: Representation,
    restarts: int = 8,
    tol: ToleranceConfig = DEFAULT,
    seed: int | None = None,
    workers: int = 1,
) -> float:
    """Upper bound on min over unitary u of sqrt(sum_j ||a_j - u b_j u^†||^2).

    Descent is started from the identity, from spectral alignments of the
    generators, and from ``restarts`` seeded Haar-random unitaries; the best
    value found is returned.
    """
    if a.dim != b.dim or a.rank != b.rank:
        raise DimensionMismatch("representations differ in dimension or rank")
    rng = np.random.default_rng(tol.seed if seed is None else seed)
    a_mats = [m.astype(complex) for m in a.matrices]
    b_mats = [m.astype(complex) for m in b.matrices]
    starts = [np.eye(a.dim, dtype=complex)] + _aligned_starts(a_mats, b_mats, tol)
    starts += [random_unitary(rng, a.dim) for _ in range(restarts)]

    def run(u0):
        return _descend(a_mats, b_mats, u0)[0]

    exact = EXACT_MATCH * (matcore.tuple_norm_sq(a_mats) + matcore.tuple_norm_sq(b_mats))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(run, starts))
    else:
        values = []
        for u0 in starts:
            values.append(run(u0))
            if values[-1] <= exact:
                break
    return float(np.sqrt(max(min(values), 0.0)))


# --------------------------------------------------------------- quotient


class Verdict(str, enum.Enum):
    SAME_POINT = "same_point"
    DIFFERENT_POINT = "different_point"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Comparison:
    verdict: Verdict
    invariant_gap: float
    orbit_distance: float | None


def invariant_gap(va: InvariantVector, vb: InvariantVector) -> float:
    """Largest entrywise difference, relative to (1 + largest magnitude)."""
    scale = 1.0 + max(float(np.max(np.abs(va.values))), float(np.max(np.abs(vb.values))))
    return float(np.max(np.abs(va.values - vb.values))) / scale


def compare(
    a: Representation,
    b: Representation,
    tol: ToleranceConfig = DEFAULT,
    radius: int = QUOTIENT_BALL_RADIUS,
    restarts: int = 8,
) -> Comparison:
    if a.presentation != b.presentation:
        raise ValueError("representations must share a presentation")
    if a.dim != b.dim:
        raise DimensionMismatch("representations differ in dimension")
    fa = stage_one(a, tol).final_rep
    fb = stage_one(b, tol).final_rep
    gap = invariant_gap(ball_invariants(fa, radius, tol), ball_invariants(fb, radius, tol))
    if gap > tol.tol_sep:
        return Comparison(Verdict.DIFFERENT_POINT, gap, None)
    dist = unitary_orbit_distance(fa, fb, restarts, tol)
    verdict = Verdict.SAME_POINT if dist <= tol.tol_orbit else Verdict.UNDECIDED
    return Comparison(verdict, gap, dist)


def quotient_compare(
    a: Representation, b: Representation, tol: ToleranceConfig = DEFAULT, **kwargs
) -> Verdict:
    """Decide whether a and b define the same point of the quotient by conjugation.

    Both are flowed to the Kempf-Ness set first.  Differing trace invariants
    are conclusive; agreement is only upgraded to same_point when the two
    limits are also close up to unitary conjugation.
    """
    return compare(a, b, tol, **kwargs).verdict
