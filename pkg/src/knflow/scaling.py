"""Eigenvalue scaling and the two-stage retraction onto the compact form."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matcore
from .config import DEFAULT, ToleranceConfig
from .errors import FlowNotConverged, NotInKempfNessSet, Singular
from .groups import Representation, Word, word_evaluate
from .kempfness import Diagnostic, FlowTrace, flow, polystable_diagnostic
from .matcore import dagger

# Stage one must land close enough to the Kempf-Ness set for the generator
# normality check in scale_rep; 1e-8 relative leaves residuals near 1e-7.
STAGE_ONE_TOL_MU = 1e-12


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"scaling parameter must lie in [0, 1], got {t}")
    return t


def scale_eigenvalues(lam: np.ndarray, t: float) -> np.ndarray:
    """lambda -> exp(-t log|lambda|) lambda."""
    return lam * np.abs(lam) ** (-t)


def is_normal(m: np.ndarray, tol: ToleranceConfig = DEFAULT) -> bool:
    return matcore.normality_residual(m) <= tol.tol_normal * (1.0 + matcore.frobenius_norm(m) ** 2)


def scale_matrix(m, t: float, tol: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Scale every eigenvalue modulus from |lambda| to |lambda|^(1-t), keeping eigenvectors.

    Normal input goes through a unitary Schur basis; anything else through
    the general eigendecomposition (NonSemisimple if defective).  Real input
    returns a real matrix: the spectrum is closed under conjugation, so the
    imaginary part of the result is roundoff and is dropped.
    """
    m = matcore.as_matrix(m)
    t = _check_t(t)
    if t == 0.0:
        return m.copy()
    if is_normal(m, tol):
        dec = matcore.spectral_decompose(m, tol)
        basis, basis_inv = dec.basis, dagger(dec.basis)
    else:
        dec = matcore.eigendecompose(m, tol)
        basis, basis_inv = dec.basis, np.linalg.inv(dec.basis)
    lam = dec.eigenvalues
    if np.min(np.abs(lam)) <= tol.tol_sing * max(1.0, float(np.max(np.abs(lam)))):
        raise Singular("zero eigenvalue: log|lambda| undefined")
    out = (basis * scale_eigenvalues(lam, t)) @ basis_inv
    if not np.iscomplexobj(m):
        out = np.ascontiguousarray(out.real)
    return out


@dataclass(frozen=True)
class ScalingPath:
    t: float
    input: np.ndarray
    output: np.ndarray


def scaling_path(m, t: float, tol: ToleranceConfig = DEFAULT) -> ScalingPath:
    m = matcore.as_matrix(m)
    return ScalingPath(float(t), m, scale_matrix(m, t, tol))


def scale_rep(rep: Representation, t: float, tol: ToleranceConfig = DEFAULT) -> Representation:
    """Apply scale_matrix generator-wise to a representation with normal generators."""
    t = _check_t(t)
    for i, m in enumerate(rep.matrices):
        if not is_normal(m, tol):
            raise NotInKempfNessSet(
                f"generator {i} has normality residual {matcore.normality_residual(m):.3g}"
            )
    if t == 0.0:
        return rep
    return rep.with_matrices([scale_matrix(m, t, tol) for m in rep.matrices])


def homomorphism_defect(
    rep: Representation, t: float, words: Sequence[Word], tol: ToleranceConfig = DEFAULT
) -> float:
    """max_w ||sigma_t(rep(w)) - (sigma_t o rep)(w)||_F."""
    t = _check_t(t)
    scaled = scale_rep(rep, t, tol)
    if t == 0.0:
        return 0.0
    worst = 0.0
    for w in words:
        direct = scale_matrix(word_evaluate(rep, w, tol), t, tol)
        composed = word_evaluate(scaled, w, tol)
        worst = max(worst, matcore.frobenius_norm(direct - composed))
    return worst


def stage_one(rep: Representation, tol: ToleranceConfig = DEFAULT) -> FlowTrace:
    """Flow to the Kempf-Ness set, recording every iterate.

    A run that ends in orbit-closure degeneration is accepted: its last
    iterate approximates the limit point in the closure.
    """
    stage_tol = tol.replace(tol_mu=min(tol.tol_mu, STAGE_ONE_TOL_MU))
    trace = flow(rep, stage_tol, record=True)
    if not trace.converged and polystable_diagnostic(trace, stage_tol) is not Diagnostic.BOUNDARY_DEGENERATION:
        raise FlowNotConverged(
            f"stage-one flow stopped ({trace.stop_reason.value}) after {trace.num_steps} steps "
            f"with moment norm {trace.final.moment_norm:.3g}"
        )
    return trace


def full_retract(
    rep: Representation,
    t: float,
    tol: ToleranceConfig = DEFAULT,
    trace: FlowTrace | None = None,
) -> Representation:
    """Deform rep towards a representation into the unitary group.

    t in [0, 1/2] walks the stage-one flow by iteration fraction 2t; t in
    (1/2, 1] scales the flow limit with parameter 2t - 1.  A precomputed
    stage_one trace may be passed to share it across several t.
    """
    t = _check_t(t)
    if not rep.presentation.nilpotent:
        raise ValueError(f"presentation {rep.presentation.name!r} is not flagged nilpotent")
    if t == 0.0:
        return rep
    if trace is None:
        trace = stage_one(rep, tol)
    snaps = trace.snapshots
    if t <= 0.5:
        return snaps[min(math.floor(2.0 * t * trace.num_steps), trace.num_steps)]
    return scale_rep(snaps[-1], 2.0 * t - 1.0, tol)
