"""Kempf-Ness function, moment map, membership tests and the retraction flow.

For a tuple (m_1, ..., m_r) under simultaneous conjugation the function
Psi(g) = sum_j ||g m_j g^-1||^2 has derivative 2 Re tr(H mu) along exp(sH),
where mu = sum_j [m_j, m_j^†] is Hermitian and traceless.  The flow
descends Psi by conjugating with exp(-eta mu).
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import matcore
from .config import DEFAULT, ToleranceConfig
from .errors import ConsistencyWarning, NumericalBreakdown
from .groups import Representation, ball_normality_max
from .matcore import dagger, frobenius_norm

ARMIJO = 1e-4
SHRINK = 0.5
GROW = 2.0
STEP_FLOOR = 1e-16
# bound on ||eta mu||_2 for a single step, keeps exp(-eta mu) well inside float range
MAX_STEP_SPECTRAL = 5.0
PLATEAU_WINDOW = 100
PLATEAU_REL = 1e-10
MEMBERSHIP_BALL_RADIUS = 4


def kn_function(rep: Representation, g, tol: ToleranceConfig = DEFAULT) -> float:
    """sum_j ||g m_j g^-1||_F^2."""
    g = rep.group.validate(g, tol)
    g_inv = matcore.inverse(g, tol)
    return matcore.tuple_norm_sq(g @ m @ g_inv for m in rep.matrices)


@dataclass(frozen=True)
class MomentValue:
    matrix: np.ndarray
    norm: float


def _trace_free(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return m - (np.trace(m) / n) * np.eye(n)


def _moment(matrices) -> np.ndarray:
    # [m, m^†] is unchanged by m -> m - cI; removing the scalar part keeps
    # full relative precision for near-scalar (e.g. unipotent) generators
    shifted = [_trace_free(m) for m in matrices]
    mu = sum(m @ dagger(m) - dagger(m) @ m for m in shifted)
    mu = 0.5 * (mu + dagger(mu))
    # exact tracelessness; the diagonal is real after symmetrization
    n = mu.shape[0]
    return mu - (np.trace(mu).real / n) * np.eye(n)


def moment_map(rep: Representation) -> MomentValue:
    mu = _moment(rep.matrices)
    return MomentValue(mu, frobenius_norm(mu))


def in_kempf_ness_threshold(rep_norm_sq: float, tol: ToleranceConfig) -> float:
    return tol.tol_mu * (1.0 + rep_norm_sq)


@dataclass
class MembershipReport:
    moment_norm: float
    generator_normality: list[float]
    ball_normality_max: float | None
    in_M: bool
    warnings: list[ConsistencyWarning] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "moment_norm": self.moment_norm,
            "generator_normality": list(self.generator_normality),
            "ball_normality_max": self.ball_normality_max,
            "in_M": self.in_M,
            "warnings": [str(w) for w in self.warnings],
        }


def kn_membership(
    rep: Representation,
    tol: ToleranceConfig = DEFAULT,
    ball_radius: int = MEMBERSHIP_BALL_RADIUS,
) -> MembershipReport:
    """Decide membership in the Kempf-Ness set by the moment-map criterion.

    For presentations flagged nilpotent, a positive verdict is cross-checked
    against normality of every word image in the ball of ``ball_radius``;
    disagreement attaches a ConsistencyWarning instead of changing the verdict.
    """
    mu = moment_map(rep)
    nrm2 = rep.norm_sq()
    in_m = mu.norm <= in_kempf_ness_threshold(nrm2, tol)
    report = MembershipReport(
        moment_norm=mu.norm,
        generator_normality=[matcore.normality_residual(m) for m in rep.matrices],
        ball_normality_max=None,
        in_M=bool(in_m),
    )
    if rep.presentation.nilpotent and in_m:
        raw, rel = ball_normality_max(rep, ball_radius, tol)
        report.ball_normality_max = raw
        if rel > tol.tol_normal:
            report.warnings.append(
                ConsistencyWarning(
                    f"moment map vanishes but a word image of length <= {ball_radius} "
                    f"has normality residual {raw:.3g}"
                )
            )
    return report


# ------------------------------------------------------------------- flow


class FlowStep(NamedTuple):
    step: int
    moment_norm: float
    kn_value: float
    step_size: float


class StopReason(str, enum.Enum):
    CONVERGED = "converged"
    BUDGET = "budget"
    DEGENERATION = "degeneration"
    STALLED = "stalled"


@dataclass(frozen=True, eq=False)
class FlowTrace:
    iterates: list[FlowStep]
    final_rep: Representation
    converged: bool
    conjugator_norm: float
    conjugator: np.ndarray
    stop_reason: StopReason
    snapshots: list[Representation] | None = None
    # accurate per-step change of kn; can be far below one ulp of kn_value
    kn_changes: list[float] = field(default_factory=list)

    @property
    def final(self) -> FlowStep:
        return self.iterates[-1]

    @property
    def num_steps(self) -> int:
        return len(self.iterates) - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FlowStep._fields)
        for it in self.iterates:
            w.writerow([it.step, repr(it.moment_norm), repr(it.kn_value), repr(it.step_size)])
        return buf.getvalue()


def plateaued(iterates: list[FlowStep], window: int = PLATEAU_WINDOW, rel: float = PLATEAU_REL) -> bool:
    if len(iterates) <= window:
        return False
    a, b = iterates[-1 - window].kn_value, iterates[-1].kn_value
    return abs(a - b) <= rel * abs(b)


def _conjugation_delta(mats, e_fwd, e_bwd):
    """A m A^-1 - m with A = I + e_fwd, A^-1 = I + e_bwd, without forming A."""
    return [e_fwd @ m + m @ e_bwd + e_fwd @ m @ e_bwd for m in mats]


def flow(
    rep: Representation,
    tol: ToleranceConfig = DEFAULT,
    max_iters: int | None = None,
    record: bool = False,
) -> FlowTrace:
    """Negative gradient flow of the Kempf-Ness function along the orbit.

    Each step conjugates every generator by exp(-eta mu) with eta chosen by
    Armijo backtracking, warm-started from twice the last accepted step.
    Changes in Psi are accumulated from exp(.) - I factors, so descent is
    decided accurately even when the decrease is far below ||rep||^2 * eps.

    The run is converged once the moment norm is below tol_mu (1 + Psi) and
    the last step moved the conjugator by at most sqrt(tol_mu).  A small
    moment map with the conjugator still moving is an orbit escaping to its
    closure; that run stops on a kn plateau once the conjugator passes
    ``tol.diag_cap``, or when the line search runs out of precision.
    """
    if max_iters is None:
        max_iters = tol.max_iters
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    n = rep.dim
    # conjugation fixes the scalar part of each generator: evolve only the
    # trace-free part, so small entries keep their relative precision
    scalars = [np.trace(m) / n for m in rep.matrices]
    mats = [_trace_free(m) for m in rep.matrices]
    real = all(not np.iscomplexobj(m) for m in mats)

    def assemble(parts):
        return rep.with_matrices([m + c * np.eye(n) for m, c in zip(parts, scalars)])

    g = np.eye(n)
    kn = rep.norm_sq()
    mu = _moment(mats)
    mn = frobenius_norm(mu)
    iterates = [FlowStep(0, mn, kn, 0.0)]
    snapshots = [rep] if record else None
    displacement = 0.0
    eta_prev = 0.0
    changes = []
    stop = StopReason.BUDGET
    move_tol = math.sqrt(tol.tol_mu)

    for k in range(1, max_iters + 1):
        small = mn <= tol.tol_mu * (1.0 + kn)
        if small and displacement <= move_tol:
            stop = StopReason.CONVERGED
            break
        g_norm = frobenius_norm(g)
        if g_norm > tol.diag_cap and plateaued(iterates):
            stop = StopReason.DEGENERATION
            break

        spec = float(np.linalg.norm(mu, 2))
        eta = max(0.1 / (1.0 + mn), GROW * eta_prev)
        if spec > 0:
            eta = min(eta, MAX_STEP_SPECTRAL / spec)
        target = 2.0 * mn * mn
        while True:
            if eta < STEP_FLOOR or mn == 0.0:
                if small:
                    stop = StopReason.STALLED
                    break
                raise NumericalBreakdown(
                    f"no descending step above {STEP_FLOOR:g} at iteration {k} "
                    f"(moment norm {mn:.3g}, kn {kn:.6g})"
                )
            e_fwd = matcore.hermitian_expm1(-eta * mu)
            e_bwd = matcore.hermitian_expm1(eta * mu)
            if real:
                e_fwd, e_bwd = e_fwd.real, e_bwd.real
            deltas = _conjugation_delta(mats, e_fwd, e_bwd)
            change = sum(2.0 * np.vdot(m, d).real + np.vdot(d, d).real for m, d in zip(mats, deltas))
            if change < 0 and change <= -ARMIJO * eta * target:
                break
            eta *= SHRINK
        if stop is StopReason.STALLED:
            break

        mats = [m + d for m, d in zip(mats, deltas)]
        g = g + e_fwd @ g
        kn = kn + change
        changes.append(float(change))
        displacement = eta * mn
        eta_prev = eta
        mu = _moment(mats)
        mn = frobenius_norm(mu)
        iterates.append(FlowStep(k, mn, kn, eta))
        if record:
            snapshots.append(assemble(mats))
    else:
        small = mn <= tol.tol_mu * (1.0 + kn)
        if small and displacement <= move_tol:
            stop = StopReason.CONVERGED

    final = assemble(mats) if len(iterates) > 1 else rep
    return FlowTrace(
        iterates=iterates,
        final_rep=final,
        converged=stop is StopReason.CONVERGED,
        conjugator_norm=frobenius_norm(g),
        conjugator=g,
        stop_reason=stop,
        snapshots=snapshots,
        kn_changes=changes,
    )


class Diagnostic(str, enum.Enum):
    POLYSTABLE_LIKELY = "polystable_likely"
    BOUNDARY_DEGENERATION = "boundary_degeneration"
    INCONCLUSIVE = "inconclusive"


def polystable_diagnostic(trace: FlowTrace, tol: ToleranceConfig = DEFAULT) -> Diagnostic:
    """Heuristic reading of a flow trace.

    A converged run with a bounded conjugator points to a closed orbit; a
    kn plateau reached while the conjugator blew past ``tol.diag_cap``
    points to a limit in the orbit closure only.
    """
    if trace.converged and trace.conjugator_norm <= tol.diag_cap:
        return Diagnostic.POLYSTABLE_LIKELY
    if trace.conjugator_norm > tol.diag_cap and plateaued(trace.iterates):
        return Diagnostic.BOUNDARY_DEGENERATION
    return Diagnostic.INCONCLUSIVE
