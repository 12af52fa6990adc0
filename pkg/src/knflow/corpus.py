"""The shipped verification corpus run by ``knf verify``.

Each case builds a representation (or a small seeded property sweep),
measures named metrics and checks them against frozen expectations.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matcore
from .config import ToleranceConfig
from .groups import Representation, Word, builtin_presentation, relation_residual, word_ball, word_evaluate
from .invariants import quotient_compare, trace_invariants, unitary_orbit_distance
from .kempfness import kn_function, kn_membership, moment_map, polystable_diagnostic, flow
from .matcore import GroupSpec
from .sampling import random_conjugator, random_unitary, sample
from .scaling import full_retract, homomorphism_defect, scale_matrix, scale_rep, stage_one

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Expectation:
    metric: str
    expected: float
    tolerance: float = 0.0
    op: str = "eq"  # eq: |x - e| <= tol, le: x <= e, ge: x >= e

    def check(self, value) -> bool:
        if value is None or not np.isfinite(value):
            return False
        if self.op == "le":
            return value <= self.expected
        if self.op == "ge":
            return value >= self.expected
        return abs(value - self.expected) <= self.tolerance


@dataclass
class CorpusCase:
    id: str
    measure: Callable[[ToleranceConfig], dict]
    expectations: list[Expectation]
    representation: Representation | None = None


@dataclass
class CaseResult:
    id: str
    passed: bool
    measured: dict
    failures: list[str] = field(default_factory=list)
    error: str | None = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = {"id": self.id, "passed": self.passed, "measured": self.measured, "seconds": round(self.seconds, 3)}
        if self.failures:
            out["failures"] = self.failures
        if self.error:
            out["error"] = self.error
        return out


def run_case(case: CorpusCase, tol: ToleranceConfig) -> CaseResult:
    t0 = time.perf_counter()
    try:
        measured = case.measure(tol)
    except Exception as exc:  # a raised error is a failed case, not a crash
        return CaseResult(case.id, False, {}, error=f"{type(exc).__name__}: {exc}",
                          seconds=time.perf_counter() - t0)
    failures = []
    for e in case.expectations:
        v = measured.get(e.metric)
        if not e.check(v):
            failures.append(f"{e.metric}={v!r} violates {e.op} {e.expected!r} (tol {e.tolerance!r})")
    measured = {k: (float(v) if isinstance(v, (int, float, np.floating, np.integer, bool)) else v)
                for k, v in measured.items()}
    return CaseResult(case.id, not failures, measured, failures, seconds=time.perf_counter() - t0)


# ------------------------------------------------------------ fixtures


def rep_of(name: str, mats, ambient: str = "SL", field_: str = "complex") -> Representation:
    mats = [np.asarray(m) for m in mats]
    return Representation(builtin_presentation(name), GroupSpec(ambient, mats[0].shape[0], field_), tuple(mats))


def semidirect_example(lam: float = 2.0, three_generators: bool = False) -> Representation:
    """Z x| Z/4 into SL_2: s -> J, t -> diag(lam, 1/lam), u = t s."""
    t = np.diag([lam, 1.0 / lam])
    if three_generators:
        return rep_of("z_semi_z4:3gen", [J, t, t @ J])
    return rep_of("z_semi_z4:2gen", [J, t])


def heisenberg_integer() -> Representation:
    x, y, z = np.eye(3), np.eye(3), np.eye(3)
    x[0, 1] = y[1, 2] = z[0, 2] = 1.0
    return rep_of("heisenberg3", [x, y, z], field_="real")


def conjugated_diagonal_pair(rng: np.random.Generator) -> Representation:
    g = random_conjugator(rng, 2)
    g_inv = np.linalg.inv(g)
    return rep_of("abelian:2", [g @ np.diag([2.0, 0.5]) @ g_inv, g @ np.diag([3.0, 1 / 3]) @ g_inv])


WORD_TS = Word.of((1, 1), (0, 1))  # t s in the 2-generator convention


# --------------------------------------------------------------- cases


def _semidirect_2gen(tol):
    rep = semidirect_example()
    rep.validate(tol)
    rpt = kn_membership(rep, tol)
    return {
        "moment_norm": rpt.moment_norm,
        "in_M": float(rpt.in_M),
        "relation_residual": relation_residual(rep),
        "word_ts_normality": matcore.normality_residual(word_evaluate(rep, WORD_TS)),
        "defect_ts_t1": homomorphism_defect(rep, 1.0, [WORD_TS], tol),
    }


def _semidirect_3gen(tol):
    rep = semidirect_example(three_generators=True)
    rep.validate(tol)
    rpt = kn_membership(rep, tol)
    return {"moment_norm": rpt.moment_norm, "in_M": float(rpt.in_M), "relation_residual": relation_residual(rep)}


def _free_control(tol):
    rep = rep_of("free:2", [[[0, 2], [0.5, 0]], [[0, 0.5], [2, 0]]], ambient="GL")
    rpt = kn_membership(rep, tol)
    return {
        "moment_norm": rpt.moment_norm,
        "normality_0": rpt.generator_normality[0],
        "normality_1": rpt.generator_normality[1],
    }


def _abelian_normal(tol):
    rep = rep_of("abelian:2", [np.diag([2, 0.5]), np.diag([3j, -1j / 3])], ambient="GL")
    rpt = kn_membership(rep, tol)
    return {
        "in_M": float(rpt.in_M),
        "max_generator_normality": max(rpt.generator_normality),
        "ball_normality_max": rpt.ball_normality_max,
        "warnings": float(len(rpt.warnings)),
    }


def _single_moment(tol):
    mu = moment_map(rep_of("free:1", [[[0, 2], [-0.5, 0]]]))
    return {"mu_00": mu.matrix[0, 0].real, "mu_11": mu.matrix[1, 1].real, "norm": mu.norm}


def _kn_values(tol):
    pair = rep_of("abelian:2", [np.diag([2, 0.5]), J])
    nil = rep_of("free:1", [[[0, 1], [0, 0]]], ambient="GL")
    u = random_unitary(np.random.default_rng(tol.seed), 2)
    u = u / np.linalg.det(u) ** 0.5
    return {
        "pair_identity": kn_function(pair, np.eye(2), tol),
        "pair_unitary_gap": abs(kn_function(pair, u, tol) - kn_function(pair, np.eye(2), tol)),
        "nilpotent_scaled": kn_function(nil, np.diag([2, 0.5]), tol),
    }


def _relation_residuals(tol):
    noncommuting = rep_of("abelian:2", [np.diag([2, 0.5]), J])
    commuting = rep_of("abelian:2", [np.diag([2, 0.5]), np.diag([3, 1 / 3])])
    return {"noncommuting": relation_residual(noncommuting), "commuting": relation_residual(commuting)}


def _flow_unitary(tol):
    rng = np.random.default_rng(tol.seed)
    rep = rep_of("abelian:2", [np.diag([1j, -1j]), np.diag(np.exp([0.3j, -0.3j]))]).conjugate(
        *(lambda u: (u, u.conj().T))(random_unitary(rng, 2))
    )
    tr = flow(rep, tol)
    return {
        "converged": float(tr.converged),
        "rows": float(len(tr.iterates)),
        "final_change": max(matcore.frobenius_norm(a - b) for a, b in zip(tr.final_rep.matrices, rep.matrices)),
        "diagnostic_polystable": float(polystable_diagnostic(tr, tol).value == "polystable_likely"),
    }


def _flow_conjugated(tol):
    rep = conjugated_diagonal_pair(np.random.default_rng(tol.seed + 1))
    tr = flow(rep, tol)
    return {
        "converged": float(tr.converged),
        "max_normality": max(matcore.normality_residual(m) for m in tr.final_rep.matrices),
        "kn_excess": tr.final.kn_value - (4.25 + 9 + 1 / 9),
    }


def _flow_heisenberg(tol):
    tr = flow(heisenberg_integer(), tol)
    kn = [it.kn_value for it in tr.iterates]
    return {
        "boundary_degeneration": float(polystable_diagnostic(tr, tol).value == "boundary_degeneration"),
        "kn_gap_to_9": tr.final.kn_value - 9.0,
        "monotone": float(all(b <= a for a, b in zip(kn, kn[1:]))),
        "max_imag": max(s for s in [tr.final_rep.max_imag()]),
    }


def _scaling_examples(tol):
    return {
        "diag_t1": matcore.frobenius_norm(scale_matrix(np.diag([2, 0.5]), 1.0, tol) - np.eye(2)),
        "diag_half": matcore.frobenius_norm(scale_matrix(np.diag([4, 0.25]), 0.5, tol) - np.diag([2, 0.5])),
        "unitary_fixed": max(matcore.frobenius_norm(scale_matrix(J, t, tol) - J) for t in (0, 0.25, 0.5, 1)),
    }


def _scale_rep_examples(tol):
    a = scale_rep(rep_of("abelian:2", [np.diag([2, 0.5]), np.diag([3, 1 / 3])]), 1.0, tol)
    b = scale_rep(rep_of("abelian:2", [np.diag([2j, 0.5j]), np.diag([-3, -1 / 3])], ambient="GL"), 1.0, tol)
    return {
        "positive_to_identity": max(matcore.frobenius_norm(m - np.eye(2)) for m in a.matrices),
        "phases_kept": max(
            matcore.frobenius_norm(b.matrices[0] - 1j * np.eye(2)),
            matcore.frobenius_norm(b.matrices[1] + np.eye(2)),
        ),
    }


def _homomorphism(tol):
    rep = sample("abelian-normal:3,2", 1, tol.seed)[0]
    return {
        "defect_ball2": homomorphism_defect(rep, 0.7, word_ball(rep.presentation, 2), tol),
        "defect_t0": homomorphism_defect(rep, 0.0, word_ball(rep.presentation, 2), tol),
    }


def _retract(tol):
    rep = conjugated_diagonal_pair(np.random.default_rng(tol.seed + 2))
    trace = stage_one(rep, tol)
    snaps = [full_retract(rep, t, tol, trace) for t in (0.0, 0.5, 1.0)]
    last = snaps[-1]
    return {
        "t0_change": max(matcore.frobenius_norm(a - b) for a, b in zip(snaps[0].matrices, rep.matrices)),
        "t1_unitarity": max(matcore.unitarity_residual(m) for m in last.matrices),
        "t1_relation": relation_residual(last),
        "t1_identity_gap": max(matcore.frobenius_norm(m - np.eye(2)) for m in last.matrices),
    }


def _real_case(tol):
    worst_imag, worst_orth = 0.0, 0.0
    for rep in sample("real-abelian-conjugated:3,2", 5, tol.seed):
        tr = flow(rep, tol, record=True)
        worst_imag = max(worst_imag, max(s.max_imag() for s in tr.snapshots))
        out = full_retract(rep, 1.0, tol)
        worst_imag = max(worst_imag, out.max_imag())
        worst_orth = max(worst_orth, max(matcore.unitarity_residual(m) for m in out.matrices))
    return {"max_imag": worst_imag, "orthogonality": worst_orth}


def _trace_inv(tol):
    rep = rep_of("abelian:2", [np.diag([2, 0.5]), np.diag([3, 1 / 3])])
    words = [Word.of((0, 1)), Word.of((1, 1)), Word.of((0, 1), (1, 1)), Word()]
    v = trace_invariants(rep, words, tol).values
    return {"x": v[0].real, "y": v[1].real, "xy": v[2].real, "empty": v[3].real}


def _orbit_distance(tol):
    a = rep_of("free:1", [np.diag([2, 0.5])])
    return {
        "swap": unitary_orbit_distance(a, rep_of("free:1", [np.diag([0.5, 2])]), 8, tol),
        "distinct": unitary_orbit_distance(a, rep_of("free:1", [np.diag([3, 1 / 3])]), 8, tol),
    }


def _quotient(tol):
    a = rep_of("abelian:1", [np.diag([2, 0.5])])
    b = rep_of("abelian:1", [np.diag([3, 1 / 3])])
    h = heisenberg_integer()
    triv = h.with_matrices([np.eye(3)] * 3)
    c = conjugated_diagonal_pair(np.random.default_rng(tol.seed + 3))
    g = random_conjugator(np.random.default_rng(tol.seed + 4), 2)
    return {
        "distinct_diagonal": float(quotient_compare(a, b, tol).value == "different_point"),
        "heisenberg_vs_trivial": float(quotient_compare(h, triv, tol).value == "same_point"),
        "conjugate_pair": float(quotient_compare(c, c.conjugate(g), tol).value == "same_point"),
    }


def _polar(tol):
    m = np.array([[0, 2], [-0.5, 0.0]])
    u, p = matcore.polar_decompose(m, tol)
    return {"unitary_err": matcore.frobenius_norm(u - J), "positive_err": matcore.frobenius_norm(p - np.diag([0.5, 2]))}


def _schur_gap(tol):
    rng = np.random.default_rng(tol.seed)
    worst_gap, mismatches = 0.0, 0
    for k in range(100):
        n = int(rng.integers(2, 7))
        if k % 2:
            q = random_unitary(rng, n)
            m = (q * (rng.normal(size=n) + 1j * rng.normal(size=n))) @ q.conj().T
        else:
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        nrm2 = matcore.frobenius_norm(m) ** 2
        gap = nrm2 - float(np.sum(np.abs(np.linalg.eigvals(m)) ** 2))
        worst_gap = min(worst_gap, gap / nrm2)
        if (gap <= 1e-8 * nrm2) != (matcore.normality_residual(m) <= 1e-8 * (1 + nrm2)):
            mismatches += 1
    return {"min_relative_gap": worst_gap, "iff_mismatches": float(mismatches)}


def _gradient(tol):
    rng = np.random.default_rng(tol.seed)
    worst = 0.0
    for _ in range(20):
        n, r = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        rep = sample(f"free-generic:{n},{r}", 1, int(rng.integers(2**31)))[0]
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = h + h.conj().T
        h -= np.trace(h) / n * np.eye(n)
        h /= matcore.frobenius_norm(h)
        step = 1e-5
        fd = (kn_function(rep, matcore.hermitian_exp(step * h), tol)
              - kn_function(rep, matcore.hermitian_exp(-step * h), tol)) / (2 * step)
        exact = 2.0 * np.trace(h @ moment_map(rep).matrix).real
        worst = max(worst, abs(fd - exact) / max(abs(exact), 1e-12))
    return {"max_relative_error": worst}


def build_corpus() -> list[CorpusCase]:
    r375 = 3.75 * SQRT2
    eq = Expectation
    return [
        CorpusCase("semidirect_2gen", _semidirect_2gen, [
            eq("moment_norm", 1e-12, op="le"), eq("in_M", 1.0), eq("relation_residual", 1e-12, op="le"),
            eq("word_ts_normality", r375, 1e-9), eq("defect_ts_t1", 0.1, op="ge"),
        ], semidirect_example()),
        CorpusCase("semidirect_3gen", _semidirect_3gen, [
            eq("moment_norm", r375, 1e-9), eq("in_M", 0.0), eq("relation_residual", 1e-12, op="le"),
        ], semidirect_example(three_generators=True)),
        CorpusCase("free_negative_control", _free_control, [
            eq("moment_norm", 1e-12, op="le"), eq("normality_0", r375, 1e-9), eq("normality_1", r375, 1e-9),
        ]),
        CorpusCase("abelian_normal_member", _abelian_normal, [
            eq("in_M", 1.0), eq("max_generator_normality", 1e-14, op="le"),
            eq("ball_normality_max", 1e-12, op="le"), eq("warnings", 0.0),
        ]),
        CorpusCase("moment_single", _single_moment, [
            eq("mu_00", 3.75, 1e-12), eq("mu_11", -3.75, 1e-12), eq("norm", r375, 1e-12),
        ]),
        CorpusCase("kn_function_values", _kn_values, [
            eq("pair_identity", 6.25, 1e-12), eq("pair_unitary_gap", 1e-10, op="le"),
            eq("nilpotent_scaled", 16.0, 1e-12),
        ]),
        CorpusCase("relation_residuals", _relation_residuals, [
            eq("noncommuting", math.sqrt(9.5625), 1e-12), eq("commuting", 1e-15, op="le"),
        ]),
        CorpusCase("flow_unitary_fixed", _flow_unitary, [
            eq("converged", 1.0), eq("rows", 1.0), eq("final_change", 0.0), eq("diagnostic_polystable", 1.0),
        ]),
        CorpusCase("flow_conjugated_diagonal", _flow_conjugated, [
            eq("converged", 1.0), eq("max_normality", 1e-6, op="le"), eq("kn_excess", 1e-6, op="le"),
        ]),
        CorpusCase("flow_heisenberg_degeneration", _flow_heisenberg, [
            eq("boundary_degeneration", 1.0), eq("kn_gap_to_9", 1e-9, op="le"), eq("monotone", 1.0),
        ], heisenberg_integer()),
        CorpusCase("scaling_examples", _scaling_examples, [
            eq("diag_t1", 1e-12, op="le"), eq("diag_half", 1e-12, op="le"), eq("unitary_fixed", 1e-12, op="le"),
        ]),
        CorpusCase("scale_rep_examples", _scale_rep_examples, [
            eq("positive_to_identity", 1e-12, op="le"), eq("phases_kept", 1e-12, op="le"),
        ]),
        CorpusCase("homomorphism_commuting", _homomorphism, [
            eq("defect_ball2", 1e-9, op="le"), eq("defect_t0", 0.0),
        ]),
        CorpusCase("full_retract_conjugated", _retract, [
            eq("t0_change", 0.0), eq("t1_unitarity", 1e-8, op="le"), eq("t1_relation", 1e-7, op="le"),
            eq("t1_identity_gap", 1e-6, op="le"),
        ]),
        CorpusCase("real_case", _real_case, [eq("max_imag", 1e-11, op="le"), eq("orthogonality", 1e-8, op="le")]),
        CorpusCase("trace_invariants", _trace_inv, [
            eq("x", 2.5, 1e-12), eq("y", 10 / 3, 1e-12), eq("xy", 37 / 6, 1e-12), eq("empty", 2.0, 1e-12),
        ]),
        CorpusCase("orbit_distance", _orbit_distance, [
            eq("swap", 1e-7, op="le"), eq("distinct", 1.0 - 1e-6, op="ge"),
        ]),
        CorpusCase("quotient_compare", _quotient, [
            eq("distinct_diagonal", 1.0), eq("heisenberg_vs_trivial", 1.0), eq("conjugate_pair", 1.0),
        ]),
        CorpusCase("polar_example", _polar, [eq("unitary_err", 1e-12, op="le"), eq("positive_err", 1e-12, op="le")]),
        CorpusCase("prop_schur_gap", _schur_gap, [
            eq("min_relative_gap", -1e-9, op="ge"), eq("iff_mismatches", 0.0),
        ]),
        CorpusCase("prop_gradient", _gradient, [eq("max_relative_error", 1e-4, op="le")]),
    ]


def run_corpus(tol: ToleranceConfig) -> dict:
    results = sorted((run_case(c, tol) for c in build_corpus()), key=lambda r: r.id)
    return {
        "passed": all(r.passed for r in results),
        "num_cases": len(results),
        "num_failed": sum(not r.passed for r in results),
        "seed": tol.seed,
        "cases": [r.to_json() for r in results],
    }
