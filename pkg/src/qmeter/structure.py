"""Efficiency and irreducibility of discrete instruments.

An operation is efficient when, after merging collinear Kraus operators, a
single Kraus operator is left. A non-efficient operation is still
irreducible when all of its Kraus operators are rank one with a common
range vector psi, i.e. A_k = |psi><w_k|; its posteriori state is then
|psi><psi| whatever the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import QuantumChannel, choi
from .errors import ClassificationError, ConsistencyError
from .linalg import (
    fix_phases,
    as_matrix,
    clamp_spectrum,
    dag,
    eigvals_hermitian,
    max_abs,
    partial_trace,
    sine_distance,
    support_projector,
)
from .measurement import KrausMeasurement, as_instrument, outcome_distribution, posteriori
from .entropy import PROB_CUTOFF
from .sampling import haar_pure_state

COLLINEAR_TOL = 1e-8
RANK_ONE_TOL = 1e-10
PURITY_TOL = 1e-8
CERTIFICATE_TOL = 1e-8
SPECTRUM_TOL = 1e-8
ZERO_NORM = 1e-12


def reduce_collinear(kraus) -> list[np.ndarray]:
    """Merge proportional Kraus operators.

    A group {V, l_2 V, l_3 V, ...} becomes the single operator
    sqrt(1 + |l_2|^2 + ...) V; the CP map sum K rho K^dag is unchanged.
    Operators with norm below 1e-12 are dropped.
    """
    reps: list[np.ndarray] = []
    weights: list[float] = []
    for k in kraus:
        k = as_matrix(k)
        if np.linalg.norm(k) < ZERO_NORM:
            continue
        for idx, rep in enumerate(reps):
            if sine_distance(rep, k) <= COLLINEAR_TOL:
                lam = np.vdot(rep, k) / np.vdot(rep, rep)
                weights[idx] += abs(lam) ** 2
                break
        else:
            reps.append(k)
            weights.append(1.0)
    return [np.sqrt(w) * r for r, w in zip(reps, weights)]


def is_efficient(m) -> tuple[bool, list[int]]:
    """(verdict, Kraus count per outcome after collinear reduction)."""
    m = as_instrument(m)
    counts = [len(reduce_collinear(op)) for op in m.operations]
    return all(c <= 1 for c in counts), counts


def as_kraus_measurement(m) -> KrausMeasurement:
    """Rewrite an efficient instrument as {V_i}; raise for anything else."""
    if isinstance(m, KrausMeasurement):
        return m
    m = as_instrument(m)
    ks = []
    for op in m.operations:
        red = reduce_collinear(op)
        if len(red) > 1:
            raise ClassificationError(
                "instrument is not efficient; use entropy_reduction_direct for general instruments"
            )
        ks.append(red[0] if red else np.zeros((m.d_out, m.d_in), dtype=complex))
    return KrausMeasurement(ks, m.labels)


@dataclass(frozen=True)
class CommonRange:
    """A_k = |psi><w_k| for every nonzero Kraus operator of an operation."""

    psi: np.ndarray
    functionals: tuple
    residual: float


def common_range_decomposition(op_kraus) -> CommonRange | None:
    """Find the shared one-dimensional range of an operation's Kraus operators.

    Returns ``None`` when some nonzero Kraus operator has rank above one
    (second singular value > 1e-10) or two ranges are not parallel.
    """
    mats = [as_matrix(k) for k in op_kraus]
    mats = [k for k in mats if np.linalg.norm(k) >= ZERO_NORM]
    if not mats:
        return None
    lefts = []
    for k in mats:
        u, s, _ = np.linalg.svd(k)
        if len(s) > 1 and s[1] > RANK_ONE_TOL:
            return None
        lefts.append(u[:, 0])
    psi = fix_phases(lefts[0].reshape(-1, 1))[:, 0]
    if any(sine_distance(psi, v) > COLLINEAR_TOL for v in lefts[1:]):
        return None
    funcs = tuple(dag(k) @ psi for k in mats)
    residual = max(max_abs(k - np.outer(psi, w.conj())) for k, w in zip(mats, funcs))
    if residual > RANK_ONE_TOL:
        return None
    return CommonRange(psi, funcs, residual)


@dataclass
class OperationEvidence:
    label: str
    kind: str  # "efficient", "common-range", "reducible" or "zero"
    kraus_count: int
    reduced_count: int
    psi: np.ndarray | None = None


@dataclass
class ClassificationReport:
    efficient: bool
    irreducible: bool
    operations: list = field(default_factory=list)
    monte_carlo_purity: float = 1.0
    trials: int = 0
    mixed_witness: np.ndarray | None = None


def classify_operation(label: str, op) -> OperationEvidence:
    red = reduce_collinear(op)
    if not red:
        return OperationEvidence(label, "zero", len(op), 0)
    if len(red) == 1:
        return OperationEvidence(label, "efficient", len(op), 1)
    cr = common_range_decomposition(red)
    if cr is not None:
        return OperationEvidence(label, "common-range", len(op), len(red), cr.psi)
    return OperationEvidence(label, "reducible", len(op), len(red))


def posteriori_purity_scan(m, trials: int, rng: np.random.Generator):
    """Worst posteriori purity Tr rho_i^2 over ``trials`` Haar-random pure inputs."""
    m = as_instrument(m)
    worst, witness = 1.0, None
    for _ in range(trials):
        rho = haar_pure_state(m.d_in, rng)
        ens = posteriori(m, rho)
        for s in ens.states:
            if s is None:
                continue
            purity = float(np.real(np.trace(s @ s)))
            if purity < worst:
                worst, witness = purity, rho
    return worst, witness


def is_irreducible(m, trials: int = 64, seed: int = 0) -> tuple[bool, ClassificationReport]:
    """Structural irreducibility verdict, cross-checked by purity sampling.

    Every operation must either reduce to one Kraus operator or have a
    common one-dimensional range. The verdict is then compared with the
    worst posteriori purity over ``trials`` random pure inputs.

    Raises:
        ConsistencyError: if the structural and sampled verdicts differ.
    """
    m = as_instrument(m)
    evidence = [classify_operation(lbl, op) for lbl, op in zip(m.labels, m.operations)]
    efficient = all(e.kind in ("efficient", "zero") for e in evidence)
    irreducible = all(e.kind != "reducible" for e in evidence)
    worst, witness = posteriori_purity_scan(m, trials, np.random.default_rng(seed))
    sampled = worst >= 1 - PURITY_TOL
    if trials > 0 and sampled != irreducible:
        raise ConsistencyError(
            f"structural verdict irreducible={irreducible} but sampled worst purity {worst:.12g}"
        )
    report = ClassificationReport(efficient, irreducible, evidence, worst, trials,
                                  None if sampled else witness)
    return irreducible, report


def classify(m, trials: int = 64, seed: int = 0) -> ClassificationReport:
    return is_irreducible(m, trials, seed)[1]


def spectrum_distance(a, b) -> float:
    wa = clamp_spectrum(eigvals_hermitian(a))
    wb = clamp_spectrum(eigvals_hermitian(b))
    if wa.size != wb.size:
        n = max(wa.size, wb.size)
        wa = np.pad(wa, (0, n - wa.size))
        wb = np.pad(wb, (0, n - wb.size))
    return float(np.max(np.abs(wa - wb)))


def zero_er_certificate(m, rho) -> tuple[bool, float]:
    """Check P V_i^dag V_i P = pi_i P for every outcome with pi_i > 1e-12.

    P is the support projector of ``rho``. A true verdict is equivalent to
    zero entropy reduction and to every posteriori state being unitarily
    equivalent to ``rho``.
    """
    m = as_kraus_measurement(m)
    rho = as_matrix(rho)
    p = support_projector(rho)
    probs = outcome_distribution(m, rho)
    residual = 0.0
    for v, pi in zip(m.kraus, probs):
        if pi <= PROB_CUTOFF:
            continue
        residual = max(residual, max_abs(p @ dag(v) @ v @ p - pi * p))
    return residual <= CERTIFICATE_TOL, residual


def posteriori_isospectral(m, rho) -> tuple[bool, float]:
    """Are all defined posteriori states isospectral to ``rho``? (verdict, worst distance)"""
    ens = posteriori(m, rho)
    dist = max((spectrum_distance(s, rho) for s in ens.states if s is not None), default=0.0)
    return dist <= SPECTRUM_TOL, dist


def ensemble_rigidity(ensemble) -> bool:
    """True iff every member with weight > 1e-12 is isospectral to the ensemble average.

    For such ensembles every member actually equals the average: Tr rho^2 is
    strictly convex and depends only on the spectrum.
    """
    weights = np.array([w for w, _ in ensemble], dtype=float)
    states = [as_matrix(s) for _, s in ensemble]
    avg = sum(w * s for w, s in zip(weights, states)) / weights.sum()
    return all(spectrum_distance(s, avg) <= SPECTRUM_TOL
               for w, s in zip(weights, states) if w > PROB_CUTOFF)


def entanglement_breaking_factor(op_kraus) -> tuple[np.ndarray, np.ndarray, float]:
    """Fit the Choi matrix of an operation as |psi><psi| (x) B.

    psi is the top eigenvector of the output marginal, B the input marginal.
    Returns (psi, B, max-entry residual of the fit); a small residual means
    every output of the extended operation is a product with |psi><psi|.
    """
    op = [as_matrix(k) for k in op_kraus]
    d_out, d_in = op[0].shape
    c = choi(QuantumChannel(op, trace_preserving=False))
    out_marg = partial_trace(c, d_out, d_in, keep="first")
    w, v = np.linalg.eigh((out_marg + dag(out_marg)) / 2)
    psi = fix_phases(v[:, -1:])[:, 0]
    b = partial_trace(c, d_out, d_in, keep="second")
    residual = max_abs(c - np.kron(np.outer(psi, psi.conj()), b))
    return psi, b, residual
