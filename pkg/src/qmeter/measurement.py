"""Discrete instruments and efficient (single-Kraus-per-outcome) measurements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import COMPLETENESS_TOL, ZERO_KRAUS_NORM, completeness_residual
from .entropy import PROB_CUTOFF, von_neumann
from .errors import CompletenessError, ShapeError
from .linalg import as_matrix, dag


class Instrument:
    """Finite family of CP operations; operation i has Kraus list ``operations[i]``.

    The sum over all outcomes and Kraus operators must be trace preserving.
    Kraus operators with operator norm below 1e-12 are dropped, so an
    operation may end up empty (an outcome that never fires).
    """

    def __init__(self, operations, labels: Sequence[str] | None = None,
                 *, d_in: int | None = None, d_out: int | None = None):
        ops = []
        for op in operations:
            mats = [as_matrix(k) for k in op]
            for k in mats:
                if d_in is None:
                    d_out, d_in = k.shape
                elif k.shape != (d_out, d_in):
                    raise ShapeError(f"Kraus operator of shape {k.shape}, expected {(d_out, d_in)}")
            ops.append(tuple(k for k in mats if np.linalg.norm(k, 2) >= ZERO_KRAUS_NORM))
        if d_in is None:
            raise ShapeError("instrument has no Kraus operators")
        res = completeness_residual([k for op in ops for k in op], d_in)
        if res > COMPLETENESS_TOL:
            raise CompletenessError(f"sum A^dag A deviates from identity by {res:.3e}")
        self.operations = tuple(ops)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(len(ops)))
        if len(self.labels) != len(ops):
            raise ShapeError(f"{len(self.labels)} labels for {len(ops)} outcomes")
        self.d_in = int(d_in)
        self.d_out = int(d_out)
        self.completeness_residual = res

    def __len__(self) -> int:
        return len(self.operations)

    def __repr__(self) -> str:
        ranks = [len(op) for op in self.operations]
        return f"{type(self).__name__}(d={self.d_in}, outcomes={len(self)}, kraus_per_outcome={ranks})"


class KrausMeasurement(Instrument):
    """Efficient measurement {V_i} with sum V_i^dag V_i = I."""

    def __init__(self, kraus, labels: Sequence[str] | None = None):
        mats = [as_matrix(k) for k in kraus]
        if not mats:
            raise ShapeError("a measurement needs at least one outcome")
        d_out, d_in = mats[0].shape
        super().__init__([[k] for k in mats], labels, d_in=d_in, d_out=d_out)
        self.kraus = tuple(mats)


def as_instrument(m) -> Instrument:
    return m if isinstance(m, Instrument) else KrausMeasurement(m)


@dataclass(frozen=True)
class PosterioriEnsemble:
    """Outcome probabilities and normalised posteriori states (``None`` where pi_i <= 1e-12)."""

    probabilities: np.ndarray
    states: tuple
    labels: tuple

    @property
    def defined(self) -> np.ndarray:
        return np.array([s is not None for s in self.states])

    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.probabilities, self.states) if s is not None)


def _check_state(m: Instrument, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (m.d_in, m.d_in):
        raise ShapeError(f"state of shape {rho.shape} does not fit instrument input {m.d_in}")
    return rho


def unnormalized_posteriori(m: Instrument, rho) -> list[np.ndarray]:
    """[sum_k A_ik rho A_ik^dag for each outcome i]."""
    m = as_instrument(m)
    rho = _check_state(m, rho)
    out = []
    for op in m.operations:
        c = np.zeros((m.d_out, m.d_out), dtype=complex)
        for k in op:
            c += k @ rho @ dag(k)
        out.append(c)
    return out


def outcome_distribution(m: Instrument, rho) -> np.ndarray:
    comps = unnormalized_posteriori(m, rho)
    p = np.array([np.trace(c).real for c in comps])
    return np.clip(p, 0.0, None)


def posteriori(m: Instrument, rho) -> PosterioriEnsemble:
    m = as_instrument(m)
    comps = unnormalized_posteriori(m, rho)
    probs = np.clip(np.array([np.trace(c).real for c in comps]), 0.0, None)
    states = tuple(c / p if p > PROB_CUTOFF else None for c, p in zip(comps, probs))
    return PosterioriEnsemble(probs, states, m.labels)


def mean_posteriori_entropy(m: Instrument, rho) -> float:
    """sum_i pi_i H(rho_i) over outcomes with pi_i > 1e-12."""
    ens = posteriori(m, rho)
    return float(sum(p * von_neumann(s) for p, s in zip(ens.probabilities, ens.states)
                     if s is not None))


def mean_posteriori_entropy_extended(m: Instrument, rho) -> float:
    """sum_i H(sum_k A_ik rho A_ik^dag) with the extended entropy of positive operators."""
    return float(sum(von_neumann(c) for c in unnormalized_posteriori(m, rho)))


def entropy_reduction_direct(m: Instrument, rho) -> float:
    """H(rho) minus the mean posteriori entropy.

    Valid for any instrument; negative values are possible when the
    instrument is not irreducible.
    """
    m = as_instrument(m)
    return von_neumann(_check_state(m, rho)) - mean_posteriori_entropy(m, rho)


def _pair_labels(a: Sequence[str], b: Sequence[str]) -> list[str]:
    return [f"{x}×{y}" for x in a for y in b]


def compose(n: KrausMeasurement, m: KrausMeasurement) -> KrausMeasurement:
    """N after M: outcomes (i, j) with Kraus U_j V_i, i outer."""
    if n.d_in != m.d_out:
        raise ShapeError(f"cannot compose: M outputs {m.d_out}, N expects {n.d_in}")
    ks = [u @ v for v in m.kraus for u in n.kraus]
    return KrausMeasurement(ks, _pair_labels(m.labels, n.labels))


def tensor_measurement(m: KrausMeasurement, n: KrausMeasurement) -> KrausMeasurement:
    """M (x) N on H (x) K: outcomes (i, j) with Kraus V_i (x) U_j."""
    ks = [np.kron(v, u) for v in m.kraus for u in n.kraus]
    return KrausMeasurement(ks, _pair_labels(m.labels, n.labels))


def basis_measurement(d: int) -> KrausMeasurement:
    return KrausMeasurement([np.diag(np.eye(d)[i]) for i in range(d)])


def unitary_mixture(probs: Sequence[float], unitaries) -> KrausMeasurement:
    """{sqrt(p_i) U_i}: outcome statistics are p for every input."""
    return KrausMeasurement([np.sqrt(p) * as_matrix(u) for p, u in zip(probs, unitaries)])


def trivial_measurement(d: int) -> KrausMeasurement:
    return KrausMeasurement([np.eye(d)])

