"""Kraus-represented channels and the two channels attached to a discrete
instrument: the q-c channel (outcome statistics embedded as a diagonal state)
and the instrument channel (outcome-indexed unnormalised posteriori states)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CompletenessError, ShapeError
from .linalg import as_matrix, dag, max_abs, partial_trace

COMPLETENESS_TOL = 1e-10
ZERO_KRAUS_NORM = 1e-12
DEFINED_TRACE = 1e-12


def _op_norm(k: np.ndarray) -> float:
    return float(np.linalg.norm(k, 2))


def completeness_residual(kraus: Sequence[np.ndarray], d_in: int) -> float:
    total = np.zeros((d_in, d_in), dtype=complex)
    for k in kraus:
        total += dag(k) @ k
    return max_abs(total - np.eye(d_in))


class QuantumChannel:
    """Completely positive map A -> sum_k K_k A K_k^dag.

    Kraus operators with operator norm below 1e-12 are discarded. With
    ``trace_preserving=True`` (the default) the completeness relation is
    enforced to 1e-10; pass ``False`` for trace-non-increasing operations.
    """

    __slots__ = ("kraus", "d_in", "d_out", "trace_preserving")

    def __init__(self, kraus, *, trace_preserving: bool = True, d_in=None, d_out=None):
        mats = [as_matrix(k) for k in kraus]
        if not mats and (d_in is None or d_out is None):
            raise ShapeError("a channel needs at least one Kraus operator or explicit dims")
        shapes = {m.shape for m in mats}
        if len(shapes) > 1:
            raise ShapeError(f"Kraus operators have inconsistent shapes {sorted(shapes)}")
        if mats:
            d_out, d_in = mats[0].shape
        kept = tuple(m for m in mats if _op_norm(m) >= ZERO_KRAUS_NORM)
        if trace_preserving:
            res = completeness_residual(kept, d_in)
            if res > COMPLETENESS_TOL:
                raise CompletenessError(f"sum K^dag K deviates from identity by {res:.3e}")
        self.kraus = kept
        self.d_in = int(d_in)
        self.d_out = int(d_out)
        self.trace_preserving = trace_preserving

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self) -> str:
        return f"QuantumChannel(d_in={self.d_in}, d_out={self.d_out}, kraus_rank<={len(self.kraus)})"


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d)])


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel([u])


def dephasing_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.diag(np.eye(d)[i]) for i in range(d)])


def depolarizing_channel(d: int, p: float) -> QuantumChannel:
    """rho -> (1-p) rho + p Tr(rho) I/d, via the d^2 matrix-unit Kraus family."""
    ks = [np.sqrt(1 - p) * np.eye(d)]
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d))
            e[i, j] = np.sqrt(p / d)
            ks.append(e)
    return QuantumChannel(ks)


def constant_channel(d_in: int, sigma) -> QuantumChannel:
    """rho -> Tr(rho) sigma."""
    sigma = as_matrix(sigma)
    w, v = np.linalg.eigh((sigma + dag(sigma)) / 2)
    ks = []
    for lam, col in zip(w, v.T):
        if lam <= 0:
            continue
        for j in range(d_in):
            e = np.zeros(d_in)
            e[j] = 1.0
            ks.append(np.sqrt(lam) * np.outer(col, e))
    return QuantumChannel(ks)


def apply(phi: QuantumChannel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (phi.d_in, phi.d_in):
        raise ShapeError(f"state of shape {rho.shape} does not fit channel input {phi.d_in}")
    out = np.zeros((phi.d_out, phi.d_out), dtype=complex)
    for k in phi.kraus:
        out += k @ rho @ dag(k)
    return out


def compose_channels(psi: QuantumChannel, phi: QuantumChannel) -> QuantumChannel:
    """psi after phi."""
    if psi.d_in != phi.d_out:
        raise ShapeError(f"cannot compose: {phi.d_out} -> {psi.d_in}")
    return QuantumChannel([b @ a for a in phi.kraus for b in psi.kraus],
                          trace_preserving=phi.trace_preserving and psi.trace_preserving,
                          d_in=phi.d_in, d_out=psi.d_out)


def extend(phi: QuantumChannel, d_ref: int) -> QuantumChannel:
    """phi (x) Id on a reference space of dimension ``d_ref``."""
    eye = np.eye(d_ref)
    return QuantumChannel([np.kron(k, eye) for k in phi.kraus],
                          trace_preserving=phi.trace_preserving,
                          d_in=phi.d_in * d_ref, d_out=phi.d_out * d_ref)


def stinespring_isometry(phi: QuantumChannel) -> np.ndarray:
    """V : H_in -> H_out (x) H_env with V|x> = sum_k K_k|x> (x) |k>.

    The environment basis follows the order of ``phi.kraus``.
    """
    m = len(phi.kraus)
    v = np.zeros((phi.d_out * m, phi.d_in), dtype=complex)
    for k, kop in enumerate(phi.kraus):
        e = np.zeros((m, 1))
        e[k, 0] = 1.0
        v += np.kron(kop, e)
    return v


def environment_dim(phi: QuantumChannel) -> int:
    return len(phi.kraus)


def complementary(phi: QuantumChannel) -> QuantumChannel:
    """Channel to the environment: rho -> Tr_out V rho V^dag.

    Its Kraus operators are R_j = sum_k |k><j| K_k, one per output basis
    vector j, so that [R(rho)]_{kl} = Tr K_k rho K_l^dag.
    """
    m = len(phi.kraus)
    ks = []
    for j in range(phi.d_out):
        r = np.zeros((m, phi.d_in), dtype=complex)
        for k, kop in enumerate(phi.kraus):
            r[k, :] = kop[j, :]
        ks.append(r)
    return QuantumChannel(ks, trace_preserving=phi.trace_preserving, d_in=phi.d_in, d_out=m)


def choi(phi: QuantumChannel) -> np.ndarray:
    """(phi (x) Id)(|W><W|) with the unnormalised |W> = sum_j |j>|j>.

    Output factor first; for trace-preserving phi, Tr_out choi = I_in.
    """
    d = phi.d_in
    omega = np.zeros(d * d, dtype=complex)
    for j in range(d):
        omega[j * d + j] = 1.0
    return apply(extend(phi, d), np.outer(omega, omega))


@dataclass(frozen=True)
class HybridState:
    """Outcome-indexed family of positive operators (a classical-quantum state).

    Components with trace at most 1e-12 are kept, so the outcome index is
    preserved, but ``defined`` reports them as carrying no posteriori state.
    """

    components: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        comps = tuple(as_matrix(c) for c in self.components)
        if len({c.shape for c in comps}) > 1:
            raise ShapeError("hybrid components must share one shape")
        object.__setattr__(self, "components", comps)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(comps))))

    def __len__(self) -> int:
        return len(self.components)

    @property
    def traces(self) -> np.ndarray:
        return np.array([np.trace(c).real for c in self.components])

    @property
    def defined(self) -> np.ndarray:
        return self.traces > DEFINED_TRACE

    def total(self) -> np.ndarray:
        return sum(self.components)

    def tensor_right(self, sigma) -> "HybridState":
        sigma = as_matrix(sigma)
        return HybridState(tuple(np.kron(c, sigma) for c in self.components), self.labels)


class HybridChannel:
    """Map rho -> (sum_k A_ik rho A_ik^dag)_i from states to hybrid states.

    ``operations[i]`` is the Kraus list of outcome i; the sum over all
    outcomes must be trace preserving.
    """

    __slots__ = ("operations", "labels", "d_in", "d_out")

    def __init__(self, operations, labels=None, *, d_in=None, d_out=None, check: bool = True):
        ops = []
        for op in operations:
            mats = [as_matrix(k) for k in op]
            ops.append(tuple(m for m in mats if _op_norm(m) >= ZERO_KRAUS_NORM))
            if mats:
                d_out, d_in = mats[0].shape
        if d_in is None:
            raise ShapeError("cannot infer dimensions of an empty instrument")
        for op in ops:
            for m in op:
                if m.shape != (d_out, d_in):
                    raise ShapeError(f"Kraus operator of shape {m.shape}, expected {(d_out, d_in)}")
        if check:
            res = completeness_residual([m for op in ops for m in op], d_in)
            if res > COMPLETENESS_TOL:
                raise CompletenessError(f"sum A^dag A deviates from identity by {res:.3e}")
        self.operations = tuple(ops)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(len(ops)))
        self.d_in = int(d_in)
        self.d_out = int(d_out)

    def __len__(self) -> int:
        return len(self.operations)

    def extend(self, d_ref: int) -> "HybridChannel":
        """Lambda (x) Id_K: every Kraus operator gets an identity factor on K."""
        eye = np.eye(d_ref)
        return HybridChannel([[np.kron(k, eye) for k in op] for op in self.operations],
                             self.labels, d_in=self.d_in * d_ref, d_out=self.d_out * d_ref,
                             check=False)

    def total_channel(self) -> QuantumChannel:
        return QuantumChannel([k for op in self.operations for k in op],
                              d_in=self.d_in, d_out=self.d_out)


def apply_hybrid(lam: HybridChannel, rho) -> HybridState:
    rho = as_matrix(rho)
    if rho.shape != (lam.d_in, lam.d_in):
        raise ShapeError(f"state of shape {rho.shape} does not fit input dimension {lam.d_in}")
    comps = []
    for op in lam.operations:
        c = np.zeros((lam.d_out, lam.d_out), dtype=complex)
        for k in op:
            c += k @ rho @ dag(k)
        comps.append(c)
    return HybridState(tuple(comps), lam.labels)


def instrument_channel(m) -> HybridChannel:
    """The instrument channel of a discrete instrument (anything with ``operations``)."""
    return HybridChannel(m.operations, getattr(m, "labels", None), d_in=m.d_in, d_out=m.d_out)


def _row_kraus(op, d_in: int):
    # scalar-valued Kraus family <e_j| A_ik: sum over j of |<e_j|A x>|^2 = ||A x||^2
    return [k[j:j + 1, :] for k in op for j in range(k.shape[0])]


def qc_hybrid_channel(m) -> HybridChannel:
    """The q-c channel written as a hybrid channel with 1x1 components.

    Component i is Tr(sum_k A_ik rho A_ik^dag): the instrument channel followed
    by the componentwise trace.
    """
    ops = [_row_kraus(op, m.d_in) for op in m.operations]
    return HybridChannel(ops, getattr(m, "labels", None), d_in=m.d_in, d_out=1)


def qc_channel(m) -> QuantumChannel:
    """rho -> sum_i Tr(sum_k A_ik rho A_ik^dag) |phi_i><phi_i| on an n-dimensional space.

    Kraus operators are |phi_i><e_j| A_ik, so the output is diagonal by
    construction.
    """
    n = len(m.operations)
    ks = []
    for i, op in enumerate(m.operations):
        for row in _row_kraus(op, m.d_in):
            k = np.zeros((n, m.d_in), dtype=complex)
            k[i, :] = row[0]
            ks.append(k)
    return QuantumChannel(ks, d_in=m.d_in, d_out=n)


def hybrid_to_matrix(s: HybridState) -> np.ndarray:
    """Block-diagonal embedding sum_i |phi_i><phi_i| (x) s_i."""
    n = len(s)
    d = s.components[0].shape[0]
    out = np.zeros((n * d, n * d), dtype=complex)
    for i, c in enumerate(s.components):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = c
    return out


def reduce_hybrid(s: HybridState, dim_first: int, dim_second: int, keep: str) -> HybridState:
    return HybridState(tuple(partial_trace(c, dim_first, dim_second, keep) for c in s.components),
                       s.labels)
