"""Entropy functionals in nats: von Neumann (extended to the positive cone),
quantum and classical relative entropy, hybrid relative entropy, Shannon."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import NotPositiveError, ShapeError
from .linalg import CLAMP_TOL, as_matrix, clamp_spectrum, eig_hermitian, eigvals_hermitian

SUPPORT_EIG_CUTOFF = 1e-10
SUPPORT_LEAKAGE_CUTOFF = 1e-8
KERNEL_REL_CUTOFF = 1e-12
PROB_CUTOFF = 1e-12


class Infinite(float):
    """``+inf`` that remembers why it is infinite.

    ``reason`` is ``"support"`` for a quantum support violation and
    ``"classical"`` for a classical divergence (p_i > 0 where q_i = 0).
    Behaves as ``math.inf`` in arithmetic and comparisons.
    """

    def __new__(cls, reason: str):
        obj = super().__new__(cls, math.inf)
        obj.reason = reason
        return obj

    def __repr__(self) -> str:
        return f"Infinite({self.reason!r})"


def _psd_spectrum(a) -> np.ndarray:
    w = clamp_spectrum(eigvals_hermitian(a))
    if w.size and w.min() < -CLAMP_TOL:
        raise NotPositiveError(f"operator has eigenvalue {w.min():.3e} < -{CLAMP_TOL:g}")
    return w


def eta(x) -> np.ndarray:
    """-x log x with eta(0) = 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = -x[pos] * np.log(x[pos])
    return out


def von_neumann(a) -> float:
    """Extended von Neumann entropy H(A) = Tr eta(A) - eta(Tr A) of a positive operator.

    For a state this is the usual -Tr rho log rho; for A = c*rho it equals c*H(rho).
    """
    w = _psd_spectrum(a)
    return float(np.sum(eta(w)) - eta(np.sum(w)))


def shannon(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    return float(np.sum(eta(p)))


def classical_relative_entropy(p: Sequence[float], q: Sequence[float]) -> float:
    """Kullback-Leibler divergence sum p_i log(p_i / q_i).

    Entries of ``p`` at most 1e-12 contribute nothing; an entry of ``p`` above
    that against ``q_i <= 1e-12`` gives ``Infinite("classical")``.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ShapeError(f"length mismatch: {p.size} vs {q.size}")
    live = p > PROB_CUTOFF
    if np.any(live & (q <= PROB_CUTOFF)):
        return Infinite("classical")
    return float(np.sum(p[live] * np.log(p[live] / q[live])))


def kernel_cutoff(w: np.ndarray) -> float:
    """Eigenvalues of B at or below this count as its kernel.

    1e-12 relative to the largest eigenvalue, capped at 1e-10. A fixed 1e-10
    would discard genuine small eigenvalues, e.g. products in X (x) rho of two
    eigenvalues near 1e-5, and report a spurious support violation.
    """
    top = float(np.max(w)) if w.size else 0.0
    return min(SUPPORT_EIG_CUTOFF, KERNEL_REL_CUTOFF * max(top, 0.0))


def support_leakage(a, b) -> float:
    """Largest norm of the part of an A-eigenvector (eigenvalue > 1e-10) outside supp B."""
    sa = eig_hermitian(a)
    sb = eig_hermitian(b)
    ua = sa.eigenvectors[:, sa.eigenvalues > SUPPORT_EIG_CUTOFF]
    ker_b = sb.eigenvectors[:, sb.eigenvalues <= kernel_cutoff(sb.eigenvalues)]
    if ua.shape[1] == 0 or ker_b.shape[1] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(ker_b.conj().T @ ua, axis=0)))


def relative_entropy(a, b) -> float:
    """Quantum relative entropy of positive operators,

        H(A||B) = sum_i <i| A log A - A log B + B - A |i>

    evaluated in the eigenbasis {|i>} of A with log B taken through B's own
    spectrum. Returns ``Infinite("support")`` if some eigenvector of A with
    eigenvalue above 1e-10 has a component of norm above 1e-8 in the kernel
    of B (see :func:`kernel_cutoff`).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    sa = eig_hermitian(a)
    sb = eig_hermitian(b)
    wa = clamp_spectrum(sa.eigenvalues)
    wb = clamp_spectrum(sb.eigenvalues)
    if min(wa.min(), wb.min()) < -CLAMP_TOL:
        raise NotPositiveError("relative entropy needs positive semidefinite arguments")
    live_a = wa > SUPPORT_EIG_CUTOFF
    live_b = wb > kernel_cutoff(wb)
    overlap = np.abs(sb.eigenvectors.conj().T @ sa.eigenvectors[:, live_a]) ** 2
    if np.any(~live_b) and overlap[~live_b].size:
        leak = np.sqrt(np.max(np.sum(overlap[~live_b], axis=0)))
        if leak > SUPPORT_LEAKAGE_CUTOFF:
            return Infinite("support")
    la = wa[live_a]
    log_b = np.log(wb[live_b])
    cross = float(la @ (log_b @ overlap[live_b]))
    value = float(la @ np.log(la)) - cross + float(np.sum(wb)) - float(np.sum(wa))
    return value


def hybrid_relative_entropy(s1, s2) -> float:
    """Relative entropy of two hybrid (outcome-indexed) states: sum_i H(s1_i || s2_i)."""
    c1, c2 = _components(s1), _components(s2)
    if len(c1) != len(c2):
        raise ShapeError(f"outcome sets differ: {len(c1)} vs {len(c2)} components")
    total = 0.0
    for x, y in zip(c1, c2):
        r = relative_entropy(x, y)
        if math.isinf(r):
            return r
        total += r
    return total


def hybrid_relative_entropy_split(s1, s2) -> tuple[float, float]:
    """The same relative entropy split into a conditional quantum part and a
    classical part:

        sum_i mu1(i) H(s1_i/mu1(i) || s2_i/mu2(i))  and  H_c(mu1 || mu2),

    with mu_k(i) = Tr s_k,i. Their sum equals :func:`hybrid_relative_entropy`
    whenever both hybrids have the same total trace.
    """
    c1, c2 = _components(s1), _components(s2)
    if len(c1) != len(c2):
        raise ShapeError(f"outcome sets differ: {len(c1)} vs {len(c2)} components")
    mu1 = np.array([np.trace(x).real for x in c1])
    mu2 = np.array([np.trace(y).real for y in c2])
    classical = classical_relative_entropy(mu1, mu2)
    quantum = 0.0
    for t1, t2, x, y in zip(mu1, mu2, c1, c2):
        if t1 <= PROB_CUTOFF:
            continue
        if t2 <= PROB_CUTOFF:
            return quantum, Infinite("classical")
        r = relative_entropy(x / t1, y / t2)
        if math.isinf(r):
            return r, classical
        quantum += t1 * r
    return quantum, classical


def _components(s):
    comps = getattr(s, "components", s)
    return [as_matrix(c) for c in comps]
