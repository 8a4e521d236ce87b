"""Dense complex matrix helpers: Kronecker products, partial traces,
Hermitian eigendecomposition and spectral purification."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotHermitianError, ShapeError

HERMITIAN_TOL = 1e-8
CLAMP_TOL = 1e-10


class HermitianSpectrum(NamedTuple):
    """Eigenvalues in descending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + dag(a)) / 2


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_residual(a: np.ndarray) -> float:
    return max_abs(a - dag(a))


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor indexes the outer (slow) block."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dim_first: int, dim_second: int, keep: str = "first") -> np.ndarray:
    """Trace out one factor of an operator on a bipartite space.

    ``keep="first"`` returns Tr_2 m, ``keep="second"`` returns Tr_1 m.
    """
    m = as_matrix(m)
    n = dim_first * dim_second
    if m.shape != (n, n):
        raise ShapeError(
            f"matrix of shape {m.shape} is not {n}x{n} for split {dim_first}x{dim_second}"
        )
    t = m.reshape(dim_first, dim_second, dim_first, dim_second)
    if keep == "first":
        return np.einsum("ajbj->ab", t)
    if keep == "second":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"keep must be 'first' or 'second', not {keep!r}")


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    # make the largest-magnitude entry of each column real and nonnegative
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vectors / phases


def eig_hermitian(a, tol: float = HERMITIAN_TOL) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back in descending order. Each eigenvector is rotated so
    that its largest-magnitude component is real and nonnegative, which makes
    the output reproducible for non-degenerate spectra.

    Raises:
        NotHermitianError: if ``max|a - a^dag| > tol``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"square matrix required, got {a.shape}")
    res = hermiticity_residual(a)
    if res > tol:
        raise NotHermitianError(f"matrix is not Hermitian (residual {res:.3e})")
    w, v = np.linalg.eigh(hermitian_part(a))
    w = w[::-1]
    v = fix_phases(v[:, ::-1])
    return HermitianSpectrum(w, v)


def eigvals_hermitian(a) -> np.ndarray:
    """Descending eigenvalues only (no Hermiticity check, no vectors)."""
    a = as_matrix(a)
    return np.linalg.eigvalsh(hermitian_part(a))[::-1]


def clamp_spectrum(w: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero out round-off negatives in ``[-tol, 0)``; leaves larger negatives alone."""
    w = np.array(w, dtype=float)
    w[(w < 0) & (w >= -tol)] = 0.0
    return w


def support_projector(a, cutoff: float = CLAMP_TOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue above ``cutoff``."""
    spec = eig_hermitian(a)
    u = spec.eigenvectors[:, spec.eigenvalues > cutoff]
    return u @ dag(u)


def sqrtm_psd(a) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(as_matrix(a)))
    return (v * np.sqrt(np.clip(w, 0, None))) @ dag(v)


def inv_sqrtm_pd(a) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(as_matrix(a)))
    return (v / np.sqrt(w)) @ dag(v)


def purify(rho) -> np.ndarray:
    """Pure state on H (x) K whose reductions are both isospectral to ``rho``.

    Uses the double-ket construction sum_jk sqrt(l_j l_k) |j><k| (x) |j><k|
    over the eigenbasis of ``rho``, so Tr_K of the result is ``rho`` and so is
    Tr_H (here the two reductions coincide exactly).

    Eigenvalues at or below 1e-10 are treated as zero: their square roots
    would otherwise put round-off amplitude of order 1e-8 on the kernel.
    """
    spec = eig_hermitian(rho)
    lam = clamp_spectrum(spec.eigenvalues)
    u = spec.eigenvectors
    d = u.shape[0]
    psi = np.zeros(d * d, dtype=complex)
    for j in range(d):
        if lam[j] > CLAMP_TOL:
            psi += np.sqrt(lam[j]) * np.kron(u[:, j], u[:, j])
    return np.outer(psi, psi.conj())


def vec(a: np.ndarray) -> np.ndarray:
    """Row-major flattening used for collinearity tests."""
    return np.asarray(a).reshape(-1)


def sine_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Sine of the angle between x and y (0 when collinear).

    Computed as the norm of the component of unit y orthogonal to unit x;
    sqrt(1 - |<x,y>|^2) would lose half the digits near zero.
    """
    x = vec(x)
    y = vec(y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return 0.0
    x = x / nx
    y = y / ny
    return float(min(1.0, np.linalg.norm(y - np.vdot(x, y) * x)))
