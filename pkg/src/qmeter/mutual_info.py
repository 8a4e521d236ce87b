"""Quantum mutual information of a channel at a state, by two routes, and the
entropy reduction of an efficient measurement expressed through it.

Entropic route:     I(rho, phi) = H(rho) + H(phi(rho)) - H(phi_c(rho))
Relative route:     I(rho, phi) = H((phi (x) Id)(rho_hat) || phi(rho) (x) varrho)

with rho_hat the spectral purification of rho and varrho = Tr_H rho_hat.
The relative route also applies to hybrid channels, where the relative
entropy is taken outcome by outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    HybridChannel,
    QuantumChannel,
    apply,
    apply_hybrid,
    complementary,
    extend,
    instrument_channel,
    qc_channel,
    qc_hybrid_channel,
)
from .entropy import hybrid_relative_entropy, relative_entropy, von_neumann
from .linalg import as_matrix, partial_trace, purify
from .measurement import entropy_reduction_direct, mean_posteriori_entropy
from .structure import as_kraus_measurement

ROUTE_TOL = 1e-8


def purification_pair(rho) -> tuple[np.ndarray, np.ndarray]:
    """(rho_hat, varrho) for the spectral purification of ``rho``."""
    rho = as_matrix(rho)
    d = rho.shape[0]
    rho_hat = purify(rho)
    return rho_hat, partial_trace(rho_hat, d, d, keep="second")


def mutual_info_entropic(rho, phi: QuantumChannel) -> float:
    rho = as_matrix(rho)
    return von_neumann(rho) + von_neumann(apply(phi, rho)) - von_neumann(apply(complementary(phi), rho))


def mutual_info_relative(rho, phi) -> float:
    """Relative-entropy form of I(rho, phi); ``phi`` may be a QuantumChannel or a HybridChannel."""
    rho = as_matrix(rho)
    d = rho.shape[0]
    rho_hat, varrho = purification_pair(rho)
    if isinstance(phi, HybridChannel):
        joint = apply_hybrid(phi.extend(d), rho_hat)
        product = apply_hybrid(phi, rho).tensor_right(varrho)
        return hybrid_relative_entropy(joint, product)
    joint = apply(extend(phi, d), rho_hat)
    product = np.kron(apply(phi, rho), varrho)
    return relative_entropy(joint, product)


@dataclass(frozen=True)
class MutualInfoReport:
    value: float
    route: str
    entropic: float
    relative: float
    residual_cross_check: float


def mutual_info_report(rho, phi: QuantumChannel) -> MutualInfoReport:
    """Both routes side by side. ``value`` is the relative-entropy route."""
    ent = mutual_info_entropic(rho, phi)
    rel = mutual_info_relative(rho, phi)
    res = abs(ent - rel) if math.isfinite(rel) else math.inf
    return MutualInfoReport(rel, "relative-entropy", ent, rel, res)


def entropy_reduction(rho, m) -> float:
    """ER(rho, M) = I(rho, Pi_M) for an efficient measurement M.

    Computed through the relative-entropy route on the q-c channel written
    as a hybrid channel (componentwise trace of the instrument channel).

    Raises:
        ClassificationError: if ``m`` is not efficient.
    """
    m = as_kraus_measurement(m)
    return mutual_info_relative(rho, qc_hybrid_channel(m))


def qc_mutual_info(rho, m, route: str = "hybrid") -> float:
    """I(rho, Pi_M) for any instrument, via ``"hybrid"``, ``"quantum"`` (the
    diagonal-state channel, relative route) or ``"entropic"``."""
    if route == "hybrid":
        return mutual_info_relative(rho, qc_hybrid_channel(m))
    if route == "quantum":
        return mutual_info_relative(rho, qc_channel(m))
    if route == "entropic":
        return mutual_info_entropic(rho, qc_channel(m))
    raise ValueError(f"unknown route {route!r}")


def lambda_mutual_info(rho, m) -> float:
    """I(rho, Lambda_M) for an efficient measurement, by the relative route."""
    m = as_kraus_measurement(m)
    return mutual_info_relative(rho, instrument_channel(m))


def lambda_mutual_info_closed_form(rho, m) -> float:
    """Mean posteriori entropy plus H(rho)."""
    return mean_posteriori_entropy(m, rho) + von_neumann(rho)


def identity_check(rho, m) -> float:
    """|I(rho, Pi_M) + I(rho, Lambda_M) - 2 H(rho)| for an efficient measurement."""
    m = as_kraus_measurement(m)
    return abs(entropy_reduction(rho, m) + lambda_mutual_info(rho, m) - 2 * von_neumann(rho))


def general_bound_terms(rho, m) -> dict:
    """Quantities entering the bound |ER - I(rho, Pi_M)| <= sum_x mu(x) H(rho_hat_x).

    rho_hat_x are the posteriori states of M (x) Id at the purification of
    ``rho``. Also returns the exact gap term
    sum_x mu(x) [H(Tr_K rho_hat_x) - H(Tr_H rho_hat_x)].
    """
    rho = as_matrix(rho)
    d = rho.shape[0]
    rho_hat, _ = purification_pair(rho)
    lam = instrument_channel(m)
    joint = apply_hybrid(lam.extend(d), rho_hat)
    bound = 0.0
    gap = 0.0
    for c in joint.components:
        # extended entropy: H(c) = Tr(c) H(c / Tr c)
        bound += von_neumann(c)
        gap += von_neumann(partial_trace(c, lam.d_out, d, "first")) - von_neumann(
            partial_trace(c, lam.d_out, d, "second"))
    er = entropy_reduction_direct(m, rho)
    info = qc_mutual_info(rho, m)
    return {"er_direct": er, "qc_info": info, "bound": bound, "gap": gap}
