"""Randomized property checks for entropy reduction and mutual information.

Each ``check_*`` function draws its inputs from a :class:`RandomModel`,
evaluates one property over many trials and returns a :class:`PropertyReport`.
A property may consist of several parts with their own tolerances (say an
inequality with slack 1e-8 and an equality to 1e-10); each part's violation
is rescaled to the report tolerance before taking the maximum, so
``passed == (max_violation <= tolerance)`` always holds.

Trial t of a check uses ``np.random.default_rng([seed, stream, t])``, so a
report is reproducible from the seed alone and independent of trial order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import apply_hybrid, qc_hybrid_channel
from .entropy import classical_relative_entropy, hybrid_relative_entropy, von_neumann
from .errors import ConsistencyError
from .fixtures import (
    measure_prepare_instrument,
    measure_prepare_psi0,
    bundled_document,
    depolarizing_instrument,
    reducible_instrument,
)
from .io import encode_matrix
from .linalg import as_matrix, dag, eig_hermitian, inv_sqrtm_pd, partial_trace, sine_distance
from .measurement import (
    Instrument,
    KrausMeasurement,
    basis_measurement,
    compose,
    entropy_reduction_direct,
    mean_posteriori_entropy,
    outcome_distribution,
    tensor_measurement,
)
from .mutual_info import (
    general_bound_terms,
    identity_check,
    mutual_info_entropic,
    mutual_info_relative,
    purification_pair,
    qc_mutual_info,
)
from .sampling import (
    RandomModel,
    complex_gaussian,
    ginibre_state,
    haar_pure_state,
    haar_pure_vector,
    haar_unitary,
    random_channel,
    random_instrument,
    random_kraus,
    random_measurement,
    random_unitary_mixture,
)
from .structure import (
    common_range_decomposition,
    is_efficient,
    is_irreducible,
    posteriori_isospectral,
    zero_er_certificate,
)

LAMBDAS = tuple(round(0.1 * k, 1) for k in range(1, 10))
CONTINUITY_EPS = (1e-2, 1e-3, 1e-4)
CONTINUITY_FINE_EPS = 1e-5
CONTINUITY_FACTOR = 5.0
CONTINUITY_FIXTURES = 20
ZERO_ER_TOL = 1e-7


@dataclass
class PropertyReport:
    name: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool
    witness: dict | None = None
    parts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "max_violation": _num(self.max_violation),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "witness": self.witness,
            "parts": self.parts,
            "details": {k: _num(v) for k, v in self.details.items()},
        }


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _kraus_json(m) -> list:
    return [[encode_matrix(k) for k in op] for op in m.operations]


class _Tracker:
    """Running maxima of the violations of a property's parts."""

    def __init__(self, name: str, tolerance: float, scale: float):
        self.name = name
        self.tolerance = tolerance * scale
        self.scale = scale
        self.parts: dict[str, dict] = {}
        self.trials = 0

    def add(self, part: str, violation: float, tolerance: float, witness: Callable[[], dict]):
        tol = tolerance * self.scale
        if isinstance(violation, float) and math.isnan(violation):
            violation = math.inf
        rec = self.parts.setdefault(part, {"max_violation": -math.inf, "tolerance": tol, "witness": None})
        if violation > rec["max_violation"]:
            rec["max_violation"] = float(violation)
            rec["witness"] = witness()

    def _scaled(self, rec) -> float:
        v, tol = rec["max_violation"], rec["tolerance"]
        if tol > 0 and self.tolerance > 0:
            return v * (self.tolerance / tol)
        return v

    def report(self, details: dict | None = None) -> PropertyReport:
        worst, witness = -math.inf, None
        parts = {}
        for part in sorted(self.parts):
            rec = self.parts[part]
            scaled = self._scaled(rec)
            if scaled > worst:
                worst, witness = scaled, dict(rec["witness"], part=part)
            parts[part] = {
                "max_violation": _num(rec["max_violation"]),
                "tolerance": rec["tolerance"],
                "pass": rec["max_violation"] <= rec["tolerance"],
            }
        passed = worst <= self.tolerance
        return PropertyReport(self.name, self.trials, worst, self.tolerance, passed, witness,
                              parts, details or {})


def _er(m, rho) -> float:
    return entropy_reduction_direct(m, rho)


def _state_json(rho) -> list:
    return encode_matrix(rho)


# -- Core properties ---------------------------------------------------------

def check_nonnegativity(model: RandomModel, tolerance_scale: float = 1.0,
                        fixture: str | None = None) -> PropertyReport:
    """ER(rho, M) >= -1e-9 for efficient M.

    With ``fixture`` the named bundled instrument (e.g. ``"reducible"``) is
    used instead of random efficient measurements, evaluated at its pure
    inputs; a reducible instrument must make this check fail.
    """
    tr = _Tracker("nonnegativity", 1e-9, tolerance_scale)
    worst_er = math.inf
    fixed = bundled_document().resolve(fixture, ("instruments", "measurements")) if fixture else None
    for t in range(model.trials):
        rng = model.rng(1, t)
        if fixed is None:
            d = model.dim(rng)
            rho = model.state(d, rng)
            m = model.measurement(d, rng)
        else:
            m = fixed
            rho = haar_pure_state(m.d_in, rng)
        er = _er(m, rho)
        worst_er = min(worst_er, er)
        tr.trials += 1
        tr.add("er_lower_bound", -er, 1e-9,
               lambda: {"trial": t, "er": er, "state": _state_json(rho), "instrument": _kraus_json(m)})
        if fixed is None:
            # a pure input must give ER = 0
            pure = haar_pure_state(m.d_in, rng)
            er_pure = _er(m, pure)
            tr.add("pure_state_zero", abs(er_pure), 1e-9,
                   lambda: {"trial": t, "er": er_pure, "state": _state_json(pure),
                            "instrument": _kraus_json(m)})
    return tr.report({"min_er": worst_er, "fixture": fixture or "none"})


def check_concavity(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """ER(l r1 + (1-l) r2) >= l ER(r1) + (1-l) ER(r2) - 1e-8 for l in 0.1..0.9."""
    tr = _Tracker("concavity", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(2, t)
        d = model.dim(rng)
        r1, r2 = model.state(d, rng), model.state(d, rng)
        m = model.measurement(d, rng)
        e1, e2 = _er(m, r1), _er(m, r2)
        tr.trials += 1
        for lam in LAMBDAS:
            mix = lam * r1 + (1 - lam) * r2
            gap = lam * e1 + (1 - lam) * e2 - _er(m, mix)
            tr.add("mixture", gap, 1e-8,
                   lambda: {"trial": t, "lambda": lam, "rho1": _state_json(r1), "rho2": _state_json(r2),
                            "instrument": _kraus_json(m)})
        # equal endpoints give equality
        same = abs(_er(m, 0.3 * r1 + 0.7 * r1) - e1)
        tr.add("equal_endpoints", same, 1e-10, lambda: {"trial": t, "rho1": _state_json(r1)})
    return tr.report()


def check_monotonicity(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """ER(rho, N o M) >= ER(rho, M) - 1e-8 for efficient M, N."""
    tr = _Tracker("monotonicity", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(3, t)
        d = model.dim(rng)
        rho = model.state(d, rng)
        m = model.measurement(d, rng)
        n = model.measurement(d, rng)
        before, after = _er(m, rho), _er(compose(n, m), rho)
        tr.trials += 1
        tr.add("composition", before - after, 1e-8,
               lambda: {"trial": t, "er_m": before, "er_nm": after, "state": _state_json(rho),
                        "m": _kraus_json(m), "n": _kraus_json(n)})
    return tr.report()


def _joint_state(kind: str, dh: int, dk: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "product":
        return np.kron(ginibre_state(dh, rng), ginibre_state(dk, rng))
    if kind == "separable":
        w = rng.dirichlet(np.ones(3))
        return sum(p * np.kron(haar_pure_state(dh, rng), haar_pure_state(dk, rng)) for p in w)
    if kind == "entangled-pure":
        return haar_pure_state(dh * dk, rng)
    return ginibre_state(dh * dk, rng, rank=int(rng.integers(1, dh * dk + 1)))


SUBADDITIVITY_DIMS = ((2, 2), (3, 2), (2, 3))
SUBADDITIVITY_KINDS = ("product", "separable", "entangled-pure", "entangled-mixed")


def check_subadditivity(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """ER(w, M (x) N) <= ER(w_H, M) + ER(w_K, N) + 1e-8, with equality on products."""
    tr = _Tracker("subadditivity", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(4, t)
        dh, dk = SUBADDITIVITY_DIMS[t % len(SUBADDITIVITY_DIMS)]
        kind = SUBADDITIVITY_KINDS[(t // len(SUBADDITIVITY_DIMS)) % len(SUBADDITIVITY_KINDS)]
        omega = _joint_state(kind, dh, dk, rng)
        m = model.measurement(dh, rng)
        n = model.measurement(dk, rng)
        joint = _er(tensor_measurement(m, n), omega)
        local = (_er(m, partial_trace(omega, dh, dk, "first"))
                 + _er(n, partial_trace(omega, dh, dk, "second")))
        tr.trials += 1
        wit = lambda: {"trial": t, "kind": kind, "dims": [dh, dk], "joint": joint, "local": local,
                       "omega": _state_json(omega), "m": _kraus_json(m), "n": _kraus_json(n)}
        tr.add("inequality", joint - local, 1e-8, wit)
        if kind == "product":
            tr.add("product_equality", abs(joint - local), 1e-8, wit)
    return tr.report()


def perturb_measurement(m: KrausMeasurement, eps: float, rng: np.random.Generator) -> KrausMeasurement:
    """Add eps times a unit-norm complex Gaussian to every Kraus operator and
    restore completeness by right-multiplying with S^(-1/2), S = sum K^dag K."""
    ks = []
    for v in m.kraus:
        g = complex_gaussian(v.shape, rng)
        ks.append(v + eps * g / np.linalg.norm(g))
    s = sum(dag(k) @ k for k in ks)
    fix = inv_sqrtm_pd(s)
    return KrausMeasurement([k @ fix for k in ks], m.labels)


def check_continuity(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """Residuals of ER and of the mean posteriori entropy under joint
    perturbation of the state (convex path towards a random state) and of
    the Kraus operators shrink by at least 5x per decade of eps across
    1e-2 -> 1e-4, and are below 1e-4 at eps = 1e-5.

    Fixtures are full-rank Ginibre states, where ER is smooth.
    """
    tr = _Tracker("continuity", 1e-12, tolerance_scale)
    fixtures = min(CONTINUITY_FIXTURES, model.trials)
    worst_ratio = math.inf
    for t in range(fixtures):
        rng = model.rng(5, t)
        d = model.dim(rng)
        rho = ginibre_state(d, rng)
        # one outcome means a unitary, for which ER vanishes identically
        m = model.measurement(d, rng, min_outcomes=2)
        sigma = ginibre_state(d, rng)
        base_er, base_mean = _er(m, rho), mean_posteriori_entropy(m, rho)
        base_h = von_neumann(rho)
        er_res, mean_res = [], []
        for eps in CONTINUITY_EPS + (CONTINUITY_FINE_EPS,):
            # the same perturbation direction at every scale
            m_eps = perturb_measurement(m, eps, model.rng(5, t + 1_000_000))
            rho_eps = (1 - eps) * rho + eps * sigma
            er_eps, mean_eps = _er(m_eps, rho_eps), mean_posteriori_entropy(m_eps, rho_eps)
            er_res.append(abs(er_eps - base_er))
            mean_res.append(abs(mean_eps - base_mean))
            # ER = H - <H>, so the two residuals differ by the change in H(rho)
            identity = abs((er_eps - base_er) - ((von_neumann(rho_eps) - base_h) - (mean_eps - base_mean)))
            tr.add("er_mean_entropy_identity", identity, 1e-10,
                   lambda: {"trial": t, "eps": eps, "state": _state_json(rho)})
        tr.trials += 1
        for label, res in (("er_trend", er_res), ("mean_entropy_trend", mean_res)):
            for k in range(len(CONTINUITY_EPS) - 1):
                big, small = res[k], res[k + 1]
                if small > 0:
                    worst_ratio = min(worst_ratio, big / small)
                tr.add(label, CONTINUITY_FACTOR * small - big, 1e-12,
                       lambda: {"trial": t, "residuals": res[:len(CONTINUITY_EPS)],
                                "eps": list(CONTINUITY_EPS), "state": _state_json(rho),
                                "instrument": _kraus_json(m)})
            tr.add(label.replace("trend", "fine"), res[-1] - 1e-4, 1e-12,
                   lambda: {"trial": t, "eps": CONTINUITY_FINE_EPS, "residual": res[-1]})
    return tr.report({"fixtures": fixtures, "min_decade_ratio": worst_ratio})


def truncate(rho, n: int) -> tuple[np.ndarray, float]:
    """(rho_n, c_n): top-n spectral truncation of rho, renormalized, and its weight."""
    spec = eig_hermitian(rho)
    lam = spec.eigenvalues[:n]
    u = spec.eigenvectors[:, :n]
    c = float(np.sum(lam))
    return (u * (lam / c)) @ dag(u), c


def truncation_terms(rho0, m, n: int) -> dict:
    """ER(rho_n), the relative entropy I_n = H((Pi (x) Id)(rho_hat_n) || Pi(rho0) (x) varrho_n)
    and the classical divergence H_c(mu_rho_n || mu_rho0)."""
    rho0 = as_matrix(rho0)
    d = rho0.shape[0]
    rho_n, c_n = truncate(rho0, n)
    rho_hat, varrho = purification_pair(rho_n)
    pi = qc_hybrid_channel(m)
    joint = apply_hybrid(pi.extend(d), rho_hat)
    product = apply_hybrid(pi, rho0).tensor_right(varrho)
    i_n = hybrid_relative_entropy(joint, product)
    return {
        "n": n,
        "c_n": c_n,
        "er_n": _er(m, rho_n),
        "i_n": i_n,
        "h_c": classical_relative_entropy(outcome_distribution(m, rho_n), outcome_distribution(m, rho0)),
    }


def check_truncation(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """Spectral truncations rho_n of a full-rank rho0 in dimension max(4, d_max):
    0 <= I_n - ER(rho_n) <= -ln c_n (+1e-9), I_n - ER(rho_n) = H_c(mu_n || mu_0),
    and ER(rho_d) = ER(rho0) to 1e-10."""
    tr = _Tracker("truncation", 1e-9, tolerance_scale)
    d = max(4, model.dims[1])
    fixtures = min(CONTINUITY_FIXTURES, model.trials)
    worst_last_gap = 0.0
    for t in range(fixtures):
        rng = model.rng(6, t)
        rho0 = ginibre_state(d, rng)
        m = model.measurement(d, rng)
        er0 = _er(m, rho0)
        tr.trials += 1
        diffs = []
        for n in range(1, d + 1):
            terms = truncation_terms(rho0, m, n)
            gap = terms["i_n"] - terms["er_n"]
            wit = lambda: {"trial": t, "n": n, "terms": terms, "state": _state_json(rho0),
                           "instrument": _kraus_json(m)}
            tr.add("gap_nonnegative", -gap, 1e-9, wit)
            tr.add("gap_upper_bound", gap + math.log(terms["c_n"]), 1e-9, wit)
            tr.add("gap_is_classical_divergence", abs(gap - terms["h_c"]), 1e-9, wit)
            diffs.append(abs(terms["er_n"] - er0))
        tr.add("no_truncation_equality", diffs[-1], 1e-10,
               lambda: {"trial": t, "er0": er0, "state": _state_json(rho0)})
        worst_last_gap = max(worst_last_gap, diffs[-2] if len(diffs) > 1 else 0.0)
    return tr.report({"dimension": d, "fixtures": fixtures, "max_er_gap_at_n_minus_1": worst_last_gap})


def check_er_bound_general(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """|ER - I(rho, Pi)| <= sum_x H(rho_hat_x) + 1e-8 for general instruments,
    with equality when the instrument is efficient. Every fourth trial draws
    a single-Kraus instrument."""
    tr = _Tracker("er_bound", 1e-8, tolerance_scale)
    efficient_trials = 0
    for t in range(model.trials):
        rng = model.rng(7, t)
        d = model.dim(rng)
        rho = model.state(d, rng)
        n = model.n_outcomes(rng)
        inst = random_instrument(d, n, rng, max_kraus=1 if t % 4 == 3 else 3, force_general=t % 4 != 3)
        terms = general_bound_terms(rho, inst)
        diff = abs(terms["er_direct"] - terms["qc_info"])
        tr.trials += 1
        wit = lambda: {"trial": t, "terms": terms, "state": _state_json(rho), "instrument": _kraus_json(inst)}
        tr.add("bound", diff - terms["bound"], 1e-8, wit)
        tr.add("gap_identity", abs((terms["er_direct"] - terms["qc_info"]) + terms["gap"]), 1e-8, wit)
        if is_efficient(inst)[0]:
            efficient_trials += 1
            tr.add("efficient_equality", diff, 1e-8, wit)
    return tr.report({"efficient_trials": efficient_trials})


# -- Identities and structural checks -----------------------------------------

def check_er_equality(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """ER(rho, M) = I(rho, Pi_M) for efficient M, through all three routes."""
    tr = _Tracker("er_equality", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(8, t)
        d = model.dim(rng)
        rho = model.state(d, rng)
        m = model.measurement(d, rng)
        er = _er(m, rho)
        tr.trials += 1
        for route in ("hybrid", "quantum", "entropic"):
            info = qc_mutual_info(rho, m, route)
            tr.add(route, abs(er - info), 1e-8,
                   lambda: {"trial": t, "route": route, "er": er, "info": info,
                            "state": _state_json(rho), "instrument": _kraus_json(m)})
    return tr.report()


def check_dual_routes(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """Entropic and relative-entropy mutual information agree on random channels."""
    tr = _Tracker("dual_routes", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(9, t)
        d_in = model.dim(rng)
        d_out = model.dim(rng)
        rank = int(rng.integers(-(-d_in // d_out), 5 + d_in // d_out))
        phi = random_channel(d_in, d_out, rank, rng)
        rho = model.state(d_in, rng)
        ent, rel = mutual_info_entropic(rho, phi), mutual_info_relative(rho, phi)
        tr.trials += 1
        tr.add("routes", abs(ent - rel), 1e-8,
               lambda: {"trial": t, "entropic": ent, "relative": rel, "state": _state_json(rho),
                        "kraus": [encode_matrix(k) for k in phi.kraus]})
    return tr.report()


def isometric_mixture(rho, rng: np.random.Generator, n: int) -> KrausMeasurement:
    """Efficient measurement with ER(rho, .) = 0 that is not a unitary mixture.

    V_i = U_i (sqrt(p_i) P + W_i), with P the support projector of rho and
    {W_i} a random Kraus family on the kernel of rho.
    """
    spec = eig_hermitian(rho)
    live = spec.eigenvalues > 1e-10
    u_sup, u_ker = spec.eigenvectors[:, live], spec.eigenvectors[:, ~live]
    d = rho.shape[0]
    p = rng.dirichlet(np.ones(n))
    proj = u_sup @ dag(u_sup)
    ws = (random_kraus(u_ker.shape[1], u_ker.shape[1], n, rng) if u_ker.shape[1]
          else [np.zeros((0, 0))] * n)
    ks = []
    for pi, w in zip(p, ws):
        ks.append(haar_unitary(d, rng) @ (np.sqrt(pi) * proj + u_ker @ w @ dag(u_ker)))
    return KrausMeasurement(ks)


def check_zero_er(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """The support certificate P V^dag V P = pi P, |ER| <= 1e-7 and
    isospectrality of all posteriori states give the same verdict.

    Trials cycle through random measurements (generically ER > 0), unitary
    mixtures and measurements built to leave a rank-deficient state's
    spectrum intact. The violation counts disagreeing trials.
    """
    tr = _Tracker("zero_er", 0.0, tolerance_scale)
    positives = 0
    disagreements = 0
    for t in range(model.trials):
        rng = model.rng(10, t)
        d = model.dim(rng)
        kind = ("random", "unitary-mixture", "kernel-mixture")[t % 3]
        if kind == "random":
            rho = model.state(d, rng)
            m = random_measurement(d, int(rng.integers(2, model.outcomes[1] + 2)), rng)
        elif kind == "unitary-mixture":
            rho = model.state(d, rng)
            m = random_unitary_mixture(d, model.n_outcomes(rng), rng)
        else:
            rho = ginibre_state(d, rng, rank=int(rng.integers(1, d + 1)))
            m = isometric_mixture(rho, rng, model.n_outcomes(rng))
        cert, residual = zero_er_certificate(m, rho)
        er = _er(m, rho)
        iso, dist = posteriori_isospectral(m, rho)
        verdicts = (cert, abs(er) <= ZERO_ER_TOL, iso)
        agree = len(set(verdicts)) == 1
        positives += int(cert)
        disagreements += int(not agree)
        tr.trials += 1
        tr.add("verdict_disagreements", float(disagreements), 0.0,
               lambda: {"trial": t, "kind": kind, "certificate": cert, "certificate_residual": residual,
                        "er": er, "isospectral": iso, "spectrum_distance": dist,
                        "state": _state_json(rho), "instrument": _kraus_json(m)})
    return tr.report({"zero_er_cases": positives})


def check_identity(model: RandomModel, tolerance_scale: float = 1.0) -> PropertyReport:
    """I(rho, Pi) + I(rho, Lambda) = 2 H(rho), exactly 0 (1e-10) for pure rho."""
    tr = _Tracker("identity", 1e-8, tolerance_scale)
    for t in range(model.trials):
        rng = model.rng(11, t)
        d = model.dim(rng)
        rho = model.state(d, rng)
        m = model.measurement(d, rng)
        pure = haar_pure_state(d, rng)
        res, res_pure = identity_check(rho, m), identity_check(pure, m)
        tr.trials += 1
        tr.add("mixed", res, 1e-8, lambda: {"trial": t, "residual": res, "state": _state_json(rho),
                                            "instrument": _kraus_json(m)})
        tr.add("pure", res_pure, 1e-10, lambda: {"trial": t, "residual": res_pure,
                                                 "state": _state_json(pure), "instrument": _kraus_json(m)})
    return tr.report()


def common_range_instrument(d: int, n: int, rng: np.random.Generator) -> tuple[Instrument, list]:
    """Irreducible, non-efficient instrument with n < d outcomes.

    The columns w_k of a Haar unitary are split into n nonempty groups;
    operation i has Kraus |psi_i><w_k| over its group. Some group has two or
    more members, so the instrument is not efficient.
    """
    if not 1 <= n < d:
        raise ValueError(f"need 1 <= n < d, got n={n}, d={d}")
    w = haar_unitary(d, rng)
    cuts = np.sort(rng.choice(np.arange(1, d), size=n - 1, replace=False))
    groups = np.split(np.arange(d), cuts)
    psis = [haar_pure_vector(d, rng) for _ in range(n)]
    ops = [[np.outer(psi, w[:, k].conj()) for k in g] for psi, g in zip(psis, groups)]
    return Instrument(ops), psis


CLASSIFICATION_CASES = ("measure_prepare_m1", "measure_prepare_m2", "depolarizing",
                        "reducible", "projective", "random_efficient", "random_general", "common_range")


def _classification_case(kind: str, rng: np.random.Generator, model: RandomModel):
    """(instrument, expected (efficient, irreducible), expected common-range vectors or None)."""
    if kind == "measure_prepare_m1":
        return measure_prepare_instrument(1), (True, True), None
    if kind == "measure_prepare_m2":
        return measure_prepare_instrument(2), (False, True), [measure_prepare_psi0()] * 2
    if kind == "depolarizing":
        return depolarizing_instrument(), (False, False), None
    if kind == "reducible":
        return reducible_instrument(), (False, False), None
    if kind == "projective":
        return basis_measurement(model.dim(rng)), (True, True), None
    d = model.dim(rng, lo=2)
    if kind == "random_efficient":
        return random_measurement(d, model.n_outcomes(rng), rng), (True, True), None
    if kind == "random_general":
        # two or more generic Kraus operators in some outcome
        return random_instrument(d, int(rng.integers(1, 4)), rng), (False, False), None
    n = int(rng.integers(1, d))
    inst, psis = common_range_instrument(d, n, rng)
    return inst, (False, True), psis


def check_classification(model: RandomModel, tolerance_scale: float = 1.0,
                         purity_trials: int = 64) -> PropertyReport:
    """Structural efficient/irreducible verdicts match the expected ones,
    agree with Monte Carlo purity sampling, and recover the common range."""
    tr = _Tracker("classification", 1e-8, tolerance_scale)
    randoms = max(1, model.trials // 4)
    cases = [(k, 0) for k in CLASSIFICATION_CASES[:5]]
    cases += [(k, t) for t in range(randoms) for k in CLASSIFICATION_CASES[5:]]
    mismatches = 0
    for idx, (kind, t) in enumerate(cases):
        rng = model.rng(12, idx)
        inst, expected, psis = _classification_case(kind, rng, model)
        try:
            irreducible, report = is_irreducible(inst, purity_trials, seed=model.seed + idx)
            got = (report.efficient, irreducible)
            error = None
        except ConsistencyError as exc:
            got, error = None, str(exc)
        bad = got != expected
        mismatches += int(bad)
        tr.trials += 1
        tr.add("verdict_mismatches", float(mismatches), 0.0,
               lambda: {"case": kind, "index": idx, "expected": list(expected),
                        "got": list(got) if got else None, "error": error, "instrument": _kraus_json(inst)})
        if psis is not None and got == expected:
            for op, psi in zip(inst.operations, psis):
                if len(op) < 2:
                    continue
                cr = common_range_decomposition(op)
                dist = 1.0 if cr is None else sine_distance(cr.psi, psi)
                tr.add("common_range_vector", dist, 1e-8,
                       lambda: {"case": kind, "index": idx, "sine_distance": dist})
    return tr.report({"cases": len(cases)})


CheckFn = Callable[..., PropertyReport]

CORE_SUITES: dict[str, CheckFn] = {
    "nonnegativity": check_nonnegativity,
    "concavity": check_concavity,
    "monotonicity": check_monotonicity,
    "subadditivity": check_subadditivity,
    "continuity": check_continuity,
    "truncation": check_truncation,
    "er_bound": check_er_bound_general,
}

EXTRA_SUITES: dict[str, CheckFn] = {
    "er_equality": check_er_equality,
    "dual_routes": check_dual_routes,
    "zero_er": check_zero_er,
    "identity": check_identity,
    "classification": check_classification,
}

SUITES: dict[str, CheckFn] = {**CORE_SUITES, **EXTRA_SUITES}
GROUPS = {"all": tuple(CORE_SUITES), "extra": tuple(EXTRA_SUITES), "full": tuple(SUITES)}


def suite_names(name: str) -> tuple[str, ...]:
    """Expand a suite or group name; KeyError for unknown names."""
    if name in GROUPS:
        return GROUPS[name]
    if name in SUITES:
        return (name,)
    raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + sorted(GROUPS)}")


def run_suite(name: str, model: RandomModel, tolerance_scale: float = 1.0,
              fixture: str | None = None) -> list[PropertyReport]:
    names = suite_names(name)
    if fixture is not None and names != ("nonnegativity",):
        raise ValueError("--fixture applies to the nonnegativity suite only")
    reports = []
    for n in names:
        if fixture is not None:
            reports.append(SUITES[n](model, tolerance_scale, fixture=fixture))
        else:
            reports.append(SUITES[n](model, tolerance_scale))
    return reports
