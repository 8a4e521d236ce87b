import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmeter.channels import (
    HybridChannel,
    HybridState,
    QuantumChannel,
    apply,
    apply_hybrid,
    choi,
    complementary,
    compose_channels,
    constant_channel,
    dephasing_channel,
    depolarizing_channel,
    extend,
    hybrid_to_matrix,
    identity_channel,
    instrument_channel,
    qc_channel,
    qc_hybrid_channel,
    stinespring_isometry,
)
from qmeter.errors import CompletenessError, ShapeError
from qmeter.linalg import partial_trace
from qmeter.measurement import Instrument, basis_measurement, outcome_distribution
from qmeter.sampling import ginibre_state, haar_unitary, random_channel, random_instrument, random_measurement

seeds = st.integers(0, 2**32 - 1)


def apply_via_choi(c, rho, d_out, d_in):
    # Phi(rho) = Tr_in[C (I (x) rho^T)]
    return partial_trace(c @ np.kron(np.eye(d_out), rho.T), d_out, d_in, "first")


def test_completeness_enforced():
    with pytest.raises(CompletenessError):
        QuantumChannel([0.9 * np.eye(2)])
    QuantumChannel([0.9 * np.eye(2)], trace_preserving=False)


def test_shape_errors():
    with pytest.raises(ShapeError):
        QuantumChannel([np.eye(2), np.eye(3)])
    with pytest.raises(ShapeError):
        QuantumChannel([])
    with pytest.raises(ShapeError):
        apply(identity_channel(2), np.eye(3) / 3)


def test_zero_kraus_dropped():
    phi = QuantumChannel([np.eye(2), np.zeros((2, 2))])
    assert len(phi.kraus) == 1


def test_simple_channels(rng):
    rho = ginibre_state(3, rng)
    assert np.allclose(apply(identity_channel(3), rho), rho, atol=1e-15)
    assert np.allclose(apply(dephasing_channel(3), rho), np.diag(np.diag(rho)), atol=1e-15)
    assert np.allclose(apply(depolarizing_channel(3, 1.0), rho), np.eye(3) / 3, atol=1e-15)
    mixed = apply(depolarizing_channel(3, 0.25), rho)
    assert np.allclose(mixed, 0.75 * rho + 0.25 * np.eye(3) / 3, atol=1e-14)
    sigma = ginibre_state(2, rng)
    assert np.allclose(apply(constant_channel(3, sigma), rho), sigma, atol=1e-14)


@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_random_channel_trace_and_positivity(seed, d_in, d_out, m):
    rng = np.random.default_rng(seed)
    if d_out * m < d_in:
        m = -(-d_in // d_out)
    phi = random_channel(d_in, d_out, m, rng)
    out = apply(phi, ginibre_state(d_in, rng))
    assert abs(np.trace(out) - 1) <= 1e-12
    assert np.linalg.eigvalsh(out).min() >= -1e-12


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_stinespring_isometry_and_marginals(seed, d_in, d_out):
    rng = np.random.default_rng(seed)
    m = -(-d_in // d_out) + 1
    phi = random_channel(d_in, d_out, m, rng)
    v = stinespring_isometry(phi)
    assert np.max(np.abs(v.conj().T @ v - np.eye(d_in))) <= 1e-12
    rho = ginibre_state(d_in, rng)
    big = v @ rho @ v.conj().T
    assert np.max(np.abs(partial_trace(big, d_out, m, "first") - apply(phi, rho))) <= 1e-12
    assert np.max(np.abs(partial_trace(big, d_out, m, "second") - apply(complementary(phi), rho))) <= 1e-12


def test_complementary_of_identity_and_constant(rng):
    rho = ginibre_state(3, rng)
    # identity: environment is one-dimensional
    assert np.allclose(apply(complementary(identity_channel(3)), rho), [[1.0]], atol=1e-15)
    # dephasing: environment sees the diagonal
    env = apply(complementary(dephasing_channel(3)), rho)
    assert np.allclose(np.diag(env), np.diag(rho), atol=1e-15)


def test_complementary_entries(rng):
    phi = random_channel(3, 2, 3, rng)
    rho = ginibre_state(3, rng)
    env = apply(complementary(phi), rho)
    for k, a in enumerate(phi.kraus):
        for l, b in enumerate(phi.kraus):
            assert abs(env[k, l] - np.trace(a @ rho @ b.conj().T)) <= 1e-13


def test_choi_properties(rng):
    phi = random_channel(3, 2, 2, rng)
    c = choi(phi)
    assert np.linalg.eigvalsh(c).min() >= -1e-12
    assert np.allclose(partial_trace(c, 2, 3, "second"), np.eye(3), atol=1e-12)
    rho = ginibre_state(3, rng)
    assert np.allclose(apply_via_choi(c, rho, 2, 3), apply(phi, rho), atol=1e-12)
    # identity channel gives the unnormalised maximally entangled projector
    w = np.eye(2).reshape(-1)
    assert np.allclose(choi(identity_channel(2)), np.outer(w, w), atol=1e-15)


def test_compose_and_extend(rng):
    phi = random_channel(2, 3, 2, rng)
    psi = random_channel(3, 2, 2, rng)
    rho = ginibre_state(2, rng)
    assert np.allclose(apply(compose_channels(psi, phi), rho), apply(psi, apply(phi, rho)), atol=1e-13)
    with pytest.raises(ShapeError):
        compose_channels(phi, phi)
    sigma = ginibre_state(2, rng)
    out = apply(extend(phi, 2), np.kron(rho, sigma))
    assert np.allclose(out, np.kron(apply(phi, rho), sigma), atol=1e-13)


def test_unitary_channel_choi_rank(rng):
    u = haar_unitary(3, rng)
    assert np.linalg.matrix_rank(choi(QuantumChannel([u])), tol=1e-10) == 1


def test_qc_channel_diagonal(rng):
    m = random_instrument(3, 3, rng)
    rho = ginibre_state(3, rng)
    out = apply(qc_channel(m), rho)
    assert np.allclose(out, np.diag(np.diag(out)), atol=1e-14)
    assert np.allclose(np.diag(out).real, outcome_distribution(m, rho), atol=1e-13)


def test_qc_hybrid_is_trace_of_instrument_channel(rng):
    m = random_instrument(3, 4, rng)
    rho = ginibre_state(3, rng)
    lam = apply_hybrid(instrument_channel(m), rho)
    pi = apply_hybrid(qc_hybrid_channel(m), rho)
    assert all(c.shape == (1, 1) for c in pi.components)
    assert np.allclose(pi.traces, lam.traces, atol=1e-13)


def test_instrument_channel_total(rng):
    m = random_measurement(3, 3, rng)
    rho = ginibre_state(3, rng)
    s = apply_hybrid(instrument_channel(m), rho)
    assert abs(s.traces.sum() - 1) <= 1e-12
    assert np.allclose(s.total(), apply(instrument_channel(m).total_channel(), rho), atol=1e-14)
    assert s.labels == m.labels


def test_hybrid_channel_extend(rng):
    m = random_instrument(2, 2, rng)
    lam = instrument_channel(m)
    rho, sigma = ginibre_state(2, rng), ginibre_state(3, rng)
    ext = apply_hybrid(lam.extend(3), np.kron(rho, sigma))
    ref = apply_hybrid(lam, rho).tensor_right(sigma)
    for a, b in zip(ext.components, ref.components):
        assert np.allclose(a, b, atol=1e-13)


def test_hybrid_state_helpers():
    s = HybridState((np.eye(2) / 2, np.zeros((2, 2))))
    assert list(s.defined) == [True, False]
    assert s.labels == ("0", "1")
    m = hybrid_to_matrix(HybridState((np.eye(2) / 4, np.eye(2) / 4)))
    assert np.allclose(m, np.eye(4) / 4)
    with pytest.raises(ShapeError):
        HybridState((np.eye(2), np.eye(3)))


def test_hybrid_channel_validation():
    with pytest.raises(CompletenessError):
        HybridChannel([[0.5 * np.eye(2)]])
    with pytest.raises(ShapeError):
        HybridChannel([[]])


def test_zero_kraus_keeps_outcome(rng):
    m = Instrument([[np.eye(2)], [np.zeros((2, 2))]])
    s = apply_hybrid(instrument_channel(m), ginibre_state(2, rng))
    assert len(s) == 2 and s.traces[1] == 0.0
    assert len(basis_measurement(3).operations) == 3
