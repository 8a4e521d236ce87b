import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmeter.errors import ClassificationError, ConsistencyError
from qmeter.fixtures import (
    measure_prepare_instrument,
    measure_prepare_psi0,
    depolarizing_instrument,
    qubit_unitary_mixture,
    reducible_instrument,
)
from qmeter.linalg import sine_distance
from qmeter.measurement import Instrument, KrausMeasurement, basis_measurement, entropy_reduction_direct
from qmeter.sampling import ginibre_state, haar_pure_vector, random_instrument, random_measurement
from qmeter.structure import (
    as_kraus_measurement,
    classify,
    common_range_decomposition,
    ensemble_rigidity,
    entanglement_breaking_factor,
    is_efficient,
    is_irreducible,
    posteriori_isospectral,
    reduce_collinear,
    zero_er_certificate,
)
from qmeter.verify import isometric_mixture

seeds = st.integers(0, 2**32 - 1)


def test_reduce_collinear_merges(rng):
    v = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    red = reduce_collinear([v, 2 * v])
    assert len(red) == 1
    assert np.allclose(red[0], np.sqrt(5) * v, atol=1e-14)
    # a phase counts as collinear
    assert len(reduce_collinear([v, 1j * v, np.zeros((2, 2))])) == 1
    assert len(reduce_collinear([v, v + 1e-3 * np.eye(2)])) == 2


@given(seeds, st.integers(2, 4), st.integers(1, 4))
def test_reduce_collinear_preserves_map(seed, d, groups):
    rng = np.random.default_rng(seed)
    kraus = []
    for _ in range(groups):
        v = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for c in rng.uniform(0.2, 2.0, int(rng.integers(1, 4))):
            kraus.append(c * np.exp(1j * rng.uniform(0, 6.3)) * v)
    rho = ginibre_state(d, rng)
    before = sum(k @ rho @ k.conj().T for k in kraus)
    red = reduce_collinear(kraus)
    after = sum(k @ rho @ k.conj().T for k in red)
    assert len(red) == groups
    assert np.max(np.abs(before - after)) <= 1e-10 * max(1.0, np.max(np.abs(before)))


def test_is_efficient_cases(rng):
    assert is_efficient(basis_measurement(3)) == (True, [1, 1, 1])
    assert is_efficient(reducible_instrument()) == (False, [4])
    assert is_efficient(measure_prepare_instrument(2))[1] == [2, 2]
    m = as_kraus_measurement(Instrument([[np.eye(2) / 2, np.eye(2) / 2], [np.eye(2) / np.sqrt(2)]]))
    assert isinstance(m, KrausMeasurement) and np.allclose(m.kraus[0], np.eye(2) / np.sqrt(2))
    with pytest.raises(ClassificationError):
        as_kraus_measurement(depolarizing_instrument())


def test_common_range_measure_prepare():
    inst = measure_prepare_instrument(2)
    for op in inst.operations:
        cr = common_range_decomposition(op)
        assert cr is not None
        assert sine_distance(cr.psi, measure_prepare_psi0()) <= 1e-12
        for k, w in zip(op, cr.functionals):
            assert np.max(np.abs(k - np.outer(cr.psi, w.conj()))) <= 1e-12
    assert common_range_decomposition(reducible_instrument().operations[0]) is None
    assert common_range_decomposition([np.eye(2)]) is None
    assert common_range_decomposition([np.zeros((2, 2))]) is None


def test_classification_fixtures():
    r = classify(measure_prepare_instrument(1))
    assert r.efficient and r.irreducible
    r = classify(measure_prepare_instrument(2))
    assert not r.efficient and r.irreducible
    assert [e.kind for e in r.operations] == ["common-range", "common-range"]
    assert abs(r.monte_carlo_purity - 1) <= 1e-8
    r = classify(depolarizing_instrument())
    assert not r.efficient and not r.irreducible
    assert r.mixed_witness is not None and r.monte_carlo_purity < 1 - 1e-8
    assert not classify(reducible_instrument()).irreducible


@given(seeds, st.integers(1, 5), st.integers(1, 5))
def test_efficient_implies_irreducible(seed, d, n):
    rng = np.random.default_rng(seed)
    ok, report = is_irreducible(random_measurement(d, n, rng), trials=16, seed=seed)
    assert ok and report.efficient


def test_random_general_is_reducible(rng):
    for _ in range(5):
        inst = random_instrument(3, 2, rng)
        assert not is_irreducible(inst, trials=16)[0]


def test_consistency_error_when_sampling_disagrees(monkeypatch):
    import qmeter.structure as structure

    monkeypatch.setattr(structure, "posteriori_purity_scan", lambda m, trials, rng: (0.5, None))
    with pytest.raises(ConsistencyError):
        is_irreducible(basis_measurement(2), trials=4)


def test_irreducible_instrument_nonnegative_er(rng):
    inst = measure_prepare_instrument(2)
    for _ in range(10):
        assert entropy_reduction_direct(inst, ginibre_state(4, rng)) >= -1e-10


def test_entanglement_breaking_factor():
    for op in measure_prepare_instrument(2).operations:
        psi, b, residual = entanglement_breaking_factor(op)
        assert residual <= 1e-12
        assert sine_distance(psi, measure_prepare_psi0()) <= 1e-12
        assert abs(np.trace(b) - 2) <= 1e-12
    _, _, residual = entanglement_breaking_factor([np.eye(2)])
    assert residual > 0.1


def test_zero_er_certificate_cases(rng):
    rho = ginibre_state(2, rng)
    ok, res = zero_er_certificate(qubit_unitary_mixture(), rho)
    assert ok and res <= 1e-12
    ok, _ = zero_er_certificate(basis_measurement(2), rho)
    assert not ok
    # pure state: any efficient measurement passes
    psi = haar_pure_vector(3, rng)
    assert zero_er_certificate(random_measurement(3, 3, rng), np.outer(psi, psi.conj()))[0]


@given(seeds, st.integers(2, 5), st.integers(1, 4))
def test_zero_er_verdicts_agree(seed, d, n):
    rng = np.random.default_rng(seed)
    rho = ginibre_state(d, rng, rank=int(rng.integers(1, d + 1)))
    for m in (random_measurement(d, n, rng), isometric_mixture(rho, rng, n)):
        cert, _ = zero_er_certificate(m, rho)
        iso, _ = posteriori_isospectral(m, rho)
        zero = abs(entropy_reduction_direct(m, rho)) <= 1e-7
        assert cert == iso == zero


def test_isometric_mixture_positive(rng):
    rho = ginibre_state(4, rng, rank=2)
    m = isometric_mixture(rho, rng, 3)
    assert zero_er_certificate(m, rho)[0]
    # not a unitary mixture on the whole space
    assert not zero_er_certificate(m, ginibre_state(4, rng))[0]


def test_ensemble_rigidity(rng):
    rho = ginibre_state(3, rng)
    assert ensemble_rigidity([(0.3, rho), (0.7, rho)])
    assert ensemble_rigidity([(1.0, rho), (0.0, ginibre_state(3, rng))])
    assert not ensemble_rigidity([(0.5, rho), (0.5, ginibre_state(3, rng))])
    u = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    # isospectral members that differ are never rigid
    assert not ensemble_rigidity([(0.5, rho), (0.5, u @ rho @ u.T)])
