"""Canonical named objects shipped with the package.

``build_document`` constructs them from scratch; ``bundled_document`` loads
the frozen copy in ``data/fixtures.json``. The two agree entrywise.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .channels import depolarizing_channel
from .io import Document, load_document, save_document
from .linalg import fix_phases, ket
from .measurement import Instrument, KrausMeasurement, basis_measurement, unitary_mixture
from .sampling import ginibre_state, random_measurement

RANDOM_SEED = 20240417
BUNDLED = "fixtures.json"


def measure_prepare_psi0() -> np.ndarray:
    """Unit vector in C^4 with its largest entry real and positive."""
    v = np.array([1.0, 1.0j, -1.0, 2.0]) / np.sqrt(7.0)
    return fix_phases(v.reshape(-1, 1))[:, 0]


def measure_prepare_instrument(multiplicity: int) -> Instrument:
    """M(F)[rho] = Tr(P(F) rho) |psi0><psi0| with P a projection-valued measure on C^4.

    With multiplicity one each outcome is a rank-one projector and the
    instrument is efficient; with multiplicity two each outcome projects on a
    plane and needs two Kraus operators sharing the range psi0.
    """
    psi0 = measure_prepare_psi0()
    d = 4
    if d % multiplicity:
        raise ValueError(f"multiplicity {multiplicity} does not divide {d}")
    blocks = [range(s, s + multiplicity) for s in range(0, d, multiplicity)]
    ops = [[np.outer(psi0, ket(j, d)) for j in block] for block in blocks]
    if multiplicity == 1:
        return KrausMeasurement([op[0] for op in ops])
    return Instrument(ops)


def reducible_instrument() -> Instrument:
    """Single-outcome qubit instrument with Kraus |i><j|/sqrt(2): every input goes to I/2."""
    ks = [np.outer(ket(i, 2), ket(j, 2)) / np.sqrt(2) for i in range(2) for j in range(2)]
    return Instrument([ks])


def depolarizing_instrument(p: float = 0.5) -> Instrument:
    return Instrument([depolarizing_channel(2, p).kraus])


def qubit_unitary_mixture() -> KrausMeasurement:
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    return unitary_mixture([0.5, 0.3, 0.2], [np.eye(2), x, h])


def build_document() -> Document:
    rng = np.random.default_rng(RANDOM_SEED)
    random_state = ginibre_state(4, rng)
    random_meas = random_measurement(4, 3, rng)
    plus = np.full((2, 2), 0.5, dtype=complex)
    doc = Document()
    doc.states = {
        "qubit_mixed": np.eye(2, dtype=complex) / 2,
        "qubit_zero": np.diag([1.0, 0.0]).astype(complex),
        "qubit_plus": plus,
        "random_d4": random_state,
        "prepared_state": np.outer(measure_prepare_psi0(), measure_prepare_psi0().conj()),
    }
    doc.measurements = {
        "qubit_basis": basis_measurement(2),
        "projective_d4": basis_measurement(4),
        "unitary_mixture": qubit_unitary_mixture(),
        "measure_prepare_m1": measure_prepare_instrument(1),
        "random_d4": random_meas,
    }
    doc.instruments = {
        "measure_prepare_m2": measure_prepare_instrument(2),
        "reducible": reducible_instrument(),
        "depolarizing": depolarizing_instrument(),
    }
    doc.channels = {"depolarizing": depolarizing_channel(2, 0.5)}
    return doc


def bundled_path():
    return resources.files("qmeter").joinpath("data").joinpath(BUNDLED)


def bundled_document() -> Document:
    with resources.as_file(bundled_path()) as path:
        return load_document(path)


def write_bundled(path) -> None:
    save_document(build_document(), path)
