"""Random states, measurements, channels and instruments, plus the
seeded model that drives the verification sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel
from .linalg import dag
from .measurement import Instrument, KrausMeasurement

ENSEMBLES = ("haar-pure", "ginibre-mixed", "rank-constrained")


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_pure_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = complex_gaussian(d, rng)
    return v / np.linalg.norm(v)


def haar_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = haar_pure_vector(d, rng)
    return np.outer(v, v.conj())


def ginibre_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """G G^dag / Tr with G a d x rank complex Gaussian matrix (full rank by default)."""
    g = complex_gaussian((d, rank or d), rng)
    rho = g @ dag(g)
    rho = (rho + dag(rho)) / 2
    return rho / np.trace(rho).real


def haar_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    """d_out x d_in isometry from the QR factorisation of a complex Gaussian matrix."""
    if d_out < d_in:
        raise ValueError(f"no isometry from dimension {d_in} into {d_out}")
    q, r = np.linalg.qr(complex_gaussian((d_out, d_in), rng))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_isometry(d, d, rng)


def random_kraus(d_in: int, d_out: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Slice a Haar isometry H_in -> H_out (x) C^count into ``count`` Kraus blocks."""
    w = haar_isometry(d_in, d_out * count, rng)
    return [w[k * d_out:(k + 1) * d_out, :] for k in range(count)]


def random_measurement(d: int, n: int, rng: np.random.Generator) -> KrausMeasurement:
    return KrausMeasurement(random_kraus(d, d, n, rng))


def random_channel(d_in: int, d_out: int, m: int, rng: np.random.Generator) -> QuantumChannel:
    return QuantumChannel(random_kraus(d_in, d_out, m, rng))


def random_instrument(d: int, n: int, rng: np.random.Generator, max_kraus: int = 3,
                      force_general: bool = True) -> Instrument:
    """Instrument with 1..max_kraus Kraus operators per outcome.

    With ``force_general`` at least one outcome gets two or more Kraus
    operators, so the instrument is generically not efficient.
    """
    counts = rng.integers(1, max_kraus + 1, size=n)
    if force_general and max_kraus > 1 and counts.max() < 2:
        counts[rng.integers(n)] = int(rng.integers(2, max_kraus + 1))
    ks = random_kraus(d, d, int(counts.sum()), rng)
    ops, pos = [], 0
    for c in counts:
        ops.append(ks[pos:pos + c])
        pos += c
    return Instrument(ops)


def random_unitary_mixture(d: int, n: int, rng: np.random.Generator) -> KrausMeasurement:
    p = rng.dirichlet(np.ones(n))
    return KrausMeasurement([np.sqrt(pi) * haar_unitary(d, rng) for pi in p])


@dataclass(frozen=True)
class RandomModel:
    """Seeded generator of verification inputs.

    Every (property, trial) pair gets its own generator derived from
    ``seed``, so a report can be reproduced trial by trial.
    """

    seed: int = 7
    dims: tuple[int, int] = (2, 6)
    outcomes: tuple[int, int] = (1, 6)
    trials: int = 200
    ensemble: str = "ginibre-mixed"

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown state ensemble {self.ensemble!r}; choose from {ENSEMBLES}")
        if not (1 <= self.dims[0] <= self.dims[1]):
            raise ValueError(f"bad dimension range {self.dims}")
        if not (1 <= self.outcomes[0] <= self.outcomes[1]):
            raise ValueError(f"bad outcome range {self.outcomes}")

    def rng(self, stream: int, trial: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream, trial])

    def dim(self, rng: np.random.Generator, lo: int | None = None) -> int:
        return int(rng.integers(max(lo or 0, self.dims[0]), self.dims[1] + 1))

    def n_outcomes(self, rng: np.random.Generator, lo: int | None = None) -> int:
        return int(rng.integers(max(lo or 0, self.outcomes[0]), max(self.outcomes[1], lo or 0) + 1))

    def state(self, d: int, rng: np.random.Generator) -> np.ndarray:
        if self.ensemble == "haar-pure":
            return haar_pure_state(d, rng)
        if self.ensemble == "rank-constrained":
            return ginibre_state(d, rng, rank=int(rng.integers(1, d + 1)))
        return ginibre_state(d, rng)

    def measurement(self, d: int, rng: np.random.Generator, min_outcomes: int | None = None) -> KrausMeasurement:
        return random_measurement(d, self.n_outcomes(rng, min_outcomes), rng)
