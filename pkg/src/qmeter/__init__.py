"""Entropy reduction of quantum measurements and quantum mutual information
of channels, for finite-dimensional states, channels and instruments."""

from .channels import (
    HybridChannel,
    HybridState,
    QuantumChannel,
    apply,
    apply_hybrid,
    choi,
    complementary,
    instrument_channel,
    qc_channel,
    qc_hybrid_channel,
    stinespring_isometry,
)
from .entropy import (
    Infinite,
    classical_relative_entropy,
    hybrid_relative_entropy,
    relative_entropy,
    shannon,
    von_neumann,
)
from .errors import (
    ClassificationError,
    CompletenessError,
    ConsistencyError,
    NotHermitianError,
    NotPositiveError,
    SchemaError,
    ShapeError,
)
from .linalg import eig_hermitian, partial_trace, purify, tensor
from .measurement import (
    Instrument,
    KrausMeasurement,
    compose,
    entropy_reduction_direct,
    mean_posteriori_entropy,
    outcome_distribution,
    posteriori,
    tensor_measurement,
)
from .mutual_info import (
    entropy_reduction,
    general_bound_terms,
    identity_check,
    lambda_mutual_info,
    mutual_info_entropic,
    mutual_info_relative,
    qc_mutual_info,
)
from .sampling import RandomModel
from .structure import classify, is_efficient, is_irreducible, zero_er_certificate

__version__ = "0.1.0"
