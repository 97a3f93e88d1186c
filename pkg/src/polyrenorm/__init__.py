"""Sequence-space norms, gap sequences and polyhedral-renorming checks."""

from ._kernels import BACKEND
from .decomp import (
    Certificate,
    GapTable,
    Modulus,
    StarCertificate,
    combine_sequences,
    gap_table,
    lambda_sequence,
    orlicz_modulus,
    prefix_gap,
    prop36_chain,
    star_check,
    star_orlicz_certificate,
    star_summable_certificate,
    subset_gap,
    subset_sup,
)
from .errors import ConstructionError, EngineError, HypothesisError, ParseError, SupportTooLarge
from .norms import (
    BlockWeights,
    NakanoExponents,
    NormEngine,
    OrliczFn,
    blockweight_engine,
    blockweight_norm,
    c0_norm,
    day_engine,
    day_norm,
    engine_from_name,
    envelope_norm,
    luxemburg_norm,
    nakano_engine,
    nakano_modular,
    nakano_norm,
    orlicz_engine,
    summing_engine,
)
from .seqvec import SparseVec, greedy_support, parse_vector, prefix_project, project, remainder
from .sequences import NullSequence, sequence_from_id

__version__ = "0.1.0"
