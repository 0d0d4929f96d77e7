"""Expander chunked codes: construction, BP decoding, rate analysis and line-network simulation."""

__version__ = "0.1.0"

from .errors import (GenerationError, IntegrityError, InvariantViolation, NotDecodableError,
                     ParameterError, ParseError)
from .field import Field, field_for_size, gf
from .rank_model import RankDistribution, beta_table
from .codes import ChunkedCode, construct_ec
from .graphs import RegularGraph, random_regular_graph
from .decoder import ChunkTransferRecord, bp_decode
from .analysis import optimize_degree, rate_report
from .netsim import LineNetworkConfig, run_end_to_end

__all__ = [
    "ChunkTransferRecord", "ChunkedCode", "Field", "GenerationError", "IntegrityError",
    "InvariantViolation", "LineNetworkConfig", "NotDecodableError", "ParameterError", "ParseError",
    "RankDistribution", "RegularGraph", "beta_table", "bp_decode", "construct_ec", "field_for_size",
    "gf", "optimize_degree", "random_regular_graph", "rate_report", "run_end_to_end",
]
