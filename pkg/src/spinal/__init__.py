"""Rateless spinal codes: encoder, beam-search decoder, channel simulation,
and error-exponent analysis."""

from .channels import Awgn, Bsc, ChannelModel, awgn_transmit, bsc_transmit
from .decoder import (
    DecodeResult,
    Observation,
    beam_decode,
    branch_cost,
    ml_decode_exact,
    reliable_prefix,
)
from .encoder import (
    AwgnShape,
    CodeParams,
    Codeword,
    compute_spine,
    emit_pass_awgn,
    emit_pass_bsc,
    encode,
    map_symbol,
)
from .errors import CodewordFormatError, ConfigError
from .hashfam import HashSeed, derive_seed, hash_step
from .session import CheckBits, Genie, MaxPasses, SessionResult, SweepCell, run_session, sweep

__version__ = "0.1.0"

__all__ = [
    "Awgn",
    "AwgnShape",
    "Bsc",
    "ChannelModel",
    "CheckBits",
    "CodeParams",
    "Codeword",
    "CodewordFormatError",
    "ConfigError",
    "DecodeResult",
    "Genie",
    "HashSeed",
    "MaxPasses",
    "Observation",
    "SessionResult",
    "SweepCell",
    "awgn_transmit",
    "beam_decode",
    "branch_cost",
    "bsc_transmit",
    "compute_spine",
    "derive_seed",
    "emit_pass_awgn",
    "emit_pass_bsc",
    "encode",
    "hash_step",
    "map_symbol",
    "ml_decode_exact",
    "reliable_prefix",
    "run_session",
    "sweep",
]
