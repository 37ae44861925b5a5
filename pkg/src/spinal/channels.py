"""Memoryless channel simulators, seeded and counter-based.

Noise at stream index t is a pure function of (seed, t): flips come from
thresholding a uniform word, Gaussian noise from the inverse CDF of the
same stream.  That makes memorylessness directly testable and lets a
session transmit pass-by-pass while reproducing a single-shot run
(pass l starts at offset (l-1)*n/k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError
from .gaussian import gaussian_quantile
from .hashfam import HashSeed, stream_uniform


@dataclass(frozen=True)
class Bsc:
    """Binary symmetric channel; p in (0, 1/2) for a real experiment, but
    the simulator accepts the whole [0, 1] range for degenerate tests."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"channel.p: must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Awgn:
    """Additive white Gaussian noise with variance sigma2 (0 allowed in tests)."""

    sigma2: float

    def __post_init__(self) -> None:
        if not self.sigma2 >= 0.0:
            raise ConfigError(f"channel.sigma2: must be >= 0, got {self.sigma2}")


ChannelModel = Union[Bsc, Awgn]


def bsc_transmit(bits: np.ndarray, p: float, noise_seed: HashSeed, offset: int = 0) -> np.ndarray:
    """Flip each bit independently with probability p."""
    bits = np.asarray(bits, dtype=np.uint8)
    u = stream_uniform(noise_seed, offset, len(bits))
    return bits ^ (u < p).astype(np.uint8)


def awgn_transmit(
    symbols: np.ndarray, sigma2: float, noise_seed: HashSeed, offset: int = 0
) -> np.ndarray:
    """Add i.i.d. N(0, sigma2) noise to each symbol."""
    symbols = np.asarray(symbols, dtype=np.float64)
    u = stream_uniform(noise_seed, offset, len(symbols))
    return symbols + math.sqrt(sigma2) * gaussian_quantile(u)


def transmit(
    channel: ChannelModel, row: np.ndarray, noise_seed: HashSeed, offset: int = 0
) -> np.ndarray:
    if isinstance(channel, Bsc):
        return bsc_transmit(row, channel.p, noise_seed, offset)
    return awgn_transmit(row, channel.sigma2, noise_seed, offset)
