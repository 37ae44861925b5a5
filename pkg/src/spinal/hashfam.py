"""Seeded hash family mapping a (state, block) pair to a fresh state.

The family is a fixed multiply-add-shift construction: the state and block
are packed into one integer z and hashed as the top ``nu`` bits of
``(a*z + b) mod 2**(2*nu)`` with ``a`` odd.  The pair (a, b) is expanded
deterministically from a 256-bit seed, so the same seed reproduces the same
function bit-for-bit on every platform.  For two packed inputs whose
difference has a set bit below position ``nu`` the output pair is exactly
uniform and independent over the seed draw; for any distinct pair the
collision probability is at most 2**-nu (2-universality).

Everything here is pure integer arithmetic: scalar paths use Python ints
(any ``nu`` up to 256), vector paths use numpy uint64 (``nu`` up to 64).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

MAX_NU = 256
MAX_K = 16

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
# domain-separation tags for the independent derivation chains
_TAG_PARAMS = 0xC2B2AE3D27D4EB4F
_TAG_STREAM = 0x165667B19E3779F9
_TAG_DERIVE = 0x27D4EB2F165667C5


def _mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit word (Python ints)."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _mix64_vec(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays (wrapping multiplies)."""
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


@dataclass(frozen=True)
class HashSeed:
    """256 bits of key material selecting one member of the hash family."""

    words: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        if len(self.words) != 4 or any(not (0 <= w <= _M64) for w in self.words):
            raise ConfigError("seed: key material must be four 64-bit words")

    @classmethod
    def from_int(cls, value: int) -> "HashSeed":
        if value < 0 or value >> 256:
            raise ConfigError("seed: value must fit in 256 bits")
        return cls(tuple((value >> s) & _M64 for s in (192, 128, 64, 0)))

    @classmethod
    def from_hex(cls, text: str) -> "HashSeed":
        text = text.strip()
        if not text or len(text) > 64:
            raise ConfigError(f"seed: expected up to 64 hex chars, got {text!r}")
        try:
            return cls.from_int(int(text, 16))
        except ValueError as exc:
            raise ConfigError(f"seed: bad hex {text!r}") from exc

    def to_int(self) -> int:
        w = self.words
        return (w[0] << 192) | (w[1] << 128) | (w[2] << 64) | w[3]

    def to_hex(self) -> str:
        return f"{self.to_int():064x}"


def derive_seed(master: HashSeed, label: str) -> HashSeed:
    """Derive an independent seed for a named purpose (RNG stream split)."""
    if not label:
        raise ConfigError("derive_seed: label must be non-empty")
    data = label.encode("utf-8")
    chunks = [
        int.from_bytes(data[i : i + 8], "little") for i in range(0, len(data), 8)
    ]
    words = []
    for lane in range(4):
        h = _mix64(master.words[lane] ^ (_TAG_DERIVE + lane * _GOLDEN))
        for c in chunks:
            h = _mix64(h ^ c)
        words.append(_mix64(h ^ len(data)))
    return HashSeed(tuple(words))


def _check_widths(nu: int, k: int) -> None:
    if not 1 <= nu <= MAX_NU:
        raise ConfigError(f"nu: must be in [1, {MAX_NU}], got {nu}")
    if not 1 <= k <= MAX_K:
        raise ConfigError(f"k: must be in [1, {MAX_K}], got {k}")


def hash_params(seed: HashSeed, nu: int, k: int) -> tuple[int, int]:
    """Expand the seed into the (a, b) pair for width (nu, k); a is odd."""
    _check_widths(nu, k)
    base = _mix64(_TAG_PARAMS ^ (nu << 16) ^ k)
    for w in seed.words:
        base = _mix64(base ^ w)
    nwords = (2 * nu + 63) // 64
    a = 0
    b = 0
    for i in range(nwords):
        a |= _mix64((base + (i + 1) * _GOLDEN) & _M64) << (64 * i)
        b |= _mix64((base + (nwords + i + 1) * _GOLDEN) & _M64) << (64 * i)
    mask = (1 << (2 * nu)) - 1
    return (a & mask) | 1, b & mask


def hash_params_vec(
    words: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray], nu: int, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of :func:`hash_params` over many seeds; needs 2*nu <= 64."""
    _check_widths(nu, k)
    if 2 * nu > 64:
        raise ConfigError("hash_params_vec: supports nu <= 32 only")
    base = np.full_like(words[0], _mix64(_TAG_PARAMS ^ (nu << 16) ^ k))
    for w in words:
        base = _mix64_vec(base ^ w)
    a = _mix64_vec(base + np.uint64(_GOLDEN))
    b = _mix64_vec(base + np.uint64((2 * _GOLDEN) & _M64))
    mask = np.uint64((1 << (2 * nu)) - 1)
    return (a & mask) | np.uint64(1), b & mask


def hash_step(seed: HashSeed, state: int, block: int, nu: int, k: int) -> int:
    """One hash-chain step: new nu-bit state from (state, block) under seed."""
    _check_widths(nu, k)
    if not 0 <= state < (1 << nu):
        raise ConfigError(f"state: must fit in {nu} bits, got {state:#x}")
    if not 0 <= block < (1 << k):
        raise ConfigError(f"block: must fit in {k} bits, got {block:#x}")
    a, b = hash_params(seed, nu, k)
    z = (state << k) | block
    return ((a * z + b) & ((1 << (2 * nu)) - 1)) >> nu


def _mulhi64(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """High 64 bits of the 128-bit product of uint64 arrays."""
    m32 = np.uint64(0xFFFFFFFF)
    x0, x1 = x & m32, x >> np.uint64(32)
    y0, y1 = y & m32, y >> np.uint64(32)
    lo_lo = x0 * y0
    mid1 = x1 * y0 + (lo_lo >> np.uint64(32))
    mid2 = x0 * y1 + (mid1 & m32)
    return x1 * y1 + (mid1 >> np.uint64(32)) + (mid2 >> np.uint64(32))


class HashEngine:
    """Pre-expanded hash parameters for one (seed, nu, k) triple.

    Vectorized stepping is available for nu <= 64.  Beyond that only the
    scalar path works; callers fall back to Python-int loops.
    """

    def __init__(self, seed: HashSeed, nu: int, k: int):
        _check_widths(nu, k)
        self.seed = seed
        self.nu = nu
        self.k = k
        self.a, self.b = hash_params(seed, nu, k)
        self._mask = (1 << (2 * nu)) - 1
        self.vectorized = nu <= 64

    def step(self, state: int, block: int) -> int:
        z = (state << self.k) | block
        return ((self.a * z + self.b) & self._mask) >> self.nu

    def step_vec(self, states: np.ndarray, blocks: np.ndarray) -> np.ndarray:
        """Hash uint64 state/block arrays elementwise (nu <= 64)."""
        nu, k = self.nu, self.k
        if nu > 64:
            raise ConfigError("step_vec: nu > 64 requires the scalar path")
        states = states.astype(np.uint64, copy=False)
        blocks = blocks.astype(np.uint64, copy=False)
        if 2 * nu <= 64:
            z = (states << np.uint64(k)) | blocks
            prod = np.uint64(self.a) * z + np.uint64(self.b)
            return (prod & np.uint64(self._mask)) >> np.uint64(nu)
        # 128-bit path: z = state*2^k + block may exceed 64 bits, as may a, b.
        a_lo = np.uint64(self.a & _M64)
        a_hi = np.uint64(self.a >> 64)
        b_lo = np.uint64(self.b & _M64)
        b_hi = np.uint64(self.b >> 64)
        z_lo = (states << np.uint64(k)) | blocks
        z_hi = states >> np.uint64(64 - k)
        lo = a_lo * z_lo
        hi = _mulhi64(a_lo, z_lo) + a_lo * z_hi + a_hi * z_lo
        lo2 = lo + b_lo
        hi = hi + b_hi + (lo2 < lo)
        lo = lo2
        if 2 * nu < 128:
            hi = hi & np.uint64((1 << (2 * nu - 64)) - 1)
        if nu == 64:
            return hi
        out = (lo >> np.uint64(nu)) | (hi << np.uint64(64 - nu))
        return out & np.uint64((1 << nu) - 1)


def hash_step_vec(
    seed: HashSeed, states: np.ndarray, blocks: np.ndarray, nu: int, k: int
) -> np.ndarray:
    """Vectorized :func:`hash_step` over parallel state/block arrays."""
    return HashEngine(seed, nu, k).step_vec(states, blocks)


def stream_u64(seed: HashSeed, start: int, count: int) -> np.ndarray:
    """Counter-based uniform 64-bit stream; word i depends only on (seed, i)."""
    if count < 0 or start < 0:
        raise ConfigError("stream_u64: start and count must be nonnegative")
    base = _mix64(_TAG_STREAM)
    for w in seed.words:
        base = _mix64(base ^ w)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix64_vec(np.uint64(base) + idx * np.uint64(_GOLDEN))


def stream_uniform(seed: HashSeed, start: int, count: int) -> np.ndarray:
    """Uniform floats strictly inside (0, 1), one per counter index.

    Uses the top 52 bits: (w + 0.5) * 2^-52 is then exact in float64, so the
    endpoints 0 and 1 are excluded (max value 1 - 2^-53, min 2^-53).
    """
    w = stream_u64(seed, start, count) >> np.uint64(12)
    return (w.astype(np.float64) + 0.5) * 2.0**-52


def stream_bits(seed: HashSeed, count: int) -> np.ndarray:
    """First `count` uniform bits of the stream (one stream word per bit)."""
    return (stream_u64(seed, 0, count) & np.uint64(1)).astype(np.uint8)


def format_vector_line(
    nu: int, k: int, seed: HashSeed, state: int, block: int, out: int
) -> str:
    """One golden-vector line: `nu k seed_hex state_hex block_hex -> out_hex`."""
    return f"{nu} {k} {seed.to_hex()} {state:x} {block:x} -> {out:x}"


def parse_vector_line(line: str) -> tuple[int, int, HashSeed, int, int, int]:
    """Inverse of :func:`format_vector_line`."""
    parts = line.split()
    if len(parts) != 7 or parts[5] != "->":
        raise ValueError(f"bad golden vector line: {line!r}")
    nu, k = int(parts[0]), int(parts[1])
    seed = HashSeed.from_hex(parts[2])
    state, block, out = (int(p, 16) for p in (parts[3], parts[4], parts[6]))
    return nu, k, seed, state, block, out
