"""Rateless encoder: spine computation and pass-structured output.

A message of n bits is consumed k bits at a time by the seeded hash chain,
producing n/k states of nu bits each (the spine).  Pass l emits one bit
(or one c-bit symbol) per spine value, taken from the l-th most significant
bit window, so entry (l, i) of any codeword depends only on the first i*k
message bits and every shorter encoding is a prefix of every longer one.

Bit conventions, fixed so golden files are unambiguous:
  - message bit 0 is the most significant bit of the packed message integer;
  - block i covers message bits [i*k, (i+1)*k), MSB-first within the block;
  - "most significant bit" of a spine value is bit nu-1 of the packed int.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import BinaryIO, Optional

import numpy as np

from .errors import CodewordFormatError, ConfigError
from .gaussian import gaussian_cdf, gaussian_quantile
from .hashfam import MAX_K, MAX_NU, HashEngine, HashSeed, _mix64, stream_bits


@dataclass(frozen=True)
class AwgnShape:
    """Constellation shape: c bits per symbol, truncation width beta, power."""

    c: int
    beta: float
    power: float


@dataclass(frozen=True)
class CodeParams:
    """All code-construction constants for one code instance."""

    n: int
    k: int
    nu: int
    seed: HashSeed
    awgn: Optional[AwgnShape] = None

    def __post_init__(self) -> None:
        if not 1 <= self.k <= MAX_K:
            raise ConfigError(f"code.k: must be in [1, {MAX_K}], got {self.k}")
        if self.n <= 0 or self.n % self.k != 0:
            raise ConfigError(f"code.n: must be a positive multiple of k, got n={self.n} k={self.k}")
        if not self.k <= self.nu <= MAX_NU:
            raise ConfigError(f"code.nu: must be in [k, {MAX_NU}], got {self.nu}")
        if self.awgn is not None:
            a = self.awgn
            if a.c < 1 or a.c > self.nu:
                raise ConfigError(f"code.c: must be in [1, nu], got {a.c}")
            if not a.beta > 0:
                raise ConfigError(f"code.beta: must be > 0, got {a.beta}")
            if not a.power > 0:
                raise ConfigError(f"code.power: must be > 0, got {a.power}")

    @property
    def nblocks(self) -> int:
        return self.n // self.k

    @property
    def max_passes(self) -> int:
        """Pass budget: nu single-bit passes (BSC) or floor(nu/c) symbol passes."""
        if self.awgn is None:
            return self.nu
        return self.nu // self.awgn.c

    def with_seed(self, seed: HashSeed) -> "CodeParams":
        return replace(self, seed=seed)


# --- messages -------------------------------------------------------------

def message_from_int(value: int, n: int) -> np.ndarray:
    """Unpack an n-bit integer into a bit vector (index 0 = MSB)."""
    if value < 0 or value >> n:
        raise ConfigError(f"message: value must fit in {n} bits")
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def message_to_int(bits: np.ndarray) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def message_from_hex(text: str, n: int) -> np.ndarray:
    text = text.strip()
    expected = (n + 3) // 4
    if len(text) != expected:
        raise ConfigError(f"message: expected {expected} hex chars for n={n}, got {len(text)}")
    try:
        value = int(text, 16)
    except ValueError as exc:
        raise ConfigError(f"message: bad hex {text!r}") from exc
    if value >> n:
        raise ConfigError(f"message: value must fit in {n} bits")
    return message_from_int(value, n)


def message_to_hex(bits: np.ndarray) -> str:
    n = len(bits)
    return f"{message_to_int(bits):0{(n + 3) // 4}x}"


def random_message(params: CodeParams, seed: HashSeed, zero_tail: int = 0) -> np.ndarray:
    """Sample n uniform bits from the seed stream; optionally zero the tail."""
    bits = stream_bits(seed, params.n)
    if zero_tail:
        bits[params.n - zero_tail :] = 0
    return bits


def message_blocks(params: CodeParams, msg: np.ndarray) -> np.ndarray:
    """Block values m_0..m_{n/k-1}, each packed MSB-first into an int."""
    if len(msg) != params.n:
        raise ConfigError(f"message: length {len(msg)} != n={params.n}")
    shaped = np.asarray(msg, dtype=np.uint64).reshape(params.nblocks, params.k)
    weights = np.uint64(1) << np.arange(params.k - 1, -1, -1, dtype=np.uint64)
    return shaped @ weights


# --- spine and passes -----------------------------------------------------

def compute_spine(params: CodeParams, msg: np.ndarray) -> list[int]:
    """Hash-chain states s_1..s_{n/k}, starting from the all-zero state."""
    engine = HashEngine(params.seed, params.nu, params.k)
    blocks = message_blocks(params, msg)
    state = 0
    spine = []
    for b in blocks:
        state = engine.step(state, int(b))
        spine.append(state)
    return spine


def spine_digest(spine: list[int]) -> str:
    """16-hex fold of the spine values, for quick log comparison."""
    h = 0
    for s in spine:
        while True:
            h = _mix64(h ^ (s & ((1 << 64) - 1)))
            s >>= 64
            if not s:
                break
    return f"{h:016x}"


def emit_pass_bsc(spine: list[int], pass_index: int, nu: int) -> np.ndarray:
    """Pass bits: bit (nu - l) of every spine value, MSB-first numbering."""
    if not 1 <= pass_index <= nu:
        raise ConfigError(f"pass {pass_index}: BSC pass budget is nu={nu}")
    shift = nu - pass_index
    return np.array([(s >> shift) & 1 for s in spine], dtype=np.uint8)


def constellation(shape: AwgnShape) -> np.ndarray:
    """The 2^c symbol values: a truncated unit Gaussian cut into equiprobable
    cells, each represented by its mid-quantile point, scaled by sqrt(power).

    Antisymmetric by construction (entry b mirrors entry 2^c-1-b exactly),
    and contained in [-beta*sqrt(power), beta*sqrt(power)].
    """
    c, beta, power = shape.c, shape.beta, shape.power
    gamma = float(gaussian_cdf(-beta))
    half = 1 << (c - 1)
    b = np.arange(half, dtype=np.float64)
    u = (b + 0.5) / (1 << c)
    neg = gaussian_quantile(gamma + (1.0 - 2.0 * gamma) * u) * math.sqrt(power)
    return np.concatenate([neg, -neg[::-1]])


def map_symbol(b: int, shape: AwgnShape) -> float:
    """Constellation point for a c-bit value."""
    if not 0 <= b < (1 << shape.c):
        raise ConfigError(f"symbol: b must be in [0, 2^{shape.c}), got {b}")
    return float(constellation(shape)[b])


def emit_pass_awgn(spine: list[int], pass_index: int, params: CodeParams) -> np.ndarray:
    """Pass symbols: the l-th c-bit window (from the MSB) of every spine value."""
    if params.awgn is None:
        raise ConfigError("emit_pass_awgn: params carry no constellation shape")
    c = params.awgn.c
    if not 1 <= pass_index <= params.nu // c:
        raise ConfigError(
            f"pass {pass_index}: AWGN pass budget is floor(nu/c)={params.nu // c}"
        )
    shift = params.nu - pass_index * c
    mask = (1 << c) - 1
    table = constellation(params.awgn)
    idx = [(s >> shift) & mask for s in spine]
    return table[idx]


@dataclass
class Codeword:
    """Pass-major coded output; rows[l] holds pass l+1 (bits or symbols)."""

    kind: str  # "bsc" | "awgn"
    params: CodeParams
    rows: list[np.ndarray] = field(default_factory=list)

    @property
    def passes(self) -> int:
        return len(self.rows)

    def flat(self) -> np.ndarray:
        if not self.rows:
            dtype = np.uint8 if self.kind == "bsc" else np.float64
            return np.empty(0, dtype=dtype)
        return np.concatenate(self.rows)


def encode(params: CodeParams, msg: np.ndarray, passes: int) -> Codeword:
    """Concatenation of passes 1..passes; each prefix is itself a codeword."""
    if passes < 0 or passes > params.max_passes:
        raise ConfigError(
            f"passes: must be in [0, {params.max_passes}] for these params, got {passes}"
        )
    spine = compute_spine(params, msg)
    kind = "bsc" if params.awgn is None else "awgn"
    rows = []
    for ell in range(1, passes + 1):
        if params.awgn is None:
            rows.append(emit_pass_bsc(spine, ell, params.nu))
        else:
            rows.append(emit_pass_awgn(spine, ell, params))
    return Codeword(kind=kind, params=params, rows=rows)


# --- container format -----------------------------------------------------
#
# Text header, then one length-prefixed binary section per pass:
#   line 1: "spinalpass 1 <bsc|awgn>"
#   line 2: "n=.. k=.. nu=.. passes=.. seed=<64 hex>[ c=.. beta=.. power=..]"
#   per pass: u32 little-endian payload length, then the payload.
# BSC payloads are np.packbits rows (MSB-first within each byte); AWGN
# payloads are little-endian float64 rows.

_MAGIC = "spinalpass 1"


def write_container(fh: BinaryIO, codeword: Codeword) -> None:
    p = codeword.params
    head = f"{_MAGIC} {codeword.kind}\n"
    fields = f"n={p.n} k={p.k} nu={p.nu} passes={codeword.passes} seed={p.seed.to_hex()}"
    if codeword.kind == "awgn":
        a = p.awgn
        fields += f" c={a.c} beta={a.beta!r} power={a.power!r}"
    fh.write((head + fields + "\n").encode("ascii"))
    for row in codeword.rows:
        if codeword.kind == "bsc":
            payload = np.packbits(row.astype(np.uint8)).tobytes()
        else:
            payload = row.astype("<f8").tobytes()
        fh.write(len(payload).to_bytes(4, "little"))
        fh.write(payload)


def read_container(fh: BinaryIO) -> Codeword:
    """Parse a codeword/observation container; errors carry byte offsets."""
    offset = 0

    def read_line() -> str:
        nonlocal offset
        raw = fh.readline()
        if not raw.endswith(b"\n"):
            raise CodewordFormatError(f"truncated header at byte {offset + len(raw)}")
        offset += len(raw)
        return raw[:-1].decode("ascii", errors="replace")

    magic = read_line()
    if not magic.startswith(_MAGIC + " "):
        raise CodewordFormatError(f"bad magic at byte 0: {magic!r}")
    kind = magic[len(_MAGIC) + 1 :]
    if kind not in ("bsc", "awgn"):
        raise CodewordFormatError(f"unknown payload kind {kind!r} at byte 0")

    fields = {}
    for item in read_line().split():
        key, _, value = item.partition("=")
        fields[key] = value
    try:
        n, k, nu = int(fields["n"]), int(fields["k"]), int(fields["nu"])
        passes = int(fields["passes"])
        seed = HashSeed.from_hex(fields["seed"])
        awgn = None
        if kind == "awgn":
            awgn = AwgnShape(c=int(fields["c"]), beta=float(fields["beta"]),
                             power=float(fields["power"]))
    except (KeyError, ValueError) as exc:
        raise CodewordFormatError(f"bad header fields at byte {offset}: {exc}") from exc
    params = CodeParams(n=n, k=k, nu=nu, seed=seed, awgn=awgn)

    nblocks = params.nblocks
    expect = (nblocks + 7) // 8 if kind == "bsc" else 8 * nblocks
    rows = []
    for _ in range(passes):
        raw = fh.read(4)
        if len(raw) < 4:
            raise CodewordFormatError(
                f"truncated section length at byte {offset}: expected 4 bytes, got {len(raw)}"
            )
        offset += 4
        length = int.from_bytes(raw, "little")
        if length != expect:
            raise CodewordFormatError(
                f"bad section length {length} at byte {offset}: expected {expect}"
            )
        payload = fh.read(length)
        if len(payload) < length:
            raise CodewordFormatError(
                f"truncated section at byte {offset}: expected {length} payload bytes, "
                f"got {len(payload)}"
            )
        offset += length
        if kind == "bsc":
            row = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))[:nblocks]
        else:
            row = np.frombuffer(payload, dtype="<f8").astype(np.float64)
        rows.append(row)
    trailing = fh.read(1)
    if trailing:
        raise CodewordFormatError(f"trailing data at byte {offset}")
    return Codeword(kind=kind, params=params, rows=rows)
