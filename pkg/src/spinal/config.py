"""INI-style experiment configuration.

Flat key-value sections, one per module, e.g.::

    [code]
    n = 64
    k = 4
    nu = 32
    seed = 00..ff          ; optional, derived from the master seed if absent
    passes = 3             ; encode only
    c = 6                  ; constellation (AWGN codes only)
    beta = 3.0
    power = 1.0

    [channel]
    kind = bsc             ; bsc | awgn
    p = 0.05               ; comma list allowed (grid)
    sigma2 = 0.25          ; comma list allowed (grid)
    sigma_min2 = 0.25      ; optional

    [decoder]
    beam = 1,16,256,1024

    [session]
    rule = genie           ; genie | checkbits | maxpasses
    tail_guard = 32
    tail_len = 16
    limit = 8
    trials = 500
    master_seed = 00..01

    [exponent]
    rates = 0.5,0.25       ; optional; defaults to k/L at the chosen pass count

    [output]
    path = out.csv

Validation failures name the offending field path, e.g. "channel.p: ...".
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Optional

from .channels import Awgn, Bsc, ChannelModel
from .encoder import AwgnShape, CodeParams
from .errors import ConfigError
from .hashfam import HashSeed, derive_seed
from .session import CheckBits, Genie, MaxPasses, StopRule


@dataclass
class ExperimentConfig:
    """Parsed and validated experiment description."""

    params: CodeParams
    channels: list[ChannelModel]
    beams: list[int]
    rule: StopRule
    trials: int
    master_seed: HashSeed
    out_path: Optional[str] = None
    passes: Optional[int] = None
    rates: Optional[list[float]] = None
    sigma_min2: Optional[float] = None
    echo_lines: list[str] = field(default_factory=list)

    @property
    def channel_kind(self) -> str:
        return "bsc" if isinstance(self.channels[0], Bsc) else "awgn"


class _Section:
    """Typed key access with field-path error messages."""

    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.present = parser.has_section(name)
        self._data = dict(parser.items(name)) if self.present else {}

    def raw(self, key: str, default=None):
        return self._data.get(key, default)

    def require(self, key: str) -> str:
        if key not in self._data:
            raise ConfigError(f"{self.name}.{key}: missing required key")
        return self._data[key]

    def get_int(self, key: str, default: Optional[int] = None) -> Optional[int]:
        raw = self._data.get(key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected integer, got {raw!r}") from exc

    def get_float(self, key: str, default: Optional[float] = None) -> Optional[float]:
        raw = self._data.get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected number, got {raw!r}") from exc

    def get_float_list(self, key: str) -> Optional[list[float]]:
        raw = self._data.get(key)
        if raw is None:
            return None
        try:
            return [float(x) for x in raw.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected comma-separated numbers") from exc

    def get_int_list(self, key: str) -> Optional[list[int]]:
        raw = self._data.get(key)
        if raw is None:
            return None
        try:
            return [int(x) for x in raw.split(",") if x.strip()]
        except ValueError as exc:
            raise ConfigError(f"{self.name}.{key}: expected comma-separated integers") from exc


def load_config(path: str, seed_override: Optional[str] = None) -> ExperimentConfig:
    """Parse, validate, and freeze an experiment configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config: cannot read {path!r}")

    code = _Section(parser, "code")
    channel = _Section(parser, "channel")
    decoder = _Section(parser, "decoder")
    session = _Section(parser, "session")
    exponent = _Section(parser, "exponent")
    output = _Section(parser, "output")
    if not code.present:
        raise ConfigError("code: missing required section")

    master_raw = seed_override or session.raw("master_seed")
    if master_raw is None:
        raise ConfigError("session.master_seed: missing (or pass --seed)")
    try:
        master_seed = HashSeed.from_hex(master_raw)
    except ConfigError as exc:
        raise ConfigError(f"session.master_seed: {exc}") from exc

    kind = (channel.raw("kind") or "bsc").lower()
    if kind not in ("bsc", "awgn"):
        raise ConfigError(f"channel.kind: must be bsc or awgn, got {kind!r}")

    awgn_shape = None
    if kind == "awgn":
        c = code.get_int("c")
        beta = code.get_float("beta")
        power = code.get_float("power")
        if c is None or beta is None or power is None:
            raise ConfigError("code.c/beta/power: required for an AWGN channel")
        awgn_shape = AwgnShape(c=c, beta=beta, power=power)

    seed_raw = code.raw("seed")
    code_seed = (
        HashSeed.from_hex(seed_raw) if seed_raw else derive_seed(master_seed, "code")
    )
    n = code.get_int("n")
    k = code.get_int("k")
    nu = code.get_int("nu")
    if n is None or k is None or nu is None:
        raise ConfigError("code.n/k/nu: required")
    params = CodeParams(n=n, k=k, nu=nu, seed=code_seed, awgn=awgn_shape)

    channels: list[ChannelModel] = []
    if kind == "bsc":
        ps = channel.get_float_list("p")
        if not ps:
            raise ConfigError("channel.p: required for a BSC channel")
        for p in ps:
            if not 0.0 < p < 0.5:
                raise ConfigError(f"channel.p: must be in (0, 0.5), got {p}")
            channels.append(Bsc(p))
    else:
        sigmas = channel.get_float_list("sigma2")
        if not sigmas:
            raise ConfigError("channel.sigma2: required for an AWGN channel")
        for s in sigmas:
            if not s > 0.0:
                raise ConfigError(f"channel.sigma2: must be > 0, got {s}")
            channels.append(Awgn(s))
    sigma_min2 = channel.get_float("sigma_min2")

    beams = decoder.get_int_list("beam") or [1]
    for b in beams:
        if b < 1:
            raise ConfigError(f"decoder.beam: must be >= 1, got {b}")

    rule_name = (session.raw("rule") or "genie").lower()
    if rule_name == "genie":
        rule: StopRule = Genie(tail_guard=session.get_int("tail_guard", 0))
    elif rule_name == "checkbits":
        tail_len = session.get_int("tail_len")
        if tail_len is None:
            raise ConfigError("session.tail_len: required for the checkbits rule")
        rule = CheckBits(tail_len=tail_len)
    elif rule_name == "maxpasses":
        limit = session.get_int("limit")
        if limit is None:
            raise ConfigError("session.limit: required for the maxpasses rule")
        rule = MaxPasses(limit=limit)
    else:
        raise ConfigError(f"session.rule: unknown rule {rule_name!r}")

    trials = session.get_int("trials", 0)
    if trials < 0:
        raise ConfigError(f"session.trials: must be >= 0, got {trials}")

    passes = code.get_int("passes")
    if passes is not None and not 0 <= passes <= params.max_passes:
        raise ConfigError(
            f"code.passes: must be in [0, {params.max_passes}], got {passes}"
        )

    # cross-validate the stop rule against the code
    from .session import _validate_rule

    _validate_rule(rule, params)

    echo = []
    for section in parser.sections():
        for key, value in parser.items(section):
            echo.append(f"# {section}.{key} = {value}")
    echo.append(f"# master_seed = {master_seed.to_hex()}")

    return ExperimentConfig(
        params=params,
        channels=channels,
        beams=beams,
        rule=rule,
        trials=trials,
        master_seed=master_seed,
        out_path=output.raw("path"),
        passes=passes,
        rates=exponent.get_float_list("rates"),
        sigma_min2=sigma_min2,
        echo_lines=echo,
    )
