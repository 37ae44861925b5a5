"""Command-line front end.

Subcommands: encode, decode, simulate, sweep, exponent, golden-gen.
Shared flags: --config PATH, --seed HEX (master-seed override), --out PATH,
--threads N (0 = auto).  Exit codes: 0 success, 2 config error, 3 runtime
error.  Every run is a pure function of (config file, master seed); the
resolved config is echoed into CSV output as comment lines.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .channels import Bsc, transmit
from .config import ExperimentConfig, load_config
from .decoder import Observation, beam_decode, metric_for
from .encoder import (
    CodeParams,
    Codeword,
    compute_spine,
    encode,
    message_from_hex,
    message_from_int,
    message_to_hex,
    read_container,
    spine_digest,
    write_container,
)
from .errors import CodewordFormatError, ConfigError
from .exponents import (
    EXPONENT_CSV_HEADER,
    awgn_report,
    bsc_report,
    capacity_awgn,
    capacity_bsc,
    choose_pass_count,
)
from .hashfam import HashSeed, derive_seed, format_vector_line, hash_step, stream_u64
from .session import SWEEP_CSV_HEADER, SweepCell, run_session, sweep


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CodewordFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinal", description=__doc__)
    parser.set_defaults(command=None)
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument("--config", required=config_required, help="experiment config file")
        p.add_argument("--seed", help="master seed override (hex, up to 64 chars)")
        p.add_argument("--out", help="output path")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes for sweeps (0 = auto)")

    p = sub.add_parser("encode", help="encode a message into a codeword file")
    common(p)
    p.add_argument("message_hex", help="message bits as hex, MSB first")
    p.set_defaults(handler=_cmd_encode)

    p = sub.add_parser("decode", help="decode an observation file")
    common(p)
    p.add_argument("observation", help="observation container file")
    p.add_argument("--beam", type=int, help="beam width (default: first of decoder.beam)")
    p.set_defaults(handler=_cmd_decode)

    p = sub.add_parser("simulate", help="run a single rateless session")
    common(p)
    p.add_argument("--trial", type=int, default=0, help="trial index (seed derivation)")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep", help="run the full session grid, write CSV")
    common(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("exponent", help="emit exponent/capacity reports as CSV")
    common(p)
    p.set_defaults(handler=_cmd_exponent)

    p = sub.add_parser("golden-gen", help="regenerate the golden test corpus")
    common(p, config_required=False)
    p.set_defaults(handler=_cmd_golden_gen)
    return parser


def _threads(args) -> int:
    if args.threads == 0:
        return os.cpu_count() or 1
    if args.threads < 0:
        raise ConfigError(f"--threads: must be >= 0, got {args.threads}")
    return args.threads


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- encode -----------------------------------------------------------------

def _encode_codeword(cfg: ExperimentConfig, message_hex: str) -> tuple[Codeword, str]:
    if cfg.passes is None:
        raise ConfigError("code.passes: required for encode")
    msg = message_from_hex(message_hex, cfg.params.n)
    codeword = encode(cfg.params, msg, cfg.passes)
    digest = spine_digest(compute_spine(cfg.params, msg))
    return codeword, digest


def _cmd_encode(args) -> int:
    cfg = load_config(args.config, args.seed)
    if not args.out:
        raise ConfigError("--out: required for encode")
    codeword, digest = _encode_codeword(cfg, args.message_hex)
    with open(args.out, "wb") as fh:
        write_container(fh, codeword)
    print(f"spine_digest={digest}")
    print(f"wrote {args.out} ({codeword.passes} passes)")
    return 0


# --- decode -----------------------------------------------------------------

def _decode_report(cfg: ExperimentConfig, obs_codeword: Codeword, beam_width: int) -> str:
    p, q = cfg.params, obs_codeword.params
    if (p.n, p.k, p.nu) != (q.n, q.k, q.nu) or p.seed != q.seed:
        raise ConfigError("observation header does not match the configured code")
    if obs_codeword.kind != cfg.channel_kind:
        raise ConfigError(
            f"metric mismatch: observation is {obs_codeword.kind}, "
            f"config channel is {cfg.channel_kind}"
        )
    obs = Observation.from_codeword(obs_codeword)
    result = beam_decode(cfg.params, obs, beam_width, metric_for(obs.kind))
    return (
        f"message={message_to_hex(result.best_message)}\n"
        f"cost={result.best_cost!r}\n"
        f"nodes_expanded={result.nodes_expanded}\n"
        f"ties_broken={result.ties_broken}\n"
    )


def _cmd_decode(args) -> int:
    cfg = load_config(args.config, args.seed)
    beam_width = args.beam if args.beam is not None else cfg.beams[0]
    with open(args.observation, "rb") as fh:
        obs_codeword = read_container(fh)
    text = _decode_report(cfg, obs_codeword, beam_width)
    sys.stdout.write(text)
    if args.out:
        _write_text(args.out, text)
    return 0


# --- simulate / sweep -------------------------------------------------------

def _cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.seed)
    trial_seed = derive_seed(cfg.master_seed, f"trial-{args.trial}")
    result = run_session(cfg.params, cfg.channels[0], cfg.beams[0], cfg.rule, trial_seed)
    print(f"passes_used={result.passes_used}")
    print(f"rate={result.achieved_rate!r}")
    print(f"success={int(result.success)}")
    print(f"first_error_bit={'' if result.first_error_bit is None else result.first_error_bit}")
    print(f"seed_hex={result.seed_hex}")
    return 0


def _sweep_csv(cfg: ExperimentConfig, threads: int) -> str:
    cells = [
        SweepCell(params=cfg.params, channel=ch, beam_width=b)
        for ch in cfg.channels
        for b in cfg.beams
    ]
    rows, _ = sweep(cells, cfg.trials, cfg.rule, cfg.master_seed, threads=threads)
    lines = list(cfg.echo_lines) + [SWEEP_CSV_HEADER] + rows
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.seed)
    text = _sweep_csv(cfg, _threads(args))
    out = args.out or cfg.out_path
    if out:
        _write_text(out, text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return 0


# --- exponent ---------------------------------------------------------------

def _exponent_csv(cfg: ExperimentConfig) -> str:
    reports = []
    for channel in cfg.channels:
        if isinstance(channel, Bsc):
            cap = capacity_bsc(channel.p)
            rates = cfg.rates or [cfg.params.k / choose_pass_count(cfg.params.k, cap)]
            for rate in rates:
                reports.append(bsc_report(channel.p, rate, block_bits=cfg.params.n))
        else:
            power = cfg.params.awgn.power
            cap = capacity_awgn(power, channel.sigma2)
            rates = cfg.rates or [cfg.params.k / choose_pass_count(cfg.params.k, cap)]
            for rate in rates:
                reports.append(awgn_report(power, channel.sigma2, rate))
    lines = list(cfg.echo_lines) + [EXPONENT_CSV_HEADER]
    lines += [r.csv_row() for r in reports]
    return "\n".join(lines) + "\n"


def _cmd_exponent(args) -> int:
    cfg = load_config(args.config, args.seed)
    text = _exponent_csv(cfg)
    out = args.out or cfg.out_path
    if out:
        _write_text(out, text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return 0


# --- golden corpus ----------------------------------------------------------
#
# `golden-gen` rebuilds every file the test suite compares byte-for-byte:
# the canonical desk-scale configs, hash vectors, the all-zero-message spine
# and codewords, a noisy observation with two decode transcripts, and a
# small sweep CSV.  The shipped copy lives in tests/golden/.

GOLDEN_CODE_SEED = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"
GOLDEN_MASTER_SEED = "5eed0000000000000000000000000000000000000000000000000000000000a5"

GOLDEN_BSC_CONFIG = f"""[code]
n = 16
k = 4
nu = 16
seed = {GOLDEN_CODE_SEED}
passes = 3

[channel]
kind = bsc
p = 0.1

[decoder]
beam = 1,256

[session]
rule = genie
tail_guard = 8
trials = 5
master_seed = {GOLDEN_MASTER_SEED}
"""

GOLDEN_AWGN_CONFIG = f"""[code]
n = 16
k = 4
nu = 16
seed = {GOLDEN_CODE_SEED}
passes = 2
c = 4
beta = 2.5
power = 1.0

[channel]
kind = awgn
sigma2 = 0.5

[decoder]
beam = 16

[session]
rule = genie
tail_guard = 8
trials = 5
master_seed = {GOLDEN_MASTER_SEED}
"""

GOLDEN_SWEEP_CONFIG = f"""[code]
n = 16
k = 4
nu = 16
seed = {GOLDEN_CODE_SEED}

[channel]
kind = bsc
p = 0.1

[decoder]
beam = 2,8

[session]
rule = genie
tail_guard = 8
trials = 5
master_seed = {GOLDEN_MASTER_SEED}
"""

_VECTOR_SHAPES = [(8, 2), (16, 4), (32, 4), (48, 6), (64, 8), (128, 8), (256, 16)]


def _golden_hash_vectors() -> str:
    lines = ["# nu k seed_hex state_hex block_hex -> out_hex"]
    base = HashSeed.from_hex(GOLDEN_CODE_SEED)
    for nu, k in _VECTOR_SHAPES:
        for i in range(3):
            seed = derive_seed(base, f"vector-{nu}-{k}-{i}")
            material = stream_u64(derive_seed(seed, "inputs"), 0, 5)
            state = 0
            for w in material[:4]:
                state = (state << 64) | int(w)
            state &= (1 << nu) - 1
            block = int(material[4]) & ((1 << k) - 1)
            out = hash_step(seed, state, block, nu, k)
            lines.append(format_vector_line(nu, k, seed, state, block, out))
    return "\n".join(lines) + "\n"


def _golden_spine() -> str:
    cfg_seed = HashSeed.from_hex(GOLDEN_CODE_SEED)
    params = CodeParams(n=16, k=4, nu=16, seed=cfg_seed)
    spine = compute_spine(params, message_from_int(0, 16))
    lines = [f"# spine of the all-zero message, n=16 k=4 nu=16 seed={GOLDEN_CODE_SEED}"]
    lines += [f"{s:04x}" for s in spine]
    return "\n".join(lines) + "\n"


def _cmd_golden_gen(args) -> int:
    out_dir = Path(args.out or "golden")
    (out_dir / "configs").mkdir(parents=True, exist_ok=True)

    configs = {
        "configs/golden_bsc.ini": GOLDEN_BSC_CONFIG,
        "configs/golden_awgn.ini": GOLDEN_AWGN_CONFIG,
        "configs/golden_sweep.ini": GOLDEN_SWEEP_CONFIG,
    }
    for rel, text in configs.items():
        _write_text(str(out_dir / rel), text)

    _write_text(str(out_dir / "hash_vectors.txt"), _golden_hash_vectors())
    _write_text(str(out_dir / "spine_n16_k4_nu16.txt"), _golden_spine())

    cfg_bsc = load_config(str(out_dir / "configs/golden_bsc.ini"))
    codeword, _ = _encode_codeword(cfg_bsc, "0000")
    with open(out_dir / "codeword_bsc.bin", "wb") as fh:
        write_container(fh, codeword)

    cfg_awgn = load_config(str(out_dir / "configs/golden_awgn.ini"))
    codeword_awgn, _ = _encode_codeword(cfg_awgn, "0000")
    with open(out_dir / "codeword_awgn.bin", "wb") as fh:
        write_container(fh, codeword_awgn)

    # noisy observation (9 passes, a decodable rate) plus decode transcripts
    long_codeword = encode(cfg_bsc.params, message_from_hex("0000", 16), 9)
    noise_seed = derive_seed(cfg_bsc.master_seed, "golden-noise")
    nblocks = cfg_bsc.params.nblocks
    noisy_rows = [
        transmit(Bsc(0.1), row, noise_seed, offset=i * nblocks)
        for i, row in enumerate(long_codeword.rows)
    ]
    observation = Codeword(kind="bsc", params=cfg_bsc.params, rows=noisy_rows)
    with open(out_dir / "observation_bsc.bin", "wb") as fh:
        write_container(fh, observation)
    for beam in (1, 256):
        text = _decode_report(cfg_bsc, observation, beam)
        _write_text(str(out_dir / f"decode_b{beam}.txt"), text)

    cfg_sweep = load_config(str(out_dir / "configs/golden_sweep.ini"))
    _write_text(str(out_dir / "sweep.csv"), _sweep_csv(cfg_sweep, threads=1))

    print(f"wrote golden corpus under {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
