"""Rateless transmission sessions: send passes until a stop rule fires.

A session encodes one message, transmits pass after pass over a simulated
channel, re-decodes from scratch after every pass, and stops when the rule
is satisfied or the pass budget runs out.  All randomness (code seed,
message bits, channel noise) is derived from one trial seed, so a sweep is
reproducible from its master seed alone.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .channels import Awgn, Bsc, ChannelModel, transmit
from .decoder import Observation, beam_decode, metric_for
from .encoder import CodeParams, compute_spine, emit_pass_awgn, emit_pass_bsc, random_message
from .errors import ConfigError
from .hashfam import HashSeed, derive_seed


@dataclass(frozen=True)
class Genie:
    """Idealized feedback: stop as soon as the guarded prefix is correct."""

    tail_guard: int = 0


@dataclass(frozen=True)
class MaxPasses:
    """Stop after a fixed number of passes, success = full message match."""

    limit: int


@dataclass(frozen=True)
class CheckBits:
    """Stop when the trailing tail_len known-zero bits decode to zero.

    The message payload is n - tail_len bits; the tail is all zeros.  A
    wrong message with a zero tail stops early with probability
    2^-tail_len per attempt, so success is still judged on the payload.
    """

    tail_len: int


StopRule = Union[Genie, MaxPasses, CheckBits]


def _validate_rule(rule: StopRule, params: CodeParams) -> None:
    if isinstance(rule, Genie):
        if not 0 <= rule.tail_guard < params.n:
            raise ConfigError(f"session.tail_guard: must be in [0, n), got {rule.tail_guard}")
    elif isinstance(rule, MaxPasses):
        if not 1 <= rule.limit <= params.max_passes:
            raise ConfigError(
                f"session.limit: must be in [1, {params.max_passes}], got {rule.limit}"
            )
    elif isinstance(rule, CheckBits):
        if not 1 <= rule.tail_len < params.n:
            raise ConfigError(f"session.tail_len: must be in [1, n), got {rule.tail_len}")
    else:
        raise ConfigError(f"session.rule: unknown rule {rule!r}")


@dataclass
class SessionResult:
    """Outcome of one rateless session."""

    passes_used: int
    achieved_rate: float  # k / passes_used, bits per channel use
    success: bool
    first_error_bit: Optional[int]
    trial_seed: HashSeed
    nodes_expanded: int

    @property
    def seed_hex(self) -> str:
        return self.trial_seed.to_hex()


def run_session(
    params: CodeParams,
    channel: ChannelModel,
    beam_width: int,
    rule: StopRule,
    trial_seed: HashSeed,
    message: Optional[np.ndarray] = None,
) -> SessionResult:
    """Simulate one message delivery; `message` overrides sampling (tests)."""
    _validate_rule(rule, params)
    if isinstance(channel, Awgn) and params.awgn is None:
        raise ConfigError("session: AWGN channel needs constellation params")
    if isinstance(channel, Bsc) and params.awgn is not None:
        raise ConfigError("session: BSC channel used with AWGN code params")

    code_seed = derive_seed(trial_seed, "code")
    noise_seed = derive_seed(trial_seed, "channel")
    params = params.with_seed(code_seed)
    if message is None:
        zero_tail = rule.tail_len if isinstance(rule, CheckBits) else 0
        message = random_message(params, derive_seed(trial_seed, "message"), zero_tail)
    elif len(message) != params.n:
        raise ConfigError(f"session: message length {len(message)} != n={params.n}")

    spine = compute_spine(params, message)
    kind = "bsc" if isinstance(channel, Bsc) else "awgn"
    metric = metric_for(kind)
    budget = params.max_passes
    if isinstance(rule, MaxPasses):
        budget = rule.limit

    rows = []
    nodes = 0
    stopped = False
    decoded = None
    for ell in range(1, budget + 1):
        if kind == "bsc":
            sent = emit_pass_bsc(spine, ell, params.nu)
        else:
            sent = emit_pass_awgn(spine, ell, params)
        offset = (ell - 1) * params.nblocks
        rows.append(transmit(channel, sent, noise_seed, offset))
        result = beam_decode(params, Observation(kind=kind, data=np.asarray(rows)),
                             beam_width, metric)
        nodes += result.nodes_expanded
        decoded = result.best_message
        if _rule_fires(rule, params, decoded, message, ell, budget):
            stopped = True
            break
    passes_used = ell if stopped else budget

    mismatches = np.flatnonzero(decoded != message)
    first_error = int(mismatches[0]) if mismatches.size else None
    success = _judge(rule, params, decoded, message) and stopped
    return SessionResult(
        passes_used=passes_used,
        achieved_rate=params.k / passes_used,
        success=success,
        first_error_bit=first_error,
        trial_seed=trial_seed,
        nodes_expanded=nodes,
    )


def _rule_fires(
    rule: StopRule, params: CodeParams, decoded: np.ndarray, message: np.ndarray,
    ell: int, budget: int,
) -> bool:
    if isinstance(rule, Genie):
        guard = rule.tail_guard
        return bool(np.array_equal(decoded[: params.n - guard], message[: params.n - guard]))
    if isinstance(rule, CheckBits):
        return not decoded[params.n - rule.tail_len :].any()
    return ell >= budget  # MaxPasses


def _judge(
    rule: StopRule, params: CodeParams, decoded: np.ndarray, message: np.ndarray
) -> bool:
    """Did the stopped session actually deliver its payload?"""
    if isinstance(rule, Genie):
        guard = rule.tail_guard
    elif isinstance(rule, CheckBits):
        guard = rule.tail_len
    else:
        guard = 0
    return bool(np.array_equal(decoded[: params.n - guard], message[: params.n - guard]))


# --- sweeps -----------------------------------------------------------------

SWEEP_CSV_HEADER = (
    "trial,channel,p_or_snr,n,k,nu,B,passes_used,rate,success,first_error_bit,seed_hex"
)


@dataclass(frozen=True)
class SweepCell:
    """One grid cell: a code, a channel, and a beam width."""

    params: CodeParams
    channel: ChannelModel
    beam_width: int

    def channel_kind(self) -> str:
        return "bsc" if isinstance(self.channel, Bsc) else "awgn"

    def channel_param(self) -> float:
        if isinstance(self.channel, Bsc):
            return self.channel.p
        return self.params.awgn.power / self.channel.sigma2


def _run_cell_trial(task: tuple[SweepCell, StopRule, HashSeed, int]) -> SessionResult:
    cell, rule, master_seed, trial = task
    trial_seed = derive_seed(master_seed, f"trial-{trial}")
    return run_session(cell.params, cell.channel, cell.beam_width, rule, trial_seed)


def sweep(
    cells: list[SweepCell],
    trials: int,
    rule: StopRule,
    master_seed: HashSeed,
    threads: int = 1,
) -> tuple[list[str], list[list[SessionResult]]]:
    """Run trials for every cell; returns (CSV rows, per-cell results).

    Rows carry one line per trial plus a `#summary` line per cell.  Trial t
    reuses the same derived seed across cells, so cells that differ only in
    beam width decode the same noisy instances.  Output order is fixed
    regardless of thread count.
    """
    if not cells:
        raise ConfigError("sweep: grid must be non-empty")
    if trials < 0:
        raise ConfigError(f"sweep: trials must be >= 0, got {trials}")
    tasks = [(cell, rule, master_seed, t) for cell in cells for t in range(trials)]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(_run_cell_trial, tasks, chunksize=8))
    else:
        flat = [_run_cell_trial(t) for t in tasks]

    rows: list[str] = []
    per_cell: list[list[SessionResult]] = []
    for idx, cell in enumerate(cells):
        results = flat[idx * trials : (idx + 1) * trials]
        per_cell.append(results)
        for t, r in enumerate(results):
            rows.append(
                f"{t},{cell.channel_kind()},{cell.channel_param()!r},"
                f"{cell.params.n},{cell.params.k},{cell.params.nu},{cell.beam_width},"
                f"{r.passes_used},{r.achieved_rate!r},{int(r.success)},"
                f"{'' if r.first_error_bit is None else r.first_error_bit},{r.seed_hex}"
            )
        rows.append(_summary_row(cell, results))
    return rows, per_cell


def _summary_row(cell: SweepCell, results: list[SessionResult]) -> str:
    if results:
        rates = [r.achieved_rate for r in results]
        mean_rate = repr(sum(rates) / len(rates))
        median_rate = repr(float(statistics.median(rates)))
        success = repr(sum(r.success for r in results) / len(results))
    else:
        mean_rate = median_rate = success = ""
    return (
        f"#summary,{cell.channel_kind()},{cell.channel_param()!r},"
        f"{cell.params.n},{cell.params.k},{cell.params.nu},{cell.beam_width},"
        f"trials={len(results)},{mean_rate},{median_rate},{success}"
    )
