import numpy as np
import pytest

from spinal.channels import Awgn, Bsc
from spinal.encoder import AwgnShape, CodeParams, message_from_int
from spinal.errors import ConfigError
from spinal.exponents import capacity_bsc
from spinal.hashfam import derive_seed
from spinal.session import (
    CheckBits,
    Genie,
    MaxPasses,
    SweepCell,
    run_session,
    sweep,
)


def test_noiseless_genie_stops_first_pass(seed):
    """All-zero message over a clean channel: the zero-cost leaf is also the
    lexicographic tie-break winner, so one pass suffices at full rate."""
    params = CodeParams(n=8, k=4, nu=16, seed=seed)
    result = run_session(
        params, Bsc(0.0), 1 << 8, Genie(tail_guard=0), derive_seed(seed, "t"),
        message=message_from_int(0, 8),
    )
    assert result.passes_used == 1
    assert result.achieved_rate == params.k
    assert result.success
    assert result.first_error_bit is None


def test_zero_capacity_channel_fails(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    result = run_session(
        params, Bsc(0.5), 16, MaxPasses(limit=8), derive_seed(seed, "z")
    )
    assert result.passes_used == 8
    assert not result.success
    assert result.first_error_bit is not None


def test_genie_budget_exhaustion(seed):
    # p = 0.5 conveys nothing; the genie never fires and the budget caps passes.
    params = CodeParams(n=16, k=4, nu=8, seed=seed)
    result = run_session(params, Bsc(0.5), 4, Genie(tail_guard=0), derive_seed(seed, "x"))
    assert result.passes_used == params.max_passes == 8
    assert not result.success


def test_checkbits_rule(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    rule = CheckBits(tail_len=8)
    result = run_session(params, Bsc(0.0), 256, rule, derive_seed(seed, "cb"))
    assert result.success
    assert result.passes_used <= 3
    noisy = run_session(params, Bsc(0.1), 64, rule, derive_seed(seed, "cb2"))
    if noisy.success:
        assert noisy.first_error_bit is None or noisy.first_error_bit >= 8


def test_rule_validation(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    trial = derive_seed(seed, "v")
    with pytest.raises(ConfigError):
        run_session(params, Bsc(0.1), 4, Genie(tail_guard=16), trial)
    with pytest.raises(ConfigError):
        run_session(params, Bsc(0.1), 4, MaxPasses(limit=17), trial)
    with pytest.raises(ConfigError):
        run_session(params, Bsc(0.1), 4, CheckBits(tail_len=0), trial)
    with pytest.raises(ConfigError):
        run_session(params, Awgn(0.5), 4, Genie(), trial)  # no constellation
    awgn_params = CodeParams(n=16, k=4, nu=16, seed=seed,
                             awgn=AwgnShape(c=4, beta=3.0, power=1.0))
    with pytest.raises(ConfigError):
        run_session(awgn_params, Bsc(0.1), 4, Genie(), trial)


def test_full_message_converse_median(seed):
    """With no tail forgiveness, no decoder finishes much before k/C passes:
    the median over trials stays at or above ceil(k/C) = 6."""
    params = CodeParams(n=64, k=4, nu=32, seed=seed)
    cells = [SweepCell(params=params, channel=Bsc(0.05), beam_width=1024)]
    _, per_cell = sweep(cells, 200, Genie(tail_guard=0), seed, threads=2)
    passes = sorted(r.passes_used for r in per_cell[0])
    median = passes[len(passes) // 2]
    assert median >= int(np.ceil(params.k / capacity_bsc(0.05)))


def test_success_monotone_in_pass_limit(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    fractions = []
    for limit in (2, 6, 12):
        cells = [SweepCell(params=params, channel=Bsc(0.1), beam_width=16)]
        _, per_cell = sweep(cells, 60, MaxPasses(limit=limit), seed, threads=1)
        fractions.append(sum(r.success for r in per_cell[0]) / 60)
    assert fractions[0] <= fractions[1] <= fractions[2]


def test_sweep_row_shape_and_determinism(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    cells = [SweepCell(params=params, channel=Bsc(0.1), beam_width=8)]
    rows1, per_cell = sweep(cells, 1, Genie(tail_guard=8), seed, threads=1)
    assert len(rows1) == 2  # one trial row + one summary row
    assert rows1[1].startswith("#summary,")
    rows2, _ = sweep(cells, 1, Genie(tail_guard=8), seed, threads=1)
    assert rows1 == rows2
    other = sweep(cells, 1, Genie(tail_guard=8), derive_seed(seed, "m2"), threads=1)[0]
    assert other != rows1


def test_sweep_parallel_matches_serial(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    cells = [
        SweepCell(params=params, channel=Bsc(0.1), beam_width=b) for b in (2, 8)
    ]
    serial, _ = sweep(cells, 6, Genie(tail_guard=8), seed, threads=1)
    parallel, _ = sweep(cells, 6, Genie(tail_guard=8), seed, threads=2)
    assert serial == parallel


def test_rate_bounded_by_k(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    cells = [SweepCell(params=params, channel=Bsc(0.1), beam_width=4)]
    rows, per_cell = sweep(cells, 10, Genie(tail_guard=8), seed, threads=1)
    assert all(r.achieved_rate <= params.k for r in per_cell[0])


def test_shared_trial_seeds_across_beam_cells(seed):
    """Cells differing only in beam width decode the same noisy instances."""
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    cells = [
        SweepCell(params=params, channel=Bsc(0.1), beam_width=b) for b in (2, 256)
    ]
    _, per_cell = sweep(cells, 5, Genie(tail_guard=8), seed, threads=1)
    seeds_a = [r.seed_hex for r in per_cell[0]]
    seeds_b = [r.seed_hex for r in per_cell[1]]
    assert seeds_a == seeds_b
