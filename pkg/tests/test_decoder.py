import math

import numpy as np
import pytest

from spinal.channels import bsc_transmit, awgn_transmit
from spinal.decoder import (
    EUCLIDEAN,
    HAMMING,
    Observation,
    beam_decode,
    branch_cost,
    ml_decode_exact,
    reliable_prefix,
)
from spinal.encoder import (
    AwgnShape,
    CodeParams,
    compute_spine,
    emit_pass_bsc,
    encode,
    message_from_int,
    random_message,
)
from spinal.errors import ConfigError
from spinal.hashfam import derive_seed


def bsc_observation(params, msg, passes, p, noise_seed):
    spine = compute_spine(params, msg)
    rows = [
        bsc_transmit(emit_pass_bsc(spine, ell, params.nu), p, noise_seed,
                     offset=(ell - 1) * params.nblocks)
        for ell in range(1, passes + 1)
    ]
    return Observation(kind="bsc", data=np.asarray(rows))


def test_branch_cost_basics(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    spine = compute_spine(params, message_from_int(0b10110100, 8))
    state = spine[1]
    block = np.array([(state >> (16 - ell)) & 1 for ell in (1, 2, 3)], dtype=np.uint8)
    assert branch_cost(block, state, params, HAMMING) == 0
    assert branch_cost(1 - block, state, params, HAMMING) == 3

    shape = AwgnShape(c=4, beta=2.5, power=1.0)
    params_a = CodeParams(n=8, k=2, nu=16, seed=seed, awgn=shape)
    from spinal.encoder import constellation

    table = constellation(shape)
    x = np.array([table[state >> 12], table[(state >> 8) & 0xF]])
    y = x + np.array([0.5, -0.5])
    assert abs(branch_cost(y, state, params_a, EUCLIDEAN) - 0.5) < 1e-12


def test_branch_cost_validation(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    with pytest.raises(ConfigError):
        branch_cost(np.zeros(3, np.uint8), 0, params, "manhattan")
    with pytest.raises(ConfigError):
        branch_cost(np.zeros(3), 0, params, EUCLIDEAN)  # no constellation
    with pytest.raises(ConfigError):
        branch_cost(np.zeros(17, np.uint8), 0, params, HAMMING)  # budget


def test_cost_decomposition_exact(seed):
    """Total metric distance equals the sum of per-block branch costs."""
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    shape = AwgnShape(c=4, beta=3.0, power=1.0)
    params_a = CodeParams(n=16, k=4, nu=16, seed=seed, awgn=shape)
    for t in range(50):
        ts = derive_seed(seed, f"dec-{t}")
        msg = random_message(params, derive_seed(ts, "m"))
        cand = random_message(params, derive_seed(ts, "c"))
        passes = 1 + t % 4

        obs = bsc_observation(params, msg, passes, 0.2, derive_seed(ts, "n"))
        cand_code = encode(params, cand, passes)
        total = int(np.sum(obs.data ^ np.asarray(cand_code.rows)))
        spine = compute_spine(params, cand)
        parts = sum(
            branch_cost(obs.data[:, i], spine[i], params, HAMMING)
            for i in range(4)
        )
        assert total == parts

        sent = encode(params_a, msg, passes)
        rows = [
            awgn_transmit(row, 0.5, derive_seed(ts, "g"), offset=i * 4)
            for i, row in enumerate(sent.rows)
        ]
        obs_a = Observation(kind="awgn", data=np.asarray(rows))
        cand_rows = np.asarray(encode(params_a, cand, passes).rows)
        total_a = float(np.sum((obs_a.data - cand_rows) ** 2))
        spine_a = compute_spine(params_a, cand)
        parts_a = sum(
            branch_cost(obs_a.data[:, i], spine_a[i], params_a, EUCLIDEAN)
            for i in range(4)
        )
        assert math.isclose(total_a, parts_a, rel_tol=1e-9)


def test_noiseless_beam_recovers_message(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    msg = message_from_int(0b11001010, 8)
    obs = bsc_observation(params, msg, 6, 0.0, seed)
    result = beam_decode(params, obs, 1 << 8, HAMMING)
    assert result.best_cost == 0
    assert np.array_equal(result.best_message, msg)
    assert result.survivor_costs[0] == 0
    assert np.all(np.diff(result.survivor_costs) >= 0)  # cost-sorted beam


def test_full_beam_equals_exhaustive_oracle(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    for t in range(25):
        ts = derive_seed(seed, f"oracle-{t}")
        msg = random_message(params, derive_seed(ts, "m"))
        obs = bsc_observation(params, msg, 5, 0.1, derive_seed(ts, "n"))
        full = beam_decode(params, obs, 1 << 8, HAMMING)
        exact = ml_decode_exact(params, obs, HAMMING)
        assert full.best_cost == exact.best_cost
        assert np.array_equal(full.best_message, exact.best_message)


def test_beam_monotone_in_width(seed):
    params = CodeParams(n=16, k=4, nu=16, seed=seed)
    for t in range(30):
        ts = derive_seed(seed, f"mono-{t}")
        msg = random_message(params, derive_seed(ts, "m"))
        obs = bsc_observation(params, msg, 6, 0.12, derive_seed(ts, "n"))
        costs = [
            beam_decode(params, obs, b, HAMMING).best_cost for b in (1, 4, 16, 64, 256)
        ]
        assert all(a >= b for a, b in zip(costs, costs[1:]))


def test_ml_matches_manual_cost_table(seed):
    """Exhaustive decode agrees with 2^n independent encode+distance sums."""
    params = CodeParams(n=4, k=2, nu=16, seed=seed)
    msg = message_from_int(0b0110, 4)
    obs = bsc_observation(params, msg, 4, 0.25, derive_seed(seed, "tbl"))
    table = {}
    for m in range(16):
        rows = np.asarray(encode(params, message_from_int(m, 4), 4).rows)
        table[m] = int(np.sum(rows ^ obs.data))
    exact = ml_decode_exact(params, obs, HAMMING)
    best = min(table.items(), key=lambda kv: (kv[1], kv[0]))
    assert exact.best_cost == best[1]
    assert np.array_equal(exact.best_message, message_from_int(best[0], 4))


def test_ml_flip_one_bit_lipschitz(seed):
    params = CodeParams(n=6, k=2, nu=16, seed=seed)
    msg = message_from_int(0b101101, 6)
    obs = bsc_observation(params, msg, 4, 0.2, derive_seed(seed, "lip"))
    base = ml_decode_exact(params, obs, HAMMING).best_cost
    data = obs.data.copy()
    data[2, 1] ^= 1
    bumped = ml_decode_exact(params, Observation(kind="bsc", data=data), HAMMING)
    assert abs(bumped.best_cost - base) <= 1


def test_ml_guard(seed):
    params = CodeParams(n=28, k=4, nu=16, seed=seed)
    obs = Observation(kind="bsc", data=np.zeros((1, 7), dtype=np.uint8))
    with pytest.raises(ConfigError):
        ml_decode_exact(params, obs, HAMMING)


def test_decode_validation(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    obs = bsc_observation(params, message_from_int(0, 8), 2, 0.0, seed)
    with pytest.raises(ConfigError):
        beam_decode(params, obs, 0, HAMMING)
    with pytest.raises(ConfigError):
        beam_decode(params, obs, 4, EUCLIDEAN)  # metric mismatch
    too_many = Observation(kind="bsc", data=np.zeros((17, 4), dtype=np.uint8))
    with pytest.raises(ConfigError):
        beam_decode(params, too_many, 4, HAMMING)
    wrong_blocks = Observation(kind="bsc", data=np.zeros((2, 5), dtype=np.uint8))
    with pytest.raises(ConfigError):
        beam_decode(params, wrong_blocks, 4, HAMMING)


def test_wide_spine_scalar_path_matches_oracle(seed):
    params = CodeParams(n=6, k=2, nu=96, seed=seed)
    msg = message_from_int(0b110010, 6)
    obs = bsc_observation(params, msg, 10, 0.1, derive_seed(seed, "wide"))
    full = beam_decode(params, obs, 1 << 6, HAMMING)
    exact = ml_decode_exact(params, obs, HAMMING)
    assert full.best_cost == exact.best_cost
    assert np.array_equal(full.best_message, exact.best_message)
    assert np.array_equal(exact.best_message, msg)


def test_awgn_decode_noiseless(seed):
    shape = AwgnShape(c=4, beta=2.5, power=1.0)
    params = CodeParams(n=16, k=4, nu=32, seed=seed, awgn=shape)
    msg = message_from_int(0xC3A5, 16)
    codeword = encode(params, msg, 4)
    obs = Observation.from_codeword(codeword)
    result = beam_decode(params, obs, 64, EUCLIDEAN)
    assert result.best_cost == 0.0
    assert np.array_equal(result.best_message, msg)


def test_reliable_prefix(seed):
    params = CodeParams(n=8, k=2, nu=16, seed=seed)
    msg = message_from_int(0b10010110, 8)
    obs = bsc_observation(params, msg, 6, 0.0, seed)
    result = beam_decode(params, obs, 256, HAMMING)
    assert np.array_equal(reliable_prefix(result, 0), msg)
    assert np.array_equal(reliable_prefix(result, 6), msg[:2])
    with pytest.raises(ConfigError):
        reliable_prefix(result, 8)


def test_prefix_beats_full_message_error_rate(seed):
    """Guarded-prefix decisions err less often than whole-message ones."""
    params = CodeParams(n=64, k=4, nu=32, seed=seed)
    trials = 300
    full_err = 0
    prefix_err = 0
    for t in range(trials):
        ts = derive_seed(seed, f"pf-{t}")
        code = params.with_seed(derive_seed(ts, "code"))
        msg = random_message(code, derive_seed(ts, "m"))
        obs = bsc_observation(code, msg, 7, 0.05, derive_seed(ts, "n"))
        best = beam_decode(code, obs, 64, HAMMING).best_message
        full_err += not np.array_equal(best, msg)
        prefix_err += not np.array_equal(best[:32], msg[:32])
    assert prefix_err < full_err
