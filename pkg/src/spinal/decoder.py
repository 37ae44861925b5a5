"""Beam-search decoder over the message-prefix tree, plus an exhaustive
maximum-likelihood oracle.

Decoding replays the encoder: a node at depth d is a k*d-bit message
prefix, labelled by its final spine state; the branch into depth d costs
the Hamming (or squared-Euclidean) distance between received block d and
the pass values regenerated from the child state.  Path cost is the sum of
branch costs, so the lowest-cost leaf is the ML estimate.  The beam search
keeps the best `beam_width` prefixes per depth.

Tie-breaking is fixed everywhere to "smaller (cost, prefix)" with prefixes
compared lexicographically, so runs are reproducible and a beam that keeps
everything coincides with the exhaustive oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .encoder import CodeParams, Codeword, constellation, message_from_int
from .errors import ConfigError
from .hashfam import HashEngine

HAMMING = "hamming"
EUCLIDEAN = "euclidean"

_HAS_BITCOUNT = hasattr(np, "bitwise_count")


@dataclass
class Observation:
    """Received pass rows; data[l, i] is the pass-(l+1) value for spine i."""

    kind: str  # "bsc" | "awgn"
    data: np.ndarray  # shape (L, nblocks)

    def __post_init__(self) -> None:
        if self.kind not in ("bsc", "awgn"):
            raise ConfigError(f"observation: unknown kind {self.kind!r}")
        self.data = np.atleast_2d(np.asarray(self.data))
        if self.data.shape[0] < 1:
            raise ConfigError("observation: needs at least one pass")

    @classmethod
    def from_codeword(cls, codeword: Codeword) -> "Observation":
        return cls(kind=codeword.kind, data=np.asarray(codeword.rows))

    @property
    def passes(self) -> int:
        return self.data.shape[0]

    @property
    def nblocks(self) -> int:
        return self.data.shape[1]


@dataclass
class DecodeResult:
    """Best leaf plus the final beam, cost-sorted under the shared tie rule."""

    best_message: np.ndarray
    best_cost: Union[int, float]
    survivor_costs: np.ndarray
    survivor_messages: np.ndarray  # shape (S, n)
    nodes_expanded: int
    ties_broken: int


def metric_for(kind: str) -> str:
    return HAMMING if kind == "bsc" else EUCLIDEAN


def _check_decode_args(params: CodeParams, obs: Observation, metric: str) -> None:
    if metric not in (HAMMING, EUCLIDEAN):
        raise ConfigError(f"metric: unknown {metric!r}")
    if metric != metric_for(obs.kind):
        raise ConfigError(f"metric: {metric} does not match {obs.kind} observation")
    if obs.kind == "awgn" and params.awgn is None:
        raise ConfigError("params: AWGN observation needs a constellation shape")
    if obs.nblocks != params.nblocks:
        raise ConfigError(
            f"observation: {obs.nblocks} blocks != n/k = {params.nblocks}"
        )
    if obs.passes > params.max_passes:
        raise ConfigError(
            f"observation: {obs.passes} passes exceed the budget {params.max_passes}"
        )


class _CostModel:
    """Branch costs for candidate states against one observation block."""

    def __init__(self, params: CodeParams, obs: Observation):
        self.params = params
        self.obs = obs
        self.passes = obs.passes
        self.int_cost = obs.kind == "bsc"
        if obs.kind == "awgn":
            self.table = constellation(params.awgn)
        elif _HAS_BITCOUNT and params.nu <= 64:
            # whole received column packed into one word per block:
            # bit (L-l) holds pass l, aligning with the spine window.
            L = self.passes
            weights = np.uint64(1) << np.arange(L - 1, -1, -1, dtype=np.uint64)
            self.packed = (obs.data.astype(np.uint64).T @ weights).astype(np.uint64)

    def block_costs(self, depth: int, states: np.ndarray) -> np.ndarray:
        """Vectorized branch costs at `depth` for uint64 candidate states."""
        nu = self.params.nu
        L = self.passes
        if self.int_cost:
            if _HAS_BITCOUNT and nu <= 64:
                window = (states >> np.uint64(nu - L)) & np.uint64((1 << L) - 1)
                return np.bitwise_count(window ^ self.packed[depth]).astype(np.int64)
            cost = np.zeros(len(states), dtype=np.int64)
            for ell in range(1, L + 1):
                bit = (states >> np.uint64(nu - ell)) & np.uint64(1)
                cost += bit.astype(np.int64) ^ int(self.obs.data[ell - 1, depth])
            return cost
        c = self.params.awgn.c
        mask = np.uint64((1 << c) - 1)
        cost = np.zeros(len(states), dtype=np.float64)
        for ell in range(1, L + 1):
            idx = (states >> np.uint64(nu - ell * c)) & mask
            diff = self.obs.data[ell - 1, depth] - self.table[idx]
            cost += diff * diff
        return cost

    def block_cost_scalar(self, depth: int, state: int) -> Union[int, float]:
        nu = self.params.nu
        L = self.passes
        if self.int_cost:
            total = 0
            for ell in range(1, L + 1):
                total += ((state >> (nu - ell)) & 1) ^ int(self.obs.data[ell - 1, depth])
            return total
        c = self.params.awgn.c
        total = 0.0
        for ell in range(1, L + 1):
            x = self.table[(state >> (nu - ell * c)) & ((1 << c) - 1)]
            diff = float(self.obs.data[ell - 1, depth]) - x
            total += diff * diff
        return total


def branch_cost(
    block: np.ndarray, state: int, params: CodeParams, metric: str
) -> Union[int, float]:
    """Cost of one observation block against the passes regenerated from state.

    `block` holds the received values for one spine index, one per pass.
    """
    if metric not in (HAMMING, EUCLIDEAN):
        raise ConfigError(f"metric: unknown {metric!r}")
    kind = "bsc" if metric == HAMMING else "awgn"
    if kind == "awgn" and params.awgn is None:
        raise ConfigError("params: Euclidean metric needs a constellation shape")
    block = np.asarray(block)
    if block.ndim != 1:
        raise ConfigError("branch_cost: block must be one value per pass")
    if block.shape[0] > params.max_passes:
        raise ConfigError(
            f"block: {block.shape[0]} passes exceed the budget {params.max_passes}"
        )
    if not 0 <= state < (1 << params.nu):
        raise ConfigError(f"state: must fit in {params.nu} bits")
    model = _CostModel(params, Observation(kind=kind, data=block.reshape(-1, 1)))
    return model.block_cost_scalar(0, state)


def _select(costs: np.ndarray, limit: int) -> tuple[np.ndarray, int]:
    """Indices of the `limit` smallest under (cost, index) order, ascending
    by index, plus the number of equal-cost candidates cut at the boundary."""
    n = len(costs)
    if n <= limit:
        return np.arange(n), 0
    part = np.argpartition(costs, limit - 1)[:limit]
    thresh = costs[part].max()
    below = np.flatnonzero(costs < thresh)
    need = limit - below.size
    at = np.flatnonzero(costs == thresh)
    sel = np.concatenate([below, at[:need]])
    sel.sort()
    return sel, int(at.size - need)


def beam_decode(
    params: CodeParams, obs: Observation, beam_width: int, metric: str
) -> DecodeResult:
    """Prune-to-beam tree search; returns the lowest-cost surviving leaf.

    Work per depth is O(S * 2^k) hashing plus an O(S * 2^k) selection of the
    beam, S being the current survivor count (<= beam_width).
    """
    _check_decode_args(params, obs, metric)
    if beam_width < 1:
        raise ConfigError(f"beam width: must be >= 1, got {beam_width}")
    if params.nu > 64:
        return _beam_decode_scalar(params, obs, beam_width, metric)

    engine = HashEngine(params.seed, params.nu, params.k)
    model = _CostModel(params, obs)
    K = 1 << params.k
    block_tile = np.arange(K, dtype=np.uint64)
    cost_dtype = np.int64 if model.int_cost else np.float64

    states = np.zeros(1, dtype=np.uint64)
    costs = np.zeros(1, dtype=cost_dtype)
    trace: list[tuple[np.ndarray, np.ndarray]] = []
    nodes = 0
    ties = 0
    for depth in range(params.nblocks):
        S = states.size
        child_states = engine.step_vec(
            np.repeat(states, K), np.tile(block_tile, S)
        )
        child_costs = np.repeat(costs, K) + model.block_costs(depth, child_states)
        nodes += S * K
        sel, cut = _select(child_costs, beam_width)
        ties += cut
        trace.append((sel >> params.k, sel & (K - 1)))
        states = child_states[sel]
        costs = child_costs[sel]

    order = np.argsort(costs, kind="stable")
    messages = _backtrack(params, trace, order)
    best_cost = costs[order[0]]
    return DecodeResult(
        best_message=messages[0],
        best_cost=int(best_cost) if model.int_cost else float(best_cost),
        survivor_costs=costs[order],
        survivor_messages=messages,
        nodes_expanded=nodes,
        ties_broken=ties,
    )


def _backtrack(
    params: CodeParams, trace: list[tuple[np.ndarray, np.ndarray]], order: np.ndarray
) -> np.ndarray:
    """Rebuild message bits for the survivors listed in `order`."""
    S = len(order)
    k = params.k
    blocks = np.zeros((S, params.nblocks), dtype=np.int64)
    idx = np.asarray(order).copy()
    for depth in range(params.nblocks - 1, -1, -1):
        parents, labels = trace[depth]
        blocks[:, depth] = labels[idx]
        idx = parents[idx]
    bits = np.zeros((S, params.n), dtype=np.uint8)
    for j in range(k):
        bits[:, j::k] = (blocks >> (k - 1 - j)) & 1
    return bits


def _beam_decode_scalar(
    params: CodeParams, obs: Observation, beam_width: int, metric: str
) -> DecodeResult:
    """Python-int fallback for wide spines (nu > 64); same tie rule."""
    engine = HashEngine(params.seed, params.nu, params.k)
    model = _CostModel(params, obs)
    K = 1 << params.k
    states = [0]
    costs = [0]
    trace = []
    nodes = 0
    ties = 0
    for depth in range(params.nblocks):
        children = []
        for pos, (state, cost) in enumerate(zip(states, costs)):
            for blk in range(K):
                child = engine.step(state, blk)
                children.append(
                    (cost + model.block_cost_scalar(depth, child), pos, blk, child)
                )
        nodes += len(children)
        # (cost, child index) order; child index is the prefix-lex order
        # because parents are kept in prefix order.
        rank = sorted(range(len(children)), key=lambda i: (children[i][0], i))
        sel = sorted(rank[:beam_width])
        if len(children) > beam_width:
            bound = children[rank[beam_width - 1]][0]
            ties += sum(1 for i in rank[beam_width:] if children[i][0] == bound)
        trace.append([(children[i][1], children[i][2]) for i in sel])
        costs = [children[i][0] for i in sel]
        states = [children[i][3] for i in sel]

    order = sorted(range(len(costs)), key=lambda i: costs[i])
    msgs = np.zeros((len(order), params.n), dtype=np.uint8)
    for row, start in enumerate(order):
        idx = start
        for depth in range(params.nblocks - 1, -1, -1):
            pos, blk = trace[depth][idx]
            for j in range(params.k):
                msgs[row, depth * params.k + j] = (blk >> (params.k - 1 - j)) & 1
            idx = pos
    cost0 = costs[order[0]]
    return DecodeResult(
        best_message=msgs[0],
        best_cost=cost0,
        survivor_costs=np.array([costs[i] for i in order]),
        survivor_messages=msgs,
        nodes_expanded=nodes,
        ties_broken=ties,
    )


ML_MAX_N = 24


def ml_decode_exact(params: CodeParams, obs: Observation, metric: str) -> DecodeResult:
    """Enumerate all 2^n messages and return the global cost minimizer.

    Ties go to the lexicographically smallest message (the same order the
    beam uses), so `beam_decode` with beam_width >= 2^n returns the same
    message and cost.
    """
    _check_decode_args(params, obs, metric)
    if params.n > ML_MAX_N:
        raise ConfigError(f"ml_decode_exact: n={params.n} exceeds the {ML_MAX_N}-bit guard")
    model = _CostModel(params, obs)
    n, k = params.n, params.k
    total_msgs = 1 << n

    if params.nu <= 64:
        msgs = np.arange(total_msgs, dtype=np.uint64)
        states = np.zeros(total_msgs, dtype=np.uint64)
        costs = np.zeros(total_msgs, dtype=np.int64 if model.int_cost else np.float64)
        engine = HashEngine(params.seed, params.nu, params.k)
        for depth in range(params.nblocks):
            shift = np.uint64(n - (depth + 1) * k)
            blocks = (msgs >> shift) & np.uint64((1 << k) - 1)
            states = engine.step_vec(states, blocks)
            costs = costs + model.block_costs(depth, states)
        best = int(np.argmin(costs))  # first minimum = smallest message
        best_cost = costs[best]
    else:
        engine = HashEngine(params.seed, params.nu, params.k)
        best, best_cost = 0, None
        costs = np.zeros(total_msgs)
        for m in range(total_msgs):
            state, cost = 0, 0
            for depth in range(params.nblocks):
                blk = (m >> (n - (depth + 1) * k)) & ((1 << k) - 1)
                state = engine.step(state, blk)
                cost += model.block_cost_scalar(depth, state)
            costs[m] = cost
            if best_cost is None or cost < best_cost:
                best, best_cost = m, cost

    message = message_from_int(best, n)
    return DecodeResult(
        best_message=message,
        best_cost=int(best_cost) if model.int_cost else float(best_cost),
        survivor_costs=np.asarray([best_cost]),
        survivor_messages=message.reshape(1, -1),
        nodes_expanded=total_msgs,
        ties_broken=0,
    )


def reliable_prefix(result: DecodeResult, tail_guard: int) -> np.ndarray:
    """Decoded bits with the unprotected tail dropped."""
    n = len(result.best_message)
    if not 0 <= tail_guard < n:
        raise ConfigError(f"tail_guard: must be in [0, n), got {tail_guard}")
    return result.best_message[: n - tail_guard]
