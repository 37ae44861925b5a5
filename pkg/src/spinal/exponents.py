"""Closed-form channel analysis: entropies, capacities, divergences,
random-coding exponents, and the parameter-selection rules the code uses
to pick pass counts and constellation shapes.

All logarithms are base 2; the only natural-log conversions live in the
module constant LN2.  Root finding and 1-D optimization use bracketed
bisection / golden-section with fixed absolute tolerances; no derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .gaussian import gaussian_cdf, gaussian_quantile

LN2 = math.log(2.0)
LOG2_E = 1.0 / LN2

_BISECT_TOL = 1e-10
_GOLDEN_TOL = 1e-9
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    """Root of monotone f on [lo, hi] with f(lo), f(hi) of opposite sign."""
    flo = f(lo)
    if flo == 0.0:
        return lo
    rising = flo < 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == rising:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = _GOLDEN_TOL) -> float:
    """Argmax of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)


# --- entropy / capacity / divergence ---------------------------------------

def binary_entropy(p: float) -> float:
    """H(p) in bits, with the 0*log(0) = 0 limit at the endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"entropy: p must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def capacity_bsc(p: float) -> float:
    """1 - H(p), in bits per channel use."""
    return 1.0 - binary_entropy(p)


def capacity_awgn(power: float, sigma2: float) -> float:
    """log2(1 + SNR) / 2, in bits per symbol."""
    if power <= 0 or sigma2 <= 0:
        raise ConfigError("capacity_awgn: power and sigma2 must be positive")
    return 0.5 * math.log2(1.0 + power / sigma2)


def kl_bernoulli(q: float, p: float) -> float:
    """D(q || p) in bits; +inf when p is degenerate and q disagrees."""
    if not 0.0 <= q <= 1.0:
        raise ConfigError(f"kl_bernoulli: q must be in [0, 1], got {q}")
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"kl_bernoulli: p must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0 if q == p else math.inf
    total = 0.0
    if q > 0.0:
        total += q * math.log2(q / p)
    if q < 1.0:
        total += (1.0 - q) * math.log2((1.0 - q) / (1.0 - p))
    return total


def kl_gap_curvature(p: float) -> float:
    """Constant kappa with D(q||p) ~ kappa * (C(p) - (1-H(q)))^2 near q = p.

    Combines the second-order expansion of the divergence in (q - p) with
    the first-order expansion of the entropy gap:
        D(q||p) ~ (q-p)^2 / (p (1-p) ln 4),
        C - R   ~ log2((1-p)/p) * (q-p).
    Singular at p = 1/2, where the entropy slope vanishes.
    """
    if not 0.0 < p < 1.0:
        raise ConfigError(f"kl_gap_curvature: p must be in (0, 1), got {p}")
    if p == 0.5:
        raise ConfigError("kl_gap_curvature: singular at p = 1/2 (capacity gap has no slope)")
    slope = math.log2((1.0 - p) / p)
    return 1.0 / (p * (1.0 - p) * 2.0 * LN2 * slope * slope)


# --- BSC error bound --------------------------------------------------------

@dataclass(frozen=True)
class BscBound:
    """Per-symbol exponent E with P_e <= 2^(-T E), and which regime fired."""

    case: str          # "a" (divergence regime) or "b" (cutoff regime)
    q: float           # flip rate solving R = 1 - H(q), q > p
    exponent: float    # bits per channel use
    error_bound: float  # 2^(-T * exponent)


def solve_rate_flip(rate: float, p: float) -> float:
    """The q in [p, 1/2] with 1 - H(q) = rate (the noisier branch)."""
    if not 0.0 < p < 0.5:
        raise ConfigError(f"solve_rate_flip: p must be in (0, 1/2), got {p}")
    cap = capacity_bsc(p)
    if rate >= cap:
        raise ConfigError(f"rate {rate} is not below capacity {cap}")
    if rate < 0.0:
        raise ConfigError(f"rate must be nonnegative, got {rate}")
    target = 1.0 - rate
    return _bisect(lambda q: binary_entropy(q) - target, p, 0.5)


def bsc_error_bound(T: int, rate: float, p: float) -> BscBound:
    """Random-coding error bound for a length-T code at the given rate."""
    if T <= 0:
        raise ConfigError(f"T: must be positive, got {T}")
    q = solve_rate_flip(rate, p)
    threshold = math.sqrt(p) / (math.sqrt(p) + math.sqrt(1.0 - p))
    if q <= threshold:
        case, exponent = "a", kl_bernoulli(q, p)
    else:
        case = "b"
        exponent = 1.0 - rate - 2.0 * math.log2(math.sqrt(p) + math.sqrt(1.0 - p))
    return BscBound(case=case, q=q, exponent=exponent, error_bound=2.0 ** (-T * exponent))


# --- Gallager exponent for general DMCs -------------------------------------

@dataclass(frozen=True)
class DmcSpec:
    """Discrete memoryless channel: input distribution and transition matrix."""

    input_dist: np.ndarray   # Q over inputs
    transitions: np.ndarray  # row-stochastic, inputs x outputs

    def __post_init__(self) -> None:
        q = np.asarray(self.input_dist, dtype=np.float64)
        t = np.atleast_2d(np.asarray(self.transitions, dtype=np.float64))
        object.__setattr__(self, "input_dist", q)
        object.__setattr__(self, "transitions", t)
        if q.ndim != 1 or t.shape[0] != q.shape[0]:
            raise ConfigError("dmc: Q length must match transition rows")
        if np.any(q < 0.0) or np.any(t < 0.0):
            raise ConfigError("dmc: probabilities must be nonnegative")
        if abs(q.sum() - 1.0) > 1e-12:
            raise ConfigError(f"dmc: Q sums to {q.sum()!r}, not 1")
        rows = t.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-12):
            raise ConfigError("dmc: each transition row must sum to 1")


def bsc_dmc(p: float) -> DmcSpec:
    """BSC(p) with the uniform input distribution."""
    return DmcSpec(
        input_dist=np.array([0.5, 0.5]),
        transitions=np.array([[1.0 - p, p], [p, 1.0 - p]]),
    )


def gallager_e0(rho: float, dmc: DmcSpec) -> float:
    """E_0(rho, Q) = -log2 sum_j (sum_i Q_i P_ij^(1/(1+rho)))^(1+rho)."""
    if not 0.0 < rho <= 1.0:
        raise ConfigError(f"rho: must be in (0, 1], got {rho}")
    inner = dmc.input_dist @ dmc.transitions ** (1.0 / (1.0 + rho))
    return -math.log2(float(np.sum(inner ** (1.0 + rho))))


@dataclass(frozen=True)
class E0Optimum:
    rho_star: float
    exponent: float  # max over rho of (E_0(rho, Q) - rho * R)


def optimize_e0(dmc: DmcSpec, rate: float) -> E0Optimum:
    """Maximize E_0(rho, Q) - rho*R over rho in (0, 1] (concave objective)."""
    if rate < 0.0:
        raise ConfigError(f"rate: must be nonnegative, got {rate}")

    def objective(rho: float) -> float:
        return gallager_e0(rho, dmc) - rho * rate

    lo = 1e-9
    rho_star = _golden_max(objective, lo, 1.0)
    # the optimum may sit on the rho = 1 boundary
    candidates = [(objective(r), r) for r in (rho_star, 1.0)]
    value, rho_star = max(candidates)
    return E0Optimum(rho_star=rho_star, exponent=max(value, 0.0))


# --- AWGN quantized-constellation exponent ----------------------------------

def awgn_spacing(beta: float, c: int, power: float) -> float:
    """Upper bound on the gap between adjacent constellation points."""
    return beta * math.sqrt(power) * math.exp(beta * beta / 2.0) / (1 << (c - 1))


def awgn_rejection(beta: float) -> float:
    """Mass of the unit Gaussian outside [-beta, beta]: 2(1 - Phi(beta))."""
    return float(2.0 * (1.0 - gaussian_cdf(beta)))


def awgn_coding_exponent(
    zeta: float, beta: float, c: int, power: float, sigma2: float
) -> float:
    """Random-coding exponent of the truncated, quantized Gaussian ensemble.

    Capacity of a slightly noisier channel, minus penalties for truncation
    (rejection mass) and quantization (spacing), with zeta > 1 trading the
    two off.
    """
    if zeta <= 1.0:
        raise ConfigError(f"zeta: must be > 1, got {zeta}")
    if c < 1:
        raise ConfigError(f"c: must be >= 1, got {c}")
    if power <= 0 or sigma2 <= 0 or beta <= 0:
        raise ConfigError("awgn_coding_exponent: power, sigma2, beta must be positive")
    delta = awgn_spacing(beta, c, power)
    shrink = (1.0 + 1.0 / zeta) ** 2
    return (
        0.5 * math.log2(1.0 + power / (sigma2 * shrink))
        - 2.0 * awgn_rejection(beta) / LN2
        - (2.0 * zeta + 1.0) * delta * delta * LOG2_E / (4.0 * sigma2)
    )


_ZETA_MAX = 1e9


def optimize_awgn_exponent(
    beta: float, c: int, power: float, sigma2: float
) -> tuple[float, float]:
    """(zeta*, exponent) maximizing over zeta in (1, 1e9], searched in log space."""

    def objective(log_zeta: float) -> float:
        return awgn_coding_exponent(math.exp(log_zeta), beta, c, power, sigma2)

    lo = math.log(1.0 + 1e-9)
    hi = math.log(_ZETA_MAX)
    log_star = _golden_max(objective, lo, hi)
    return math.exp(log_star), objective(log_star)


@dataclass(frozen=True)
class AwgnSelection:
    """Constellation recipe hitting exponent >= capacity - epsilon."""

    zeta: float
    beta: float
    c: int
    delta: float
    r_beta: float


def select_awgn_params(
    epsilon: float, power: float, sigma2: float, sigma_min2: Optional[float] = None
) -> AwgnSelection:
    """Pick (zeta, beta, c) for a capacity gap epsilon.

    zeta = 9*SNR/epsilon exactly; beta makes the rejection mass equal
    epsilon*ln2/6; c is the smallest integer whose spacing is at most
    2*epsilon*sigma^2/(9*sqrt(P)).  Computed with sigma_min^2 in place of
    sigma^2 so one recipe covers every noise level down to sigma_min^2.
    """
    if sigma_min2 is None:
        sigma_min2 = sigma2
    if sigma_min2 <= 0 or sigma2 < sigma_min2:
        raise ConfigError("select_awgn_params: need 0 < sigma_min2 <= sigma2")
    cap = capacity_awgn(power, sigma2)
    if not 0.0 < epsilon < cap:
        raise ConfigError(
            f"epsilon: must be in (0, capacity={cap:.6f}), got {epsilon}"
        )
    snr_max = power / sigma_min2
    zeta = 9.0 * snr_max / epsilon
    r_target = epsilon * LN2 / 6.0
    beta = float(gaussian_quantile(1.0 - r_target / 2.0))
    delta_target = 2.0 * epsilon * sigma_min2 / (9.0 * math.sqrt(power))
    # smallest c with spacing <= target; spacing halves per unit of c
    ratio = beta * math.sqrt(power) * math.exp(beta * beta / 2.0) / delta_target
    c = max(1, math.ceil(math.log2(ratio)) + 1)
    while awgn_spacing(beta, c, power) > delta_target:
        c += 1
    while c > 1 and awgn_spacing(beta, c - 1, power) <= delta_target:
        c -= 1
    return AwgnSelection(
        zeta=zeta, beta=beta, c=c, delta=awgn_spacing(beta, c, power),
        r_beta=awgn_rejection(beta),
    )


# --- pass count and spine sizing --------------------------------------------

def choose_pass_count(k: int, capacity: float) -> int:
    """Smallest pass count L with k/(L-2) >= C > k/(L-1).

    The resulting rate k/L then sits within (C/L, 2C/L] of capacity.
    """
    if k < 1:
        raise ConfigError(f"k: must be >= 1, got {k}")
    if not 0.0 < capacity <= k:
        raise ConfigError(f"capacity: must be in (0, k], got {capacity}")
    # the answer is floor(k/C) + 2 up to float slop; scan upward from below
    L = max(3, int(math.floor(k / capacity)))
    while not (k / (L - 2) >= capacity > k / (L - 1)):
        L += 1
        if L > k / capacity + 4:
            raise ConfigError(f"choose_pass_count: no valid L for k={k}, C={capacity}")
    return L


def collision_safe_nu(n: int, k: int, L: int, i_star: int) -> int:
    """Spine width making hash collisions negligible at proof scale.

    ceil(i*L + 2L + log2(i*) + 6 log2(n)); advisory sizing only, desk
    configurations use far smaller nu.
    """
    if min(n, k, L, i_star) <= 0:
        raise ConfigError("collision_safe_nu: all arguments must be positive")
    return math.ceil(i_star * L + 2 * L + math.log2(i_star) + 6.0 * math.log2(n))


# --- reports ----------------------------------------------------------------

EXPONENT_CSV_HEADER = (
    "channel,param,capacity,rate,gap,q,divergence,kappa,bound_case,"
    "bound_exponent,rho_star,e0_exponent,awgn_exponent,zeta,beta,c,delta,r_beta"
)


@dataclass
class ExponentReport:
    """Everything the analysis derives for one (channel, rate) point."""

    channel: str
    param: float  # flip probability (bsc) or SNR (awgn)
    capacity: float
    rate: float
    gap: float
    q: Optional[float] = None
    divergence: Optional[float] = None
    kappa: Optional[float] = None
    bound_case: Optional[str] = None
    bound_exponent: Optional[float] = None
    rho_star: Optional[float] = None
    e0_exponent: Optional[float] = None
    awgn_exponent: Optional[float] = None
    zeta: Optional[float] = None
    beta: Optional[float] = None
    c: Optional[int] = None
    delta: Optional[float] = None
    r_beta: Optional[float] = None

    def csv_row(self) -> str:
        def fmt(v) -> str:
            return "" if v is None else (v if isinstance(v, str) else repr(v))

        cells = [
            self.channel, fmt(self.param), fmt(self.capacity), fmt(self.rate),
            fmt(self.gap), fmt(self.q), fmt(self.divergence), fmt(self.kappa),
            fmt(self.bound_case), fmt(self.bound_exponent), fmt(self.rho_star),
            fmt(self.e0_exponent), fmt(self.awgn_exponent), fmt(self.zeta),
            fmt(self.beta), fmt(self.c), fmt(self.delta), fmt(self.r_beta),
        ]
        return ",".join(cells)


def bsc_report(p: float, rate: float, block_bits: int = 1) -> ExponentReport:
    """Full BSC analysis at one (p, rate) point."""
    cap = capacity_bsc(p)
    bound = bsc_error_bound(max(block_bits, 1), rate, p)
    opt = optimize_e0(bsc_dmc(p), rate)
    return ExponentReport(
        channel="bsc", param=p, capacity=cap, rate=rate, gap=cap - rate,
        q=bound.q, divergence=kl_bernoulli(bound.q, p),
        kappa=None if p == 0.5 else kl_gap_curvature(p),
        bound_case=bound.case, bound_exponent=bound.exponent,
        rho_star=opt.rho_star, e0_exponent=opt.exponent,
    )


def awgn_report(power: float, sigma2: float, rate: float) -> ExponentReport:
    """Full AWGN analysis at one (SNR, rate) point; epsilon is the gap."""
    cap = capacity_awgn(power, sigma2)
    if not 0.0 < rate < cap:
        raise ConfigError(f"rate: must be in (0, capacity={cap:.6f}), got {rate}")
    sel = select_awgn_params(cap - rate, power, sigma2)
    zeta_star, exponent = optimize_awgn_exponent(sel.beta, sel.c, power, sigma2)
    return ExponentReport(
        channel="awgn", param=power / sigma2, capacity=cap, rate=rate,
        gap=cap - rate, awgn_exponent=exponent, zeta=zeta_star, beta=sel.beta,
        c=sel.c, delta=sel.delta, r_beta=sel.r_beta,
    )
