"""EXIT-chart engine for the component decoders of a quantum turbo code.

A-priori messages follow the consistent-Gaussian model per classical bit
(z and x of every qubit independently): the bit's log-likelihood ratio is
drawn from ``N(sigma^2/2 * (1 - 2b), sigma^2)`` and the 4-ary table is the
product of the two bit tables.  Mutual information of 4-ary messages is
reported normalized to one bit per classical bit, i.e. in ``[0, 1]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .channel import DepolarizingChannel, sample_symbols, symbol_priors
from .pauli import SYMBOL_BITS, SeedTransform, SymplecticError, random_symplectic
from .qcc import CodeSpec, DecodingFailure, SyndromeSequence, siso_decode, track_symbols

log = logging.getLogger(__name__)

SIGMA_CAP = 40.0
DEFAULT_GRID = 21
DEFAULT_FRAMES = 10
DEFAULT_LENGTH = 3000

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


# ---------------------------------------------------------------------------
# J function


@lru_cache(maxsize=4096)
def j_function(sigma: float) -> float:
    """Mutual information of a binary variable observed through a consistent Gaussian LLR."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return 0.0
    mean = sigma * sigma / 2.0

    def integrand(y):
        dens = math.exp(-((y - mean) ** 2) / (2.0 * sigma * sigma)) / (math.sqrt(2.0 * math.pi) * sigma)
        return dens * (math.log1p(math.exp(-y)) if y > -30 else -y) / math.log(2.0)

    val, _ = integrate.quad(integrand, mean - 12 * sigma, mean + 12 * sigma, epsabs=1e-10, epsrel=1e-10, limit=200)
    return min(max(1.0 - val, 0.0), 1.0)


@lru_cache(maxsize=4096)
def j_inverse(mi: float, tol: float = 1e-7) -> float:
    if not 0.0 <= mi < 1.0:
        raise ValueError(f"j_inverse needs 0 <= mi < 1, got {mi}")
    if mi == 0.0:
        return 0.0
    lo, hi = 0.0, SIGMA_CAP
    if j_function(hi) <= mi:
        return SIGMA_CAP
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if j_function(mid) < mi:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# a-priori channel and MI estimator


@dataclass(frozen=True)
class AprioriChannel:
    sigma_a: float

    def __post_init__(self):
        if self.sigma_a < 0:
            raise ValueError("sigma_a must be non-negative")

    @classmethod
    def for_mi(cls, target_ia: float) -> "AprioriChannel":
        if not 0.0 <= target_ia <= 1.0:
            raise ValueError(f"a-priori MI must lie in [0, 1], got {target_ia}")
        return cls(SIGMA_CAP if target_ia >= 1.0 else j_inverse(float(target_ia)))

    def messages(self, true_symbols: np.ndarray, rng: np.random.Generator, exact_delta: bool = False) -> np.ndarray:
        sym = np.asarray(true_symbols, dtype=np.int64)
        N = sym.size
        if self.sigma_a == 0.0:
            return np.full((N, 4), 0.25)
        bits = SYMBOL_BITS[sym].astype(np.float64)  # (N, 2): z, x
        if exact_delta:
            out = np.zeros((N, 4))
            out[np.arange(N), sym] = 1.0
            return out
        s = self.sigma_a
        llr = (s * s / 2.0) * (1.0 - 2.0 * bits) + s * rng.standard_normal((N, 2))
        p0 = 0.5 * (1.0 + np.tanh(llr / 2.0))  # P(bit = 0)
        p1 = 1.0 - p0
        # symbols I, X, Y, Z have (z, x) = 00, 01, 11, 10
        pz = np.stack([p0[:, 0], p0[:, 0], p1[:, 0], p1[:, 0]], axis=1)
        px = np.stack([p0[:, 1], p1[:, 1], p1[:, 1], p0[:, 1]], axis=1)
        out = pz * px
        return out / out.sum(axis=1, keepdims=True)


def generate_apriori(true_symbols: np.ndarray, target_ia: float, rng: np.random.Generator) -> np.ndarray:
    """A-priori tables for ``true_symbols`` with average MI ``target_ia``.

    ``target_ia == 1`` yields exact deltas at the true symbols.
    """
    ch = AprioriChannel.for_mi(target_ia)
    return ch.messages(true_symbols, rng, exact_delta=target_ia >= 1.0)


def measure_mi(true_symbols, msgs: np.ndarray, method: str = "entropy") -> float:
    """Normalized 4-ary mutual information of a message sequence.

    ``entropy`` averages ``1 + 1/2 * sum_s P(s) log2 P(s)`` over the frame and
    relies on the messages being consistent; ``true`` uses
    ``1 + 1/2 * log2 P(true symbol)`` instead.
    """
    msgs = np.asarray(msgs, dtype=np.float64)
    sym = np.asarray(true_symbols, dtype=np.int64)
    if msgs.ndim != 2 or msgs.shape[1] != 4 or msgs.shape[0] != sym.size:
        raise ValueError(f"messages of shape {msgs.shape} do not match {sym.size} symbols")
    if not np.allclose(msgs.sum(axis=1), 1.0, atol=1e-6):
        raise ValueError("messages must be normalized")
    if method == "entropy":
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(msgs > 0, msgs * np.log2(np.where(msgs > 0, msgs, 1.0)), 0.0)
        val = 1.0 + 0.5 * plogp.sum(axis=1).mean()
    elif method == "true":
        pt = np.maximum(msgs[np.arange(sym.size), sym], 1e-300)
        val = 1.0 + 0.5 * np.log2(pt).mean()
    else:
        raise ValueError(f"unknown MI estimator {method!r}")
    return float(min(max(val, 0.0), 1.0))


# ---------------------------------------------------------------------------
# EXIT points and curves


@dataclass
class ExitCurve:
    role: str
    points: list[tuple[float, float]]
    p: float | None = None
    failures: int = 0

    def __post_init__(self):
        ia = [a for a, _ in self.points]
        if any(b <= a for a, b in zip(ia, ia[1:])):
            raise ValueError("I_A grid must be strictly increasing")

    @property
    def i_a(self) -> np.ndarray:
        return np.array([a for a, _ in self.points])

    @property
    def i_e(self) -> np.ndarray:
        return np.array([e for _, e in self.points])


def _frame_rngs(rng: np.random.Generator, frames: int) -> list[np.random.Generator]:
    seeds = rng.bit_generator.seed_seq.spawn(frames) if hasattr(rng.bit_generator, "seed_seq") else None
    if seeds is None:
        return [np.random.default_rng(rng.integers(2**63)) for _ in range(frames)]
    return [np.random.default_rng(s) for s in seeds]


def inner_exit_point(
    seed: SeedTransform,
    p: float,
    target_ia: float,
    frames: int = DEFAULT_FRAMES,
    length: int = DEFAULT_LENGTH,
    rng: np.random.Generator | None = None,
    method: str = "entropy",
) -> tuple[float, int]:
    """Extrinsic MI of the inner decoder at one a-priori MI.

    ``length`` is the logical frame length.  Returns ``(I_E, failures)``;
    frames whose SISO run fails are left out of the average.
    """
    rng = rng if rng is not None else np.random.default_rng()
    spec = CodeSpec.for_logical_length(seed, length, "inner")
    ch = DepolarizingChannel(p)
    priors = np.broadcast_to(symbol_priors(ch), (spec.n_physical, 4))
    vals, failures = [], 0
    for frng in _frame_rngs(rng, frames):
        p_sym = sample_symbols(ch, spec.n_physical, frng)
        l_sym, s_sym, m0 = track_symbols(spec, p_sym)
        syn = SyndromeSequence.from_symbols(seed, s_sym, m0)
        apriori = generate_apriori(l_sym, target_ia, frng)
        try:
            out = siso_decode(spec, priors, apriori, syn)
        except DecodingFailure:
            failures += 1
            continue
        vals.append(measure_mi(l_sym, out.ext_l, method))
    if failures:
        log.warning("inner EXIT point p=%g I_A=%g: %d SISO failures", p, target_ia, failures)
    return (float(np.mean(vals)) if vals else float("nan")), failures


def outer_exit_point(
    seed: SeedTransform,
    target_ia: float,
    frames: int = DEFAULT_FRAMES,
    length: int = DEFAULT_LENGTH,
    rng: np.random.Generator | None = None,
    method: str = "entropy",
) -> tuple[float, int]:
    """Extrinsic MI of the outer decoder.

    ``length`` is the physical frame length, rounded down to a whole number
    of trellis steps plus the final memory.
    """
    rng = rng if rng is not None else np.random.default_rng()
    spec = CodeSpec(seed, max(1, (length - seed.m) // seed.n), "outer")
    vals, failures = [], 0
    for frng in _frame_rngs(rng, frames):
        p_sym = frng.integers(0, 4, spec.n_physical).astype(np.int8)
        _, s_sym, m0 = track_symbols(spec, p_sym)
        syn = SyndromeSequence.from_symbols(seed, s_sym, m0)
        apriori = generate_apriori(p_sym, target_ia, frng)
        try:
            out = siso_decode(spec, apriori, None, syn, want_p=True)
        except DecodingFailure:
            failures += 1
            continue
        vals.append(measure_mi(p_sym, out.ext_p, method))
    if failures:
        log.warning("outer EXIT point I_A=%g: %d SISO failures", target_ia, failures)
    return (float(np.mean(vals)) if vals else float("nan")), failures


def ia_grid(grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    return np.linspace(0.0, 1.0, grid_size)


def exit_curve(
    point: Callable[[float, np.random.Generator], tuple[float, int]],
    grid_size: int = DEFAULT_GRID,
    rng: np.random.Generator | None = None,
    role: str = "inner",
    p: float | None = None,
    map_fn=map,
) -> ExitCurve:
    """Evaluate ``point(I_A, rng)`` on a uniform grid including both endpoints.

    Each grid point gets its own child stream of ``rng`` so points can be
    evaluated in any order (``map_fn`` may be a pool's map).
    """
    rng = rng if rng is not None else np.random.default_rng()
    grid = ia_grid(grid_size)
    rngs = _frame_rngs(rng, grid_size)
    results = list(map_fn(point, grid, rngs))
    points = [(float(a), float(e)) for a, (e, _) in zip(grid, results)]
    return ExitCurve(role, points, p, sum(f for _, f in results))


def inner_curve(seed, p, grid_size=DEFAULT_GRID, frames=DEFAULT_FRAMES, length=DEFAULT_LENGTH, rng=None, map_fn=map):
    point = _InnerPoint(seed, p, frames, length)
    return exit_curve(point, grid_size, rng, "inner", p, map_fn)


def outer_curve(seed, grid_size=DEFAULT_GRID, frames=DEFAULT_FRAMES, length=DEFAULT_LENGTH, rng=None, map_fn=map):
    point = _OuterPoint(seed, frames, length)
    return exit_curve(point, grid_size, rng, "outer", None, map_fn)


@dataclass
class _InnerPoint:
    seed: SeedTransform
    p: float
    frames: int
    length: int

    def __call__(self, ia, rng):
        return inner_exit_point(self.seed, self.p, ia, self.frames, self.length, rng)


@dataclass
class _OuterPoint:
    seed: SeedTransform
    frames: int
    length: int

    def __call__(self, ia, rng):
        return outer_exit_point(self.seed, ia, self.frames, self.length, rng)


# ---------------------------------------------------------------------------
# tunnel analysis and threshold search


@dataclass
class TunnelResult:
    open: bool
    area: float
    crossover_ia: float | None
    gaps: np.ndarray = field(repr=False, default=None)


def outer_inverse(outer: ExitCurve, x: np.ndarray) -> np.ndarray:
    """I_A of the outer decoder needed to produce I_E = x (axes swapped)."""
    ie = np.maximum.accumulate(np.clip(outer.i_e, 0.0, 1.0))
    ia = outer.i_a
    # plateaus: keep the smallest I_A reaching a given I_E
    keep = np.concatenate([[True], np.diff(ie) > 0])
    return np.interp(x, ie[keep], ia[keep], left=0.0, right=1.0)


def tunnel_analysis(inner: ExitCurve, outer: ExitCurve) -> TunnelResult:
    """Open-tunnel test and area between the inner curve and the swapped outer curve."""
    x = inner.i_a
    if np.any(np.diff(x) <= 0) or np.any(np.diff(outer.i_a) <= 0):
        raise ValueError("EXIT grids must be strictly increasing")
    gap = inner.i_e - outer_inverse(outer, x)
    interior = slice(1, -1)
    bad = np.nonzero(gap[interior] <= 0)[0]
    crossover = float(x[interior][bad[0]]) if bad.size else None
    area = float(_trapezoid(np.maximum(gap, 0.0), x))
    return TunnelResult(bad.size == 0, area, crossover, gap)


class ThresholdError(ValueError):
    pass


@dataclass
class ThresholdResult:
    p_star: float
    lo: float
    hi: float
    evaluations: list[tuple[float, bool, float]]


def threshold_search(
    inner_seed: SeedTransform,
    outer_seed: SeedTransform,
    p_lo: float,
    p_hi: float,
    tol: float = 0.005,
    grid_size: int = DEFAULT_GRID,
    frames: int = DEFAULT_FRAMES,
    length: int = DEFAULT_LENGTH,
    rng: np.random.Generator | None = None,
    map_fn=map,
    outer: ExitCurve | None = None,
) -> ThresholdResult:
    """Bisection on the open-tunnel predicate between ``p_lo`` (open) and ``p_hi`` (closed)."""
    rng = rng if rng is not None else np.random.default_rng()
    outer_rng, inner_rng = _frame_rngs(rng, 2)
    if outer is None:
        outer = outer_curve(outer_seed, grid_size, frames, length, outer_rng, map_fn)
    evaluations = []

    def is_open(p):
        # the same stream at every p: curves at different p share their randomness
        cur = inner_curve(inner_seed, p, grid_size, frames, length, np.random.default_rng(inner_rng.bit_generator.seed_seq), map_fn)
        res = tunnel_analysis(cur, outer)
        evaluations.append((p, res.open, res.area))
        log.info("threshold search: p=%.5f open=%s area=%.5f", p, res.open, res.area)
        return res.open

    if not is_open(p_lo):
        raise ThresholdError(f"tunnel is closed at p_lo={p_lo}; evaluations={evaluations}")
    if is_open(p_hi):
        raise ThresholdError(f"tunnel is open at p_hi={p_hi}; evaluations={evaluations}")
    lo, hi = p_lo, p_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_open(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), lo, hi, evaluations)


# ---------------------------------------------------------------------------
# code search


@dataclass
class Candidate:
    inner_decimals: list[int]
    outer_decimals: list[int]
    open: bool
    area: float

    def to_json(self) -> dict:
        return {
            "inner_decimals": self.inner_decimals,
            "outer_decimals": self.outer_decimals,
            "open": self.open,
            "area": self.area,
        }


def rank_candidates(cands: Sequence[Candidate]) -> list[Candidate]:
    return sorted(cands, key=lambda c: (not c.open, c.area))


def _random_seed(n, k, m, kinds, rng) -> SeedTransform:
    return SeedTransform(n, k, m, random_symplectic(n + m, rng), kinds)


def evaluate_pair(
    inner_seed: SeedTransform,
    outer_seed: SeedTransform,
    target_p: float,
    grid_size: int = DEFAULT_GRID,
    frames: int = DEFAULT_FRAMES,
    length: int = DEFAULT_LENGTH,
    rng: np.random.Generator | None = None,
    map_fn=map,
) -> Candidate:
    rng = rng if rng is not None else np.random.default_rng()
    r_in, r_out = _frame_rngs(rng, 2)
    inner = inner_curve(inner_seed, target_p, grid_size, frames, length, r_in, map_fn)
    outer = outer_curve(outer_seed, grid_size, frames, length, r_out, map_fn)
    res = tunnel_analysis(inner, outer)
    return Candidate(inner_seed.to_decimals(), outer_seed.to_decimals(), res.open, res.area)


def optimize_search(
    n: int,
    k: int,
    m: int,
    target_p: float,
    trials: int,
    inner_kinds=None,
    outer_kinds=None,
    grid_size: int = DEFAULT_GRID,
    frames: int = DEFAULT_FRAMES,
    length: int = DEFAULT_LENGTH,
    rng: np.random.Generator | None = None,
    inject: Sequence[tuple[SeedTransform, SeedTransform]] = (),
    map_fn=map,
) -> list[Candidate]:
    """Random search over seed pairs for the narrowest open tunnel at ``target_p``.

    Inner seeds default to all-ebit ancillas and outer seeds to unassisted
    ones.  Pairs in ``inject`` are evaluated alongside the random draws.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = rng if rng is not None else np.random.default_rng()
    inner_kinds = inner_kinds or ",".join("e" * (n - k))
    outer_kinds = outer_kinds or ",".join("a" * (n - k))
    cands = []
    draw_rng, eval_rng = _frame_rngs(rng, 2)
    pairs = list(inject)
    for i, trng in enumerate(_frame_rngs(draw_rng, trials)):
        try:
            pairs.append((_random_seed(n, k, m, inner_kinds, trng), _random_seed(n, k, m, outer_kinds, trng)))
        except (SymplecticError, ValueError) as exc:
            log.warning("trial %d rejected: %s", i, exc)
    for i, (a, b) in enumerate(pairs):
        try:
            # every pair sees the same curve randomness
            c = evaluate_pair(a, b, target_p, grid_size, frames, length, np.random.default_rng(eval_rng.bit_generator.seed_seq), map_fn)
        except (DecodingFailure, ValueError) as exc:
            log.warning("candidate %d rejected: %s", i, exc)
            continue
        log.info("candidate %d/%d: open=%s area=%.4f", i + 1, len(pairs), c.open, c.area)
        cands.append(c)
    return rank_candidates(cands)
