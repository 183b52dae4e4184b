"""Depolarizing channel, per-qubit priors and capacity formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import from_symbols

LOG2_3 = math.log2(3.0)

# Maximum tolerable depolarizing probability of the hashing bound for an
# entanglement consumption rate of 6/9 (taken as given, not derived here).
EA_HASHING_PMAX = 0.3779


@dataclass(frozen=True)
class DepolarizingChannel:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"depolarizing probability must lie in [0, 1], got {self.p}")

    @property
    def symbol_probs(self) -> np.ndarray:
        """Probabilities of I, X, Y, Z."""
        q = self.p / 3.0
        return np.array([1.0 - self.p, q, q, q])


def sample_symbols(ch: DepolarizingChannel, n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. symbol indices drawn from the channel (int8)."""
    u = rng.random(n_qubits)
    # I when u >= p, else X/Y/Z by which third of [0, p) u falls in
    sym = np.zeros(n_qubits, dtype=np.int8)
    if ch.p > 0.0:
        hit = u < ch.p
        sym[hit] = 1 + np.minimum((3.0 * u[hit] / ch.p).astype(np.int8), 2)
    return sym


def sample_error(ch: DepolarizingChannel, n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Effective error vector ``[z|x]`` of an N-qubit depolarizing error."""
    return from_symbols(sample_symbols(ch, n_qubits, rng))


def symbol_priors(ch: DepolarizingChannel) -> np.ndarray:
    return ch.symbol_probs


def _check_prob(q: float, name: str = "probability") -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {q}")
    return q


def _xlog2x(q: float) -> float:
    return 0.0 if q == 0.0 else q * math.log2(q)


def binary_entropy(q: float) -> float:
    q = _check_prob(q)
    return -_xlog2x(q) - _xlog2x(1.0 - q)


def bsc_capacity(p: float) -> float:
    """Capacity of either of the two binary symmetric halves (crossover 2p/3)."""
    p = _check_prob(p, "p")
    return 1.0 - binary_entropy(min(2.0 * p / 3.0, 1.0))


def fourary_classical_capacity(p: float) -> float:
    p = _check_prob(p, "p")
    return 0.5 * (2.0 - binary_entropy(p) - p * LOG2_3)


def hashing_bound(p: float) -> float:
    p = _check_prob(p, "p")
    return 1.0 - binary_entropy(p) - p * LOG2_3


def classical_rate(r_q: float) -> float:
    r_q = _check_prob(r_q, "quantum rate")
    return 0.5 * (1.0 + r_q)


def db_gap(p_a: float, p_b: float) -> float:
    """``10 log10(p_a / p_b)``."""
    if p_a <= 0 or p_b <= 0:
        raise ValueError("db_gap needs strictly positive probabilities")
    return 10.0 * math.log10(p_a / p_b)


def hashing_limit(rate: float, lo: float = 0.0, hi: float = 0.25, tol: float = 1e-12) -> float:
    """Depolarizing probability at which the hashing bound equals ``rate``."""
    if not hashing_bound(hi) <= rate <= hashing_bound(lo):
        raise ValueError(f"rate {rate} not bracketed on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if hashing_bound(mid) > rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
