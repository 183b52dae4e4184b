"""Quantum interleaver: qubit permutation plus per-qubit single-qubit symplectic twists."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import from_symbols, single_qubit_symplectics, symbol_permutation, to_symbols

# TWIST_PERM[t, s]: image of symbol s under twist t; TWIST_INV its inverse
TWIST_PERM = np.array([symbol_permutation(t) for t in single_qubit_symplectics()], dtype=np.int8)
TWIST_INV = np.argsort(TWIST_PERM, axis=1).astype(np.int8)


@dataclass(frozen=True, eq=False)
class QuantumInterleaver:
    """Qubit ``i`` is twisted by ``twists[i]`` and then moved to position ``perm[i]``.

    ``twists`` index into :func:`qtc.pauli.single_qubit_symplectics`.
    """

    perm: np.ndarray
    twists: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        twists = np.asarray(self.twists, dtype=np.int8)
        if perm.ndim != 1 or perm.size == 0 or twists.shape != perm.shape:
            raise ValueError("perm and twists must be equal-length 1-D arrays")
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("perm is not a permutation")
        if twists.min() < 0 or twists.max() > 5:
            raise ValueError("twist indices must lie in 0..5")
        perm.setflags(write=False)
        twists.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "twists", twists)

    @property
    def size(self) -> int:
        return self.perm.size

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> "QuantumInterleaver":
        if size < 1:
            raise ValueError("interleaver size must be at least 1")
        return cls(rng.permutation(size), rng.integers(0, 6, size))

    @classmethod
    def identity(cls, size: int) -> "QuantumInterleaver":
        return cls(np.arange(size), np.zeros(size, dtype=np.int8))

    def _check(self, n):
        if n != self.size:
            raise ValueError(f"interleaver of size {self.size} applied to {n} qubits")

    # symbol-level transport

    def apply_symbols(self, sym: np.ndarray) -> np.ndarray:
        sym = np.asarray(sym, dtype=np.int64)
        self._check(sym.size)
        out = np.empty(self.size, dtype=np.int8)
        out[self.perm] = TWIST_PERM[self.twists, sym]
        return out

    def inverse_symbols(self, sym: np.ndarray) -> np.ndarray:
        sym = np.asarray(sym, dtype=np.int64)
        self._check(sym.size)
        return TWIST_INV[self.twists, sym[self.perm]]

    # effective vectors

    def apply(self, v: np.ndarray) -> np.ndarray:
        return from_symbols(self.apply_symbols(to_symbols(v)))

    def inverse_apply(self, v: np.ndarray) -> np.ndarray:
        return from_symbols(self.inverse_symbols(to_symbols(v)))

    # message sequences: probability of symbol s on qubit i moves to symbol
    # twist_i(s) on qubit perm[i]

    def apply_messages(self, msgs: np.ndarray) -> np.ndarray:
        msgs = np.asarray(msgs, dtype=np.float64)
        self._check(msgs.shape[0])
        relabeled = np.take_along_axis(msgs, TWIST_INV[self.twists].astype(np.int64), axis=1)
        out = np.empty_like(msgs)
        out[self.perm] = relabeled
        return out

    def inverse_messages(self, msgs: np.ndarray) -> np.ndarray:
        msgs = np.asarray(msgs, dtype=np.float64)
        self._check(msgs.shape[0])
        return np.take_along_axis(msgs[self.perm], TWIST_PERM[self.twists].astype(np.int64), axis=1)
