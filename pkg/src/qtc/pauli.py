"""Binary effective-Pauli algebra.

An N-qubit Pauli error (phases dropped) is a length-2N bit vector laid out as
``[z_1 .. z_N | x_1 .. x_N]``.  Single-qubit symbols are indexed
``I=0, X=1, Y=2, Z=3``; this order is also the tie-break order used by every
argmax in the package.

Seed transforms act on row vectors: ``out = v @ U (mod 2)``.  Row ``i < d`` of
``U`` is the image of ``Z_i`` and row ``d + i`` the image of ``X_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SYMBOLS = "IXYZ"

# (z, x) bit pair of each symbol index
SYMBOL_BITS = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)
# symbol index from (z, x): idx = 3*z ^ x
_BITS_TO_SYMBOL = np.array([[0, 1], [3, 2]], dtype=np.int8)

ANCILLA = "a"
EBIT = "e"


class SymplecticError(ValueError):
    """Raised when a binary matrix fails a symplectic validity check."""


# ---------------------------------------------------------------------------
# codecs


def symbol_index(z, x):
    """Symbol index (I=0, X=1, Y=2, Z=3) from z and x bits; broadcasts."""
    return _BITS_TO_SYMBOL[np.asarray(z, dtype=np.intp), np.asarray(x, dtype=np.intp)]


def to_symbols(v: np.ndarray) -> np.ndarray:
    """Effective vector ``[z|x]`` -> per-qubit symbol indices (int8)."""
    v = np.asarray(v, dtype=np.uint8)
    if v.ndim != 1 or v.size % 2:
        raise ValueError(f"effective vector must be 1-D with even length, got shape {v.shape}")
    n = v.size // 2
    return symbol_index(v[:n], v[n:])


def from_symbols(symbols) -> np.ndarray:
    """Per-qubit symbol indices -> effective vector ``[z|x]`` (uint8)."""
    s = np.asarray(symbols, dtype=np.intp)
    bits = SYMBOL_BITS[s]
    return np.concatenate([bits[:, 0], bits[:, 1]])


def parse_pauli(text: str) -> np.ndarray:
    """``"XZY"`` -> effective vector.  Convenience for tests and docs."""
    return from_symbols([SYMBOLS.index(c) for c in text.upper()])


def format_pauli(v: np.ndarray) -> str:
    return "".join(SYMBOLS[s] for s in to_symbols(v))


def symplectic_form(d: int) -> np.ndarray:
    """``[[0, I_d], [I_d, 0]]`` over GF(2)."""
    lam = np.zeros((2 * d, 2 * d), dtype=np.uint8)
    lam[:d, d:] = np.eye(d, dtype=np.uint8)
    lam[d:, :d] = np.eye(d, dtype=np.uint8)
    return lam


# ---------------------------------------------------------------------------
# vector operations


def symplectic_product(a: np.ndarray, b: np.ndarray) -> int:
    """GF(2) symplectic product; 0 iff the two Pauli operators commute."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape or a.ndim != 1 or a.size % 2:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    n = a.size // 2
    return int((np.dot(a[:n], b[n:]) + np.dot(a[n:], b[:n])) % 2)


def weight(v: np.ndarray) -> int:
    """Number of qubits carrying a non-identity symbol."""
    v = np.asarray(v, dtype=np.uint8)
    n = v.size // 2
    return int(np.count_nonzero(v[:n] | v[n:]))


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64) % 2).astype(np.uint8)


def apply_matrix(v: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Row vector times matrix over GF(2)."""
    v = np.asarray(v, dtype=np.uint8)
    M = np.asarray(M, dtype=np.uint8)
    if v.shape[-1] != M.shape[0]:
        raise ValueError(f"dimension mismatch: vector {v.shape[-1]}, matrix {M.shape}")
    return gf2_matmul(v, M)


def gf2_rank(A: np.ndarray) -> int:
    A = np.array(A, dtype=np.uint8) % 2
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = np.nonzero(A[r:, c])[0]
        if piv.size == 0:
            continue
        p = r + piv[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        mask = A[:, c].astype(bool)
        mask[r] = False
        A[mask] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def gf2_inv(A: np.ndarray) -> np.ndarray:
    """Inverse of a square GF(2) matrix by Gauss-Jordan elimination."""
    A = np.array(A, dtype=np.uint8) % 2
    n = A.shape[0]
    aug = np.concatenate([A, np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        piv = np.nonzero(aug[c:, c])[0]
        if piv.size == 0:
            raise np.linalg.LinAlgError("matrix is singular over GF(2)")
        p = c + piv[0]
        if p != c:
            aug[[c, p]] = aug[[p, c]]
        mask = aug[:, c].astype(bool)
        mask[c] = False
        aug[mask] ^= aug[c]
    return aug[:, n:].copy()


# ---------------------------------------------------------------------------
# symplectic matrices


def is_symplectic(M) -> bool:
    M = np.asarray(M, dtype=np.uint8)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] % 2:
        raise ValueError(f"matrix side must be even, got {M.shape[0]}")
    lam = symplectic_form(M.shape[0] // 2)
    return bool(np.array_equal(gf2_matmul(gf2_matmul(M, lam), M.T), lam))


def invert_symplectic(M) -> np.ndarray:
    """Closed-form inverse ``Lambda M^T Lambda`` of a symplectic matrix."""
    M = np.asarray(M, dtype=np.uint8)
    if not is_symplectic(M):
        raise SymplecticError("matrix is not symplectic")
    lam = symplectic_form(M.shape[0] // 2)
    return gf2_matmul(gf2_matmul(lam, M.T), lam)


def _failing_row_pair(M: np.ndarray) -> tuple[int, int] | None:
    lam = symplectic_form(M.shape[0] // 2)
    bad = np.argwhere(gf2_matmul(gf2_matmul(M, lam), M.T) != lam)
    return (int(bad[0, 0]), int(bad[0, 1])) if bad.size else None


def single_qubit_symplectics() -> list[np.ndarray]:
    """The six elements of Sp(2, GF(2)) acting on row vectors ``(z, x)``.

    Order: identity, Hadamard-like swap ``(z,x)->(x,z)``, phase-like
    ``(z,x)->(z^x,x)``, ``(z,x)->(z,z^x)``, and the two 3-cycles
    ``X->Y->Z->X`` and ``X->Z->Y->X``.
    """
    mats = [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[1, 0], [1, 1]],
        [[1, 1], [0, 1]],
        [[0, 1], [1, 1]],
        [[1, 1], [1, 0]],
    ]
    return [np.array(m, dtype=np.uint8) for m in mats]


def symbol_permutation(twist: np.ndarray) -> np.ndarray:
    """Symbol-index permutation induced by a 2x2 symplectic matrix.

    ``perm[s]`` is the symbol that ``s`` maps to.
    """
    out = gf2_matmul(SYMBOL_BITS, twist)
    return symbol_index(out[:, 0], out[:, 1]).astype(np.int8)


# ---------------------------------------------------------------------------
# uniform sampling over Sp(2d, GF(2)) by symplectic transvections
#
# The sampler works in the interleaved layout (z_1, x_1, z_2, x_2, ...) and the
# result is permuted into the [z|x] layout at the end.


def _inner(v, w):
    return int(np.dot(v[0::2], w[1::2]) + np.dot(v[1::2], w[0::2])) & 1


def _transvection(h, v):
    return (v ^ h) if _inner(h, v) else v


def _find_transvection(x, y):
    """Vectors h1, h2 with y = Z_h1 Z_h2 x."""
    nn = x.size
    out = np.zeros((2, nn), dtype=np.uint8)
    if np.array_equal(x, y):
        return out
    if _inner(x, y):
        out[0] = x ^ y
        return out
    z = np.zeros(nn, dtype=np.uint8)
    for i in range(0, nn, 2):
        if (x[i] | x[i + 1]) and (y[i] | y[i + 1]):
            z[i] = x[i] ^ y[i]
            z[i + 1] = x[i + 1] ^ y[i + 1]
            if not (z[i] | z[i + 1]):
                z[i + 1] = 1
                if x[i] != x[i + 1]:
                    z[i] = 1
            out[0] = x ^ z
            out[1] = y ^ z
            return out
    for i in range(0, nn, 2):
        if (x[i] | x[i + 1]) and not (y[i] | y[i + 1]):
            if x[i] == x[i + 1]:
                z[i + 1] = 1
            else:
                z[i + 1] = x[i]
                z[i] = x[i + 1]
            break
    for i in range(0, nn, 2):
        if not (x[i] | x[i + 1]) and (y[i] | y[i + 1]):
            if y[i] == y[i + 1]:
                z[i + 1] = 1
            else:
                z[i + 1] = y[i]
                z[i] = y[i + 1]
            break
    out[0] = x ^ z
    out[1] = y ^ z
    return out


def _int_bits(value: int, nbits: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(nbits)], dtype=np.uint8)


def _symplectic_interleaved(d: int, draw) -> np.ndarray:
    """Group element selected by the integers supplied by ``draw(limit)``.

    Each level consumes one draw below ``4^d - 1`` and one below ``2^(2d-1)``;
    uniform draws give a uniform group element.
    """
    nn = 2 * d
    f1 = _int_bits(draw((1 << nn) - 1) + 1, nn)
    e1 = np.zeros(nn, dtype=np.uint8)
    e1[0] = 1
    T = _find_transvection(e1, f1)
    bits = _int_bits(draw(1 << (nn - 1)), nn - 1)
    eprime = e1.copy()
    eprime[2:] = bits[1:]
    h0 = _transvection(T[1], _transvection(T[0], eprime))
    if bits[0]:
        f1 = np.zeros(nn, dtype=np.uint8)
    g = np.zeros((nn, nn), dtype=np.uint8)
    g[0, 0] = g[1, 1] = 1
    if d > 1:
        g[2:, 2:] = _symplectic_interleaved(d - 1, draw)
    for j in range(nn):
        row = _transvection(T[0], g[j])
        row = _transvection(T[1], row)
        row = _transvection(h0, row)
        g[j] = _transvection(f1, row)
    return g


def _interleaved_to_blocks(d: int) -> np.ndarray:
    # position in [z|x] layout -> position in interleaved layout
    return np.concatenate([np.arange(0, 2 * d, 2), np.arange(1, 2 * d, 2)])


def symplectic_from_index(index: int, d: int) -> np.ndarray:
    """Deterministic bijection ``[0, |Sp(2d,2)|) -> Sp(2d, 2)``; used to enumerate small groups."""
    state = [int(index)]

    def draw(limit):
        v = state[0] % limit
        state[0] //= limit
        return v

    g = _symplectic_interleaved(d, draw)
    p = _interleaved_to_blocks(d)
    return g[np.ix_(p, p)]


def symplectic_group_order(d: int) -> int:
    order = 2 ** (d * d)
    for j in range(1, d + 1):
        order *= 4**j - 1
    return order


def random_symplectic(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random element of Sp(2d, GF(2)) in the ``[z|x]`` layout."""
    if d < 1:
        raise ValueError("dim_qubits must be >= 1")
    g = _symplectic_interleaved(d, lambda limit: int(rng.integers(limit)))
    p = _interleaved_to_blocks(d)
    return g[np.ix_(p, p)]


# ---------------------------------------------------------------------------
# seed transforms


def _parse_kinds(ancilla_kinds, count: int) -> tuple[str, ...]:
    if ancilla_kinds is None:
        return (ANCILLA,) * count
    if isinstance(ancilla_kinds, str):
        ancilla_kinds = [c.strip() for c in ancilla_kinds.replace(",", " ").split()]
        if len(ancilla_kinds) == 1 and count > 1:
            ancilla_kinds = ancilla_kinds * count
    kinds = tuple(ancilla_kinds)
    if len(kinds) != count:
        raise ValueError(f"expected {count} ancilla kinds, got {len(kinds)}")
    for kind in kinds:
        if kind not in (ANCILLA, EBIT):
            raise ValueError(f"ancilla kind must be 'a' or 'e', got {kind!r}")
    return kinds


@dataclass(frozen=True, eq=False)
class SeedTransform:
    """Validated seed transform of an ``[n, k, m]`` quantum convolutional code.

    Input qubits of ``matrix`` are ordered ``[memory(m), logical(k),
    ancilla(n-k)]`` and output qubits ``[memory(m), physical(n)]``.
    """

    n: int
    k: int
    m: int
    matrix: np.ndarray
    ancilla_kinds: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n, k, m = self.n, self.k, self.m
        if not (0 < k < n) or m < 1:
            raise ValueError(f"need 0 < k < n and m >= 1, got n={n}, k={k}, m={m}")
        M = np.asarray(self.matrix, dtype=np.uint8)
        d = n + m
        if M.shape != (2 * d, 2 * d):
            raise ValueError(f"seed matrix must be {2 * d}x{2 * d}, got {M.shape}")
        bad = _failing_row_pair(M)
        if bad is not None:
            raise SymplecticError(f"seed transform is not symplectic: rows {bad[0]} and {bad[1]}")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "ancilla_kinds", _parse_kinds(self.ancilla_kinds or None, n - k))

    @property
    def d(self) -> int:
        return self.n + self.m

    @property
    def rate(self) -> float:
        return self.k / self.n

    def _cols(self, qubits) -> np.ndarray:
        q = np.asarray(list(qubits))
        return np.concatenate([q, q + self.d])

    @property
    def physical_columns(self) -> np.ndarray:
        return self._cols(range(self.m, self.d))

    @property
    def memory_columns(self) -> np.ndarray:
        return self._cols(range(self.m))

    @property
    def u_p(self) -> np.ndarray:
        """Columns producing the physical block, ordered ``[z_P | x_P]``."""
        return self.matrix[:, self.physical_columns]

    @property
    def u_m(self) -> np.ndarray:
        """Columns producing the next memory block, ordered ``[z_M | x_M]``."""
        return self.matrix[:, self.memory_columns]

    @property
    def ls_to_physical(self) -> np.ndarray:
        """Block mapping the logical and ancilla inputs onto the physical outputs."""
        rows = self._cols(range(self.m, self.d))
        return self.matrix[np.ix_(rows, self.physical_columns)]

    @property
    def ls_invertible(self) -> bool:
        """Whether the physical block alone determines ``(L, S)`` given the memory.

        Not required by the frame model used here (the final memory is
        transmitted, so tracking inverts the whole seed), kept as a diagnostic.
        """
        return gf2_rank(self.ls_to_physical) == 2 * self.n

    @property
    def inverse(self) -> np.ndarray:
        return invert_symplectic(self.matrix)

    @property
    def entanglement_assisted(self) -> bool:
        return EBIT in self.ancilla_kinds

    def to_decimals(self) -> list[int]:
        weights = 1 << np.arange(2 * self.d - 1, -1, -1, dtype=object)
        return [int(np.dot(row.astype(object), weights)) for row in self.matrix]

    @classmethod
    def from_decimals(cls, decimals: Sequence[int], n: int, k: int, m: int, ancilla_kinds=None):
        return decode_seed_decimals(decimals, n, k, m, ancilla_kinds)


def decimals_to_matrix(decimals: Sequence[int], nbits: int) -> np.ndarray:
    """One row per decimal, most significant bit in column 0."""
    rows = []
    for value in decimals:
        value = int(value)
        if value < 0 or value >= 1 << nbits:
            raise ValueError(f"row value {value} outside [0, 2^{nbits})")
        rows.append([(value >> (nbits - 1 - j)) & 1 for j in range(nbits)])
    return np.array(rows, dtype=np.uint8).reshape(len(rows), nbits)


def decode_seed_decimals(decimals: Sequence[int], n: int, k: int, m: int, ancilla_kinds=None) -> SeedTransform:
    side = 2 * (n + m)
    decimals = list(decimals)
    if len(decimals) != side:
        raise ValueError(f"expected {side} row decimals for n={n}, m={m}, got {len(decimals)}")
    return SeedTransform(n, k, m, decimals_to_matrix(decimals, side), ancilla_kinds)
