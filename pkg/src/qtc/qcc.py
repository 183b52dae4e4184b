"""Quantum convolutional codes: error tracking, SISO decoding, distance spectra.

Frame model
-----------
A code with seed ``U`` run for ``N_b`` steps maps the input error
``(M_0, L_1, S_1, ..., L_Nb, S_Nb)`` onto ``(P_1, ..., P_Nb, M_Nb)``.  The
final memory block is transmitted with the frame, so a frame carries
``n*N_b + m`` physical qubits laid out ``[P_1 .. P_Nb, M_Nb]``.  The initial
memory qubits start as ancillas: like every ancilla their X component is part
of the syndrome and their Z component is degenerate.  Ebit ancillas expose
both components.

Multi-qubit blocks are handled as integer codes, base 4 with qubit 0 as the
least significant digit, using the symbol indices of :mod:`qtc.pauli`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .pauli import (
    EBIT,
    SYMBOL_BITS,
    SeedTransform,
    from_symbols,
    gf2_matmul,
    symbol_index,
    to_symbols,
)

APRIORI_FLOOR = 1e-30


class DecodingFailure(RuntimeError):
    """Trellis messages vanished: the priors are inconsistent with the syndrome."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"messages vanished at trellis step {step}")


# ---------------------------------------------------------------------------
# integer block codes


def block_codes(symbols: np.ndarray) -> np.ndarray:
    """``(T, q)`` symbol array -> ``(T,)`` base-4 codes."""
    symbols = np.asarray(symbols, dtype=np.int64)
    q = symbols.shape[-1]
    return (symbols * (4 ** np.arange(q, dtype=np.int64))).sum(axis=-1)


def code_symbols(codes, q: int) -> np.ndarray:
    """Inverse of :func:`block_codes`."""
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[..., None] >> (2 * np.arange(q, dtype=np.int64))) & 3).astype(np.int8)


def joint_prior(per_qubit: np.ndarray) -> np.ndarray:
    """``(T, q, 4)`` per-qubit tables -> ``(T, 4**q)`` joint table over block codes."""
    T, q, _ = per_qubit.shape
    joint = np.ones((T, 1))
    for i in range(q):
        joint = (per_qubit[:, i, :, None] * joint[:, None, :]).reshape(T, -1)
    return joint


def _leave_one_out(joint: np.ndarray, priors: np.ndarray) -> np.ndarray:
    """Per-qubit extrinsics from a block table that excludes the block's own prior.

    ``joint[t, code]`` must not contain the block prior; ``priors`` is
    ``(T, q, 4)``.  For qubit ``i`` the other qubits' priors are multiplied in
    and everything but qubit ``i`` is summed out.
    """
    T, q, _ = priors.shape
    if q == 1:
        out = joint.copy()
    else:
        # axis 1 + (q-1-i) carries the digit of qubit i
        cube = joint.reshape((T,) + (4,) * q)
        out = np.empty((T, q, 4))
        for i in range(q):
            w = cube
            for j in range(q):
                if j == i:
                    continue
                shape = [1] * (q + 1)
                shape[0] = T
                shape[1 + (q - 1 - j)] = 4
                w = w * priors[:, j, :].reshape(shape)
            axes = tuple(1 + (q - 1 - j) for j in range(q) if j != i)
            out[:, i, :] = w.sum(axis=axes)
        out = out.reshape(T * q, 4)
        return _normalize_rows(out)
    return _normalize_rows(out)


def _normalize_rows(a: np.ndarray) -> np.ndarray:
    s = a.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(s > 0, a / np.where(s > 0, s, 1.0), 0.25)
    return out


# ---------------------------------------------------------------------------
# trellis tables


@dataclass(frozen=True, eq=False)
class Trellis:
    """Lookup tables of one seed transform over all block codes."""

    tab_p: np.ndarray  # (4^m, 4^k, 4^a) physical code of the step output
    tab_m: np.ndarray  # (4^m, 4^k, 4^a) next memory code
    inv_m: np.ndarray  # (4^n, 4^m) previous memory code
    inv_l: np.ndarray  # (4^n, 4^m) logical code
    inv_s: np.ndarray  # (4^n, 4^m) ancilla code


_TRELLIS_CACHE: dict[tuple, Trellis] = {}


def _layout_bits(symbols: np.ndarray) -> np.ndarray:
    """``(R, d)`` symbols -> ``(R, 2d)`` ``[z|x]`` bit rows."""
    bits = SYMBOL_BITS[symbols]
    return np.concatenate([bits[..., 0], bits[..., 1]], axis=-1)


def _symbols_of_bits(bits: np.ndarray, d: int) -> np.ndarray:
    return symbol_index(bits[:, :d], bits[:, d:]).astype(np.int64)


def trellis(seed: SeedTransform) -> Trellis:
    key = (seed.n, seed.k, seed.m, seed.matrix.tobytes())
    cached = _TRELLIS_CACHE.get(key)
    if cached is not None:
        return cached
    n, k, m, d = seed.n, seed.k, seed.m, seed.d
    a = n - k
    # every input (mu, lam, sigma) with mu the slowest index
    codes = np.arange(4**d, dtype=np.int64)
    sym_in = code_symbols(codes, d)  # qubit order [memory, logical, ancilla]
    out = gf2_matmul(_layout_bits(sym_in), seed.matrix)
    sym_out = _symbols_of_bits(out, d)  # qubit order [memory, physical]
    m_next = block_codes(sym_out[:, :m])
    p_out = block_codes(sym_out[:, m:])
    mu = block_codes(sym_in[:, :m])
    lam = block_codes(sym_in[:, m : m + k])
    sig = block_codes(sym_in[:, m + k :])
    tab_p = np.empty((4**m, 4**k, 4**a), dtype=np.int64)
    tab_m = np.empty_like(tab_p)
    tab_p[mu, lam, sig] = p_out
    tab_m[mu, lam, sig] = m_next
    inv_m = np.empty((4**n, 4**m), dtype=np.int64)
    inv_l = np.empty_like(inv_m)
    inv_s = np.empty_like(inv_m)
    inv_m[p_out, m_next] = mu
    inv_l[p_out, m_next] = lam
    inv_s[p_out, m_next] = sig
    tr = Trellis(tab_p, tab_m, inv_m, inv_l, inv_s)
    _TRELLIS_CACHE[key] = tr
    return tr


# ---------------------------------------------------------------------------
# step-level maps


def split_seed(seed: SeedTransform) -> tuple[np.ndarray, np.ndarray]:
    return seed.u_p, seed.u_m


def _join_input(seed: SeedTransform, m_prev, l_t, s_t) -> np.ndarray:
    blocks = []
    for vec, size, name in ((m_prev, seed.m, "memory"), (l_t, seed.k, "logical"), (s_t, seed.n - seed.k, "ancilla")):
        vec = np.asarray(vec, dtype=np.uint8)
        if vec.shape != (2 * size,):
            raise ValueError(f"{name} block must have {2 * size} bits, got {vec.shape}")
        blocks.append(vec)
    z = np.concatenate([b[: b.size // 2] for b in blocks])
    x = np.concatenate([b[b.size // 2 :] for b in blocks])
    return np.concatenate([z, x])


def _split(v: np.ndarray, sizes) -> list[np.ndarray]:
    d = v.size // 2
    out, start = [], 0
    for size in sizes:
        out.append(np.concatenate([v[start : start + size], v[d + start : d + start + size]]))
        start += size
    return out


def encode_step(m_prev, l_t, s_t, seed: SeedTransform) -> tuple[np.ndarray, np.ndarray]:
    """``(M_{t-1} : L_t : S_t) -> (P_t, M_t)`` with ``[z|x]`` blocks."""
    row = _join_input(seed, m_prev, l_t, s_t)
    return gf2_matmul(row, seed.u_p), gf2_matmul(row, seed.u_m)


def inverse_encode_step(p_t, m_t, seed: SeedTransform) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(P_t, M_t) -> (M_{t-1}, L_t, S_t)`` through the inverse seed transform."""
    p_t = np.asarray(p_t, dtype=np.uint8)
    m_t = np.asarray(m_t, dtype=np.uint8)
    if p_t.shape != (2 * seed.n,) or m_t.shape != (2 * seed.m,):
        raise ValueError("physical/memory block sizes do not match the seed transform")
    d = seed.d
    out = np.concatenate([m_t[: seed.m], p_t[: seed.n], m_t[seed.m :], p_t[seed.n :]])
    row = gf2_matmul(out, seed.inverse)
    assert row.size == 2 * d
    m_prev, l_t, s_t = _split(row, (seed.m, seed.k, seed.n - seed.k))
    return m_prev, l_t, s_t


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class CodeSpec:
    seed: SeedTransform
    n_steps: int
    role: str = "inner"

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("a frame needs at least one trellis step")
        if self.role not in ("inner", "outer"):
            raise ValueError(f"role must be 'inner' or 'outer', got {self.role!r}")

    @property
    def n_physical(self) -> int:
        return self.seed.n * self.n_steps + self.seed.m

    @property
    def n_logical(self) -> int:
        return self.seed.k * self.n_steps

    @property
    def n_ancilla(self) -> int:
        return (self.seed.n - self.seed.k) * self.n_steps

    @property
    def trellis(self) -> Trellis:
        return trellis(self.seed)

    @classmethod
    def for_physical_length(cls, seed: SeedTransform, n_physical: int, role: str = "outer") -> "CodeSpec":
        steps, rem = divmod(n_physical - seed.m, seed.n)
        if rem or steps < 1:
            raise ValueError(f"{n_physical} physical qubits is not m + n*N_b for n={seed.n}, m={seed.m}")
        return cls(seed, steps, role)

    @classmethod
    def for_logical_length(cls, seed: SeedTransform, n_logical: int, role: str = "inner") -> "CodeSpec":
        steps, rem = divmod(n_logical, seed.k)
        if rem or steps < 1:
            raise ValueError(f"{n_logical} logical qubits is not a multiple of k={seed.k}")
        return cls(seed, steps, role)


@dataclass(frozen=True, eq=False)
class SyndromeSequence:
    """Observable syndrome of one frame.

    ``x[t, j]`` is the X bit of ancilla ``j`` at step ``t``; ``z`` carries the
    Z bits and is only meaningful where ``ebit`` is set.  ``memory_x`` holds
    the X bits of the initial memory qubits.
    """

    x: np.ndarray
    z: np.ndarray
    ebit: np.ndarray
    memory_x: np.ndarray

    @classmethod
    def from_symbols(cls, seed: SeedTransform, s_sym: np.ndarray, m0_sym: np.ndarray) -> "SyndromeSequence":
        bits = SYMBOL_BITS[np.asarray(s_sym, dtype=np.int64)]
        ebit = np.array([kind == EBIT for kind in seed.ancilla_kinds], dtype=bool)
        z = bits[..., 0] * ebit
        return cls(bits[..., 1].copy(), z.astype(np.uint8), ebit, SYMBOL_BITS[np.asarray(m0_sym, dtype=np.int64)][:, 1].copy())

    @classmethod
    def zeros(cls, spec: CodeSpec) -> "SyndromeSequence":
        a = spec.seed.n - spec.seed.k
        s = np.zeros((spec.n_steps, a), dtype=np.int8)
        return cls.from_symbols(spec.seed, s, np.zeros(spec.seed.m, dtype=np.int8))

    def __eq__(self, other):
        if not isinstance(other, SyndromeSequence):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.ebit, other.ebit)
            and np.array_equal(self.memory_x, other.memory_x)
        )

    def ancilla_candidates(self) -> np.ndarray:
        """``(T, C)`` ancilla block codes consistent with the syndrome.

        Free Z bits at unassisted positions are enumerated in a fixed order.
        """
        T, a = self.x.shape
        free = np.nonzero(~self.ebit)[0]
        C = 1 << free.size
        zc = np.broadcast_to(self.z[:, :, None], (T, a, C)).copy()
        for bit, j in enumerate(free):
            zc[:, j, :] = (np.arange(C) >> bit) & 1
        xc = np.broadcast_to(self.x[:, :, None], (T, a, C))
        sym = symbol_index(zc, xc).astype(np.int64)  # (T, a, C)
        return np.ascontiguousarray(block_codes(np.moveaxis(sym, 1, 2)))

    def initial_memory_prior(self, m: int) -> np.ndarray:
        codes = np.arange(4**m)
        xbits = SYMBOL_BITS[code_symbols(codes, m)][..., 1]
        ok = np.all(xbits == self.memory_x[None, :], axis=1)
        return ok / ok.sum()


class Tracked(NamedTuple):
    logical: np.ndarray  # [z|x] over k*N_b qubits
    syndrome: SyndromeSequence
    ancilla: np.ndarray  # full ancilla error [z|x] over (n-k)*N_b qubits
    memory: np.ndarray  # initial memory error [z|x] over m qubits


def track_symbols(spec: CodeSpec, p_sym: np.ndarray):
    """Symbol-level inverse encoding: physical symbols -> (L, S, M_0) symbols."""
    seed = spec.seed
    p_sym = np.asarray(p_sym)
    if p_sym.shape != (spec.n_physical,):
        raise ValueError(f"physical frame must have {spec.n_physical} qubits, got {p_sym.shape}")
    nb, n, m = spec.n_steps, seed.n, seed.m
    tr = spec.trellis
    p_codes = block_codes(p_sym[: n * nb].reshape(nb, n))
    m_end = int(block_codes(p_sym[n * nb :][None, :])[0])
    l_codes, s_codes, m0 = _kernels.track(p_codes, m_end, tr.inv_m, tr.inv_l, tr.inv_s)
    l_sym = code_symbols(l_codes, seed.k).reshape(-1)
    s_sym = code_symbols(s_codes, n - seed.k)
    m0_sym = code_symbols(np.int64(m0), m)
    return l_sym, s_sym, m0_sym


def track_error(spec: CodeSpec, P: np.ndarray) -> Tracked:
    """Pass a physical effective error through the inverse encoder."""
    P = np.asarray(P, dtype=np.uint8)
    if P.shape != (2 * spec.n_physical,):
        raise ValueError(f"expected {2 * spec.n_physical} bits, got {P.shape}")
    l_sym, s_sym, m0_sym = track_symbols(spec, to_symbols(P))
    syn = SyndromeSequence.from_symbols(spec.seed, s_sym, m0_sym)
    return Tracked(from_symbols(l_sym), syn, from_symbols(s_sym.reshape(-1)), from_symbols(m0_sym))


def encode_symbols(spec: CodeSpec, l_sym, s_sym, m0_sym=None) -> np.ndarray:
    """Forward encoder on symbols; returns the physical frame ``[P_1..P_Nb, M_Nb]``."""
    seed = spec.seed
    nb = spec.n_steps
    l_codes = block_codes(np.asarray(l_sym).reshape(nb, seed.k))
    s_codes = block_codes(np.asarray(s_sym).reshape(nb, seed.n - seed.k))
    m0 = 0 if m0_sym is None else int(block_codes(np.asarray(m0_sym)[None, :])[0])
    tr = spec.trellis
    p_codes, m_end = _kernels.encode(m0, l_codes, s_codes, tr.tab_p, tr.tab_m)
    return np.concatenate([code_symbols(p_codes, seed.n).reshape(-1), code_symbols(np.int64(m_end), seed.m)])


def encode_frame(spec: CodeSpec, L: np.ndarray, S: np.ndarray, M0: np.ndarray | None = None) -> np.ndarray:
    """Effective-vector form of :func:`encode_symbols`."""
    m0 = None if M0 is None else to_symbols(M0)
    return from_symbols(encode_symbols(spec, to_symbols(L), to_symbols(S), m0))


# ---------------------------------------------------------------------------
# SISO decoder


class SisoOutput(NamedTuple):
    ext_l: np.ndarray  # (k*N_b, 4)
    ext_p: np.ndarray | None  # (n*N_b + m, 4)
    post_l: np.ndarray  # (k*N_b, 4)
    post_p: np.ndarray | None  # (n*N_b + m, 4)


def _check_messages(msgs: np.ndarray, length: int, name: str) -> np.ndarray:
    msgs = np.asarray(msgs, dtype=np.float64)
    if msgs.shape != (length, 4):
        raise ValueError(f"{name} must have shape ({length}, 4), got {msgs.shape}")
    if np.any(msgs < 0) or not np.allclose(msgs.sum(axis=1), 1.0, atol=1e-9):
        raise ValueError(f"{name} rows must be non-negative and sum to one")
    return msgs


def siso_decode(
    spec: CodeSpec,
    priors_p: np.ndarray,
    priors_l: np.ndarray | None,
    syndrome: SyndromeSequence,
    want_p: bool = False,
    backend: str | None = None,
) -> SisoOutput:
    """Degenerate forward-backward decoder of one code frame.

    ``priors_p`` are per-qubit tables over the physical frame (channel
    information for an inner code, interleaved extrinsics for an outer one);
    ``priors_l`` over the logical frame, uniform when None.  Extrinsics leave
    out the qubit's own prior.  Physical outputs are computed when ``want_p``.
    """
    seed = spec.seed
    n, k, m, nb = seed.n, seed.k, seed.m, spec.n_steps
    priors_p = _check_messages(priors_p, spec.n_physical, "priors_p")
    if priors_l is None:
        priors_l = np.full((spec.n_logical, 4), 0.25)
    priors_l = _check_messages(priors_l, spec.n_logical, "priors_l")
    if syndrome.x.shape != (nb, n - k):
        raise ValueError("syndrome length does not match the frame")

    step_p = priors_p[: n * nb].reshape(nb, n, 4)
    step_l = priors_l.reshape(nb, k, 4)
    mem_p = priors_p[n * nb :].reshape(1, m, 4)
    pch = joint_prior(step_p)
    pa_l = joint_prior(step_l)
    beta_end = joint_prior(mem_p)[0]
    alpha0 = syndrome.initial_memory_prior(m)
    sig = syndrome.ancilla_candidates()
    tr = spec.trellis
    ext_joint_l, ext_joint_p, alpha_end, status = _kernels.forward_backward(
        alpha0, beta_end, pa_l, pch, sig, tr.tab_p, tr.tab_m, want_p, backend=backend
    )
    if status >= 0 or not beta_end.sum() > 0:
        raise DecodingFailure(max(status, 0))

    ext_l = _leave_one_out(ext_joint_l, step_l)
    post_l = _normalize_rows(ext_l * priors_l)
    if np.any(post_l.sum(axis=1) == 0):
        raise DecodingFailure(int(np.argmin(post_l.sum(axis=1))) // k)
    ext_p = post_p = None
    if want_p:
        ext_steps = _leave_one_out(ext_joint_p, step_p)
        ext_mem = _leave_one_out(alpha_end[None, :], mem_p)
        ext_p = np.concatenate([ext_steps, ext_mem])
        post_p = _normalize_rows(ext_p * priors_p)
    return SisoOutput(ext_l, ext_p, post_l, post_p)


# ---------------------------------------------------------------------------
# distance spectrum


@dataclass
class DistanceSpectrum:
    counts: dict[int, int]
    truncated: bool = False
    notice: str = ""

    @property
    def d_min(self) -> int | None:
        return min(self.counts) if self.counts else None


def distance_spectrum(
    seed: SeedTransform,
    max_weight: int,
    max_steps: int,
    logical_only: bool = False,
    max_paths: int = 50_000_000,
) -> DistanceSpectrum:
    """Weight enumeration of undetectable error events.

    An event leaves the all-identity memory state, follows steps whose
    ancilla inputs have zero X part (Z parts free, i.e. degenerate), and
    first returns to the identity state within ``max_steps`` steps.  Its
    weight is the total physical weight along the path.  By default every
    event is counted; with ``logical_only`` events whose logical inputs are
    all identity are dropped.  Exceeding ``max_paths`` explored branches
    stops the search and marks the result truncated.
    """
    n, k, m = seed.n, seed.k, seed.m
    a = n - k
    tr = trellis(seed)
    ebit = [kind == EBIT for kind in seed.ancilla_kinds]
    # ancilla inputs with zero X part; Z part free except at ebits
    sigmas = []
    for c in range(4**a):
        sym = [(c >> (2 * j)) & 3 for j in range(a)]
        if all(SYMBOL_BITS[s][1] == 0 and not (ebit[j] and s) for j, s in enumerate(sym)):
            sigmas.append(c)
    p_weight = np.array([np.count_nonzero(code_symbols(np.int64(c), n)) for c in range(4**n)])
    counts: Counter = Counter()
    explored = 0
    truncated = False

    # successors per state: (weight, next_state, has_logical)
    succ = []
    for mu in range(4**m):
        row = []
        for lam in range(4**k):
            for s in sigmas:
                row.append((int(p_weight[tr.tab_p[mu, lam, s]]), int(tr.tab_m[mu, lam, s]), lam != 0))
        row.sort()
        succ.append(row)

    stack = []
    for w, nxt, has_l in succ[0]:
        if w == 0 and nxt == 0 and not has_l:
            continue  # the trivial all-identity step (and zero-weight stabilizer loops)
        if w <= max_weight:
            stack.append((nxt, w, 1, has_l))
    while stack:
        state, w, depth, has_l = stack.pop()
        if state == 0:
            if has_l or not logical_only:
                counts[w] += 1
            continue
        if depth >= max_steps:
            continue
        for dw, nxt, hl in succ[state]:
            w2 = w + dw
            if w2 > max_weight:
                break
            explored += 1
            stack.append((nxt, w2, depth + 1, has_l or hl))
        if explored > max_paths:
            truncated = True
            break
    notice = ""
    if truncated:
        notice = f"search stopped after {explored} branches; counts are lower bounds"
    return DistanceSpectrum(dict(sorted(counts.items())), truncated, notice)
