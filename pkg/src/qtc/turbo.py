"""Serially concatenated quantum turbo code: frame simulation and iterative decoding."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .channel import DepolarizingChannel, sample_symbols, symbol_priors
from .exitchart import measure_mi
from .interleaver import QuantumInterleaver
from .parallel import STREAM_FRAMES, STREAM_INTERLEAVER, unit_rng, worker_map
from .pauli import SeedTransform
from .qcc import CodeSpec, DecodingFailure, SyndromeSequence, siso_decode, track_symbols

log = logging.getLogger(__name__)

DEFAULT_ITERATIONS = 15
MI_TOLERANCE = 1e-4


class TurboDecodingFailure(DecodingFailure):
    def __init__(self, iteration: int, stage: str, step: int):
        self.iteration = iteration
        self.stage = stage
        RuntimeError.__init__(self, f"{stage} SISO failed at iteration {iteration}, trellis step {step}")
        self.step = step


@dataclass(frozen=True, eq=False)
class TurboSystem:
    inner: CodeSpec
    outer: CodeSpec
    interleaver: QuantumInterleaver
    max_iterations: int = DEFAULT_ITERATIONS

    def __post_init__(self):
        if not self.interleaver.size == self.inner.n_logical == self.outer.n_physical:
            raise ValueError(
                f"interleaver size {self.interleaver.size} must equal inner logical length "
                f"{self.inner.n_logical} and outer physical length {self.outer.n_physical}"
            )
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @classmethod
    def build(
        cls,
        inner_seed: SeedTransform,
        outer_seed: SeedTransform,
        length: int,
        seed: int = 0,
        max_iterations: int = DEFAULT_ITERATIONS,
    ) -> "TurboSystem":
        """System with an interleaver of ``length`` qubits drawn from the master seed."""
        inner = CodeSpec.for_logical_length(inner_seed, length, "inner")
        outer = CodeSpec.for_physical_length(outer_seed, length, "outer")
        il = QuantumInterleaver.random(length, unit_rng(seed, STREAM_INTERLEAVER, 0))
        return cls(inner, outer, il, max_iterations)

    @property
    def rate(self) -> float:
        return self.outer.n_logical / self.inner.n_physical


@dataclass
class Frame:
    p1: np.ndarray  # inner physical error (symbols)
    syn1: SyndromeSequence
    syn2: SyndromeSequence
    true_l2: np.ndarray
    l1: np.ndarray
    p2: np.ndarray


def simulate_frame(sys: TurboSystem, ch: DepolarizingChannel, rng: np.random.Generator, p1=None) -> Frame:
    """Channel error on the inner frame, pushed through both inverse encoders."""
    if p1 is None:
        p1 = sample_symbols(ch, sys.inner.n_physical, rng)
    l1, s1, m1 = track_symbols(sys.inner, p1)
    p2 = sys.interleaver.inverse_symbols(l1)
    l2, s2, m2 = track_symbols(sys.outer, p2)
    return Frame(
        np.asarray(p1, dtype=np.int8),
        SyndromeSequence.from_symbols(sys.inner.seed, s1, m1),
        SyndromeSequence.from_symbols(sys.outer.seed, s2, m2),
        l2,
        l1,
        p2,
    )


@dataclass
class DecodeResult:
    estimate: np.ndarray  # estimated outer logical symbols
    iterations: int
    estimates: list[np.ndarray]  # estimate after every iteration
    mi_log: list[tuple[float, float, float, float]] = field(default_factory=list)


def turbo_decode(
    sys: TurboSystem,
    syn1: SyndromeSequence,
    syn2: SyndromeSequence,
    ch: DepolarizingChannel,
    truth: Frame | None = None,
    early_exit: bool = True,
    mi_method: str = "true",
) -> DecodeResult:
    """Iterative decoding; returns the per-qubit MAP estimate of the outer logical error.

    Each ``mi_log`` entry is ``(I_A1, I_E1, I_A2, I_E2)`` for one iteration.
    With ``truth`` the values are measured against the true errors using
    ``mi_method``; without it the symbol-entropy estimator is used.
    The early exit stops once neither extrinsic MI moves by more than 1e-4.
    """
    priors_ch = np.broadcast_to(symbol_priors(ch), (sys.inner.n_physical, 4))
    pa_l1 = np.full((sys.inner.n_logical, 4), 0.25)
    estimates = []
    mi_log = []
    prev = None
    it = 0

    def mi(true_sym, msgs):
        if truth is None:
            return measure_mi(np.zeros(msgs.shape[0], dtype=np.int64), msgs, "entropy")
        return measure_mi(true_sym, msgs, mi_method)

    for it in range(1, sys.max_iterations + 1):
        try:
            o1 = siso_decode(sys.inner, priors_ch, pa_l1, syn1)
        except DecodingFailure as exc:
            raise TurboDecodingFailure(it, "inner", exc.step) from exc
        pa_p2 = sys.interleaver.inverse_messages(o1.ext_l)
        try:
            o2 = siso_decode(sys.outer, pa_p2, None, syn2, want_p=True)
        except DecodingFailure as exc:
            raise TurboDecodingFailure(it, "outer", exc.step) from exc
        ia1 = mi(truth.l1 if truth else None, pa_l1)
        ie1 = mi(truth.l1 if truth else None, o1.ext_l)
        ia2 = mi(truth.p2 if truth else None, pa_p2)
        ie2 = mi(truth.p2 if truth else None, o2.ext_p)
        mi_log.append((ia1, ie1, ia2, ie2))
        pa_l1 = sys.interleaver.apply_messages(o2.ext_p)
        estimates.append(np.argmax(o2.post_l, axis=1).astype(np.int8))
        if early_exit:
            cur = (ie1, ie2)
            if prev is not None and max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1])) < MI_TOLERANCE:
                break
            if min(cur) >= 1.0 - 1e-12:
                break
            prev = cur
    return DecodeResult(estimates[-1], it, estimates, mi_log)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class FrameResult:
    index: int
    qubit_errors: int
    word_error: bool
    iterations: int
    errors_per_iteration: list[int]


@dataclass
class QberRecord:
    p: float
    frames: int = 0
    qubit_errors: int = 0
    word_errors: int = 0
    iterations: int = 0
    logical_length: int = 0
    max_iterations: int = DEFAULT_ITERATIONS
    qubit_errors_per_iteration: list[int] = field(default_factory=list)
    word_errors_per_iteration: list[int] = field(default_factory=list)

    def add(self, fr: FrameResult):
        self.frames += 1
        self.qubit_errors += fr.qubit_errors
        self.word_errors += int(fr.word_error)
        self.iterations += fr.iterations
        if not self.qubit_errors_per_iteration:
            self.qubit_errors_per_iteration = [0] * self.max_iterations
            self.word_errors_per_iteration = [0] * self.max_iterations
        # after an early exit the estimate stays put for the remaining iterations
        errs = fr.errors_per_iteration + [fr.errors_per_iteration[-1]] * (self.max_iterations - len(fr.errors_per_iteration))
        for i, e in enumerate(errs):
            self.qubit_errors_per_iteration[i] += e
            self.word_errors_per_iteration[i] += int(e > 0)

    @property
    def qber(self) -> float:
        return self.qubit_errors / (self.logical_length * self.frames) if self.frames else float("nan")

    @property
    def wer(self) -> float:
        return self.word_errors / self.frames if self.frames else float("nan")

    @property
    def mean_iterations(self) -> float:
        return self.iterations / self.frames if self.frames else float("nan")

    def qber_per_iteration(self) -> list[float]:
        denom = self.logical_length * self.frames
        return [e / denom for e in self.qubit_errors_per_iteration]

    def row(self) -> dict:
        return {
            "p": self.p,
            "frames": self.frames,
            "qubit_errors": self.qubit_errors,
            "word_errors": self.word_errors,
            "qber": self.qber,
            "wer": self.wer,
            "mean_iterations": self.mean_iterations,
        }


@dataclass
class _FrameJob:
    sys: TurboSystem
    p: float
    seed: int

    def __call__(self, index: int) -> FrameResult:
        rng = unit_rng(self.seed, STREAM_FRAMES, index)
        ch = DepolarizingChannel(self.p)
        fr = simulate_frame(self.sys, ch, rng)
        res = turbo_decode(self.sys, fr.syn1, fr.syn2, ch)
        errs = [int(np.count_nonzero(e != fr.true_l2)) for e in res.estimates]
        return FrameResult(index, errs[-1], errs[-1] > 0, res.iterations, errs)


def run_qber(
    sys: TurboSystem,
    ch: DepolarizingChannel,
    frames: int,
    stop_at_errors: int | None = None,
    seed: int = 0,
    workers: int | None = None,
    chunk: int | None = None,
) -> QberRecord:
    """Monte-Carlo QBER/WER at one depolarizing probability.

    Frame ``i`` uses the stream ``(seed, i)``.  Frames are merged in index
    order and the run stops at the frame that brings the word-error count to
    ``stop_at_errors``, so tallies do not depend on ``workers``.
    """
    if frames < 1:
        raise ValueError("frames must be at least 1")
    rec = QberRecord(ch.p, logical_length=sys.outer.n_logical, max_iterations=sys.max_iterations)
    job = _FrameJob(sys, ch.p, seed)
    with worker_map(workers) as pmap:
        step = chunk or max(1, 4 * (workers or 1))
        start = 0
        while start < frames:
            idx = range(start, min(frames, start + step))
            for fr in pmap(job, idx):
                rec.add(fr)
                if stop_at_errors and rec.word_errors >= stop_at_errors:
                    return rec
            start += step
    return rec


@dataclass
class Trajectory:
    p: float
    # one row per iteration: (I_A1, I_E1, I_A2, I_E2)
    points: np.ndarray
    qubit_errors: int

    @property
    def final_ia(self) -> float:
        """A-priori MI the inner decoder would receive in the next iteration."""
        return float(self.points[-1, 3]) if len(self.points) else 0.0


def trajectory(
    sys: TurboSystem,
    ch: DepolarizingChannel,
    seed: int = 0,
    mi_method: str = "true",
) -> Trajectory:
    """Decoding trajectory of one frame with MI measured against the true errors.

    All iterations are run; the early exit is disabled so the staircase
    reaches the end of the tunnel or stalls in full view.
    """
    rng = unit_rng(seed, STREAM_FRAMES, 0)
    fr = simulate_frame(sys, ch, rng)
    res = turbo_decode(sys, fr.syn1, fr.syn2, ch, truth=fr, early_exit=False, mi_method=mi_method)
    return Trajectory(ch.p, np.array(res.mi_log), int(np.count_nonzero(res.estimate != fr.true_l2)))
