"""Monte Carlo engine for the two-user erasure channel with budgeted feedback.

State generation, feedback strategies with per-prefix alphabet-cardinality
accounting, an empirical-distortion harness for the rate-distortion converse,
and a queue-based two-phase network-coded delivery scheme (genie-aided, and a
variant whose transmitter learns the feedback user's states only through
block-compressed feedback).
"""

from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .infotheory import ChannelSpec, FeedbackBudget, min_distortion
from .rng import child_seed, seed_stream

__all__ = [
    "BudgetViolation",
    "ConverseViolation",
    "StateSequence",
    "ReconstructionSequence",
    "FeedbackTranscript",
    "SimulationReport",
    "StrategyResult",
    "thread_count",
    "generate_states",
    "feedback_perfect",
    "feedback_decimated",
    "feedback_lossless_block",
    "feedback_codebook",
    "estimate_distortion",
    "run_two_phase_scheme",
    "run_point_a_demo",
    "run_distortion_converse_sweep",
]

BUDGET_TOL = 1e-12
_CODEBOOK_CHUNK = 128


class BudgetViolation(Exception):
    """The running feedback-alphabet budget is exceeded at some prefix."""

    def __init__(self, t: int, rate: float, cfb: float):
        self.t = t
        self.rate = rate
        self.cfb = cfb
        super().__init__(
            f"feedback budget violated at prefix t={t}: running average "
            f"{rate:.12g} bits/use exceeds cfb={cfb:.12g}"
        )


class ConverseViolation(Exception):
    """A budget-respecting strategy measured below the distortion floor."""


@dataclass(frozen=True)
class StateSequence:
    """Erasure pattern of one receiver over a block: 1 = received, 0 = erased."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 1:
            raise ValueError("state sequence must be a nonempty 1-D bit array")
        if np.any(bits > 1):
            raise ValueError("state sequence entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return int(self.bits.size)


@dataclass(frozen=True)
class ReconstructionSequence:
    """Decoder-side estimate of a state sequence."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("reconstruction must be a 1-D bit array")
        if np.any(bits > 1):
            raise ValueError("reconstruction entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return int(self.bits.size)


class FeedbackTranscript:
    """Per-slot feedback symbols and their alphabet sizes.

    The ledger charges log2 of the alphabet size at each slot; alphabets are
    integers (powers of two for the block strategies) so the running-average
    budget check is exact.
    """

    def __init__(self, symbols, alphabet_sizes):
        if len(symbols) != len(alphabet_sizes):
            raise ValueError("symbols and alphabet_sizes must have equal length")
        if isinstance(symbols, np.ndarray) and isinstance(alphabet_sizes, np.ndarray):
            if np.any(symbols < 0) or np.any(symbols >= alphabet_sizes):
                raise ValueError("symbol out of alphabet range")
        else:
            for t, (s, a) in enumerate(zip(symbols, alphabet_sizes)):
                if a < 1 or not 0 <= s < a:
                    raise ValueError(f"symbol {s} out of alphabet range [0, {a}) at slot {t}")
        self.symbols = symbols
        self.alphabet_sizes = alphabet_sizes
        self._bits: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def bits_per_slot(self) -> np.ndarray:
        if self._bits is None:
            if isinstance(self.alphabet_sizes, np.ndarray):
                self._bits = np.log2(self.alphabet_sizes.astype(np.float64))
            else:
                self._bits = np.array(
                    [math.log2(a) if a > 1 else 0.0 for a in self.alphabet_sizes]
                )
        return self._bits

    @property
    def total_bits(self) -> float:
        return float(self.bits_per_slot.sum())

    @property
    def max_prefix_rate(self) -> float:
        """Largest running average (1/t) sum_{l<=t} log2 |K[l]| over all prefixes."""
        csum = np.cumsum(self.bits_per_slot)
        return float((csum / np.arange(1, len(csum) + 1)).max())

    def assert_within_budget(self, budget: FeedbackBudget) -> None:
        csum = np.cumsum(self.bits_per_slot)
        rates = csum / np.arange(1, len(csum) + 1)
        bad = np.flatnonzero(rates > budget.cfb + BUDGET_TOL)
        if bad.size:
            t = int(bad[0]) + 1
            raise BudgetViolation(t, float(rates[bad[0]]), budget.cfb)


def thread_count() -> int:
    """Worker count from RLFB_THREADS, defaulting to the hardware parallelism."""
    env = os.environ.get("RLFB_THREADS")
    if env:
        k = int(env)
        if k < 1:
            raise ValueError(f"RLFB_THREADS must be positive, got {env}")
        return k
    return os.cpu_count() or 1


def _bernoulli_bits(rng: np.random.Generator, n: int, delta: float) -> np.ndarray:
    # 1 with probability 1 - delta.
    return (rng.random(n) >= delta).astype(np.uint8)


def generate_states(spec: ChannelSpec, seed: int) -> tuple[StateSequence, StateSequence]:
    """Both receivers' i.i.d. Bernoulli(1-delta) erasure patterns for one block."""
    rng = seed_stream(seed, 0)
    n = spec.block_len
    s_f = _bernoulli_bits(rng, n, spec.delta)
    s_n = _bernoulli_bits(rng, n, spec.delta)
    return StateSequence(s_f), StateSequence(s_n)


# ---------------------------------------------------------------------------
# Feedback strategies. Each returns (transcript, reconstruction).
# ---------------------------------------------------------------------------


def feedback_perfect(
    states: StateSequence, budget: FeedbackBudget | None = None
) -> tuple[FeedbackTranscript, ReconstructionSequence]:
    """One raw state bit per slot; exact reconstruction at 1 bit/use."""
    n = len(states)
    transcript = FeedbackTranscript(
        symbols=states.bits.astype(np.int64), alphabet_sizes=np.full(n, 2, dtype=np.int64)
    )
    if budget is not None:
        transcript.assert_within_budget(budget)
    return transcript, ReconstructionSequence(states.bits.copy())


def feedback_decimated(
    spec: ChannelSpec, states: StateSequence, m: int, budget: FeedbackBudget | None = None
) -> tuple[FeedbackTranscript, ReconstructionSequence]:
    """Report every m-th state bit; guess the majority value elsewhere.

    Slots are reported at 1-based times m, 2m, ..., which keeps every prefix
    of the running budget at or below 1/m bits per use. Unreported slots are
    filled with the most likely state value (1 when delta < 1/2, else 0).
    """
    if m < 1:
        raise ValueError(f"decimation factor must be >= 1, got {m}")
    n = len(states)
    reported = np.zeros(n, dtype=bool)
    reported[m - 1 :: m] = True
    symbols = np.where(reported, states.bits, 0).astype(np.int64)
    alphabets = np.where(reported, 2, 1).astype(np.int64)
    guess = 1 if spec.delta < 0.5 else 0
    recon = np.where(reported, states.bits, guess).astype(np.uint8)
    transcript = FeedbackTranscript(symbols=symbols, alphabet_sizes=alphabets)
    if budget is not None:
        transcript.assert_within_budget(budget)
    return transcript, ReconstructionSequence(recon)


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


def _type_class_rank(bits: np.ndarray) -> int:
    """Colexicographic index of a word among all words of its weight."""
    rank = 0
    ones = 0
    for pos in np.flatnonzero(bits):
        ones += 1
        rank += math.comb(int(pos), ones)
    return rank


def _type_class_unrank(length: int, weight: int, rank: int) -> np.ndarray:
    out = np.zeros(length, dtype=np.uint8)
    if weight == 0:
        return out
    r = rank
    p = length - 1
    i = weight
    c = math.comb(p, i)
    while i > 0:
        while c > r:
            c = c * (p - i) // p
            p -= 1
        out[p] = 1
        r -= c
        c = c * i // p if p > 0 else 0
        p -= 1
        i -= 1
    return out


def _encode_block(chunk: np.ndarray) -> tuple[int, int, int, int]:
    """(weight, rank, weight_alphabet, rank_alphabet) for one block, as powers of two."""
    length = int(chunk.size)
    w = int(chunk.sum())
    rank = _type_class_rank(chunk)
    w_alpha = 1 << _ceil_log2(length + 1)
    r_alpha = 1 << _ceil_log2(math.comb(length, w))
    return w, rank, w_alpha, r_alpha


def feedback_lossless_block(
    states: StateSequence, block: int, budget: FeedbackBudget | None = None
) -> tuple[FeedbackTranscript, ReconstructionSequence]:
    """Enumerative (weight + type-class index) compression per block.

    Each block is described by two symbols placed in its last two slots:
    the Hamming weight (alphabet 2^ceil(log2(L+1))) and the index within the
    weight's type class (alphabet 2^ceil(log2 C(L, w))), so the ledger
    charges exactly ceil(log2(L+1)) + ceil(log2 C(L, w)) bits per block.
    Reconstruction is exact; the decoder sees each block one block late.
    A trailing partial block is encoded at its own shorter length.
    """
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    bits = states.bits
    n = len(states)
    symbols = [0] * n
    alphabets = [1] * n
    recon = np.empty(n, dtype=np.uint8)
    pos = 0
    while pos < n:
        length = min(block, n - pos)
        w, rank, w_alpha, r_alpha = _encode_block(bits[pos : pos + length])
        if length >= 2:
            symbols[pos + length - 2] = w
            alphabets[pos + length - 2] = w_alpha
            symbols[pos + length - 1] = rank
            alphabets[pos + length - 1] = r_alpha
        else:
            # Single-slot block: the type class is a singleton, the weight says it all.
            symbols[pos] = w
            alphabets[pos] = w_alpha
        recon[pos : pos + length] = _type_class_unrank(length, w, rank)
        pos += length
    transcript = FeedbackTranscript(symbols=symbols, alphabet_sizes=alphabets)
    if budget is not None:
        transcript.assert_within_budget(budget)
    return transcript, ReconstructionSequence(recon)


def lossless_rate_bound(block: int) -> float:
    """Per-use overhead bound of the enumerative coder: 2 log2(block) / block."""
    return 2.0 * math.log2(block) / block


def _rd_output_marginal(delta: float, d_star: float) -> float:
    # Output marginal of the binary rate-distortion test channel for a
    # Bernoulli(1 - delta) source at distortion d_star.
    denom = 1.0 - 2.0 * d_star
    if abs(denom) < 1e-12:
        return 0.5
    return min(max((1.0 - delta - d_star) / denom, 0.0), 1.0)


def feedback_codebook(
    spec: ChannelSpec,
    states: StateSequence,
    budget: FeedbackBudget,
    block: int,
    seed: int,
) -> tuple[FeedbackTranscript, ReconstructionSequence]:
    """Random-codebook vector quantizer at rate cfb bits per use.

    Per block of length L, ceil(2^(L cfb)) codewords are drawn i.i.d.
    Bernoulli(q*) with q* the rate-distortion output marginal; the symbol is
    the index of the Hamming-nearest codeword (lowest index on ties). When
    the codebook would cover all 2^L words it is replaced by the full
    enumeration, making the quantizer lossless.
    """
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    rate_bits = block * budget.cfb
    if rate_bits > 30.0 + 1e-9:
        raise ValueError(
            f"codebook size 2^{rate_bits:.3g} exceeds the 2^30 cap; shrink block or cfb"
        )
    n_codewords = math.ceil(2.0**rate_bits)
    d_star = min_distortion(spec, budget)
    q = _rd_output_marginal(spec.delta, d_star)
    exhaustive = block <= 24 and n_codewords >= (1 << block)

    bits = states.bits
    n = len(states)
    n_full = n // block
    symbols = [0] * n
    alphabets = [1] * n
    recon = np.empty(n, dtype=np.uint8)
    rng = seed_stream(seed)

    pos = 0
    for start in range(0, n_full, _CODEBOOK_CHUNK):
        count = min(_CODEBOOK_CHUNK, n_full - start)
        src = bits[pos : pos + count * block].reshape(count, block)
        if exhaustive:
            best = (src * (1 << np.arange(block - 1, -1, -1, dtype=np.uint32))).sum(axis=1)
            chosen = src
            m_here = 1 << block
        else:
            books = (rng.random((count, n_codewords, block)) < q).astype(np.uint8)
            dist = (books ^ src[:, None, :]).sum(axis=2)
            best = dist.argmin(axis=1)
            chosen = books[np.arange(count), best]
            m_here = n_codewords
        for k in range(count):
            slot = pos + (k + 1) * block - 1
            symbols[slot] = int(best[k])
            alphabets[slot] = m_here
        recon[pos : pos + count * block] = chosen.reshape(-1)
        pos += count * block

    if pos < n:
        # Trailing partial block at its own length and its own codebook size.
        length = n - pos
        m_tail = math.ceil(2.0 ** (length * budget.cfb))
        src = bits[pos:]
        if m_tail >= (1 << length) and length <= 24:
            recon[pos:] = src
            symbols[n - 1] = int((src * (1 << np.arange(length - 1, -1, -1))).sum())
            alphabets[n - 1] = 1 << length
        else:
            book = (rng.random((m_tail, length)) < q).astype(np.uint8)
            dist = (book ^ src[None, :]).sum(axis=1)
            best = int(dist.argmin())
            recon[pos:] = book[best]
            symbols[n - 1] = best
            alphabets[n - 1] = m_tail

    transcript = FeedbackTranscript(symbols=symbols, alphabet_sizes=alphabets)
    return transcript, ReconstructionSequence(recon)


def estimate_distortion(states: StateSequence, recon: ReconstructionSequence) -> float:
    """Fraction of slots where the reconstruction disagrees with the state."""
    if len(states) != len(recon):
        raise ValueError(f"length mismatch: {len(states)} vs {len(recon)}")
    return float(np.mean(states.bits != recon.bits))


# ---------------------------------------------------------------------------
# Two-phase network-coded delivery.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationReport:
    """Outcome of one simulation run, reproducible from the seed."""

    delivered_f: int
    delivered_n: int
    slots_used: int
    throughput_sum: float
    error_rate_f: float
    error_rate_n: float
    feedback_bits: float
    empirical_distortion: float | None
    seed: int
    mode: str
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "delivered_f": self.delivered_f,
            "delivered_n": self.delivered_n,
            "slots_used": self.slots_used,
            "throughput_sum": self.throughput_sum,
            "error_rate_f": self.error_rate_f,
            "error_rate_n": self.error_rate_n,
            "feedback_bits": self.feedback_bits,
            "empirical_distortion": self.empirical_distortion,
            "seed": self.seed,
            "mode": self.mode,
            "degenerate": self.degenerate,
        }


class _StateFeed:
    """Chunked per-slot (S_F, S_N) draws from one deterministic stream."""

    def __init__(self, rng: np.random.Generator, delta: float, chunk: int = 1 << 14):
        self._rng = rng
        self._delta = delta
        self._chunk = chunk
        self._buf = np.empty((0, 2), dtype=np.uint8)
        self._i = 0

    def next_pair(self) -> tuple[int, int]:
        if self._i >= self._buf.shape[0]:
            self._buf = (self._rng.random((self._chunk, 2)) >= self._delta).astype(np.uint8)
            self._i = 0
        s_f, s_n = self._buf[self._i]
        self._i += 1
        return int(s_f), int(s_n)


def _check_conservation(payload: int, delivered: int, *queues) -> None:
    total = delivered + sum(len(q) for q in queues)
    if total != payload:
        raise RuntimeError(f"bit conservation broken: {total} != {payload}")


def run_two_phase_scheme(
    spec: ChannelSpec, payload_bits_per_user: int, seed: int
) -> SimulationReport:
    """Queue-based XOR retransmission scheme with genie (global delayed) states.

    Fresh bits are sent uncoded; a bit erased at its owner but overheard by
    the other receiver moves to a cross queue. Whenever both cross queues are
    nonempty the XOR of their heads is broadcast, serving both receivers in
    one slot. The transmitter sees both delayed states (genie mode), so this
    is an upper baseline, not a one-sided-feedback claim. Runs until both
    payloads are fully delivered and verifies decoding bit-by-bit.
    """
    if spec.delta >= 1.0:
        raise ValueError("delta = 1 never delivers; refusing to run forever")
    payload = int(payload_bits_per_user)
    if payload < 1:
        raise ValueError("payload_bits_per_user must be >= 1")

    feed = _StateFeed(seed_stream(seed, 0), spec.delta)
    payload_rng = seed_stream(seed, 1)
    w_f = _bernoulli_bits(payload_rng, payload, 0.5)
    w_n = _bernoulli_bits(payload_rng, payload, 0.5)

    fresh_f: deque[int] = deque(range(payload))
    fresh_n: deque[int] = deque(range(payload))
    cross_f: deque[int] = deque()  # bits for F, known by N
    cross_n: deque[int] = deque()  # bits for N, known by F
    side_f: dict[int, int] = {}  # values of N's bits that F overheard
    side_n: dict[int, int] = {}  # values of F's bits that N overheard
    decoded_f = np.full(payload, -1, dtype=np.int8)
    decoded_n = np.full(payload, -1, dtype=np.int8)

    delivered_f = delivered_n = 0
    slots = 0
    serve_f = True

    while delivered_f < payload or delivered_n < payload:
        s_f, s_n = feed.next_pair()
        slots += 1
        if cross_f and cross_n:
            i, j = cross_f[0], cross_n[0]
            x = int(w_f[i]) ^ int(w_n[j])
            if s_f:
                decoded_f[i] = x ^ side_f[j]
                cross_f.popleft()
                delivered_f += 1
            if s_n:
                decoded_n[j] = x ^ side_n[i]
                cross_n.popleft()
                delivered_n += 1
        elif fresh_f or fresh_n:
            if fresh_f and fresh_n:
                user = "f" if serve_f else "n"
                serve_f = not serve_f
            else:
                user = "f" if fresh_f else "n"
            if user == "f":
                i = fresh_f[0]
                if s_f:
                    decoded_f[i] = w_f[i]
                    fresh_f.popleft()
                    delivered_f += 1
                elif s_n:
                    side_n[i] = int(w_f[i])
                    fresh_f.popleft()
                    cross_f.append(i)
            else:
                j = fresh_n[0]
                if s_n:
                    decoded_n[j] = w_n[j]
                    fresh_n.popleft()
                    delivered_n += 1
                elif s_f:
                    side_f[j] = int(w_n[j])
                    fresh_n.popleft()
                    cross_n.append(j)
        elif cross_f:
            i = cross_f[0]
            if s_f:
                decoded_f[i] = w_f[i]
                cross_f.popleft()
                delivered_f += 1
        else:
            j = cross_n[0]
            if s_n:
                decoded_n[j] = w_n[j]
                cross_n.popleft()
                delivered_n += 1
        _check_conservation(payload, delivered_f, fresh_f, cross_f)
        _check_conservation(payload, delivered_n, fresh_n, cross_n)

    err_f = float(np.mean(decoded_f != w_f))
    err_n = float(np.mean(decoded_n != w_n))
    return SimulationReport(
        delivered_f=delivered_f,
        delivered_n=delivered_n,
        slots_used=slots,
        throughput_sum=(delivered_f + delivered_n) / slots,
        error_rate_f=err_f,
        error_rate_n=err_n,
        feedback_bits=0.0,
        empirical_distortion=None,
        seed=int(seed),
        mode="genie",
    )


def run_point_a_demo(
    spec: ChannelSpec, payload_bits_per_user: int, block: int, seed: int
) -> SimulationReport:
    """Two-phase scheme with the feedback user's states block-compressed.

    S_N stays genie-provided (one slot late) but S_F reaches the transmitter
    only through the enumerative block coder, one block late. Outcomes that
    depend on S_F are held pending and classified at each block boundary from
    the decoded feedback. Throughput approaches the genie value as payload
    and block grow; feedback bits count the blocks actually encoded.
    """
    if spec.delta >= 1.0:
        raise ValueError("delta = 1 never delivers; refusing to run forever")
    if block < 16:
        raise ValueError(f"block must be >= 16, got {block}")
    payload = int(payload_bits_per_user)
    if payload < 1:
        raise ValueError("payload_bits_per_user must be >= 1")

    feed = _StateFeed(seed_stream(seed, 0), spec.delta)
    payload_rng = seed_stream(seed, 1)
    w_f = _bernoulli_bits(payload_rng, payload, 0.5)
    w_n = _bernoulli_bits(payload_rng, payload, 0.5)

    fresh_f: deque[int] = deque(range(payload))
    fresh_n: deque[int] = deque(range(payload))
    cross_f: deque[int] = deque()
    cross_n: deque[int] = deque()
    side_f: dict[int, int] = {}
    side_n: dict[int, int] = {}
    decoded_f = np.full(payload, -1, dtype=np.int8)
    decoded_n = np.full(payload, -1, dtype=np.int8)

    # Transmissions whose fate needs S_F, resolved at block boundaries.
    pend_fresh_f: list[tuple[int, int]] = []  # (slot offset in block, bit)
    pend_fresh_n: list[tuple[int, int]] = []  # had S_N = 0; cross-vs-retry needs S_F
    pend_xor_f: list[tuple[int, int]] = []
    pend_single_f: list[tuple[int, int]] = []
    sf_block: list[int] = []
    sn_block: list[int] = []

    delivered_f = delivered_n = 0
    slots = 0
    feedback_bits = 0
    serve_f = True
    degenerate = False
    first_boundary = True

    def pending_f() -> int:
        return len(pend_fresh_f) + len(pend_xor_f) + len(pend_single_f)

    while delivered_f < payload or delivered_n < payload:
        s_f, s_n = feed.next_pair()
        slots += 1
        off = len(sf_block)
        sf_block.append(s_f)
        sn_block.append(s_n)

        if cross_f and cross_n:
            i, j = cross_f.popleft(), cross_n[0]
            x = int(w_f[i]) ^ int(w_n[j])
            if s_f:
                decoded_f[i] = x ^ side_f[j]
            if s_n:
                decoded_n[j] = x ^ side_n[i]
                cross_n.popleft()
                delivered_n += 1
            pend_xor_f.append((off, i))
        elif fresh_f or fresh_n:
            if fresh_f and fresh_n:
                user = "f" if serve_f else "n"
                serve_f = not serve_f
            else:
                user = "f" if fresh_f else "n"
            if user == "f":
                i = fresh_f.popleft()
                if s_f:
                    decoded_f[i] = w_f[i]
                if s_n:
                    side_n[i] = int(w_f[i])
                pend_fresh_f.append((off, i))
            else:
                j = fresh_n[0]
                if s_n:
                    decoded_n[j] = w_n[j]
                    fresh_n.popleft()
                    delivered_n += 1
                else:
                    fresh_n.popleft()
                    if s_f:
                        side_f[j] = int(w_n[j])
                    pend_fresh_n.append((off, j))
        elif cross_f:
            i = cross_f.popleft()
            if s_f:
                decoded_f[i] = w_f[i]
            pend_single_f.append((off, i))
        elif cross_n:
            j = cross_n[0]
            if s_n:
                decoded_n[j] = w_n[j]
                cross_n.popleft()
                delivered_n += 1
        # else: idle slot, everything is pending classification.

        if len(sf_block) == block:
            if first_boundary:
                degenerate = not fresh_f and not fresh_n and not cross_f and not cross_n
                first_boundary = False
            arr = np.array(sf_block, dtype=np.uint8)
            w, rank, w_alpha, r_alpha = _encode_block(arr)
            feedback_bits += _ceil_log2(w_alpha) + _ceil_log2(r_alpha)
            decoded_states = _type_class_unrank(block, w, rank)
            if not np.array_equal(decoded_states, arr):
                raise RuntimeError("feedback block decode mismatch")
            for off, i in pend_fresh_f:
                if decoded_states[off]:
                    delivered_f += 1
                elif sn_block[off]:
                    cross_f.append(i)
                else:
                    fresh_f.append(i)
            for off, j in pend_fresh_n:
                if decoded_states[off]:
                    cross_n.append(j)
                else:
                    fresh_n.append(j)
            for off, i in pend_xor_f:
                if decoded_states[off]:
                    delivered_f += 1
                else:
                    cross_f.append(i)
            for off, i in pend_single_f:
                if decoded_states[off]:
                    delivered_f += 1
                else:
                    cross_f.append(i)
            pend_fresh_f.clear()
            pend_fresh_n.clear()
            pend_xor_f.clear()
            pend_single_f.clear()
            sf_block.clear()
            sn_block.clear()

        total_f = delivered_f + len(fresh_f) + len(cross_f) + pending_f()
        total_n = delivered_n + len(fresh_n) + len(cross_n) + len(pend_fresh_n)
        if total_f != payload or total_n != payload:
            raise RuntimeError("bit conservation broken in block-feedback scheme")

    err_f = float(np.mean(decoded_f != w_f))
    err_n = float(np.mean(decoded_n != w_n))
    return SimulationReport(
        delivered_f=delivered_f,
        delivered_n=delivered_n,
        slots_used=slots,
        throughput_sum=(delivered_f + delivered_n) / slots,
        error_rate_f=err_f,
        error_rate_n=err_n,
        feedback_bits=float(feedback_bits),
        empirical_distortion=0.0,
        seed=int(seed),
        mode="compressed",
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# Distortion-converse sweep.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyResult:
    """Mean empirical distortion of one strategy against its distortion floor.

    d_star is the rate-distortion floor at the feedback rate the strategy
    actually consumed (the budget's cfb when it stayed within budget, its
    measured peak running average otherwise, with over_budget flagging the
    latter case).
    """

    strategy: str
    mean_distortion: float
    d_star: float
    std_error: float
    feedback_rate: float
    over_budget: bool
    trials: int
    n: int


def _parse_strategy(name: str) -> tuple[str, int | None]:
    if name == "perfect":
        return "perfect", None
    for prefix in ("decimated", "lossless", "codebook"):
        if name.startswith(prefix + ":"):
            try:
                param = int(name.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad strategy parameter in {name!r}") from None
            if param < 1:
                raise ValueError(f"strategy parameter must be >= 1 in {name!r}")
            return prefix, param
    raise ValueError(
        f"unknown strategy {name!r}; expected perfect, decimated:<m>, lossless:<L>, codebook:<L>"
    )


def run_strategy_trial(
    spec: ChannelSpec, budget: FeedbackBudget, name: str, states: StateSequence, trial_seed: int
) -> tuple[FeedbackTranscript, ReconstructionSequence]:
    """One (transcript, reconstruction) realization of a named strategy."""
    kind, param = _parse_strategy(name)
    if kind == "perfect":
        return feedback_perfect(states)
    if kind == "decimated":
        return feedback_decimated(spec, states, param)
    if kind == "lossless":
        return feedback_lossless_block(states, param)
    return feedback_codebook(spec, states, budget, param, trial_seed)


def run_distortion_converse_sweep(
    spec: ChannelSpec,
    budget: FeedbackBudget,
    strategies: list[str],
    trials: int,
    seed: int,
    enforce_budget: bool = False,
) -> list[StrategyResult]:
    """Mean empirical distortion per strategy, checked against the converse floor.

    Each strategy runs `trials` independent blocks of length spec.block_len
    with per-trial deterministic streams; trials may execute in parallel
    (RLFB_THREADS) without changing any output. Raises ConverseViolation if
    a strategy's mean lands below its d_star floor by more than three
    standard errors. With enforce_budget, any transcript exceeding the budget
    at some prefix raises BudgetViolation instead of being flagged.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for name in strategies:
        _parse_strategy(name)

    def one_trial(si: int, ti: int) -> tuple[float, float]:
        states = StateSequence(
            _bernoulli_bits(seed_stream(seed, si, ti), spec.block_len, spec.delta)
        )
        transcript, recon = run_strategy_trial(
            spec, budget, strategies[si], states, child_seed(seed, si, ti, 1)
        )
        if enforce_budget:
            transcript.assert_within_budget(budget)
        return estimate_distortion(states, recon), transcript.max_prefix_rate

    tasks = [(si, ti) for si in range(len(strategies)) for ti in range(trials)]
    workers = thread_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda st: one_trial(*st), tasks))
    else:
        outcomes = [one_trial(*st) for st in tasks]

    results = []
    for si, name in enumerate(strategies):
        rows = outcomes[si * trials : (si + 1) * trials]
        dists = np.array([d for d, _ in rows])
        peak_rate = max(r for _, r in rows)
        mean = float(dists.mean())
        stderr = float(dists.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        over = peak_rate > budget.cfb + 1e-9
        effective = peak_rate if over else budget.cfb
        d_star = min_distortion(spec, FeedbackBudget(effective))
        if mean < d_star - 3.0 * stderr - 1e-12:
            raise ConverseViolation(
                f"{name}: mean distortion {mean:.6g} beats the floor {d_star:.6g} "
                f"at rate {effective:.6g} (stderr {stderr:.3g})"
            )
        results.append(
            StrategyResult(
                strategy=name,
                mean_distortion=mean,
                d_star=d_star,
                std_error=stderr,
                feedback_rate=float(peak_rate),
                over_budget=over,
                trials=trials,
                n=spec.block_len,
            )
        )
    return results
