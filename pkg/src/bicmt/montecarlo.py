"""Monte Carlo BER simulation of the coded 4-PAM chain over AWGN.

Chain per block: encode, interleave per variant, map, add noise, max-log
demap, deinterleave, soft-input Viterbi decode, count info-bit errors.
Interleaver variants: "T" is the identity (none), "S" permutes all 2N coded
bit positions uniformly, "M" permutes each bit position independently over
time, "M-swapped" additionally exchanges which encoder output feeds which
mapper position.  Blocks are processed in batches; the RNG stream of a
batch is derived from (seed, snr key, batch index), so results do not
depend on batch scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .mapping import ChannelParams, descramble_llrs, map_bits, maxlog_llrs
from .trellis import GeneratorPair, Trellis, build_trellis, encode_batch

VARIANTS = ("T", "S", "M", "M-swapped")


@dataclass(frozen=True)
class SimulationConfig:
    code: GeneratorPair
    variant: str = "T"
    block_info_bits: int = 10000
    min_bit_errors: int = 100
    max_info_bits: int = 100_000_000
    seed: int = 0
    scrambler: bool = False
    batch_blocks: int = 64

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.block_info_bits < 10 * self.code.K:
            raise ValueError("block length must be much larger than K")
        if self.min_bit_errors < 1:
            raise ValueError("min_bit_errors must be positive")


@dataclass(frozen=True)
class BerEstimate:
    snr_db: float
    info_bits_sent: int
    bit_errors: int
    reliable: bool  # True iff the stop rule reached min_bit_errors

    @property
    def ber(self) -> float:
        return self.bit_errors / self.info_bits_sent

    @property
    def ci_halfwidth(self) -> float:
        """Normal-approximation 95% confidence half-width."""
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.info_bits_sent)


def viterbi_decode(trellis: Trellis, llrs: np.ndarray) -> np.ndarray:
    """ML info sequence for a 2xN L-value matrix, terminated in state zero.

    Maximizes sum_{k,t} c_{k,t} * l_{k,t}; ties go to the lower-indexed
    predecessor state.
    """
    llrs = np.asarray(llrs, dtype=float)
    if llrs.ndim != 2 or llrs.shape[0] != 2:
        raise ValueError("llrs must be a 2xN matrix")
    return viterbi_decode_batch(trellis, llrs[None])[0]


def viterbi_decode_batch(trellis: Trellis, llrs: np.ndarray) -> np.ndarray:
    """Batched soft Viterbi over (B, 2, N) L-values -> (B, N-(K-1)) bits."""
    llrs = np.asarray(llrs, dtype=float)
    B, _, N = llrs.shape
    S = trellis.num_states
    mem = trellis.code.memory
    if N <= mem:
        raise ValueError("block shorter than the termination tail")

    nxt = np.arange(S)
    p0 = nxt >> 1                 # lower-indexed predecessor
    p1 = p0 | (S >> 1)
    u = nxt & 1                   # input bit consumed entering state nxt
    out = trellis.outputs.astype(float)
    c1_0, c2_0 = out[p0, u, 0], out[p0, u, 1]
    c1_1, c2_1 = out[p1, u, 0], out[p1, u, 1]

    metric = np.full((B, S), -np.inf)
    metric[:, 0] = 0.0
    back = np.empty((N, B, S), dtype=bool)
    for t in range(N):
        l1 = llrs[:, 0, t][:, None]
        l2 = llrs[:, 1, t][:, None]
        cand0 = metric[:, p0] + c1_0 * l1 + c2_0 * l2
        cand1 = metric[:, p1] + c1_1 * l1 + c2_1 * l2
        take1 = cand1 > cand0
        metric = np.where(take1, cand1, cand0)
        back[t] = take1

    bits = np.empty((B, N), dtype=np.int8)
    rows = np.arange(B)
    state = np.zeros(B, dtype=np.int64)  # termination forces the zero state
    for t in range(N - 1, -1, -1):
        bits[:, t] = state & 1
        state = np.where(back[t, rows, state], p1[state], p0[state])
    return bits[:, :N - mem]


def _interleave(C: np.ndarray, variant: str, rng: np.random.Generator):
    """Apply the variant's permutation to a (B, 2, N) coded-bit batch.

    Returns (interleaved bits, context for _deinterleave_llrs).
    """
    B, _, N = C.shape
    if variant == "T":
        return C, None
    if variant == "S":
        perm = np.argsort(rng.random((B, 2 * N)), axis=1)
        flat = C.reshape(B, 2 * N, order="F")
        rows = np.arange(B)[:, None]
        return flat[rows, perm].reshape(B, 2, N, order="F"), perm
    # M / M-swapped: one time-permutation per mapper position
    perm = np.argsort(rng.random((B, 2, N)), axis=2)
    src = C[:, ::-1, :] if variant == "M-swapped" else C
    rows = np.arange(B)[:, None, None]
    pos = np.arange(2)[None, :, None]
    return src[rows, pos, perm], perm


def _deinterleave_llrs(L: np.ndarray, variant: str, perm) -> np.ndarray:
    B, _, N = L.shape
    if variant == "T":
        return L
    if variant == "S":
        flat = L.reshape(B, 2 * N, order="F")
        out = np.empty_like(flat)
        rows = np.arange(B)[:, None]
        out[rows, perm] = flat
        return out.reshape(B, 2, N, order="F")
    out = np.empty_like(L)
    rows = np.arange(B)[:, None, None]
    pos = np.arange(2)[None, :, None]
    out[rows, pos, perm] = L
    if variant == "M-swapped":
        out = out[:, ::-1, :]
    return out


def simulate_batch(cfg: SimulationConfig, params: ChannelParams,
                   rng: np.random.Generator,
                   trellis: Trellis) -> Tuple[int, int]:
    """Run one batch of blocks; returns (bit_errors, info_bits)."""
    B, Ninfo = cfg.batch_blocks, cfg.block_info_bits
    info = rng.integers(0, 2, size=(B, Ninfo), dtype=np.int8)
    C = encode_batch(trellis, info)
    Ct, perm = _interleave(C, cfg.variant, rng)
    if cfg.scrambler:
        S = rng.integers(0, 2, size=Ct.shape, dtype=np.int8)
        Ct = Ct ^ S
    x = map_bits(Ct)
    y = x + rng.normal(0.0, math.sqrt(params.noise_var), size=x.shape)
    l1, l2 = maxlog_llrs(y, params)
    L = np.stack([l1, l2], axis=1)
    if cfg.scrambler:
        L = descramble_llrs(L, S)
    L = _deinterleave_llrs(L, cfg.variant, perm)
    decoded = viterbi_decode_batch(trellis, L)
    errors = int(np.sum(decoded != info))
    return errors, B * Ninfo


def run_point(cfg: SimulationConfig, snr_db: float) -> BerEstimate:
    """Simulate one SNR point until min_bit_errors or max_info_bits."""
    params = ChannelParams.from_db(snr_db)
    trellis = build_trellis(cfg.code)
    snr_key = int(round(snr_db * 1000)) & 0x7FFFFFFF
    errors = bits = batch = 0
    while errors < cfg.min_bit_errors and bits < cfg.max_info_bits:
        rng = np.random.default_rng([cfg.seed, snr_key, batch])
        e, n = simulate_batch(cfg, params, rng, trellis)
        errors += e
        bits += n
        batch += 1
    return BerEstimate(snr_db, bits, errors, reliable=errors >= cfg.min_bit_errors)


def run_sweep(cfg: SimulationConfig, snr_db_list) -> list:
    return [run_point(cfg, s) for s in snr_db_list]


def demapper_bit_error_rates(snr_db: float, n_symbols: int = 200_000,
                             seed: int = 0) -> Tuple[float, float]:
    """Raw hard-decision error rate of the max-log L-values per bit position
    for uniform random bits (the unequal-protection measure)."""
    params = ChannelParams.from_db(snr_db)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(2, n_symbols), dtype=np.int8)
    x = map_bits(bits)
    y = x + rng.normal(0.0, math.sqrt(params.noise_var), size=x.shape)
    l1, l2 = maxlog_llrs(y, params)
    p1 = float(np.mean((l1 > 0).astype(np.int8) != bits[0]))
    p2 = float(np.mean((l2 > 0).astype(np.int8) != bits[1]))
    return p1, p2
