"""Rate-1/2 convolutional codes: generator pairs, trellises, encoding.

Generator polynomials are given in octal notation.  The binary expansion of
a generator is read with bit 0 (the lowest-order tap) multiplying the
current input and bit i multiplying the input delayed by i, i.e. octal 5 =
binary 101 = 1 + D^2 and octal 7 = 111 = 1 + D + D^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

K_MIN = 3
K_MAX = 12


def _poly_gcd(a: int, b: int) -> int:
    """GCD of two polynomials over GF(2), coefficients packed in ints."""
    while b:
        while a.bit_length() >= b.bit_length():
            a ^= b << (a.bit_length() - b.bit_length())
        a, b = b, a
    return a


@dataclass(frozen=True)
class GeneratorPair:
    """A rate-1/2 convolutional code (g1, g2) with constraint length K."""

    g1: int
    g2: int
    K: int

    def __post_init__(self):
        if not K_MIN <= self.K <= K_MAX:
            raise ValueError(f"constraint length K={self.K} outside [{K_MIN}, {K_MAX}]")
        for name, g in (("g1", self.g1), ("g2", self.g2)):
            if g == 0:
                raise ValueError(f"{name} must be nonzero")
            if g >= 1 << self.K:
                raise ValueError(f"{name}={g:o} (octal) does not fit in K={self.K} bits")

    @classmethod
    def from_octal(cls, g1_octal: str, g2_octal: str, K: int | None = None) -> "GeneratorPair":
        g1 = int(g1_octal, 8)
        g2 = int(g2_octal, 8)
        if K is None:
            K = max(g1.bit_length(), g2.bit_length())
        return cls(g1, g2, K)

    @classmethod
    def parse(cls, text: str) -> "GeneratorPair":
        """Parse a CLI-style pair such as "5,7" or "247,371" (octal)."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected two comma-separated octal generators, got {text!r}")
        return cls.from_octal(parts[0].strip(), parts[1].strip())

    @property
    def memory(self) -> int:
        return self.K - 1

    @property
    def catastrophic(self) -> bool:
        """True iff gcd(g1(D), g2(D)) != 1 over GF(2)."""
        return _poly_gcd(self.g1, self.g2) != 1

    def swapped(self) -> "GeneratorPair":
        return GeneratorPair(self.g2, self.g1, self.K)

    def octal_str(self) -> str:
        return f"({self.g1:o},{self.g2:o})"


@dataclass(frozen=True)
class Trellis:
    """Controller-canonical trellis of a rate-1/2 code.

    The state packs the previous K-1 input bits, most recent in the LSB;
    input u takes state s to ((s << 1) | u) & (num_states - 1).
    """

    code: GeneratorPair
    num_states: int
    next_state: np.ndarray  # (num_states, 2) int
    outputs: np.ndarray     # (num_states, 2, 2) int: [state, input] -> (c1, c2)

    def __post_init__(self):
        self.next_state.setflags(write=False)
        self.outputs.setflags(write=False)


def _parity_table(g: int, K: int) -> np.ndarray:
    w = np.arange(1 << K, dtype=np.int64)
    masked = w & g
    par = np.zeros(1 << K, dtype=np.int8)
    for b in range(K):
        par ^= ((masked >> b) & 1).astype(np.int8)
    return par


def build_trellis(code: GeneratorPair) -> Trellis:
    """Build the 2^(K-1)-state trellis of `code`."""
    K = code.K
    num_states = 1 << (K - 1)
    par1 = _parity_table(code.g1, K)
    par2 = _parity_table(code.g2, K)
    states = np.arange(num_states)
    next_state = np.empty((num_states, 2), dtype=np.int64)
    outputs = np.empty((num_states, 2, 2), dtype=np.int8)
    for u in (0, 1):
        window = (states << 1) | u
        next_state[:, u] = window & (num_states - 1)
        outputs[:, u, 0] = par1[window]
        outputs[:, u, 1] = par2[window]
    return Trellis(code, num_states, next_state, outputs)


def encode(trellis: Trellis, info_bits, terminate: bool = True) -> np.ndarray:
    """Encode an information sequence from the zero state.

    Returns a 2xN bit matrix; with terminate=True, K-1 zero tail bits are
    appended and the final state is zero.
    """
    bits = np.asarray(info_bits, dtype=np.int8)
    if bits.ndim != 1:
        raise ValueError("info_bits must be one-dimensional")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("info_bits must be 0/1")
    if terminate:
        bits = np.concatenate([bits, np.zeros(trellis.code.memory, dtype=np.int8)])
    out = np.empty((2, bits.size), dtype=np.int8)
    state = 0
    for t, u in enumerate(bits):
        out[:, t] = trellis.outputs[state, u]
        state = trellis.next_state[state, u]
    return out


def encode_batch(trellis: Trellis, info_bits: np.ndarray, terminate: bool = True) -> np.ndarray:
    """Vectorized encoder for a (B, N) batch of information sequences."""
    bits = np.asarray(info_bits, dtype=np.int64)
    if terminate:
        tail = np.zeros((bits.shape[0], trellis.code.memory), dtype=np.int64)
        bits = np.concatenate([bits, tail], axis=1)
    B, N = bits.shape
    par1 = _parity_table(trellis.code.g1, trellis.code.K)
    par2 = _parity_table(trellis.code.g2, trellis.code.K)
    mask = trellis.num_states - 1
    out = np.empty((B, 2, N), dtype=np.int8)
    state = np.zeros(B, dtype=np.int64)
    for t in range(N):
        window = (state << 1) | bits[:, t]
        out[:, 0, t] = par1[window]
        out[:, 1, t] = par2[window]
        state = window & mask
    return out
