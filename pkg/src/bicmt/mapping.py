"""Gray-labeled 4-PAM mapping, max-log L-value demapping, AWGN parameters.

The constellation is the real constituent of Gray-labeled 16-QAM:
amplitudes {-3d, -d, +d, +3d} with d = 1/sqrt(5) so that the average
symbol energy is one.  The label-to-symbol bijection is
[1,1] -> -3d, [1,0] -> -d, [0,0] -> +d, [0,1] -> +3d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DELTA = 1.0 / math.sqrt(5.0)

# symbol value indexed by 2*b1 + b2
_SYMBOL_BY_BITS = np.array([DELTA, 3 * DELTA, -DELTA, -3 * DELTA])

# subsets X_{k,b}: symbols whose label has bit b at position k
X_SUBSETS = {
    (1, 0): np.array([DELTA, 3 * DELTA]),
    (1, 1): np.array([-3 * DELTA, -DELTA]),
    (2, 0): np.array([-DELTA, DELTA]),
    (2, 1): np.array([-3 * DELTA, 3 * DELTA]),
}


@dataclass(frozen=True)
class ChannelParams:
    """AWGN channel at SNR gamma = Es/N0 (linear) with Es = 1."""

    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @classmethod
    def from_db(cls, snr_db: float) -> "ChannelParams":
        return cls(10.0 ** (snr_db / 10.0))

    @property
    def N0(self) -> float:
        return 1.0 / self.gamma

    @property
    def noise_var(self) -> float:
        """Per-dimension noise variance N0/2."""
        return self.N0 / 2.0

    @property
    def delta(self) -> float:
        return DELTA

    @property
    def alpha(self) -> float:
        """4 * gamma * delta^2 = 4*gamma/5."""
        return 4.0 * self.gamma * DELTA ** 2


def constellation_energy() -> float:
    return float(np.mean(_SYMBOL_BY_BITS ** 2))


def map_symbol(bits) -> float:
    """Map a bit pair [b1, b2] to its 4-PAM amplitude."""
    b1, b2 = int(bits[0]), int(bits[1])
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValueError("bits must be 0/1")
    return float(_SYMBOL_BY_BITS[2 * b1 + b2])


def map_bits(bit_matrix: np.ndarray) -> np.ndarray:
    """Map bit columns of a (..., 2, N) array to symbols (..., N)."""
    b = np.asarray(bit_matrix)
    idx = 2 * b[..., 0, :] + b[..., 1, :]
    return _SYMBOL_BY_BITS[idx]


def maxlog_llrs(y, params: ChannelParams):
    """Max-log L-values (l1, l2) for observations y.

    l_k = gamma * [min_{x in X_{k,0}} (y-x)^2 - min_{x in X_{k,1}} (y-x)^2],
    the log-ratio Pr(b=1)/Pr(b=0); piecewise linear in y.
    """
    y = np.asarray(y, dtype=float)
    g = params.gamma
    d2 = {(k, b): np.min((y[..., None] - X_SUBSETS[k, b]) ** 2, axis=-1)
          for k in (1, 2) for b in (0, 1)}
    l1 = g * (d2[1, 0] - d2[1, 1])
    l2 = g * (d2[2, 0] - d2[2, 1])
    return l1, l2


def exact_llrs(y, params: ChannelParams):
    """True log-MAP L-values (sensitivity checks only)."""
    y = np.asarray(y, dtype=float)
    g = params.gamma

    def lse(subset):
        e = -g * (y[..., None] - subset) ** 2
        m = np.max(e, axis=-1)
        return m + np.log(np.sum(np.exp(e - m[..., None]), axis=-1))

    l1 = lse(X_SUBSETS[1, 1]) - lse(X_SUBSETS[1, 0])
    l2 = lse(X_SUBSETS[2, 1]) - lse(X_SUBSETS[2, 0])
    return l1, l2


def scramble(bits: np.ndarray, rng: np.random.Generator):
    """Randomly invert coded bits before mapping; returns (scrambled, S)."""
    bits = np.asarray(bits)
    S = rng.integers(0, 2, size=bits.shape, dtype=bits.dtype)
    return bits ^ S, S


def descramble_llrs(llrs: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Undo scrambling at the L-value level: flip signs where s = 1."""
    return np.where(S == 1, -llrs, llrs)
