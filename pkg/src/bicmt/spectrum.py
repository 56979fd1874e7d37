"""Distance spectra of rate-1/2 convolutional codes over error-event classes.

An error event is a trellis path diverging from the zero state and first
remerging with it.  Its 2xT codeword matrix is classified by column
patterns: w1 columns equal to [1,0], w2 columns equal to [0,1] and wSigma
columns equal to [1,1].  The table accumulates, per class, the number of
events and the cumulative input Hamming weight (beta).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, Iterator, NamedTuple, Tuple

import numpy as np

from .trellis import GeneratorPair, build_trellis


class SpectrumError(Exception):
    pass


class CatastrophicCodeError(SpectrumError):
    pass


class ClassKey(NamedTuple):
    w1: int
    w2: int
    wSigma: int

    @property
    def hamming_weight(self) -> int:
        return self.w1 + self.w2 + 2 * self.wSigma

    @property
    def bicmt_metric(self) -> int:
        """The exponent-controlling combination w1 + w2 + 4*wSigma."""
        return self.w1 + self.w2 + 4 * self.wSigma

    @property
    def generalized(self) -> Tuple[int, int]:
        """Per-row Hamming weights (ov_w1, ov_w2)."""
        return (self.w1 + self.wSigma, self.w2 + self.wSigma)


@dataclass(frozen=True)
class TruncationRule:
    """Spectrum truncation: either max(w, w1, w2, wSigma) <= cap, or
    w1 + w2 + 4*wSigma <= cap."""

    mode: str  # "per-weight-cap" | "linear-combination-cap"
    cap: int

    def __post_init__(self):
        if self.mode not in ("per-weight-cap", "linear-combination-cap"):
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        if self.cap < 1:
            raise ValueError("cap must be positive")

    def admits(self, key: ClassKey) -> bool:
        if self.mode == "per-weight-cap":
            return max(key.hamming_weight, key.w1, key.w2, key.wSigma) <= self.cap
        return key.bicmt_metric <= self.cap


class Entry(NamedTuple):
    beta: int   # cumulative input Hamming weight over events in the class
    count: int  # number of events


@dataclass(frozen=True)
class SpectrumTable:
    code: GeneratorPair
    truncation: TruncationRule
    entries: Dict[ClassKey, Entry]

    def __iter__(self) -> Iterator[Tuple[ClassKey, Entry]]:
        return iter(sorted(self.entries.items()))

    @property
    def d_free(self) -> int:
        return min(k.hamming_weight for k in self.entries)

    @property
    def A(self) -> int:
        """Minimum of w1 + w2 + 4*wSigma over populated classes."""
        return min(k.bicmt_metric for k in self.entries)

    @property
    def M(self) -> float:
        """Sum of beta * (1/2)^w1 over classes achieving A (exact dyadic)."""
        A = self.A
        return sum(e.beta * 0.5 ** k.w1
                   for k, e in self.entries.items() if k.bicmt_metric == A)

    def beta_classical(self) -> Dict[int, int]:
        """Marginalize to the classical spectrum beta_w, w = w1 + w2 + 2*wSigma."""
        out: Dict[int, int] = {}
        for k, e in self.entries.items():
            out[k.hamming_weight] = out.get(k.hamming_weight, 0) + e.beta
        return out

    def beta_generalized(self) -> Dict[Tuple[int, int], int]:
        """Marginalize to the per-row spectrum beta_{ov_w1, ov_w2}."""
        out: Dict[Tuple[int, int], int] = {}
        for k, e in self.entries.items():
            gk = k.generalized
            out[gk] = out.get(gk, 0) + e.beta
        return out

    @property
    def beta_dfree(self) -> int:
        return self.beta_classical()[self.d_free]

    def to_rows(self):
        return [(k.w1, k.w2, k.wSigma, e.beta, e.count) for k, e in self]

    def to_json(self) -> str:
        return json.dumps({
            "code": self.code.octal_str(),
            "truncation": {"mode": self.truncation.mode, "cap": self.truncation.cap},
            "d_free": self.d_free,
            "beta_dfree": self.beta_dfree,
            "A": self.A,
            "M": self.M,
            "entries": [{"w1": w1, "w2": w2, "wSigma": ws, "beta": b, "count": c}
                        for (w1, w2, ws, b, c) in self.to_rows()],
        }, indent=2)


def classify_codeword(E) -> ClassKey:
    """Classify a 2xT bit matrix by its column patterns; zero columns ignored."""
    E = np.asarray(E, dtype=np.int64)
    if E.ndim != 2 or E.shape[0] != 2 or E.shape[1] == 0:
        raise ValueError("E must be a nonempty 2xT matrix")
    r1, r2 = E[0].astype(bool), E[1].astype(bool)
    return ClassKey(int(np.sum(r1 & ~r2)), int(np.sum(~r1 & r2)), int(np.sum(r1 & r2)))


def _array_dims(rule: TruncationRule) -> Tuple[int, int, int]:
    cap = rule.cap
    if rule.mode == "per-weight-cap":
        return cap + 1, cap + 1, cap // 2 + 1
    return cap + 1, cap + 1, cap // 4 + 1


def _admissible_mask(rule: TruncationRule, dims) -> np.ndarray:
    n1, n2, ns = dims
    W1, W2, WS = np.indices((n1, n2, ns))
    if rule.mode == "per-weight-cap":
        return W1 + W2 + 2 * WS <= rule.cap
    return W1 + W2 + 4 * WS <= rule.cap


def enumerate_spectrum(code: GeneratorPair, rule: TruncationRule,
                       max_steps: int | None = None) -> SpectrumTable:
    """Enumerate all simple error events within the truncation rule.

    Breadth-first over trellis steps; the frontier per state holds, for every
    partial class (w1, w2, wSigma), the path count and cumulative input
    weight.  Weights only grow along a path, so pruning by the cap is exact.
    """
    if code.catastrophic:
        raise CatastrophicCodeError(
            f"{code.octal_str()} is catastrophic; spectrum enumeration would not terminate")
    tr = build_trellis(code)
    S = tr.num_states
    dims = _array_dims(rule)
    mask = _admissible_mask(rule, dims)

    # channels: [..., 0] = count, [..., 1] = beta
    frontier = np.zeros((S,) + dims + (2,), dtype=np.int64)
    table = np.zeros(dims + (2,), dtype=np.int64)

    col_shift = {(0, 0): None, (1, 0): 0, (0, 1): 1, (1, 1): 2}

    def add_shifted(dst: np.ndarray, src: np.ndarray, c1: int, c2: int) -> None:
        axis = col_shift[(c1, c2)]
        if axis is None:
            dst += src
        elif axis == 0:
            dst[1:, :, :] += src[:-1, :, :]
        elif axis == 1:
            dst[:, 1:, :] += src[:, :-1, :]
        else:
            dst[:, :, 1:] += src[:, :, :-1]

    # First step out of the zero state (input 1; input 0 stays at zero).
    n0 = int(tr.next_state[0, 1])
    c1, c2 = (int(b) for b in tr.outputs[0, 1])
    seed = np.zeros(dims + (2,), dtype=np.int64)
    seed[0, 0, 0] = (1, 1)  # one path, input weight 1
    add_shifted(frontier[n0], seed, c1, c2)
    frontier[n0] *= mask[..., None]

    if max_steps is None:
        max_steps = 8 * S * (rule.cap + 2)
    for _ in range(max_steps):
        if not frontier.any():
            break
        new = np.zeros_like(frontier)
        for p in range(1, S):
            blk = frontier[p]
            if not blk.any():
                continue
            for u in (0, 1):
                contrib = blk.copy()
                if u == 1:
                    contrib[..., 1] += contrib[..., 0]
                n = int(tr.next_state[p, u])
                c1, c2 = (int(b) for b in tr.outputs[p, u])
                dst = table if n == 0 else new[n]
                add_shifted(dst, contrib, c1, c2)
        new *= mask[..., None]
        frontier = new
    else:
        raise SpectrumError("enumeration did not terminate (step guard hit)")

    table *= mask[..., None]
    entries: Dict[ClassKey, Entry] = {}
    for w1, w2, ws in zip(*np.nonzero(table[..., 0])):
        entries[ClassKey(int(w1), int(w2), int(ws))] = Entry(
            int(table[w1, w2, ws, 1]), int(table[w1, w2, ws, 0]))
    if not entries:
        raise SpectrumError(
            f"no error event of {code.octal_str()} fits inside the cap ({rule.mode} {rule.cap})")
    return SpectrumTable(code, rule, entries)
