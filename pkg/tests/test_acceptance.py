"""Acceptance gate: the eight headline checks, one test per criterion.

Each test prints a single PASS/FAIL line (visible with -s or on failure)
before asserting, so the gate reads as a checklist.
"""

import itertools
import math

import numpy as np
import pytest

from bicmt.bounds import pep_oracle, pep_t, union_bound_t
from bicmt.mapping import (
    DELTA,
    ChannelParams,
    constellation_energy,
    map_symbol,
    maxlog_llrs,
)
from bicmt.montecarlo import SimulationConfig, run_point, viterbi_decode
from bicmt.search import iter_candidates, search_aocc
from bicmt.spectrum import ClassKey, TruncationRule, enumerate_spectrum
from bicmt.trellis import GeneratorPair, build_trellis, encode


def _verdict(name, ok, detail=""):
    print(f"[{name}] {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


# Optimum-search reference: winner generators (octal), d_free, A, M per
# constraint length, plus the two asymptotic-gain columns in dB.
TABLE = {
    3: ("7,5", 5, 9, 0.50, 2.55, 2.55),
    4: ("13,17", 6, 10, 0.50, 2.22, 3.01),
    5: ("23,33", 7, 11, 0.38, 1.96, 3.42),
    6: ("45,55", 7, 13, 1.62, 2.11, 4.15),
    7: ("107,135", 9, 14, 0.50, 1.46, 4.47),
    8: ("313,235", 10, 16, 8.02, 2.04, 5.05),
}


@pytest.fixture(scope="module")
def search_reports():
    return {K: search_aocc(K) for K in range(3, 9)}


def test_criterion_1_exhaustive_search_table(search_reports):
    ok = True
    lines = []
    for K, (octal, dfree, A, M, _, _) in TABLE.items():
        w = search_reports[K].winner
        got = (f"{w.g1:o},{w.g2:o}", w.d_free, w.A)
        want = (octal, dfree, A)
        good = got == want and abs(w.M - M) <= 0.005 + 1e-12
        ok &= good
        lines.append(f"K={K} {got} M={w.M:.3f}")
    assert _verdict("1 search-table", ok, "; ".join(lines))


def test_criterion_2_asymptotic_gains(search_reports):
    ok = True
    for K, (_, _, _, _, ag_s, ag_uc) in TABLE.items():
        rep = search_reports[K]
        ok &= abs(rep.ag_s_to_t_db - ag_s) <= 0.005
        ok &= abs(rep.ag_uc_to_t_db - ag_uc) <= 0.005
    detail = " ".join(f"K={K}:{search_reports[K].ag_s_to_t_db:.2f}/"
                      f"{search_reports[K].ag_uc_to_t_db:.2f}"
                      for K in TABLE)
    assert _verdict("2 asymptotic-gains", ok, detail)


def test_criterion_3_reference_code_anchors():
    rule = TruncationRule("linear-combination-cap", 13)
    t = enumerate_spectrum(GeneratorPair.parse("5,7"), rule)
    ts = enumerate_spectrum(GeneratorPair.parse("7,5"), rule)
    at_dfree = {k: e for k, e in t.entries.items()
                if k.hamming_weight == t.d_free}
    ok = (t.d_free == 5
          and list(at_dfree) == [ClassKey(0, 1, 2)]
          and at_dfree[ClassKey(0, 1, 2)] == (1, 1)
          and (t.A, t.M) == (9, 1.0)
          and (ts.A, ts.M) == (9, 0.5))
    assert _verdict("3 anchors", ok,
                    f"d_free={t.d_free} A,M=({t.A},{t.M})/({ts.A},{ts.M})")


def test_criterion_4_closed_form_vs_oracle():
    worst = 0.0
    for gamma in (1.0, 4.0, 10.0):
        for ws in range(0, 4):
            rem = 13 - 4 * ws
            for w1 in range(rem + 1):
                for w2 in range(rem - w1 + 1):
                    if w1 + w2 + ws == 0:
                        continue
                    closed = pep_t(w1, w2, ws, gamma)
                    ref = pep_oracle(w1, w2, ws, gamma)
                    worst = max(worst, abs(closed - ref) / ref)
    ok = worst < 1e-5
    assert _verdict("4 pep-oracle", ok, f"worst rel err {worst:.2e}")


def test_criterion_5_decoder_is_ml():
    code = GeneratorPair.parse("5,7")
    tr = build_trellis(code)
    k = 12 - code.memory
    # Score all terminated codewords at once; argmax is the ML word.
    words = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.int8)
    codebook = np.stack([encode(tr, w) for w in words]).astype(float)
    rng = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(1000):
        L = rng.normal(size=(2, 12))
        best = words[int(np.argmax(np.tensordot(codebook, L, axes=2)))]
        if not (viterbi_decode(tr, L) == best).all():
            mismatches += 1
    assert _verdict("5 viterbi-ml", mismatches == 0,
                    f"{mismatches}/1000 mismatches")


def _crossing_snr(code, variant, grid, target, seed):
    pts = []
    for snr in grid:
        cfg = SimulationConfig(code=code, variant=variant, seed=seed,
                               min_bit_errors=300, max_info_bits=400_000_000)
        est = run_point(cfg, snr)
        pts.append((snr, est.ber))
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        if b0 >= target >= b1:
            f = (math.log(b0) - math.log(target)) / (math.log(b0) - math.log(b1))
            return s0 + f * (s1 - s0), pts
    raise AssertionError(f"target {target} not bracketed by {pts}")


def test_criterion_6a_ber_tracks_union_bound():
    code = GeneratorPair.parse("5,7")
    table = enumerate_spectrum(code, TruncationRule("per-weight-cap", 30))
    snr = 7.0
    ub = float(union_bound_t(table, [snr]).ub_t[0])
    assert 1e-5 <= ub <= 1e-4
    cfg = SimulationConfig(code=code, variant="T", seed=0,
                           min_bit_errors=1000, max_info_bits=400_000_000)
    est = run_point(cfg, snr)
    ok = est.bit_errors >= 100 and est.ber <= ub and est.ber >= ub / 3
    assert _verdict(
        "6a ber-vs-bound", ok,
        f"snr={snr} ub={ub:.3e} ber={est.ber:.3e} "
        f"({est.bit_errors} errors, ratio {est.ber / ub:.3f})")


def test_criterion_6b_gain_over_single_interleaver():
    code = GeneratorPair.parse("5,7")
    target = 1e-5
    snr_t, pts_t = _crossing_snr(code, "T", (7.5, 8.0), target, seed=0)
    snr_s, pts_s = _crossing_snr(code, "S", (9.0, 9.5), target, seed=0)
    gain = snr_s - snr_t
    ok = 1.5 <= gain <= 3.0
    assert _verdict("6b interleaver-gain", ok,
                    f"T@{snr_t:.2f} dB, S@{snr_s:.2f} dB, gain {gain:.2f} dB")


def _two_weight_spectrum(code, weight_cap, guard=2000):
    """Independent per-row spectrum oracle: a dynamic program over states
    carrying (count, input-weight sum) per (row-1 weight, row-2 weight)."""
    tr = build_trellis(code)
    S = tr.num_states
    n = weight_cap + 1
    cnt = np.zeros((S, n, n), dtype=np.int64)
    beta = np.zeros_like(cnt)
    out = {}

    # Seed with the diverging transition (input 1 from the zero state).
    c1, c2 = (int(v) for v in tr.outputs[0, 1])
    s1 = int(tr.next_state[0, 1])
    cnt[s1, c1, c2] = 1
    beta[s1, c1, c2] = 1
    for _ in range(guard):
        if not cnt.any():
            break
        new_cnt = np.zeros_like(cnt)
        new_beta = np.zeros_like(beta)
        for state in range(S):
            if not cnt[state].any():
                continue
            for u in (0, 1):
                nxt = int(tr.next_state[state, u])
                c1, c2 = (int(v) for v in tr.outputs[state, u])
                c = cnt[state][:n - c1, :n - c2]
                b = beta[state][:n - c1, :n - c2] + u * c
                if nxt == 0:
                    for (i, j), v in np.ndenumerate(c):
                        if v:
                            k = (i + c1, j + c2)
                            pc, pb = out.get(k, (0, 0))
                            out[k] = (pc + v, pb + b[i, j])
                else:
                    new_cnt[nxt][c1:, c2:] += c
                    new_beta[nxt][c1:, c2:] += b
        cnt, beta = new_cnt, new_beta
    else:
        raise RuntimeError("event length guard tripped")
    return {k: v for k, v in out.items() if k[0] + k[1] <= weight_cap}


def test_criterion_7_marginalization_all_short_codes():
    cap = 21
    ok = True
    checked = 0
    for K in (3, 4):
        for g1, g2 in iter_candidates(K):
            code = GeneratorPair(g1, g2, K)
            if code.catastrophic:
                continue
            table = enumerate_spectrum(code,
                                       TruncationRule("per-weight-cap", cap))
            ref2 = _two_weight_spectrum(code, cap)
            gen = table.beta_generalized()
            cnt2 = {k: c for k, (c, _) in ref2.items()}
            bet2 = {k: b for k, (_, b) in ref2.items()}
            classical = {}
            for (a, b), v in bet2.items():
                classical[a + b] = classical.get(a + b, 0) + v
            ok &= gen == bet2
            ok &= table.beta_classical() == classical
            ok &= sum(e.count for e in table.entries.values()) \
                == sum(cnt2.values())
            checked += 1
    assert _verdict("7 marginalization", ok, f"{checked} codes at cap {cap}")


def _zero_crossing_fit(e, s, params):
    """Slope/intercept of the zero-crossing linear piece of the decision
    metric for error pattern e and transmitted pair s, from the max-log
    L-values themselves."""
    breaks = [-np.inf, -2 * DELTA, 0.0, 2 * DELTA, np.inf]
    x_t = map_symbol(s)
    best = None
    for lo, hi in zip(breaks, breaks[1:]):
        a = max(lo, -6 * DELTA) + 1e-6
        bpt = min(hi, 6 * DELTA) - 1e-6
        ya = np.array([a, bpt])
        l1, l2 = maxlog_llrs(ya, params)
        lam = (e[0] * (1 - 2 * s[0]) * l1 + e[1] * (1 - 2 * s[1]) * l2)
        slope = (lam[1] - lam[0]) / (ya[1] - ya[0])
        if abs(slope) < 1e-9:
            continue
        intercept = lam[0] - slope * ya[0]
        root = -intercept / slope
        if root < lo - 1e-9 or root > hi + 1e-9:
            continue
        dist = 0.0 if lo <= x_t <= hi else min(abs(x_t - lo), abs(x_t - hi))
        if best is None or dist < best[0]:
            best = (dist, slope, intercept)
    assert best is not None, (e, s)
    return best[1], best[2]


def test_criterion_8_mapper_and_metric_tables():
    ok = abs(constellation_energy() - 1.0) <= 1e-12

    # Zero-crossing slope (units alpha/Delta) and intercept (units alpha)
    # per (pattern, transmitted pair), and the implied mean (units alpha;
    # variance is slope^2 * N0 / 2, = 2*alpha per unit slope squared).
    slope_intercept = {
        ((1, 0), (1, 1)): (+1, 0), ((1, 0), (1, 0)): (+1, 0),
        ((1, 0), (0, 0)): (-1, 0), ((1, 0), (0, 1)): (-1, 0),
        ((0, 1), (1, 1)): (+1, +2), ((0, 1), (1, 0)): (-1, -2),
        ((0, 1), (0, 0)): (+1, -2), ((0, 1), (0, 1)): (-1, +2),
        ((1, 1), (1, 1)): (+2, +2), ((1, 1), (1, 0)): (+2, -2),
        ((1, 1), (0, 0)): (-2, -2), ((1, 1), (0, 1)): (-2, +2),
    }
    mean_var = {
        ((1, 0), (1, 1)): (-3, 2), ((1, 0), (1, 0)): (-1, 2),
        ((1, 0), (0, 0)): (-1, 2), ((1, 0), (0, 1)): (-3, 2),
        ((0, 1), (1, 1)): (-1, 2), ((0, 1), (1, 0)): (-1, 2),
        ((0, 1), (0, 0)): (-1, 2), ((0, 1), (0, 1)): (-1, 2),
        ((1, 1), (1, 1)): (-4, 8), ((1, 1), (1, 0)): (-4, 8),
        ((1, 1), (0, 0)): (-4, 8), ((1, 1), (0, 1)): (-4, 8),
    }

    params = ChannelParams.from_db(6.0)
    alpha = params.alpha
    bad = []
    for (e, s), (a_ref, b_ref) in slope_intercept.items():
        slope, intercept = _zero_crossing_fit(e, s, params)
        a_units = slope * DELTA / alpha
        b_units = intercept / alpha
        if not (math.isclose(a_units, a_ref, abs_tol=1e-9)
                and math.isclose(b_units, b_ref, abs_tol=1e-9)):
            bad.append((e, s, a_units, b_units))
            continue
        mu = map_symbol(s) * slope + intercept
        var = slope ** 2 * params.N0 / 2.0
        mu_ref, var_ref = mean_var[(e, s)]
        if not (math.isclose(mu / alpha, mu_ref, abs_tol=1e-9)
                and math.isclose(var / alpha, var_ref, abs_tol=1e-9)):
            bad.append((e, s, mu / alpha, var / alpha))
    ok &= not bad
    assert _verdict("8 metric-tables", ok,
                    f"{len(slope_intercept) - len(bad)}/12 cells" +
                    (f" bad={bad}" if bad else ""))
