import math

import numpy as np
import pytest

from bicmt.bounds import (
    ZC_COEFFICIENTS,
    ZeroCrossingModel,
    asymptotic_gains,
    pep_oracle,
    pep_t,
    pep_t_log,
    qfunc,
    ub_s_asym,
    ub_t_asym,
    union_bound_t,
)
from bicmt.mapping import ChannelParams
from bicmt.spectrum import TruncationRule, enumerate_spectrum
from bicmt.trellis import GeneratorPair


def spectrum(octal, cap=30):
    return enumerate_spectrum(GeneratorPair.parse(octal),
                              TruncationRule("per-weight-cap", cap))


def test_qfunc_values():
    assert qfunc(0.0) == pytest.approx(0.5)
    assert qfunc(3.0) == pytest.approx(0.0013498980316301, rel=1e-12)
    assert float(qfunc(-np.inf)) == 1.0


def test_metric_mixtures_in_alpha_units():
    p = ChannelParams.from_db(7.0)
    a = p.alpha
    zc = ZeroCrossingModel(p)
    mix = {e: [(w, mu / a, var / a) for w, mu, var in zc.mixture(e)]
           for e in ((1, 0), (0, 1), (1, 1))}
    assert mix[(1, 0)] == [(0.5, -3.0, 2.0), (0.5, -1.0, 2.0)]
    assert mix[(0, 1)] == [(1.0, -1.0, 2.0)]
    assert mix[(1, 1)] == [(1.0, -4.0, 8.0)]


def test_pep_single_column_cases():
    gamma = 4.0
    arg = math.sqrt(2 * gamma / 5)
    # One second-row column: plain Gaussian tail at distance 1.
    assert pep_t(0, 1, 0, gamma) == pytest.approx(qfunc(arg), rel=1e-14)
    # One first-row column: equal mixture of distances 1 and 3.
    assert pep_t(1, 0, 0, gamma) == pytest.approx(
        0.5 * (qfunc(arg) + qfunc(3 * arg)), rel=1e-14)
    # One both-rows column: mean -4*alpha, variance 8*alpha -> Q(2*arg).
    assert pep_t(0, 0, 1, gamma) == pytest.approx(qfunc(2 * arg), rel=1e-12)


def test_pep_weight1_dominant_class():
    # The (0,1,2) class at gamma = 10 collapses to a single Gaussian tail.
    assert pep_t(0, 1, 2, 10.0) == pytest.approx(qfunc(6.0), rel=1e-12)


def test_pep_decreases_with_metric_and_snr():
    g = 4.0
    assert pep_t(0, 1, 2, g) > pep_t(0, 1, 3, g)
    assert pep_t(2, 1, 2, g) > pep_t(2, 1, 2, 2 * g)


def test_pep_log_consistent():
    v = pep_t(1, 2, 1, 25.0)
    assert math.exp(pep_t_log(1, 2, 1, 25.0)) == pytest.approx(v, rel=1e-12)


def test_pep_rejects_bad_classes():
    with pytest.raises(ValueError):
        pep_t(0, 0, 0, 1.0)
    with pytest.raises(ValueError):
        pep_t(-1, 0, 1, 1.0)


@pytest.mark.parametrize("cls", [(1, 0, 0), (0, 1, 0), (0, 0, 1),
                                 (2, 1, 1), (0, 1, 2), (1, 0, 2)])
@pytest.mark.parametrize("gamma", [1.0, 4.0])
def test_oracle_agreement_spot(cls, gamma):
    w1, w2, ws = cls
    assert pep_t(w1, w2, ws, gamma) == pytest.approx(
        pep_oracle(w1, w2, ws, gamma), rel=1e-5)


def test_union_bound_monotone_and_ordered():
    table = spectrum("5,7")
    res = union_bound_t(table, np.arange(4.0, 12.1, 0.5))
    assert (np.diff(res.ub_t) < 0).all()
    # The full union bound dominates its leading-term truncation.
    assert (res.ub_t >= res.ub_t_asym).all()


def test_asymptotic_ratio_tightens():
    table = spectrum("5,7")
    res = union_bound_t(table, [8.0, 14.0])
    ratios = res.ub_t / res.ub_t_asym
    assert ratios[1] < ratios[0]
    assert ratios[1] == pytest.approx(1.0, abs=0.05)


def test_asym_closed_forms():
    table = spectrum("7,5")
    gamma = 10 ** 0.9
    assert ub_t_asym(table, gamma) == pytest.approx(
        table.M * qfunc(math.sqrt(2 * gamma * table.A / 5)), rel=1e-12)
    b = table.beta_classical()[table.d_free]
    assert ub_s_asym(table, gamma) == pytest.approx(
        (3 / 4) ** table.d_free * b
        * qfunc(math.sqrt(2 * table.d_free * gamma / 5)), rel=1e-12)


def test_asymptotic_gains_formula():
    s, uc = asymptotic_gains(9, 5)
    assert s == pytest.approx(10 * math.log10(9 / 5))
    assert uc == pytest.approx(10 * math.log10(9 / 5))
    s, _ = asymptotic_gains(14, 10)
    assert s == pytest.approx(10 * math.log10(1.4))


def test_swap_reweights_multiplicity():
    # Swapping generator rows transposes (w1, w2), so the dyadic weighting
    # changes M while A and d_free are invariant.
    t, ts = spectrum("5,7", 16), spectrum("7,5", 16)
    assert (t.A, t.d_free) == (ts.A, ts.d_free)
    assert t.M == 1.0 and ts.M == 0.5


def test_zc_table_complete():
    assert len(ZC_COEFFICIENTS) == 12
    for (e, s), (a, b) in ZC_COEFFICIENTS.items():
        assert e in ((1, 0), (0, 1), (1, 1)) and len(s) == 2
        assert abs(a) in (1, 2) and b in (-2, 0, 2)
