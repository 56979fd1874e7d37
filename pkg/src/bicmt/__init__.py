"""Analysis and simulation of BICM without an interleaver (BICM-T) over AWGN.

The package computes three-parameter distance spectra of rate-1/2
convolutional codes, evaluates union and asymptotic BER bounds for
4-PAM with Gray labeling, searches for asymptotically optimum codes,
and cross-checks everything with a Monte Carlo simulator.
"""

from .trellis import (
    GeneratorPair,
    Trellis,
    build_trellis,
    encode,
    encode_batch,
)
from .spectrum import (
    CatastrophicCodeError,
    ClassKey,
    Entry,
    SpectrumError,
    SpectrumTable,
    TruncationRule,
    classify_codeword,
    enumerate_spectrum,
)
from .mapping import (
    DELTA,
    ChannelParams,
    constellation_energy,
    exact_llrs,
    map_bits,
    map_symbol,
    maxlog_llrs,
    scramble,
    descramble_llrs,
)
from .bounds import (
    BoundResult,
    OracleConvergenceError,
    ZeroCrossingModel,
    asymptotic_gains,
    pep_oracle,
    pep_t,
    qfunc,
    ub_s_asym,
    ub_t_asym,
    union_bound_t,
)
from .montecarlo import (
    BerEstimate,
    SimulationConfig,
    VARIANTS,
    demapper_bit_error_rates,
    run_point,
    run_sweep,
    viterbi_decode,
    viterbi_decode_batch,
)
from .search import (
    ODSCC,
    CandidateRecord,
    SearchReport,
    iter_candidates,
    scan_all,
    search_aocc,
)

__version__ = "0.1.0"

__all__ = [
    "GeneratorPair",
    "Trellis",
    "build_trellis",
    "encode",
    "encode_batch",
    "CatastrophicCodeError",
    "ClassKey",
    "Entry",
    "SpectrumError",
    "SpectrumTable",
    "TruncationRule",
    "classify_codeword",
    "enumerate_spectrum",
    "DELTA",
    "ChannelParams",
    "constellation_energy",
    "exact_llrs",
    "map_bits",
    "map_symbol",
    "maxlog_llrs",
    "scramble",
    "descramble_llrs",
    "BoundResult",
    "OracleConvergenceError",
    "ZeroCrossingModel",
    "asymptotic_gains",
    "pep_oracle",
    "pep_t",
    "qfunc",
    "ub_s_asym",
    "ub_t_asym",
    "union_bound_t",
    "BerEstimate",
    "SimulationConfig",
    "VARIANTS",
    "demapper_bit_error_rates",
    "run_point",
    "run_sweep",
    "viterbi_decode",
    "viterbi_decode_batch",
    "ODSCC",
    "CandidateRecord",
    "SearchReport",
    "iter_candidates",
    "scan_all",
    "search_aocc",
    "__version__",
]
