"""Command-line front end: spectrum dumps, bound curves, BER campaigns,
code search, and combined bound-vs-simulation reports.

Every command writes a run manifest (JSON) next to its outputs; each
output file names its manifest on the first line.  Re-running with the
same parameters reproduces bitwise-identical CSV bodies — the manifest
is the only file carrying a timestamp.

Exit codes: 0 success, 2 bad arguments (including malformed octal
generators), 3 I/O failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .trellis import GeneratorPair
from .spectrum import SpectrumError, TruncationRule, enumerate_spectrum
from .bounds import union_bound_t
from .montecarlo import VARIANTS, SimulationConfig, run_sweep
from .search import scan_all, search_aocc

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_IO = 3


def _fmt(x) -> str:
    """Locale-independent full-double-precision scalar formatting."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


@dataclass
class RunManifest:
    command: str
    params: Dict
    seed: Optional[int]
    version: str = __version__
    timestamp: str = ""
    outputs: List[str] = field(default_factory=list)

    def write(self, path: str) -> None:
        self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        with open(path, "w") as f:
            json.dump(self.__dict__, f, indent=2, sort_keys=True)
            f.write("\n")


class _Outputs:
    """Collects output files for one run and ties them to a manifest."""

    def __init__(self, out_dir: str, stem: str, command: str, params: Dict,
                 seed: Optional[int] = None):
        os.makedirs(out_dir, exist_ok=True)
        self.out_dir = out_dir
        self.stem = stem
        self.manifest = RunManifest(command=command, params=params, seed=seed)

    def path(self, suffix: str) -> str:
        return os.path.join(self.out_dir, f"{self.stem}{suffix}")

    def write_csv(self, suffix: str, header: List[str], rows) -> str:
        p = self.path(suffix)
        with open(p, "w", newline="") as f:
            f.write(f"# manifest: {self.stem}_manifest.json\n")
            f.write(",".join(header) + "\n")
            for row in rows:
                f.write(",".join(_fmt(v) for v in row) + "\n")
        self.manifest.outputs.append(os.path.basename(p))
        return p

    def write_json(self, suffix: str, payload: Dict) -> str:
        p = self.path(suffix)
        payload = {"manifest": f"{self.stem}_manifest.json", **payload}
        with open(p, "w") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
        self.manifest.outputs.append(os.path.basename(p))
        return p

    def finish(self) -> str:
        p = self.path("_manifest.json")
        self.manifest.write(p)
        return p


def _slug(code: GeneratorPair) -> str:
    return f"{code.g1:o}_{code.g2:o}"


def _parse_code(text: str) -> GeneratorPair:
    try:
        return GeneratorPair.parse(text)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BAD_ARGS) from exc


def _parse_snr(text: str) -> np.ndarray:
    """SNR grid in dB from 'start:step:stop' (or a single value)."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, step, stop = map(float, parts)
            if step <= 0 or stop < start:
                raise ValueError
            n = int(round((stop - start) / step)) + 1
            return start + step * np.arange(n)
    except ValueError:
        pass
    raise CliError(f"bad SNR range {text!r}; expected start:step:stop in dB",
                   EXIT_BAD_ARGS)


def _truncation(args) -> TruncationRule:
    if args.cap_linear is not None and args.cap_per_weight is not None:
        raise CliError("--cap-linear and --cap-per-weight are mutually exclusive",
                       EXIT_BAD_ARGS)
    if args.cap_linear is not None:
        return TruncationRule("linear-combination-cap", args.cap_linear)
    return TruncationRule("per-weight-cap", args.cap_per_weight or 30)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- commands

def cmd_spectrum(args) -> int:
    code = _parse_code(args.code)
    rule = _truncation(args)
    table = enumerate_spectrum(code, rule)
    out = _Outputs(args.out, f"spectrum_{_slug(code)}",
                   "spectrum", {"code": code.octal_str(),
                                "truncation": {"mode": rule.mode, "cap": rule.cap}})
    out.write_csv(".csv", ["w1", "w2", "wSigma", "beta", "count"],
                  sorted(table.to_rows()))
    out.write_json("_summary.json", json.loads(table.to_json()))
    out.finish()
    print(f"d_free={table.d_free} A={table.A} M={table.M} "
          f"beta_dfree={table.beta_dfree}")
    return EXIT_OK


def cmd_bound(args) -> int:
    code = _parse_code(args.code)
    rule = _truncation(args)
    snr = _parse_snr(args.snr)
    table = enumerate_spectrum(code, rule)
    res = union_bound_t(table, snr)
    out = _Outputs(args.out, f"bound_{_slug(code)}",
                   "bound", {"code": code.octal_str(), "snr": args.snr,
                             "truncation": {"mode": rule.mode, "cap": rule.cap}})
    rows = zip(res.snr_db, res.ub_t, res.ub_t_asym, res.ub_s_asym)
    out.write_csv(".csv", ["snr_db", "ub_t", "ub_t_asym", "ub_s_asym"], rows)
    out.write_json("_summary.json", json.loads(res.summary_json()))
    out.finish()
    return EXIT_OK


def _sim_config(args, code: GeneratorPair, variant: str) -> SimulationConfig:
    kwargs = dict(code=code, variant=variant, seed=args.seed)
    if args.min_errors is not None:
        kwargs["min_bit_errors"] = args.min_errors
    if args.max_bits is not None:
        kwargs["max_info_bits"] = args.max_bits
    if getattr(args, "scrambler", False):
        kwargs["scrambler"] = True
    return SimulationConfig(**kwargs)


def cmd_simulate(args) -> int:
    code = _parse_code(args.code)
    if args.variant not in VARIANTS:
        raise CliError(f"variant must be one of {VARIANTS}", EXIT_BAD_ARGS)
    snr = _parse_snr(args.snr)
    cfg = _sim_config(args, code, args.variant)
    estimates = run_sweep(cfg, snr)
    out = _Outputs(args.out,
                   f"simulate_{_slug(code)}_{args.variant}",
                   "simulate",
                   {"code": code.octal_str(), "variant": args.variant,
                    "snr": args.snr, "min_errors": cfg.min_bit_errors,
                    "max_bits": cfg.max_info_bits, "scrambler": cfg.scrambler},
                   seed=args.seed)
    rows = [(e.snr_db, e.info_bits_sent, e.bit_errors, e.ber,
             e.ci_halfwidth, int(e.reliable)) for e in estimates]
    out.write_csv(".csv", ["snr_db", "bits", "errors", "ber", "ci", "reliable"],
                  rows)
    out.finish()
    for e in estimates:
        print(f"{e.snr_db:g} dB  ber={e.ber:.4e}  errors={e.bit_errors}  "
              f"bits={e.info_bits_sent}")
    return EXIT_OK


def cmd_search(args) -> int:
    report = search_aocc(args.K)
    out = _Outputs(args.out, f"search_K{args.K}", "search", {"K": args.K})
    out.write_json(".json", json.loads(report.to_json()))
    out.finish()
    w = report.winner
    print(f"K={args.K}: ({w.g1:o},{w.g2:o}) d_free={w.d_free} A={w.A} M={w.M}")
    return EXIT_OK


def cmd_scan(args) -> int:
    records = scan_all(args.K)
    out = _Outputs(args.out, f"scan_K{args.K}", "scan", {"K": args.K})
    rows = [(f"{r.g1:o}", f"{r.g2:o}", r.d_free, r.A, r.M) for r in records]
    out.write_csv(".csv", ["g1_octal", "g2_octal", "d_free", "A", "M"], rows)
    out.finish()
    print(f"{len(records)} candidate pairs")
    return EXIT_OK


def cmd_report(args) -> int:
    code = _parse_code(args.code)
    variants = args.variant or []
    if not variants:
        raise CliError("at least one --variant is required", EXIT_BAD_ARGS)
    for v in variants:
        if v not in VARIANTS:
            raise CliError(f"variant must be one of {VARIANTS}", EXIT_BAD_ARGS)
    rule = _truncation(args)
    snr = _parse_snr(args.snr)
    bound = union_bound_t(enumerate_spectrum(code, rule), snr)

    # One simulated column per variant; a variant failing mid-sweep keeps
    # the points it completed and leaves the rest empty.
    ber_cols: Dict[str, List] = {}
    failures: Dict[str, str] = {}
    for v in variants:
        col = [""] * len(snr)
        try:
            cfg = _sim_config(args, code, v)
            for i, est in enumerate(run_sweep(cfg, snr)):
                col[i] = est.ber
        except Exception as exc:  # noqa: BLE001 - partial results are the contract
            failures[v] = str(exc)
        ber_cols[v] = col

    out = _Outputs(args.out, f"report_{_slug(code)}",
                   "report",
                   {"code": code.octal_str(), "variants": variants,
                    "snr": args.snr,
                    "truncation": {"mode": rule.mode, "cap": rule.cap}},
                   seed=args.seed)
    header = ["snr_db", "ub_t", "ub_t_asym", "ub_s_asym"] + \
             [f"ber_{v}" for v in variants]
    rows = []
    for i in range(len(snr)):
        rows.append([snr[i], bound.ub_t[i], bound.ub_t_asym[i],
                     bound.ub_s_asym[i]] + [ber_cols[v][i] for v in variants])
    out.write_csv(".csv", header, rows)
    if failures:
        out.write_json("_failures.json", {"failures": failures})
    out.finish()
    return EXIT_OK if not failures else 1


def cmd_ag(args) -> int:
    code = _parse_code(args.code)
    rule = _truncation(args)
    table = enumerate_spectrum(code, rule)
    res = union_bound_t(table, [10.0])
    out = _Outputs(args.out, f"ag_{_slug(code)}",
                   "ag", {"code": code.octal_str(),
                          "truncation": {"mode": rule.mode, "cap": rule.cap}})
    out.write_json(".json", {
        "code": code.octal_str(), "d_free": table.d_free, "A": table.A,
        "M": table.M, "ag_s_to_t_db": res.ag_s_to_t_db,
        "ag_uc_to_t_db": res.ag_uc_to_t_db,
    })
    out.finish()
    print(f"A={table.A} d_free={table.d_free} "
          f"AG_S->T={res.ag_s_to_t_db:.3f} dB AG_UC->T={res.ag_uc_to_t_db:.3f} dB")
    return EXIT_OK


# ---------------------------------------------------------------- plumbing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bicmt",
        description="Distance spectra, error bounds, code search, and BER "
                    "simulation for BICM without an interleaver.")
    p.add_argument("--json-errors", action="store_true",
                   help="emit errors as JSON on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, code=False, snr=False, caps=False, sim=False, K=False):
        sp.add_argument("--out", default=".", help="output directory")
        if code:
            sp.add_argument("--code", required=True,
                            help="octal generator pair, e.g. 5,7")
        if K:
            sp.add_argument("--K", type=int, required=True,
                            help="constraint length")
        if snr:
            sp.add_argument("--snr", required=True,
                            help="SNR grid in dB as start:step:stop")
        if caps:
            sp.add_argument("--cap-linear", type=int, default=None,
                            help="truncate by w1 + w2 + 4*wSigma <= cap")
            sp.add_argument("--cap-per-weight", type=int, default=None,
                            help="truncate by max weight coordinate <= cap")
        if sim:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--min-errors", type=int, default=None)
            sp.add_argument("--max-bits", type=int, default=None)
            sp.add_argument("--scrambler", action="store_true")

    sp = sub.add_parser("spectrum", help="dump a code's distance spectrum")
    add_common(sp, code=True, caps=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("bound", help="union and asymptotic BER bound curves")
    add_common(sp, code=True, snr=True, caps=True)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("simulate", help="Monte Carlo BER sweep")
    add_common(sp, code=True, snr=True, sim=True)
    sp.add_argument("--variant", default="T", help="T, S, M, or M-swapped")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("search", help="exhaustive asymptotically-optimum search")
    add_common(sp, K=True)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("scan", help="per-candidate (d_free, A, M) table")
    add_common(sp, K=True)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("report", help="joint bound and simulation dataset")
    add_common(sp, code=True, snr=True, caps=True, sim=True)
    sp.add_argument("--variant", action="append",
                    help="repeatable; one simulated column per variant")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("ag", help="asymptotic gains of one code")
    add_common(sp, code=True, caps=True)
    sp.set_defaults(func=cmd_ag)
    return p


def _configure_threads() -> None:
    n = os.environ.get("BICMT_THREADS")
    if n:
        try:
            import numba
            numba.set_num_threads(max(1, int(n)))
        except (ImportError, ValueError):
            pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_threads()
    try:
        return args.func(args)
    except CliError as exc:
        _report_error(args, str(exc), exc.code)
        return exc.code
    except (SpectrumError, ValueError) as exc:
        _report_error(args, str(exc), EXIT_BAD_ARGS)
        return EXIT_BAD_ARGS
    except OSError as exc:
        _report_error(args, str(exc), EXIT_IO)
        return EXIT_IO


def _report_error(args, message: str, code: int) -> None:
    if getattr(args, "json_errors", False):
        print(json.dumps({"error": message, "exit_code": code}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
