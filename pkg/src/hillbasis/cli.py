"""Command-line front end: spectrum / criteria / verify / scan.

Exit codes: 0 ok, 1 usage or config error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import acceptance, criteria as crit, diagnostics as diag, reports
from .config import RunConfig, load_config
from .errors import (HillBasisError, IntegrationOverflowError, InvalidInputError,
                     NumericalFailureError, PairingAmbiguityError,
                     PreconditionError, ResonanceError, RootIsolationError,
                     TruncationRiskError)
from .operator import BoundaryClass, assemble, eigendecompose
from .oracle import find_pair, scan as oracle_scan
from .potential import PotentialSpec, derive_qs, fourier_coefficients
from .series import b1_closed_form, balance_residual, series_bundle
from .spectrum import PairClass, build_normal_system

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

_CONFIG_ERRORS = (InvalidInputError, TruncationRiskError, PreconditionError)
_NUMERICAL_ERRORS = (NumericalFailureError, PairingAmbiguityError,
                     ResonanceError, IntegrationOverflowError,
                     RootIsolationError)


def _load_potential(cfg: RunConfig) -> PotentialSpec:
    if cfg.potential is None:
        raise InvalidInputError("no potential configured (set 'potential' in --config)")
    return PotentialSpec.from_json(cfg.potential)


def _mode_budget(spec: PotentialSpec, wanted: int) -> int:
    if spec.kind == "sampled":
        return min(wanted, spec.sample_count // 4)
    return min(wanted, max(1, spec.coeffs.support_bound))


def _spectrum_pipeline(cfg: RunConfig, spec: PotentialSpec):
    bc = BoundaryClass(float(cfg.alpha))
    q = fourier_coefficients(spec, _mode_budget(spec, 2 * cfg.trunc))
    op = assemble(q, bc, cfg.trunc)
    decomp = eigendecompose(op)
    pairs, head = build_normal_system(decomp, bc, cfg.window[1])
    return bc, q, op, pairs, head


def cmd_spectrum(cfg: RunConfig, argv_echo: str = "") -> int:
    cfg.validate()
    spec = _load_potential(cfg)
    bc, q, op, pairs, head = _spectrum_pipeline(cfg, spec)
    h = cfg.hash()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "spectrum.csv").write_text(
        reports.spectrum_csv(pairs, head, h, gnuplot=cfg.gnuplot))
    lo, hi = cfg.window
    oracle_rows, agree_rows = [], []
    by_n = {p.n: p for p in pairs}
    for n in range(lo, hi + 1):
        o1, o2 = find_pair(spec, bc, n)
        oracle_rows.append((n, o1, o2))
        p = by_n[n]
        gal = sorted([p.lambda_plus, p.lambda_minus], key=lambda z: (z.real, z.imag))
        direct = max(abs(gal[0] - o1), abs(gal[1] - o2))
        swapped = max(abs(gal[0] - o2), abs(gal[1] - o1))
        agree_rows.append((n, min(direct, swapped)))
    (out / "oracle.csv").write_text(reports.oracle_csv(oracle_rows, h))
    (out / "agreement.csv").write_text(reports.agreement_csv(agree_rows, h))
    print(f"spectrum: {len(pairs)} pairs, window [{lo}, {hi}], "
          f"max disagreement {max(d for _, d in agree_rows):.3e}")
    return EXIT_OK


def cmd_criteria(cfg: RunConfig) -> int:
    cfg.validate()
    spec = _load_potential(cfg)
    bc, q_op, op, pairs, head = _spectrum_pipeline(cfg, spec)
    lo, hi = cfg.window
    m = cfg.resolved_order()
    q = fourier_coefficients(spec, _mode_budget(spec, max(8 * hi, 2 * cfg.trunc)))
    derived = derive_qs(q)
    cutoff = min(64, q.support_bound) if q.support_bound else 64
    bundles = {p.n: series_bundle(q, p.lambda_plus, p.n, m, cutoff=cutoff)
               for p in pairs if lo <= p.n <= hi}
    results = [
        crit.check_t1(pairs, cfg.window),
        crit.check_t2(pairs, bundles, q, cfg.window, m),
        crit.check_t3(derived, cfg.window, cfg.smooth, cfg.epsilon),
        crit.check_c1(q, cfg.window, cfg.smooth, cfg.epsilon),
    ]
    if cfg.jump is not None:
        results.append(crit.check_c2(q, cfg.window, cfg.smooth, cfg.jump))
    else:
        results.append(crit.CriterionReport(
            "C2", False, "no endpoint-jump metadata supplied",
            crit.INCONCLUSIVE, cfg.window))
    results.append(crit.check_t4(derived, cfg.window, cfg.smooth, cfg.epsilon, "a"))
    results.append(crit.check_t4(derived, cfg.window, cfg.smooth, cfg.epsilon, "b"))
    if cfg.jump is not None:
        results.append(crit.check_t4c(q, cfg.window, cfg.smooth, cfg.jump))
    else:
        results.append(crit.CriterionReport(
            "T4c", False, "no endpoint-jump metadata supplied",
            crit.INCONCLUSIVE, cfg.window))
    h = cfg.hash()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "criteria.json").write_text(reports.criteria_json(results, h))
    closed = {n: (b1_closed_form(derived, n, "plain"),
                  b1_closed_form(derived, n, "primed")) for n in bundles}
    residuals = {}
    by_n = {p.n: p for p in pairs}
    for n, b in bundles.items():
        p = by_n[n]
        if p.is_simple:
            residuals[n] = balance_residual(p, b, q)
    (out / "series.csv").write_text(reports.series_csv(bundles, closed, residuals, h))
    diag_rows = []
    for p in pairs:
        if lo <= p.n <= hi:
            inv = None
            if p.pair_class is not PairClass.SEMISIMPLE_DOUBLE \
                    and abs(p.alpha_n) > 0:
                inv = 1.0 / abs(p.alpha_n)
            diag_rows.append((p.n, diag.pair_angle(p), inv))
    (out / "diagnostics.csv").write_text(reports.diagnostics_csv(diag_rows, h))
    try:
        gram = diag.gram_condition(pairs, cfg.window)
        (out / "gram.json").write_text(reports.gram_json(gram, h))
    except InvalidInputError:
        pass  # empty usable window: no Gram report
    for r in results:
        print(f"{r.theorem}: applicable={r.applicable} verdict={r.verdict} ({r.reason})")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    # overridden truncation/window must still honor the trust rule; report the
    # violation as a failed verification item rather than a config error
    items = []
    if cfg.window[1] > cfg.trunc / 4:
        items.append({"id": 0, "title": "truncation-trust precondition",
                      "passed": False,
                      "details": {"reason": f"truncation-trust violation: window top "
                                            f"{cfg.window[1]} exceeds N/4 = {cfg.trunc / 4}"}})
        results = []
    else:
        if cfg.potential is not None:
            _load_potential(cfg)  # surface config errors (exit 1) before the suite
        results = acceptance.run_all()
        items.extend(r.to_json_dict() for r in results)
    h = cfg.hash()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.json").write_text(reports.verify_json(items, h))
    for r in results:
        print(r.line() + f"  ({r.elapsed:.2f}s)")
    for item in items:
        if item["id"] == 0:
            print(f"[FAIL] {item['title']}: {item['details']['reason']}")
    ok = all(item["passed"] for item in items)
    print("verification " + ("PASSED" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_scan(cfg: RunConfig, lo: float, hi: float, count: int, steps: int) -> int:
    spec = _load_potential(cfg)
    lams = np.linspace(lo, hi, count).astype(complex)
    points = oracle_scan(spec, lams, steps)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scan.csv").write_text(reports.scan_csv(points, cfg.hash()))
    print(f"scan: {count} points in [{lo}, {hi}] written to {out / 'scan.csv'}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hillbasis",
        description="Spectral basis diagnostics for -y'' + q(x) y with "
                    "periodic/antiperiodic boundary conditions")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None, help="run config JSON")
        p.add_argument("--alpha", type=int, choices=(0, 1), default=None)
        p.add_argument("--trunc", type=int, default=None, metavar="N")
        p.add_argument("--window", type=str, default=None, metavar="LO:HI")
        p.add_argument("--order", type=int, default=None, metavar="M")
        p.add_argument("--smooth", type=int, default=None, metavar="S")
        p.add_argument("--epsilon", type=float, default=None, metavar="X")
        p.add_argument("--out", type=str, default=None, metavar="DIR")
        p.add_argument("--gnuplot-compatible", action="store_true")

    p_spec = sub.add_parser("spectrum", help="paired spectrum + oracle cross-check")
    common(p_spec)
    p_spec.add_argument("--dump-matrix", action="store_true",
                        help="also write the assembled matrix as CSV")
    p_crit = sub.add_parser("criteria", help="basis-criterion reports")
    common(p_crit)
    p_ver = sub.add_parser("verify", help="run the acceptance suite")
    common(p_ver)
    p_scan = sub.add_parser("scan", help="discriminant values on a lambda grid")
    common(p_scan)
    p_scan.add_argument("--lo", type=float, default=0.0)
    p_scan.add_argument("--hi", type=float, default=100.0)
    p_scan.add_argument("--count", type=int, default=101)
    p_scan.add_argument("--steps", type=int, default=2048)
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.alpha is not None:
        cfg.alpha = args.alpha
    if args.trunc is not None:
        cfg.trunc = args.trunc
    if args.window is not None:
        try:
            lo, hi = args.window.split(":")
            cfg.window = (int(lo), int(hi))
        except ValueError as e:
            raise InvalidInputError(f"bad --window {args.window!r}, want LO:HI") from e
    if args.order is not None:
        cfg.order = args.order
    if args.smooth is not None:
        cfg.smooth = args.smooth
    if args.epsilon is not None:
        cfg.epsilon = args.epsilon
    if args.out is not None:
        cfg.out_dir = args.out
    if args.gnuplot_compatible:
        cfg.gnuplot = True
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "spectrum":
            code = cmd_spectrum(cfg)
            if code == EXIT_OK and args.dump_matrix:
                spec = _load_potential(cfg)
                bc = BoundaryClass(float(cfg.alpha))
                q = fourier_coefficients(spec, _mode_budget(spec, 2 * cfg.trunc))
                op = assemble(q, bc, cfg.trunc)
                Path(cfg.out_dir, "matrix.csv").write_text(
                    reports.matrix_csv(op.matrix, cfg.hash()))
            return code
        if args.command == "criteria":
            return cmd_criteria(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "scan":
            return cmd_scan(cfg, args.lo, args.hi, args.count, args.steps)
        raise InvalidInputError(f"unknown command {args.command!r}")
    except _CONFIG_ERRORS as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HillBasisError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
