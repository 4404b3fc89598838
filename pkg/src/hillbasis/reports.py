"""Serialization of pipeline results: CSV for sequences, JSON for reports.

Every output starts with a header embedding the config hash; float cells use
shortest-roundtrip repr so identical configs give byte-identical files.
"""

from __future__ import annotations

import json

from .criteria import CriterionReport
from .series import SeriesBundle
from .spectrum import CSV_HEADER, NormalEigenPair, pair_csv_row


def _fmt(x: float) -> str:
    return repr(float(x))


def spectrum_csv(pairs: list[NormalEigenPair], head: list[complex],
                 config_hash: str, gnuplot: bool = False) -> str:
    lines = [f"# config_hash={config_hash}"]
    if head:
        cells = ";".join(f"{_fmt(z.real)}{z.imag:+}j" for z in head)
        lines.append(f"# unpaired_head={cells}")
    header = CSV_HEADER.split(",")
    if gnuplot:
        # string-valued column last so "plot using i:j" works untouched
        header = [h for h in header if h != "class"] + ["class"]
    lines.append(",".join(header))
    for p in pairs:
        cells = pair_csv_row(p).split(",")
        if gnuplot:
            cls = cells.pop(5)
            cells.append(cls)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def oracle_csv(rows: list[tuple[int, complex, complex]], config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}",
             "n,re_lambda_1,im_lambda_1,re_lambda_2,im_lambda_2"]
    for n, l1, l2 in rows:
        lines.append(",".join([str(n), _fmt(l1.real), _fmt(l1.imag),
                               _fmt(l2.real), _fmt(l2.imag)]))
    return "\n".join(lines) + "\n"


def agreement_csv(rows: list[tuple[int, float]], config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}", "n,disagreement"]
    for n, d in rows:
        lines.append(f"{n},{_fmt(d)}")
    return "\n".join(lines) + "\n"


def series_csv(bundles: dict[int, SeriesBundle],
               closed: dict[int, tuple[complex, complex]],
               residuals: dict[int, complex], config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}",
             "n,m,re_B,im_B,re_B_prime,im_B_prime,"
             "re_b1_closed,im_b1_closed,re_b1_closed_primed,im_b1_closed_primed,"
             "re_residual,im_residual"]
    for n in sorted(bundles):
        b = bundles[n]
        c_plain, c_primed = closed.get(n, (0j, 0j))
        r = residuals.get(n, 0j)
        cells = [str(n), str(b.m),
                 _fmt(b.B.real), _fmt(b.B.imag),
                 _fmt(b.B_prime.real), _fmt(b.B_prime.imag),
                 _fmt(c_plain.real), _fmt(c_plain.imag),
                 _fmt(c_primed.real), _fmt(c_primed.imag),
                 _fmt(r.real), _fmt(r.imag)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def criteria_json(reports: list[CriterionReport], config_hash: str) -> str:
    doc = {"config_hash": config_hash,
           "note": "verdicts are numerical evidence at the stated window, not proof",
           "criteria": [r.to_json_dict() for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def verify_json(items: list[dict], config_hash: str) -> str:
    doc = {"config_hash": config_hash,
           "passed": all(item["passed"] for item in items),
           "items": items}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def diagnostics_csv(rows: list[tuple[int, float, float | None]],
                    config_hash: str) -> str:
    """Per-pair angle and biorthogonal norm product (blank for semisimple)."""
    lines = [f"# config_hash={config_hash}", "n,angle,inv_alpha"]
    for n, angle, inv_alpha in rows:
        cell = "" if inv_alpha is None else _fmt(inv_alpha)
        lines.append(f"{n},{_fmt(angle)},{cell}")
    return "\n".join(lines) + "\n"


def gram_json(report, config_hash: str) -> str:
    doc = {"config_hash": config_hash,
           "window": list(report.window),
           "cond": report.cond if report.cond != float("inf") else None,
           "growth": [[list(w), c if c != float("inf") else None]
                      for w, c in report.growth],
           "bounded": report.bounded,
           "effectively_dependent": report.effectively_dependent,
           "excluded_pairs": list(report.excluded)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def matrix_csv(matrix, config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}"]
    for row in matrix:
        lines.append(",".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in row))
    return "\n".join(lines) + "\n"


def scan_csv(points, config_hash: str) -> str:
    lines = [f"# config_hash={config_hash}", "re_lambda,im_lambda,re_delta,im_delta"]
    for d in points:
        lines.append(",".join([_fmt(d.lam.real), _fmt(d.lam.imag),
                               _fmt(d.delta.real), _fmt(d.delta.imag)]))
    return "\n".join(lines) + "\n"
