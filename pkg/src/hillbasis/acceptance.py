"""The acceptance suite: quantitative desk-scale checks of the whole pipeline.

Each criterion is a self-contained check returning a CriterionResult; the
AcceptanceContext caches the expensive shared objects (spectra, normal
systems, oracle grids) so the CLI verify command and the test suite reuse
one set of computations.

The default corpus:
  * cos2:        2 cos(4 pi x)            (real even trig polynomial)
  * mode1:       e^{2 pi i x}             (one-sided mode; all pairs degenerate)
  * sawtooth:    x - 1/2, sampled on 2048 points  (endpoint jump, s = 0)
  * sawtooth80:  its degree-80 trig truncation (for exact finite series)
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import criteria as crit
from . import diagnostics as diag
from .config import RunConfig
from .operator import BoundaryClass, assemble, eigendecompose
from .oracle import find_pair
from .potential import (DerivedFunctions, FourierSeries, PotentialSpec,
                        derive_qs, fourier_coefficients)
from .series import b1_closed_form, balance_residual, series_bundle, series_term
from .spectrum import NormalEigenPair, PairClass, build_normal_system

SAWTOOTH_SAMPLES = 2048


def cos2_spec() -> PotentialSpec:
    return PotentialSpec.trig({2: 1.0, -2: 1.0})


def mode1_spec() -> PotentialSpec:
    return PotentialSpec.trig({1: 1.0})


def sawtooth_spec(samples: int = SAWTOOTH_SAMPLES) -> PotentialSpec:
    j = np.arange(samples)
    return PotentialSpec.sampled(j / samples - 0.5)


def sawtooth_trig_spec(degree: int, amplitude: float = 1.0) -> PotentialSpec:
    return PotentialSpec.trig({k: amplitude * 1j / (2 * math.pi * k)
                               for k in range(-degree, degree + 1) if k != 0})


_CORPUS = {
    "cos2": cos2_spec,
    "mode1": mode1_spec,
    "sawtooth": sawtooth_spec,
    "sawtooth80": lambda: sawtooth_trig_spec(80),
    "sawtooth80x8": lambda: sawtooth_trig_spec(80, amplitude=8.0),
}


def corpus_spec(name: str) -> PotentialSpec:
    return _CORPUS[name]()


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.cid}: {self.title}"

    def to_json_dict(self) -> dict:
        # elapsed excluded: output files must be byte-identical across runs
        return {"id": self.cid, "title": self.title, "passed": self.passed,
                "details": self.details}


class AcceptanceContext:
    """Caches spectra, normal systems and coefficient series per corpus key."""

    def __init__(self):
        self._specs: dict[str, PotentialSpec] = {}
        self._series: dict = {}
        self._systems: dict = {}
        self._derived: dict = {}

    def spec(self, name: str) -> PotentialSpec:
        if name not in self._specs:
            self._specs[name] = corpus_spec(name)
        return self._specs[name]

    def series(self, name: str, n_modes: int) -> FourierSeries:
        key = (name, n_modes)
        if key not in self._series:
            self._series[key] = fourier_coefficients(self.spec(name), n_modes)
        return self._series[key]

    def derived(self, name: str, n_modes: int) -> DerivedFunctions:
        key = (name, n_modes)
        if key not in self._derived:
            self._derived[key] = derive_qs(self.series(name, n_modes))
        return self._derived[key]

    def system(self, name: str, alpha: int, half_width: int,
               n_max: int) -> tuple[list[NormalEigenPair], list[complex]]:
        key = (name, alpha, half_width, n_max)
        if key not in self._systems:
            bc = BoundaryClass(float(alpha))
            n_modes = min(2 * half_width, self._mode_cap(name))
            q = self.series(name, n_modes)
            op = assemble(q, bc, half_width)
            decomp = eigendecompose(op)
            self._systems[key] = build_normal_system(decomp, bc, n_max)
        return self._systems[key]

    def _mode_cap(self, name: str) -> int:
        spec = self.spec(name)
        if spec.kind == "sampled":
            return spec.sample_count // 4
        return max(1, spec.coeffs.support_bound)


def _slope(ns, ys) -> diag.SlopeFit:
    return diag.fit_decay(ns, ys)


# --- criterion implementations -------------------------------------------


def criterion_1(ctx: AcceptanceContext) -> CriterionResult:
    """Free operator: exact eigenvalues and semisimple doubles at N = 64."""
    t0 = time.perf_counter()
    bc = BoundaryClass.periodic()
    op = assemble(FourierSeries({}), bc, 64)
    pairs, head = build_normal_system(eigendecompose(op), bc, 16)
    worst = 0.0
    all_semisimple = True
    for p in pairs:
        center = bc.pair_center(p.n)
        for lam in (p.lambda_plus, p.lambda_minus):
            worst = max(worst, abs(lam - center) / center)
        if p.pair_class is not PairClass.SEMISIMPLE_DOUBLE:
            all_semisimple = False
    head_ok = len(head) == 1 and abs(head[0]) <= 1e-10
    elapsed = time.perf_counter() - t0
    passed = worst <= 1e-12 and all_semisimple and head_ok and elapsed < 5.0
    return CriterionResult(
        1, "free-operator exactness and semisimple pairing", passed,
        {"max_relative_error": worst, "all_semisimple": all_semisimple,
         "head_ok": head_ok, "runtime_under_5s": elapsed < 5.0},
        elapsed)


def _oracle_agreement(ctx: AcceptanceContext, name: str, alpha: int,
                      n_range) -> list[tuple[int, float]]:
    pairs, _ = ctx.system(name, alpha, 64, max(n_range))
    spec = ctx.spec(name)
    bc = BoundaryClass(float(alpha))
    by_n = {p.n: p for p in pairs}
    rows = []
    for n in n_range:
        p = by_n[n]
        gal = sorted([p.lambda_plus, p.lambda_minus], key=lambda z: (z.real, z.imag))
        orc = find_pair(spec, bc, n)
        direct = max(abs(gal[0] - orc[0]), abs(gal[1] - orc[1]))
        swapped = max(abs(gal[0] - orc[1]), abs(gal[1] - orc[0]))
        rows.append((n, min(direct, swapped)))
    return rows


def criterion_2(ctx: AcceptanceContext) -> CriterionResult:
    """Galerkin and discriminant-oracle eigenvalues agree to 1e-6."""
    t0 = time.perf_counter()
    worst = {}
    for name in ("cos2", "mode1", "sawtooth"):
        for alpha in (0, 1):
            rows = _oracle_agreement(ctx, name, alpha, range(1, 11))
            worst[f"{name}_alpha{alpha}"] = max(d for _, d in rows)
    elapsed = time.perf_counter() - t0
    passed = max(worst.values()) <= 1e-6 and elapsed < 60.0
    return CriterionResult(
        2, "oracle equivalence across the corpus", passed,
        {"max_disagreement": worst, "runtime_under_60s": elapsed < 60.0},
        elapsed)


def criterion_3(ctx: AcceptanceContext) -> CriterionResult:
    """Off-resonant remainder of the eigenfunctions decays like 1/n."""
    t0 = time.perf_counter()
    pairs, _ = ctx.system("sawtooth", 0, 128, 32)
    ns = [p.n for p in pairs if 5 <= p.n <= 32]
    ys = [p.remainder_l2_plus for p in pairs if 5 <= p.n <= 32]
    fit = _slope(ns, ys)
    passed = fit.slope <= -0.9 and fit.r2 >= 0.95
    return CriterionResult(
        3, "eigenfunction remainder decay (slope <= -0.9, r2 >= 0.95)", passed,
        {"slope": fit.slope, "r2": fit.r2}, time.perf_counter() - t0)


def criterion_4(ctx: AcceptanceContext) -> CriterionResult:
    """alpha_n - 2 u_n v_n is a second-order quantity."""
    t0 = time.perf_counter()
    pairs, _ = ctx.system("sawtooth", 0, 128, 32)
    ns, ys = [], []
    for p in pairs:
        if 5 <= p.n <= 32 and p.is_simple:
            ns.append(p.n)
            ys.append(abs(p.alpha_n - 2.0 * p.u_plus * p.v_plus))
    fit = _slope(ns, ys)
    passed = fit.slope <= -1.8
    return CriterionResult(
        4, "self-pairing second-order accuracy (slope <= -1.8)", passed,
        {"slope": fit.slope, "r2": fit.r2}, time.perf_counter() - t0)


def criterion_5(ctx: AcceptanceContext) -> CriterionResult:
    """Plain and primed A-sums agree exactly (index-substitution identity)."""
    t0 = time.perf_counter()
    worst = 0.0
    for name in ("cos2", "mode1"):
        q = ctx.series(name, 8)
        pairs, _ = ctx.system(name, 0, 64, 8)
        by_n = {p.n: p for p in pairs}
        for n in (2, 3, 5, 8):
            lam = by_n[n].lambda_plus
            for m in (1, 2, 3):
                b = series_bundle(q, lam, n, m, cutoff=8)
                scale = max(1.0, abs(b.A))
                worst = max(worst, abs(b.A - b.A_prime) / scale)
    passed = worst <= 1e-12
    return CriterionResult(
        5, "plain/primed A-sum identity to 1e-12", passed,
        {"max_relative_difference": worst}, time.perf_counter() - t0)


def criterion_6(ctx: AcceptanceContext) -> CriterionResult:
    """Balance-residual decay sharpens by at least one order from m = 0 to m = 1.

    Runs on the amplitude-8, degree-80 trig truncation of the sawtooth. The
    degree must exceed twice the window top so the resonant coefficients
    q_{2n} are present at all (a degree-8 truncation zeroes them on the whole
    window), and the amplitude lifts the order-2 residual above the
    eigensolver noise floor (~1e-10) so its slope is measurable.
    """
    t0 = time.perf_counter()
    pairs, _ = ctx.system("sawtooth80x8", 0, 128, 32)
    q = ctx.series("sawtooth80x8", 80)
    slopes = {}
    for m in (0, 1):
        ns, ys = [], []
        for p in pairs:
            if 5 <= p.n <= 32 and p.is_simple:
                b = series_bundle(q, p.lambda_plus, p.n, m, cutoff=80)
                r = abs(balance_residual(p, b, q))
                if r > 0:
                    ns.append(p.n)
                    ys.append(r)
        slopes[m] = _slope(ns, ys).slope
    passed = slopes[0] <= -0.7 and (slopes[0] - slopes[1]) >= 0.7
    return CriterionResult(
        6, "balance-residual decay orders (m = 0 vs m = 1)", passed,
        {"slope_m0": slopes[0], "slope_m1": slopes[1]}, time.perf_counter() - t0)


def criterion_7(ctx: AcceptanceContext) -> CriterionResult:
    """Order-1 series term matches its closed form to o(n^{-s-2}), s = 0."""
    t0 = time.perf_counter()
    pairs, _ = ctx.system("sawtooth", 0, 128, 32)
    q = ctx.series("sawtooth", 512)
    derived = ctx.derived("sawtooth", 512)
    ns, ys = [], []
    for p in pairs:
        if 5 <= p.n <= 32 and p.is_simple:
            b1 = series_term(q, p.lambda_plus, p.n, 1, "plain", cutoff=512, family="b")
            closed = b1_closed_form(derived, p.n, "plain")
            ns.append(p.n)
            ys.append(abs(b1.value - closed))
    fit = _slope(ns, ys)
    passed = fit.slope <= -1.7
    return CriterionResult(
        7, "closed form of the order-1 term (slope <= -1.7)", passed,
        {"slope": fit.slope, "r2": fit.r2}, time.perf_counter() - t0)


def criterion_8(ctx: AcceptanceContext) -> CriterionResult:
    """Criterion chain consistency on a basis and a no-basis potential.

    The no-basis side runs on the window [1, 2]: those are the pairs whose
    Jordan coupling (1 / |psi_n|, here ~2.5e-2 and ~4.5e-7) sits above the
    double-precision noise floor; deeper chains are numerically
    indistinguishable from semisimple doubles in any implementation.
    """
    t0 = time.perf_counter()
    details = {}
    # basis side: sampled sawtooth
    window = (5, 32)
    pairs, _ = ctx.system("sawtooth", 0, 128, 32)
    q = ctx.series("sawtooth", 512)
    derived = ctx.derived("sawtooth", 512)
    r3 = crit.check_t3(derived, window, s=0)
    bundles = {p.n: series_bundle(q, p.lambda_plus, p.n, 2, cutoff=64)
               for p in pairs if window[0] <= p.n <= window[1]}
    r2 = crit.check_t2(pairs, bundles, q, window, m=2)
    r1 = crit.check_t1(pairs, window)
    gram = diag.gram_condition(pairs, window)
    details["basis_side"] = {
        "t3": (r3.applicable, r3.verdict), "t2": (r2.applicable, r2.verdict),
        "t1": (r1.applicable, r1.verdict),
        "gram_cond": gram.cond, "gram_bounded": gram.bounded}
    basis_ok = (r3.applicable and r3.verdict == crit.BASIS
                and r2.verdict == crit.BASIS and r1.verdict == crit.BASIS
                and gram.cond < 100 and gram.bounded)
    # no-basis side: one-sided mode, certifiable chain range
    window1 = (1, 2)
    pairs1, _ = ctx.system("mode1", 0, 64, 4)
    r1b = crit.check_t1(pairs1, window1)
    gram1 = diag.gram_condition(pairs1, window1)
    minim = diag.uniform_minimality(pairs1, window1)
    details["no_basis_side"] = {
        "t1": (r1b.applicable, r1b.verdict),
        "gram_cond": gram1.cond, "gram_bounded": gram1.bounded,
        "degenerate_ns": list(minim.degenerate_ns)}
    nobasis_ok = (r1b.verdict == crit.NO_BASIS and not gram1.bounded
                  and len(minim.degenerate_ns) == 2)
    return CriterionResult(
        8, "criterion chain consistency (basis and no-basis sides)",
        basis_ok and nobasis_ok, details, time.perf_counter() - t0)


def criterion_9(ctx: AcceptanceContext) -> CriterionResult:
    """Antiperiodic branch: odd-coefficient criterion and oracle agreement."""
    t0 = time.perf_counter()
    derived = ctx.derived("sawtooth", 512)
    r4b = crit.check_t4(derived, (5, 32), s=0, part="b")
    rows = _oracle_agreement(ctx, "sawtooth", 1, range(1, 9))
    worst = max(d for _, d in rows)
    passed = r4b.applicable and r4b.verdict == crit.BASIS and worst <= 1e-6
    return CriterionResult(
        9, "antiperiodic analog (odd criterion + oracle agreement)", passed,
        {"t4b": (r4b.applicable, r4b.verdict), "max_disagreement": worst},
        time.perf_counter() - t0)


def criterion_10(ctx: AcceptanceContext) -> CriterionResult:
    """Determinism: regenerating the headline outputs is byte-identical."""
    t0 = time.perf_counter()
    from .reports import criteria_json, spectrum_csv

    cfg_hash = RunConfig().hash()
    pairs, head = ctx.system("sawtooth", 0, 64, 10)
    derived = ctx.derived("sawtooth", 512)

    def render() -> bytes:
        csv_text = spectrum_csv(pairs, head, cfg_hash)
        rep = crit.check_t3(derived, (5, 16), s=0)
        json_text = criteria_json([rep], cfg_hash)
        return (csv_text + json_text).encode()

    passed = render() == render()
    return CriterionResult(
        10, "deterministic output serialization", passed, {},
        time.perf_counter() - t0)


_CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10,
}


def run_criterion(cid: int, ctx: AcceptanceContext | None = None) -> CriterionResult:
    ctx = ctx or AcceptanceContext()
    return _CRITERIA[cid](ctx)


def run_all(ctx: AcceptanceContext | None = None,
            ids=None) -> list[CriterionResult]:
    ctx = ctx or AcceptanceContext()
    ids = ids or sorted(_CRITERIA)
    return [_CRITERIA[cid](ctx) for cid in ids]
