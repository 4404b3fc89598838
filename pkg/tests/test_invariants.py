"""Cross-module invariants that exercise the computed normal systems."""

import math

import numpy as np

from hillbasis.diagnostics import fit_decay
from hillbasis.series import series_bundle

TWO_PI = 2 * math.pi


def test_simple_pair_biorthogonality_decay(sawtooth_pairs_128):
    """The conjugation-free pairing of phi_n with phi_{-n} approaches
    u_n v_{-n} + v_n u_{-n}; the difference decays like the remainder."""
    ns, ys = [], []
    for p in sawtooth_pairs_128:
        if not (5 <= p.n <= 32 and p.is_simple):
            continue
        bilinear = complex(np.dot(p.phi_plus, p.phi_minus[::-1]))
        predicted = p.u_plus * p.v_minus + p.v_plus * p.u_minus
        ns.append(p.n)
        ys.append(abs(bilinear - predicted))
    fit = fit_decay(ns, ys)
    assert fit.slope <= -0.9


def test_classification_stable_under_refinement(ctx):
    """Doubling the truncation must not change any trusted classification."""
    for name in ("cos2", "mode1", "sawtooth"):
        small, _ = ctx.system(name, 0, 64, 10)
        large, _ = ctx.system(name, 0, 128, 10)
        for a, b in zip(small, large):
            assert a.n == b.n
            assert a.pair_class == b.pair_class, (name, a.n)


def test_eigenvalues_stable_under_refinement(ctx):
    for name in ("cos2", "sawtooth"):
        small, _ = ctx.system(name, 0, 64, 10)
        large, _ = ctx.system(name, 0, 128, 10)
        for a, b in zip(small, large):
            assert abs(a.lambda_plus - b.lambda_plus) < 1e-8
            assert abs(a.lambda_minus - b.lambda_minus) < 1e-8


def test_order_k_term_decay(ctx):
    """Per-order term magnitudes decay at least like n^{-k} up to logs."""
    pairs = [p for p in ctx.system("sawtooth", 0, 128, 32)[0]
             if 5 <= p.n <= 32 and p.is_simple]
    q = ctx.series("sawtooth", 512)
    for k in (1, 2):
        ns, ys = [], []
        for p in pairs:
            b = series_bundle(q, p.lambda_plus, p.n, k, cutoff=48)
            val = abs(b.b_terms[k - 1].value)
            if val > 0:
                ns.append(p.n)
                ys.append(val)
        fit = fit_decay(ns, ys)
        assert fit.slope <= -k + 0.3, (k, fit.slope)


def test_disk_radius_reported(sawtooth_pairs_128):
    for p in sawtooth_pairs_128:
        center = (TWO_PI * p.n) ** 2
        assert abs(p.lambda_plus - center) <= p.disk_radius + 1e-9
        assert abs(p.lambda_minus - center) <= p.disk_radius + 1e-9


def test_remainder_sup_bounds_l2(sawtooth_pairs_128):
    for p in sawtooth_pairs_128:
        assert p.remainder_sup_plus >= p.remainder_l2_plus - 1e-15
