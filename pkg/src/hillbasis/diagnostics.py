"""Finite-window functional-analytic evidence: Gram conditioning, angles,
uniform minimality, and the shared decay-regression utility.

Finite sections cannot prove basis properties; every report here is labeled
evidence for the window it was computed on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .operator import eig_dense
from .spectrum import NormalEigenPair, PairClass

GROWTH_CAP = 1.5
SINGULAR_CAP = 1e14
DEGENERATE_ALPHA = 1e-12
MINIMALITY_CAP = 1e3


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (ln x, ln y)."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    slope: float
    intercept: float
    r2: float


def fit_decay(xs, ys) -> SlopeFit:
    """Log-log regression used to test every decay-rate claim.

    Needs at least 6 strictly positive points.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 6:
        raise InvalidInputError(f"need at least 6 points, got {xs.size}")
    if np.any(ys <= 0) or np.any(xs <= 0):
        raise InvalidInputError("fit_decay needs strictly positive data")
    lx, ly = np.log(xs), np.log(ys)
    a = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(a, ly, rcond=None)
    fitted = a @ coef
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return SlopeFit(xs=tuple(map(float, xs)), ys=tuple(map(float, ys)),
                    slope=float(coef[0]), intercept=float(coef[1]), r2=r2)


@dataclass(frozen=True)
class GramReport:
    """Spectral condition number of the window's Gram matrix, with growth."""

    window: tuple[int, int]
    cond: float
    growth: tuple[tuple[tuple[int, int], float], ...]
    bounded: bool
    effectively_dependent: bool
    excluded: tuple[int, ...]  # pairs skipped because their chain solve failed


def _window_vectors(pairs: list[NormalEigenPair], lo: int, hi: int):
    vecs, excluded = [], []
    for p in pairs:
        if not lo <= p.n <= hi:
            continue
        if p.jordan_failed:
            excluded.append(p.n)
            continue
        vecs.append(p.phi_plus)
        vecs.append(p.phi_minus)
    return vecs, excluded


def _gram_cond(vecs) -> float:
    g = np.array([[np.vdot(b, a) for b in vecs] for a in vecs], dtype=complex)
    ev = np.sort(eig_dense(g).eigenvalues.real)
    low = max(float(ev[0]), 0.0)
    high = float(ev[-1])
    if low <= high / SINGULAR_CAP:
        return float("inf")
    return high / low


def gram_condition(pairs: list[NormalEigenPair], window: tuple[int, int]) -> GramReport:
    """Condition number of the Gram matrix of the normal system on the window.

    Uses full coefficient vectors (truncation-space inner products), so the
    result is exact in the discretized model. The associated functions enter
    with the norms the chain construction gives them; their growth is what a
    degenerating system shows. Nested half-windows expose the growth trend.
    """
    lo, hi = window
    vecs, excluded = _window_vectors(pairs, lo, hi)
    if not vecs:
        raise InvalidInputError(f"no usable pairs in window [{lo}, {hi}]")
    cond = _gram_cond(vecs)
    growth = []
    sub_hi = lo + (hi - lo) // 2
    if sub_hi < hi:
        sub_vecs, _ = _window_vectors(pairs, lo, sub_hi)
        if sub_vecs:
            growth.append(((lo, sub_hi), _gram_cond(sub_vecs)))
    growth.append(((lo, hi), cond))
    bounded = True
    if len(growth) == 2 and growth[0][1] > 0:
        bounded = (cond / growth[0][1] <= GROWTH_CAP) and math.isfinite(cond)
    return GramReport(window=(lo, hi), cond=cond, growth=tuple(growth),
                      bounded=bounded,
                      effectively_dependent=not math.isfinite(cond) or cond > SINGULAR_CAP,
                      excluded=tuple(excluded))


def pair_angle(pair: NormalEigenPair) -> float:
    """Principal angle between the spans of the two functions of the pair.

    Invariant under unimodular rescaling of either function.
    """
    v1, v2 = pair.phi_plus, pair.phi_minus
    c = abs(np.vdot(v1, v2)) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    return float(math.acos(min(1.0, c)))


@dataclass(frozen=True)
class MinimalityReport:
    """|alpha_n|^{-1} per pair: the biorthogonal norm products.

    For a unit eigenfunction the biorthogonal partner is conj(phi)/alpha, so
    the norm product is |alpha|^{-1}; boundedness is necessary for a basis.
    """

    ns: tuple[int, ...]
    values: tuple[float, ...]
    degenerate_ns: tuple[int, ...]
    uniformly_minimal: bool
    cap: float


def uniform_minimality(pairs: list[NormalEigenPair], window: tuple[int, int],
                       cap: float = MINIMALITY_CAP) -> MinimalityReport:
    """Norm products of the biorthogonal system on the window.

    Pairs with |alpha_n| below the degeneracy floor are flagged (consistent
    with a nearby Jordan chain) and excluded from the boundedness check.
    """
    lo, hi = window
    ns, values, degenerate = [], [], []
    for p in pairs:
        if not lo <= p.n <= hi:
            continue
        if p.pair_class is PairClass.SEMISIMPLE_DOUBLE:
            continue
        a = abs(p.alpha_n)
        if a < DEGENERATE_ALPHA:
            degenerate.append(p.n)
            continue
        ns.append(p.n)
        values.append(1.0 / a)
    minimal = bool(values) and max(values) <= cap and not degenerate
    return MinimalityReport(ns=tuple(ns), values=tuple(values),
                            degenerate_ns=tuple(degenerate),
                            uniformly_minimal=minimal, cap=cap)
