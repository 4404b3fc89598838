"""Multi-index perturbation sums attached to pair n of the periodic problem.

Order-k terms come in two families and two variants. With sigma_p the running
sum of the summation indices n_1..n_p, the plain variant uses denominators
lambda - (2 pi (n - sigma_p))^2 and forbids sigma_p in {0, 2n}; the primed
variant uses lambda - (2 pi (n + sigma_p))^2 and forbids sigma_p in {0, -2n}.
The numerator is q_{n_1} ... q_{n_k} times a closing coefficient:

    family "a":  q_{-sigma_k}
    family "b":  q_{2n - sigma_k}   (plain)   /   q_{-2n - sigma_k}   (primed)

For a trig polynomial of degree d and cutoff >= d the admissible index set is
finite and the computed sum is the full series value (tail_bound = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResonanceError
from .potential import DerivedFunctions, FourierSeries

_TWO_PI = 2.0 * math.pi
MAX_ORDER = 4
RESONANCE_REL = 1e-12


@dataclass(frozen=True)
class SeriesValue:
    """One order-k term value with enumeration metadata."""

    k: int
    family: str  # "a" | "b"
    variant: str  # "plain" | "primed"
    value: complex
    terms_summed: int
    tail_bound: float


@dataclass(frozen=True)
class SeriesBundle:
    """Partial sums through order m at a fixed (n, lambda)."""

    n: int
    lam: complex
    m: int
    cutoff: int
    A: complex
    B: complex
    A_prime: complex
    B_prime: complex
    a_terms: tuple[SeriesValue, ...]
    b_terms: tuple[SeriesValue, ...]
    a_prime_terms: tuple[SeriesValue, ...]
    b_prime_terms: tuple[SeriesValue, ...]


def series_term(q: FourierSeries, lam: complex, n: int, k: int,
                variant: str = "plain", cutoff: int = 64,
                family: str = "b") -> SeriesValue:
    """Exact finite sum of the order-k term over indices |n_p| <= cutoff.

    Raises ResonanceError if an admissible denominator falls below
    1e-12 * (2 pi n)^2; the index constraints keep true denominators away
    from zero whenever lambda sits in the localization disk of pair n.
    """
    if n < 1:
        raise InvalidInputError(f"pair index must be >= 1, got {n}")
    if k < 1:
        raise InvalidInputError(f"order must be >= 1, got {k}")
    if k > MAX_ORDER:
        raise InvalidInputError(
            f"order {k} rejected: cost grows like (2 cutoff)^k, max is {MAX_ORDER}")
    if variant not in ("plain", "primed"):
        raise InvalidInputError(f"unknown variant {variant!r}")
    if family not in ("a", "b"):
        raise InvalidInputError(f"unknown family {family!r}")
    primed = variant == "primed"
    forbidden = -2 * n if primed else 2 * n
    guard = RESONANCE_REL * (_TWO_PI * n) ** 2
    modes = [m for m in q.support if m != 0 and abs(m) <= cutoff]
    total = 0j
    count = 0

    def close_index(sigma: int) -> int:
        if family == "a":
            return -sigma
        return (-2 * n - sigma) if primed else (2 * n - sigma)

    def descend(depth: int, sigma: int, prod: complex):
        nonlocal total, count
        if depth == k:
            c = q[close_index(sigma)]
            if c != 0:
                total += prod * c
                count += 1
            return
        for m in modes:
            s = sigma + m
            if s == 0 or s == forbidden:
                continue
            freq = (n + s) if primed else (n - s)
            den = lam - (_TWO_PI * freq) ** 2
            if abs(den) < guard:
                raise ResonanceError(
                    f"denominator {den} below guard at n={n}, k={k}, sigma={s}")
            descend(depth + 1, s, prod * q[m] / den)

    descend(0, 0, 1.0 + 0j)
    return SeriesValue(k=k, family=family, variant=variant, value=total,
                       terms_summed=count, tail_bound=_tail_bound(q, n, k, cutoff))


def _tail_bound(q: FourierSeries, n: int, k: int, cutoff: int) -> float:
    """Crude upper estimate of the mass dropped by the index cutoff.

    Zero when the cutoff covers the whole support (exact sum); otherwise each
    dropped multi-index has at least one factor from the tail and k
    denominators of size at least ~2 pi^2 (2n - 1).
    """
    if cutoff >= q.support_bound:
        return 0.0
    tail = sum(abs(v) for m, v in q.coeffs.items() if abs(m) > cutoff)
    full = q.l1
    qmax = max(abs(v) for v in q.coeffs.values())
    den_min = 2.0 * math.pi**2 * max(1, 2 * n - 1)
    return float(k * tail * full ** (k - 1) * qmax / den_min**k)


def series_bundle(q: FourierSeries, lam: complex, n: int, m: int,
                  cutoff: int = 64) -> SeriesBundle:
    """All four families through order m with their partial sums.

    m = 0 gives empty sums; the per-order values are kept so decay in n can
    be regressed order by order.
    """
    if m < 0:
        raise InvalidInputError(f"order must be >= 0, got {m}")
    if m > MAX_ORDER:
        raise InvalidInputError(f"order {m} exceeds the maximum {MAX_ORDER}")
    store: dict[str, list[SeriesValue]] = {
        "a": [], "b": [], "a_prime": [], "b_prime": []}
    for k in range(1, m + 1):
        store["a"].append(series_term(q, lam, n, k, "plain", cutoff, "a"))
        store["b"].append(series_term(q, lam, n, k, "plain", cutoff, "b"))
        store["a_prime"].append(series_term(q, lam, n, k, "primed", cutoff, "a"))
        store["b_prime"].append(series_term(q, lam, n, k, "primed", cutoff, "b"))
    tot = {key: sum((t.value for t in vals), 0j) for key, vals in store.items()}
    return SeriesBundle(
        n=n, lam=lam, m=m, cutoff=cutoff,
        A=tot["a"], B=tot["b"], A_prime=tot["a_prime"], B_prime=tot["b_prime"],
        a_terms=tuple(store["a"]), b_terms=tuple(store["b"]),
        a_prime_terms=tuple(store["a_prime"]), b_prime_terms=tuple(store["b_prime"]),
    )


def b1_closed_form(derived: DerivedFunctions, n: int, variant: str = "plain") -> complex:
    """Closed form -S_{2n} + 2 Q_0 Q_{2n} for the order-1 b term.

    The primed variant mirrors the frequency sign. Valid up to o(n^{-s-2})
    for potentials whose first s-1 derivatives match at the period ends.
    """
    if variant not in ("plain", "primed"):
        raise InvalidInputError(f"unknown variant {variant!r}")
    j = 2 * n if variant == "plain" else -2 * n
    return -derived.S[j] + 2.0 * derived.Q0 * derived.Q[j]


def balance_residual(pair, bundle: SeriesBundle, q: FourierSeries) -> complex:
    """(q_{2n} + B_m) v_n^2 - (q_{-2n} + B'_m) u_n^2 for a simple pair.

    Decays like ln^{m+1} n / n^{m+1} when u, v, lambda are exact; the decay
    rate of the computed residual is the artifact's consistency check.
    """
    n = pair.n
    u, v = pair.u_plus, pair.v_plus
    return (q[2 * n] + bundle.B) * v * v - (q[-2 * n] + bundle.B_prime) * u * u
