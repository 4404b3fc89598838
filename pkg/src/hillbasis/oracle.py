"""Independent eigenvalue oracle via the Floquet discriminant.

The fundamental solutions of y'' = (q(x) - lambda) y are integrated over one
period with a classical fixed-step 4th-order scheme; the discriminant is
Delta(lambda) = y1(1) + y2'(1), and (anti)periodic eigenvalues are the roots
of Delta = 2 (resp. Delta = -2). The same sweep propagates the first and
second lambda-derivatives of the fundamental system through their
variational equations, so Newton corrections need no finite differencing.

Near-double roots are located through the critical point of Delta (a simple,
well-conditioned zero of Delta'): the two roots are lambda* +- s with
s^2 = -2 (Delta(lambda*) - target) / Delta''(lambda*), polished by deflated
Newton when the split is resolvable and collapsed to the critical point when
it falls below the integration noise floor. Resolving a split below that
floor is not possible in double precision: the root displacement scales like
the square root of the discriminant error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (IntegrationOverflowError, InvalidInputError,
                     RootIsolationError)
from .operator import BoundaryClass
from .potential import PotentialSpec, pointwise_grid

_EPS = float(np.finfo(float).eps)

# find_pair step schedule: the h^4 bias must stay below the split resolution
# target |Delta''| * s * 1e-6, which forces steps ~ n^1.8; 256 n^2 gives a
# 20x margin at n = 10 and the base keeps >= 4 samples per wavelength of a
# 1024-mode interpolant.
BASE_STEPS = 4096
STEPS_PER_N2 = 256
DOUBLE_FLOOR_FACTOR = 50.0
_NEWTON_REL = 1e-11
_MAX_NEWTON = 60


@dataclass(frozen=True)
class Discriminant:
    """Discriminant value at one lambda with an integration error estimate.

    Halving the step size changes delta by less than 16 x error_estimate
    (4th-order contract).
    """

    lam: complex
    delta: complex
    step_count: int
    error_estimate: float


@njit(cache=True)
def _monodromy_sweep(lams, q_grid, q_mid, h):  # pragma: no cover - jitted
    """Fundamental system with first and second lambda-derivatives.

    q_grid[j] = q(j h) for j = 0..S, q_mid[j] = q((j + 1/2) h). Output row:
    y1, y1', y2, y2' and the first/second lambda-derivatives of each.
    """
    batch = lams.shape[0]
    steps = q_mid.shape[0]
    out = np.zeros((batch, 12), dtype=np.complex128)
    for i in range(batch):
        lam = lams[i]
        y1 = 1.0 + 0j; z1 = 0j; y2 = 0j; z2 = 1.0 + 0j
        dy1 = 0j; dz1 = 0j; dy2 = 0j; dz2 = 0j
        ey1 = 0j; ez1 = 0j; ey2 = 0j; ez2 = 0j
        for j in range(steps):
            w0 = q_grid[j] - lam
            w1 = q_mid[j] - lam
            w2 = q_grid[j + 1] - lam
            # stage 1
            a_y1 = z1; a_z1 = w0 * y1
            a_y2 = z2; a_z2 = w0 * y2
            a_dy1 = dz1; a_dz1 = w0 * dy1 - y1
            a_dy2 = dz2; a_dz2 = w0 * dy2 - y2
            a_ey1 = ez1; a_ez1 = w0 * ey1 - 2.0 * dy1
            a_ey2 = ez2; a_ez2 = w0 * ey2 - 2.0 * dy2
            # stage 2
            ty1 = y1 + 0.5 * h * a_y1; tz1 = z1 + 0.5 * h * a_z1
            ty2 = y2 + 0.5 * h * a_y2; tz2 = z2 + 0.5 * h * a_z2
            tdy1 = dy1 + 0.5 * h * a_dy1; tdz1 = dz1 + 0.5 * h * a_dz1
            tdy2 = dy2 + 0.5 * h * a_dy2; tdz2 = dz2 + 0.5 * h * a_dz2
            tey1 = ey1 + 0.5 * h * a_ey1; tez1 = ez1 + 0.5 * h * a_ez1
            tey2 = ey2 + 0.5 * h * a_ey2; tez2 = ez2 + 0.5 * h * a_ez2
            b_y1 = tz1; b_z1 = w1 * ty1
            b_y2 = tz2; b_z2 = w1 * ty2
            b_dy1 = tdz1; b_dz1 = w1 * tdy1 - ty1
            b_dy2 = tdz2; b_dz2 = w1 * tdy2 - ty2
            b_ey1 = tez1; b_ez1 = w1 * tey1 - 2.0 * tdy1
            b_ey2 = tez2; b_ez2 = w1 * tey2 - 2.0 * tdy2
            # stage 3
            ty1 = y1 + 0.5 * h * b_y1; tz1 = z1 + 0.5 * h * b_z1
            ty2 = y2 + 0.5 * h * b_y2; tz2 = z2 + 0.5 * h * b_z2
            tdy1 = dy1 + 0.5 * h * b_dy1; tdz1 = dz1 + 0.5 * h * b_dz1
            tdy2 = dy2 + 0.5 * h * b_dy2; tdz2 = dz2 + 0.5 * h * b_dz2
            tey1 = ey1 + 0.5 * h * b_ey1; tez1 = ez1 + 0.5 * h * b_ez1
            tey2 = ey2 + 0.5 * h * b_ey2; tez2 = ez2 + 0.5 * h * b_ez2
            c_y1 = tz1; c_z1 = w1 * ty1
            c_y2 = tz2; c_z2 = w1 * ty2
            c_dy1 = tdz1; c_dz1 = w1 * tdy1 - ty1
            c_dy2 = tdz2; c_dz2 = w1 * tdy2 - ty2
            c_ey1 = tez1; c_ez1 = w1 * tey1 - 2.0 * tdy1
            c_ey2 = tez2; c_ez2 = w1 * tey2 - 2.0 * tdy2
            # stage 4
            ty1 = y1 + h * c_y1; tz1 = z1 + h * c_z1
            ty2 = y2 + h * c_y2; tz2 = z2 + h * c_z2
            tdy1 = dy1 + h * c_dy1; tdz1 = dz1 + h * c_dz1
            tdy2 = dy2 + h * c_dy2; tdz2 = dz2 + h * c_dz2
            tey1 = ey1 + h * c_ey1; tez1 = ez1 + h * c_ez1
            tey2 = ey2 + h * c_ey2; tez2 = ez2 + h * c_ez2
            d_y1 = tz1; d_z1 = w2 * ty1
            d_y2 = tz2; d_z2 = w2 * ty2
            d_dy1 = tdz1; d_dz1 = w2 * tdy1 - ty1
            d_dy2 = tdz2; d_dz2 = w2 * tdy2 - ty2
            d_ey1 = tez1; d_ez1 = w2 * tey1 - 2.0 * tdy1
            d_ey2 = tez2; d_ez2 = w2 * tey2 - 2.0 * tdy2
            s = h / 6.0
            y1 += s * (a_y1 + 2 * b_y1 + 2 * c_y1 + d_y1)
            z1 += s * (a_z1 + 2 * b_z1 + 2 * c_z1 + d_z1)
            y2 += s * (a_y2 + 2 * b_y2 + 2 * c_y2 + d_y2)
            z2 += s * (a_z2 + 2 * b_z2 + 2 * c_z2 + d_z2)
            dy1 += s * (a_dy1 + 2 * b_dy1 + 2 * c_dy1 + d_dy1)
            dz1 += s * (a_dz1 + 2 * b_dz1 + 2 * c_dz1 + d_dz1)
            dy2 += s * (a_dy2 + 2 * b_dy2 + 2 * c_dy2 + d_dy2)
            dz2 += s * (a_dz2 + 2 * b_dz2 + 2 * c_dz2 + d_dz2)
            ey1 += s * (a_ey1 + 2 * b_ey1 + 2 * c_ey1 + d_ey1)
            ez1 += s * (a_ez1 + 2 * b_ez1 + 2 * c_ez1 + d_ez1)
            ey2 += s * (a_ey2 + 2 * b_ey2 + 2 * c_ey2 + d_ey2)
            ez2 += s * (a_ez2 + 2 * b_ez2 + 2 * c_ez2 + d_ez2)
        out[i, 0] = y1; out[i, 1] = z1; out[i, 2] = y2; out[i, 3] = z2
        out[i, 4] = dy1; out[i, 5] = dz1; out[i, 6] = dy2; out[i, 7] = dz2
        out[i, 8] = ey1; out[i, 9] = ez1; out[i, 10] = ey2; out[i, 11] = ez2
    return out


class _PotentialGrids:
    """Pointwise potential values on the integration grid and its midpoints."""

    def __init__(self, spec: PotentialSpec, steps: int):
        fine = pointwise_grid(spec, 2 * steps)
        self.q_grid = np.concatenate([fine[::2], fine[:1]])  # j = 0..steps, periodic wrap
        self.q_mid = np.ascontiguousarray(fine[1::2])
        self.steps = steps


def _sweep(grids: _PotentialGrids, lams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lam_arr = np.atleast_1d(np.asarray(lams, dtype=complex))
    out = _monodromy_sweep(lam_arr, grids.q_grid, grids.q_mid, 1.0 / grids.steps)
    delta = out[:, 0] + out[:, 3]
    d1 = out[:, 4] + out[:, 7]
    d2 = out[:, 8] + out[:, 11]
    return delta, d1, d2


def _error_model(lam: complex, steps: int, q_l1: float) -> float:
    """Absolute error estimate for the computed discriminant.

    Phase/amplitude bias of the 4th-order scheme on oscillation frequency
    sqrt|lambda| plus accumulated rounding; the exp factor majorizes the
    potential's influence on the error constants.
    """
    h = 1.0 / steps
    omega = math.sqrt(abs(lam)) + 1.0
    bias = omega**6 * h**5 / 144.0 + omega**5 * h**4 / 120.0
    rounding = 4.0 * math.sqrt(steps) * _EPS
    return float((bias + rounding) * math.exp(min(2.0 * q_l1, 30.0)))


def discriminant(spec: PotentialSpec, lam: complex, steps: int) -> Discriminant:
    """Delta(lambda) = y1(1) + y2'(1) by fixed-step 4th-order integration."""
    if steps < 64:
        raise InvalidInputError(f"steps must be >= 64, got {steps}")
    grids = _PotentialGrids(spec, steps)
    delta, _, _ = _sweep(grids, lam)
    if not np.all(np.isfinite(delta)):
        raise IntegrationOverflowError(
            f"integration overflowed at lambda = {lam} with {steps} steps")
    return Discriminant(lam=complex(lam), delta=complex(delta[0]),
                        step_count=steps,
                        error_estimate=_error_model(lam, steps, spec.l1_norm()))


def steps_for_pair(n: int) -> int:
    return max(BASE_STEPS, STEPS_PER_N2 * n * n)


def find_pair(spec: PotentialSpec, alpha: BoundaryClass, n: int,
              steps: int | None = None) -> tuple[complex, complex]:
    """The two discriminant roots (target +2 or -2) in the disk of pair n.

    A numerically double root is returned twice. Raises RootIsolationError if
    neither the critical-point route nor the multi-start fallback isolates
    two roots inside the disk.
    """
    if n < 1:
        raise InvalidInputError(f"pair index must be >= 1, got {n}")
    steps = steps or steps_for_pair(n)
    if spec.kind == "sampled":
        # align so the fine grid is FFT-resampleable from the sample grid
        half_m = spec.sample_count // 2
        steps = ((steps + half_m - 1) // half_m) * half_m
    target = -2.0 if alpha.is_antiperiodic else 2.0
    center = alpha.pair_center(n)
    radius = max(1.0, 2.0 * spec.l1_norm())
    grids = _PotentialGrids(spec, steps)
    floor = DOUBLE_FLOOR_FACTOR * _error_model(center, steps, spec.l1_norm())

    roots = _critical_point_roots(grids, center, target, radius, floor)
    if roots is None:
        roots = _multistart_roots(grids, center, target, radius)
    if roots is None:
        raise RootIsolationError(
            f"could not isolate two roots near {center:.6g} for pair {n}")
    if not all(np.isfinite([roots[0].real, roots[0].imag,
                            roots[1].real, roots[1].imag])):
        raise IntegrationOverflowError(f"root search overflowed for pair {n}")
    ordered = sorted(roots, key=lambda z: (z.real, z.imag))
    return complex(ordered[0]), complex(ordered[1])


def _critical_point_roots(grids, center, target, radius, floor):
    """Roots via the critical point of Delta and a local quadratic model."""
    lam = complex(center)
    for _ in range(_MAX_NEWTON):
        _, d1, d2 = _sweep(grids, lam)
        if d2[0] == 0:
            return None
        step = d1[0] / d2[0]
        lam -= step
        if abs(lam - center) > 4.0 * radius + 1.0:
            return None
        if abs(step) < _NEWTON_REL * (1.0 + abs(lam)):
            break
    else:
        return None
    delta, _, d2 = _sweep(grids, lam)
    offset = delta[0] - target
    if abs(offset) <= floor:
        return (lam, lam)  # split below integration noise: double root
    split = np.sqrt(-2.0 * offset / d2[0])
    guesses = (lam - split, lam + split)
    polished = _polish_pair(grids, guesses, target, center, radius)
    return polished


def _polish_pair(grids, guesses, target, center, radius):
    """Deflated Newton polish of two root guesses; None if it wanders off."""
    r = np.array(guesses, dtype=complex)
    for _ in range(_MAX_NEWTON):
        delta, d1, _ = _sweep(grids, r)
        f = delta - target
        corr = np.zeros(2, dtype=complex)
        for i in (0, 1):
            other = r[1 - i]
            denom = d1[i]
            if r[i] != other:
                denom = denom - f[i] / (r[i] - other)
            if denom == 0:
                return None
            corr[i] = f[i] / denom
        r -= corr
        if np.any(np.abs(r - center) > 4.0 * radius + 1.0):
            return None
        if np.all(np.abs(corr) < _NEWTON_REL * (1.0 + np.abs(r))):
            return (complex(r[0]), complex(r[1]))
    return None


def _multistart_roots(grids, center, target, radius):
    """Fallback: Newton from 8 starts on a circle, roots deduped and deflated."""
    starts = center + 0.5 * radius * np.exp(2j * np.pi * np.arange(8) / 8)
    found: list[complex] = []
    for s in starts:
        lam = complex(s)
        converged = False
        for _ in range(_MAX_NEWTON):
            delta, d1, _ = _sweep(grids, lam)
            f = delta[0] - target
            denom = d1[0]
            for root in found:
                if lam != root:
                    denom = denom - f / (lam - root)
            if denom == 0:
                break
            step = f / denom
            lam -= step
            if abs(lam - center) > 4.0 * radius + 1.0:
                break
            if abs(step) < _NEWTON_REL * (1.0 + abs(lam)):
                converged = True
                break
        if not converged or abs(lam - center) > 2.0 * radius:
            continue
        if all(abs(lam - root) > 1e-7 * (1.0 + abs(center)) for root in found):
            found.append(lam)
        if len(found) == 2:
            return (found[0], found[1])
    if len(found) == 1:
        return (found[0], found[0])  # treat as double
    return None


def scan(spec: PotentialSpec, lams, steps: int) -> list[Discriminant]:
    """Discriminant values on a lambda grid (CLI scan support)."""
    if steps < 64:
        raise InvalidInputError(f"steps must be >= 64, got {steps}")
    grids = _PotentialGrids(spec, steps)
    delta, _, _ = _sweep(grids, np.asarray(lams, dtype=complex))
    q_l1 = spec.l1_norm()
    return [Discriminant(lam=complex(l), delta=complex(d), step_count=steps,
                         error_estimate=_error_model(l, steps, q_l1))
            for l, d in zip(np.atleast_1d(lams), delta)]
