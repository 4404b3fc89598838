"""Pairing of eigenvalues around the unperturbed doubles, multiplicity
classification, and construction of the normal eigen-system.

Each pair index n >= 1 owns the two eigenvalues nearest the center
(2 pi n)^2 (periodic) or (pi (2n - 1))^2 (antiperiodic). A pair whose gap is
below a scale-relative tolerance is treated as a double eigenvalue and
further split into semisimple (two independent eigenvectors) or defective
(Jordan chain) by analyzing the 2x2 restriction of the matrix to the
computed invariant subspace: a nilpotent restriction beyond the noise floor
certifies a chain, a scalar-within-noise restriction is reported semisimple.
The raw gap, eigenvector angle, coupling and 2x2 split that produced the
verdict are always recorded.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import PairingAmbiguityError, PreconditionError
from .operator import BoundaryClass, EigenDecomposition

# Classification tolerances. The double-eigenvalue cutoff scales with
# sqrt(lambda): root splittings below that are exactly what the discriminant
# side cannot resolve either (root displacement goes like the square root of
# the discriminant error, whose scale is sqrt(lambda) * noise), so both
# routes collapse the same pairs. The coupling floor is relative to machine
# noise on the matrix; the split ratio separates nilpotent from
# diagonalizable 2x2 restrictions.
GAP_FLOOR = 1e-5
TOL_ANGLE = 1e-4
COUPLING_NOISE_FACTOR = 100.0
TOL_SEMI_SPLIT = 1e-2
TOL_JORDAN_REL = 1e-6


def gap_tolerance(lam_scale: float) -> float:
    return GAP_FLOOR * (1.0 + math.sqrt(abs(lam_scale)))


class PairClass(enum.Enum):
    SIMPLE = "Simple"
    SEMISIMPLE_DOUBLE = "SemisimpleDouble"
    DEFECTIVE_DOUBLE = "DefectiveDouble"

    def __str__(self) -> str:
        return self.value


@dataclass
class RawPair:
    """Two eigenvalues assigned to pair index n, before normalization."""

    n: int
    center: float
    eig_indices: tuple[int, int]
    lambda_1: complex
    lambda_2: complex
    disk_radius: float
    gap: float = 0.0
    angle: float = 0.0
    coupling: float = 0.0
    split_2x2: float = 0.0
    pair_class: PairClass | None = None


@dataclass
class NormalEigenPair:
    """Normalized eigen-pair (or Jordan chain) with extracted coefficients.

    For a defective pair, ``phi_minus`` stores the associated function psi
    (orthogonal to phi_plus, not normalized) and ``u_minus``/``v_minus`` are
    its resonant coefficients. ``remainder_l2`` is the norm of the
    off-resonant part, ``remainder_sup`` the sum of its moduli (an upper
    bound for the sup norm).
    """

    n: int
    lambda_plus: complex
    lambda_minus: complex
    pair_class: PairClass
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    index_plus: int
    index_minus: int
    row_plus: int
    row_minus: int
    u_plus: complex = 0j
    v_plus: complex = 0j
    u_minus: complex = 0j
    v_minus: complex = 0j
    remainder_l2_plus: float = 0.0
    remainder_l2_minus: float = 0.0
    remainder_sup_plus: float = 0.0
    remainder_sup_minus: float = 0.0
    alpha_n: complex = 0j
    gap: float = 0.0
    angle: float = 0.0
    disk_radius: float = 0.0
    psi_norm: float = 0.0
    jordan_residual: float = 0.0
    jordan_failed: bool = False

    @property
    def is_simple(self) -> bool:
        return self.pair_class is PairClass.SIMPLE

    @property
    def is_defective(self) -> bool:
        return self.pair_class is PairClass.DEFECTIVE_DOUBLE


@dataclass
class PairedSpectrum:
    """All trusted pairs plus the unpaired low-lying head."""

    alpha: BoundaryClass
    n_max: int
    pairs: list[RawPair]
    unpaired_head: list[complex]


def pair_spectrum(decomp: EigenDecomposition, alpha: BoundaryClass,
                  n_max: int) -> PairedSpectrum:
    """Assign to each n in 1..n_max the two eigenvalues nearest its center.

    Only pairs with n <= N/4 are trusted (tail pairs are polluted by
    truncation), so n_max beyond that is rejected. A localization disk of
    radius min(half distance to the nearest foreign center, max(1, 2|q|_1))
    must capture exactly the two assigned eigenvalues, otherwise the pairing
    is ambiguous.
    """
    op = decomp.op
    if op is None:
        raise PreconditionError("pair_spectrum needs a decomposition with its operator")
    if n_max < 1:
        raise PreconditionError(f"n_max must be >= 1, got {n_max}")
    if n_max > op.N / 4:
        raise PreconditionError(
            f"truncation-trust violation: n_max = {n_max} exceeds N/4 = {op.N / 4}"
        )
    if alpha.alpha != op.alpha.alpha:
        raise PreconditionError("boundary class does not match the operator")
    w = decomp.eigenvalues
    available = np.ones(len(w), dtype=bool)
    cap = max(1.0, 2.0 * op.q_l1)
    pairs = []
    for n in range(1, n_max + 1):
        center = alpha.pair_center(n)
        neighbor_gap = min(
            abs(center - alpha.pair_center(m))
            for m in (n - 1, n + 1) if m >= (1 if alpha.is_antiperiodic else 0)
        )
        radius = min(neighbor_gap / 2.0, cap)
        dist = np.abs(w - center)
        order = np.argsort(np.where(available, dist, np.inf))
        chosen = order[:2]
        if not available[chosen].all():
            raise PairingAmbiguityError(
                f"pair {n}: fewer than two unassigned eigenvalues remain", n=n)
        in_disk = int(np.count_nonzero(dist <= radius))
        if in_disk != 2:
            raise PairingAmbiguityError(
                f"pair {n}: disk of radius {radius:.3g} around {center:.6g} "
                f"captures {in_disk} eigenvalues instead of 2", n=n)
        if dist[chosen].max() > radius:
            raise PairingAmbiguityError(
                f"pair {n}: nearest eigenvalues fall outside the disk of radius "
                f"{radius:.3g}", n=n)
        available[chosen] = False
        l1, l2 = w[chosen[0]], w[chosen[1]]
        if (l1.real, l1.imag) > (l2.real, l2.imag):
            chosen = chosen[::-1]
            l1, l2 = l2, l1
        pairs.append(RawPair(n=n, center=center,
                             eig_indices=(int(chosen[0]), int(chosen[1])),
                             lambda_1=complex(l1), lambda_2=complex(l2),
                             disk_radius=float(dist[chosen].max())))
    head_cut = alpha.pair_center(1)
    head = sorted((complex(x) for x in w[available] if x.real < head_cut),
                  key=lambda z: (z.real, z.imag))
    return PairedSpectrum(alpha=alpha, n_max=n_max, pairs=pairs, unpaired_head=head)


def _principal_angle(v1: np.ndarray, v2: np.ndarray) -> float:
    c = abs(np.vdot(v1, v2)) / (np.linalg.norm(v1) * np.linalg.norm(v2))
    return float(math.acos(min(1.0, c)))


def classify_pair(pair: RawPair, decomp: EigenDecomposition) -> PairClass:
    """Classify a pair as simple, semisimple double, or defective double.

    The decision data (gap, eigenvector angle, invariant-subspace coupling
    and split) are recorded on the pair.
    """
    lam_mean = (pair.lambda_1 + pair.lambda_2) / 2.0
    pair.gap = abs(pair.lambda_1 - pair.lambda_2)
    v1 = decomp.right[:, pair.eig_indices[0]]
    v2 = decomp.right[:, pair.eig_indices[1]]
    pair.angle = _principal_angle(v1, v2)
    if pair.gap > gap_tolerance(abs(lam_mean)):
        pair.pair_class = PairClass.SIMPLE
        return pair.pair_class
    if pair.angle < TOL_ANGLE:
        # numerically one-dimensional eigenspace
        pair.pair_class = PairClass.DEFECTIVE_DOUBLE
        return pair.pair_class
    # two independent eigenvectors: inspect the 2x2 restriction of M to their
    # span; a nilpotent part above the noise floor certifies a Jordan block
    basis, _ = np.linalg.qr(np.stack([v1, v2], axis=1))
    t = basis.conj().T @ decomp.matrix @ basis
    nil = t - (np.trace(t) / 2.0) * np.eye(2)
    pair.coupling = float(np.linalg.norm(nil, 2))
    pair.split_2x2 = float(2.0 * math.sqrt(abs(np.linalg.det(nil))))
    noise_floor = COUPLING_NOISE_FACTOR * np.finfo(float).eps * decomp.matrix_norm
    if pair.coupling <= noise_floor:
        pair.pair_class = PairClass.SEMISIMPLE_DOUBLE
    elif pair.split_2x2 <= TOL_SEMI_SPLIT * pair.coupling:
        pair.pair_class = PairClass.DEFECTIVE_DOUBLE
    else:
        pair.pair_class = PairClass.SEMISIMPLE_DOUBLE
    return pair.pair_class


def _fix_phase(vec: np.ndarray, anchor: int) -> np.ndarray:
    """Rotate by a unimodular factor so the anchor entry is real positive."""
    z = vec[anchor]
    if abs(z) < 1e-8 * np.linalg.norm(vec):
        z = vec[int(np.argmax(np.abs(vec)))]
    return vec * (abs(z) / z)


def _refined_eigvec(matrix: np.ndarray, lam: complex) -> np.ndarray:
    """Most reliable unit null vector of (M - lam I), via SVD."""
    a = matrix - lam * np.eye(matrix.shape[0])
    _, _, vh = np.linalg.svd(a)
    return vh[-1].conj()


def build_normal_pair(pair: RawPair, decomp: EigenDecomposition) -> NormalEigenPair:
    """Normalize the pair per its class and extract the resonant coefficients.

    Simple: both eigenvectors normalized. Semisimple double: the second
    eigenfunction is orthogonalized against the first within the eigenspace.
    Defective double: the associated function psi solves (M - lam) psi = phi
    with (psi, phi) = 0, as the minimal-norm least-squares solution; a
    residual above the tolerance flags the pair (excluded from criteria).
    """
    if pair.pair_class is None:
        classify_pair(pair, decomp)
    op = decomp.op
    ip, im = op.alpha.pair_indices(pair.n)
    rp, rm = op.row_of(ip), op.row_of(im)
    mat = decomp.matrix
    v1 = decomp.right[:, pair.eig_indices[0]]
    v2 = decomp.right[:, pair.eig_indices[1]]
    out = NormalEigenPair(
        n=pair.n, lambda_plus=pair.lambda_1, lambda_minus=pair.lambda_2,
        pair_class=pair.pair_class, phi_plus=v1, phi_minus=v2,
        index_plus=ip, index_minus=im, row_plus=rp, row_minus=rm,
        gap=pair.gap, angle=pair.angle, disk_radius=pair.disk_radius,
    )
    if pair.pair_class is PairClass.SIMPLE:
        out.phi_plus = _fix_phase(v1 / np.linalg.norm(v1), rp)
        out.phi_minus = _fix_phase(v2 / np.linalg.norm(v2), rp)
    else:
        lam = (pair.lambda_1 + pair.lambda_2) / 2.0
        # the cluster mean is the first-order-accurate eigenvalue estimate
        out.lambda_plus = out.lambda_minus = lam
        if pair.pair_class is PairClass.SEMISIMPLE_DOUBLE:
            # canonical orthonormal basis of the eigenspace: project the two
            # resonant coordinate directions onto it (for q = 0 this gives
            # exactly the two exponentials)
            basis, _ = np.linalg.qr(np.stack([v1, v2], axis=1))
            cand1 = basis @ basis.conj().T[:, rp]
            if np.linalg.norm(cand1) < 0.1:
                cand1 = v1
            phi1 = cand1 / np.linalg.norm(cand1)
            cand2 = basis @ basis.conj().T[:, rm]
            cand2 = cand2 - np.vdot(phi1, cand2) * phi1
            if np.linalg.norm(cand2) < 0.1:
                cand2 = v2 - np.vdot(phi1, v2) * phi1
            out.phi_plus = _fix_phase(phi1, rp)
            out.phi_minus = _fix_phase(cand2 / np.linalg.norm(cand2), rm)
        else:
            phi = _fix_phase(_refined_eigvec(mat, lam), rp)
            a = mat - lam * np.eye(mat.shape[0])
            psi, *_ = np.linalg.lstsq(a, phi, rcond=None)
            psi = psi - np.vdot(phi, psi) * phi
            resid = float(np.linalg.norm(a @ psi - phi))
            out.phi_plus = phi
            out.phi_minus = psi
            out.psi_norm = float(np.linalg.norm(psi))
            out.jordan_residual = resid
            out.jordan_failed = resid > TOL_JORDAN_REL * decomp.matrix_norm
    extract_uv_and_remainder(out)
    if pair.pair_class is not PairClass.SEMISIMPLE_DOUBLE:
        out.alpha_n = alpha_n(out)
    return out


def extract_uv_and_remainder(pair: NormalEigenPair) -> NormalEigenPair:
    """Read u, v at the resonant rows and the off-resonant remainder norms.

    |u|^2 + |v|^2 + remainder_l2^2 = |phi|^2 exactly: the split is a
    coordinate projection in the orthonormal truncation basis.
    """
    rp, rm = pair.row_plus, pair.row_minus
    for tag, vec in (("plus", pair.phi_plus), ("minus", pair.phi_minus)):
        u, v = complex(vec[rp]), complex(vec[rm])
        rest = np.delete(vec, [rp, rm])
        setattr(pair, f"u_{tag}", u)
        setattr(pair, f"v_{tag}", v)
        setattr(pair, f"remainder_l2_{tag}", float(np.linalg.norm(rest)))
        setattr(pair, f"remainder_sup_{tag}", float(np.sum(np.abs(rest))))
    return pair


def alpha_n(pair: NormalEigenPair) -> complex:
    """Conjugation-free self-pairing sum_k c_k c_{mirror(k)} of phi_plus.

    In the truncation basis the mirror index (-k periodic, -1-k antiperiodic)
    is index reversal, so this is the dot of the coefficient vector with its
    own reverse; it equals the integral of phi^2 over the period.
    """
    vec = pair.phi_plus
    return complex(np.dot(vec, vec[::-1]))


def build_normal_system(decomp: EigenDecomposition, alpha: BoundaryClass,
                        n_max: int) -> tuple[list[NormalEigenPair], list[complex]]:
    """Pair, classify and normalize everything up to n_max."""
    paired = pair_spectrum(decomp, alpha, n_max)
    out = []
    for pair in paired.pairs:
        classify_pair(pair, decomp)
        out.append(build_normal_pair(pair, decomp))
    return out, paired.unpaired_head


CSV_HEADER = ("n,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,"
              "class,abs_u_plus,abs_v_plus,abs_u_minus,abs_v_minus,"
              "remainder_l2_plus,remainder_l2_minus,re_alpha,im_alpha")


def pair_csv_row(pair: NormalEigenPair) -> str:
    cells = [
        str(pair.n),
        repr(pair.lambda_plus.real), repr(pair.lambda_plus.imag),
        repr(pair.lambda_minus.real), repr(pair.lambda_minus.imag),
        str(pair.pair_class),
        repr(abs(pair.u_plus)), repr(abs(pair.v_plus)),
        repr(abs(pair.u_minus)), repr(abs(pair.v_minus)),
        repr(pair.remainder_l2_plus), repr(pair.remainder_l2_minus),
        repr(pair.alpha_n.real), repr(pair.alpha_n.imag),
    ]
    return ",".join(cells)
