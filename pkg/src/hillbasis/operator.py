"""Galerkin truncation of -y'' + q y on the exponential basis, and its
dense complex eigendecomposition.

Basis functions are e^{2 pi i (k + alpha/2) x}; the free operator is diagonal
on them with eigenvalue (2 pi (k + alpha/2))^2 and multiplication by q couples
index k to k + m through q_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailureError, PreconditionError
from .potential import FourierSeries

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BoundaryClass:
    """Quasi-periodic boundary condition y(1) = e^{pi i alpha} y(0).

    The criterion machinery accepts only alpha in {0, 1} (periodic and
    antiperiodic); generic real alpha in [0, 2) is accepted for assembly
    smoke tests.
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 2.0:
            raise PreconditionError(f"alpha must lie in [0, 2), got {self.alpha}")

    @classmethod
    def periodic(cls) -> "BoundaryClass":
        return cls(0.0)

    @classmethod
    def antiperiodic(cls) -> "BoundaryClass":
        return cls(1.0)

    @property
    def is_periodic(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_antiperiodic(self) -> bool:
        return self.alpha == 1.0

    def basis_indices(self, half_width: int) -> np.ndarray:
        """Fourier indices k of the truncation basis e^{2 pi i (k + alpha/2) x}."""
        if self.is_antiperiodic:
            return np.arange(-half_width, half_width)
        return np.arange(-half_width, half_width + 1)

    def pair_center(self, n: int) -> float:
        """Unperturbed double eigenvalue around which pair n localizes."""
        if self.is_antiperiodic:
            return (math.pi * (2 * n - 1)) ** 2
        return (_TWO_PI * n) ** 2

    def pair_indices(self, n: int) -> tuple[int, int]:
        """Basis indices carrying the two resonant exponentials of pair n."""
        if self.is_antiperiodic:
            return n - 1, -n
        return n, -n


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense matrix of the operator on the basis with |index| <= N."""

    N: int
    alpha: BoundaryClass
    matrix: np.ndarray
    index_map: np.ndarray  # row position -> Fourier index k
    q_l1: float  # sum of |q_k|, used to size localization disks

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def row_of(self, k: int) -> int:
        return int(k) + self.N

    def norm_estimate(self) -> float:
        return float(np.linalg.norm(self.matrix))


def assemble(q: FourierSeries, alpha: BoundaryClass, half_width: int) -> TruncatedOperator:
    """Build the truncation matrix: diagonal (2 pi (k + alpha/2))^2, stripe q_{k-j}.

    Requires zero-mean q; half_width >= 2 * support_bound(q) is recommended so
    that the retained couplings are complete for the trusted pairs.
    """
    if half_width < 1:
        raise PreconditionError(f"half_width must be >= 1, got {half_width}")
    tol = 1e-12 * max(1.0, q.l1)
    if abs(q[0]) > tol:
        raise PreconditionError(f"potential must have zero mean, q_0 = {q[0]}")
    ks = alpha.basis_indices(half_width)
    dim = len(ks)
    mat = np.zeros((dim, dim), dtype=complex)
    freqs = _TWO_PI * (ks + alpha.alpha / 2.0)
    np.fill_diagonal(mat, freqs**2)
    for m, c in q.coeffs.items():
        if m == 0 or abs(m) >= dim:
            continue
        # row k, column j = k - m carries q_m
        if m > 0:
            rows = np.arange(m, dim)
        else:
            rows = np.arange(0, dim + m)
        mat[rows, rows - m] = c
    return TruncatedOperator(N=half_width, alpha=alpha, matrix=mat,
                             index_map=ks, q_l1=q.l1)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues with right and left eigenvectors and backward-error data.

    ``right[:, i]`` is the unit right eigenvector of ``eigenvalues[i]``;
    ``left[i, :]`` is a row vector with left[i] @ M = eigenvalues[i] * left[i],
    scaled so that left[i] @ right[:, i] = 1 where that pairing is
    nondegenerate. ``residual_norms[i]`` bounds ||M v_i - lambda_i v_i|| divided
    by the reported matrix norm.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    residual_norms: np.ndarray
    matrix: np.ndarray
    matrix_norm: float
    op: TruncatedOperator | None = None


def eig_dense(matrix: np.ndarray, op: TruncatedOperator | None = None) -> EigenDecomposition:
    """Full eigendecomposition of a dense complex matrix.

    Right vectors come from the matrix itself, left vectors from the
    decomposition of the transpose; the two spectra are matched by sorting
    on (Re, Im).
    """
    mat = np.ascontiguousarray(matrix, dtype=complex)
    if not np.all(np.isfinite(mat)):
        raise PreconditionError("matrix has nonfinite entries")
    try:
        w, v = np.linalg.eig(mat)
        wt, vt = np.linalg.eig(mat.T)
    except np.linalg.LinAlgError as e:
        raise NumericalFailureError(f"eigensolver did not converge: {e}") from e
    order = np.lexsort((w.imag, w.real))
    w, v = w[order], v[:, order]
    ordert = np.lexsort((wt.imag, wt.real))
    left = vt[:, ordert].T  # rows satisfy row @ mat = lambda * row
    nrm = float(np.linalg.norm(mat))
    # pad by a few ulps of the matrix scale: re-evaluation through another
    # BLAS path fluctuates at that level
    pad = 8.0 * mat.shape[0] * np.finfo(float).eps * nrm
    resid = (np.linalg.norm(mat @ v - v * w[None, :], axis=0) + pad) / max(nrm, 1e-300)
    # bi-normalize left rows against right columns where nondegenerate
    pairing = np.einsum("ij,ji->i", left, v)
    ok = np.abs(pairing) > 1e-10
    left[ok] = left[ok] / pairing[ok, None]
    return EigenDecomposition(eigenvalues=w, right=v, left=left,
                              residual_norms=resid, matrix=mat,
                              matrix_norm=nrm, op=op)


def eigendecompose(op: TruncatedOperator) -> EigenDecomposition:
    return eig_dense(op.matrix, op=op)
