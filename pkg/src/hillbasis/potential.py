"""Fourier-side representation of 1-periodic complex potentials.

The inner-product convention used everywhere is (f, g) = integral over [0,1]
of f(x) * conj(g(x)) dx, so the k-th coefficient of f is
(f, e^{2 pi i k x}) = integral f(x) e^{-2 pi i k x} dx.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, PreconditionError, TruncationRiskError

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierSeries:
    """Finitely supported two-sided sequence of complex Fourier coefficients.

    Coefficients outside [-support_bound, support_bound] are implicitly zero.
    All arithmetic (sum, scalar multiple, convolution) is exact on finite
    supports; instances are immutable.
    """

    coeffs: dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): complex(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, k: int) -> complex:
        return self.coeffs.get(k, 0j)

    @property
    def support(self) -> list[int]:
        return sorted(self.coeffs)

    @property
    def support_bound(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    @property
    def l1(self) -> float:
        return float(sum(abs(v) for v in self.coeffs.values()))

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0j) + v
        return FourierSeries(out)

    def scale(self, c: complex) -> "FourierSeries":
        return FourierSeries({k: c * v for k, v in self.coeffs.items()})

    def convolve(self, other: "FourierSeries") -> "FourierSeries":
        """Coefficient convolution, i.e. the coefficients of the product."""
        out: dict[int, complex] = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                out[k] = out.get(k, 0j) + v1 * v2
        return FourierSeries(out)

    def truncate(self, bound: int) -> "FourierSeries":
        return FourierSeries({k: v for k, v in self.coeffs.items() if abs(k) <= bound})

    def to_array(self, half_width: int) -> np.ndarray:
        """Dense vector of coefficients for indices -half_width..half_width."""
        out = np.zeros(2 * half_width + 1, dtype=complex)
        for k, v in self.coeffs.items():
            if abs(k) <= half_width:
                out[k + half_width] = v
        return out


DELTA = FourierSeries({0: 1.0})


@dataclass(frozen=True)
class PotentialSpec:
    """Constructive description of a potential: a trig polynomial or a sample grid.

    The zero-mean normalization is applied at construction; ``mean_shift`` is
    the complex constant that was subtracted (eigenvalues of the original
    problem are the computed ones plus ``mean_shift``).
    """

    kind: str  # "trig" | "sampled"
    coeffs: FourierSeries | None = None
    samples: np.ndarray | None = None
    mean_shift: complex = 0j

    @classmethod
    def trig(cls, pairs: dict[int, complex] | list[tuple[int, complex]]) -> "PotentialSpec":
        if isinstance(pairs, dict):
            items = pairs.items()
        else:
            items = pairs
        coeffs = {int(k): complex(v) for k, v in items}
        shift = coeffs.pop(0, 0j)
        return cls(kind="trig", coeffs=FourierSeries(coeffs), mean_shift=shift)

    @classmethod
    def sampled(cls, samples) -> "PotentialSpec":
        arr = np.asarray(samples, dtype=complex).ravel()
        if arr.size == 0:
            raise InvalidInputError("sampled potential needs at least one sample")
        if arr.size % 2 != 0:
            raise InvalidInputError(f"sample count must be even, got {arr.size}")
        shift = complex(arr.mean())
        return cls(kind="sampled", samples=arr - shift, mean_shift=shift)

    @classmethod
    def from_json(cls, source, base_dir: str | Path | None = None) -> "PotentialSpec":
        """Load from a JSON document (path, JSON text, or parsed dict).

        Schema: {"kind": "trig", "coeffs": [{"n": 1, "re": 1.0, "im": 0.0}, ...]}
        or {"kind": "sampled", "samples_file": "q.csv"} with CSV rows "x,re,im".
        """
        if isinstance(source, dict):
            doc = source
        else:
            path = Path(source)
            if path.exists():
                text = path.read_text()
                base_dir = base_dir or path.parent
            else:
                text = str(source)
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as e:
                raise InvalidInputError(
                    f"malformed potential JSON at byte offset {e.pos}: {e.msg}"
                ) from e
        kind = doc.get("kind")
        if kind == "trig":
            entries = doc.get("coeffs")
            if entries is None:
                raise InvalidInputError("trig potential JSON lacks 'coeffs'")
            pairs = {}
            for ent in entries:
                pairs[int(ent["n"])] = complex(float(ent.get("re", 0.0)),
                                               float(ent.get("im", 0.0)))
            return cls.trig(pairs)
        if kind == "sampled":
            rel = doc.get("samples_file")
            if rel is None:
                raise InvalidInputError("sampled potential JSON lacks 'samples_file'")
            path = Path(base_dir or ".") / rel
            if not path.exists():
                raise InvalidInputError(f"samples file not found: {path}")
            samples = _read_samples_csv(path)
            return cls.sampled(samples)
        raise InvalidInputError(f"unknown potential kind: {kind!r}")

    @property
    def sample_count(self) -> int:
        return 0 if self.samples is None else int(self.samples.size)

    def l1_norm(self) -> float:
        """Upper estimate of the L1 norm of the potential."""
        if self.kind == "trig":
            return self.coeffs.l1
        return float(np.mean(np.abs(self.samples)))


def _read_samples_csv(path: Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 3:
                raise InvalidInputError(f"{path}:{lineno}: expected 'x,re,im'")
            rows.append((float(row[0]), complex(float(row[1]), float(row[2]))))
    if not rows:
        raise InvalidInputError(f"{path}: no samples")
    m = len(rows)
    xs = np.array([r[0] for r in rows])
    if not np.allclose(xs, np.arange(m) / m, atol=1e-9):
        raise InvalidInputError(f"{path}: sample grid must be x_j = j/M in order")
    return np.array([r[1] for r in rows])


def fourier_coefficients(spec: PotentialSpec, n_modes: int) -> FourierSeries:
    """Coefficients {q_k : |k| <= n_modes} of the (normalized) potential.

    Trig-polynomial input passes through exactly. Sample grids are analyzed
    with the discrete Fourier sum, whose trapezoid weights coincide with the
    plain mean on a periodic uniform grid; an oversampling factor of 4 is
    required to keep aliasing below the coefficient magnitudes of interest.
    """
    if n_modes < 1:
        raise InvalidInputError(f"n_modes must be >= 1, got {n_modes}")
    if spec.kind == "trig":
        if spec.coeffs is None:
            raise InvalidInputError("trig potential has no coefficients")
        return spec.coeffs.truncate(n_modes)
    if spec.kind == "sampled":
        m = spec.sample_count
        if m == 0:
            raise InvalidInputError("sampled potential has no samples")
        if m < 4 * n_modes:
            raise TruncationRiskError(
                f"need at least {4 * n_modes} samples for {n_modes} modes, got {m}"
            )
        dft = np.fft.fft(spec.samples) / m
        out = {}
        for k in range(-n_modes, n_modes + 1):
            out[k] = complex(dft[k % m])
        return FourierSeries(out)
    raise InvalidInputError(f"unknown potential kind: {spec.kind!r}")


def normalize_mean(series: FourierSeries) -> tuple[FourierSeries, complex]:
    """Remove the mean coefficient; returns (zero-mean series, removed shift)."""
    shift = series[0]
    if shift == 0:
        return series, 0j
    out = dict(series.coeffs)
    out.pop(0, None)
    return FourierSeries(out), shift


@dataclass(frozen=True)
class DerivedFunctions:
    """The potential together with its antiderivative and its square.

    Q is the antiderivative vanishing at 0, S the coefficient square of Q.
    """

    q: FourierSeries
    Q: FourierSeries
    S: FourierSeries
    Q0: complex


def derive_qs(q: FourierSeries) -> DerivedFunctions:
    """Build Q_k = q_k / (2 pi i k) for k != 0, Q_0 from Q(0) = 0, and S = Q*Q.

    The constraint Q(0) = 0 fixes Q_0 = -sum_{k != 0} Q_k exactly on finite
    supports; S is the convolution square, support doubled.
    """
    tol = 1e-12 * max(1.0, q.l1)
    if abs(q[0]) > tol:
        raise PreconditionError(f"potential must have zero mean, q_0 = {q[0]}")
    qk = {k: v for k, v in q.coeffs.items() if k != 0}
    Qk = {k: v / (_TWO_PI * 1j * k) for k, v in qk.items()}
    Q0 = -sum(Qk.values(), 0j)
    Q = FourierSeries({**Qk, 0: Q0})
    S = Q.convolve(Q)
    return DerivedFunctions(q=FourierSeries(qk), Q=Q, S=S, Q0=Q0)


def pointwise_grid(spec: PotentialSpec, grid_size: int) -> np.ndarray:
    """Values of the potential at x_j = j / grid_size, j = 0..grid_size-1.

    Trig polynomials are summed directly; sample grids are evaluated through
    their trigonometric interpolant (Nyquist mode split symmetrically).
    Used by the ODE-based routines, which need pointwise values.
    """
    x = np.arange(grid_size) / grid_size
    if spec.kind == "trig":
        out = np.zeros(grid_size, dtype=complex)
        for k, c in spec.coeffs.coeffs.items():
            out += c * np.exp(2j * math.pi * k * x)
        return out
    m = spec.sample_count
    half = m // 2
    if grid_size % m == 0 and grid_size > m:
        dft = np.fft.fft(spec.samples)
        big = np.zeros(grid_size, dtype=complex)
        big[:half] = dft[:half]
        if half > 1:
            big[grid_size - (half - 1):] = dft[m - (half - 1):]
        big[half] = dft[half] / 2
        big[grid_size - half] = dft[half] / 2
        return np.fft.ifft(big) * (grid_size / m)
    if grid_size == m:
        return spec.samples.copy()
    # general grid: direct evaluation of the interpolant
    dft = np.fft.fft(spec.samples) / m
    out = np.zeros(grid_size, dtype=complex)
    for k in range(-half, half + 1):
        c = dft[k % m]
        if abs(k) == half:
            c = dft[half] / 2
        out += c * np.exp(2j * math.pi * k * x)
    return out
