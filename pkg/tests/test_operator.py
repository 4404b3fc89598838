import math

import numpy as np
import pytest

from hillbasis.errors import PreconditionError
from hillbasis.operator import (BoundaryClass, assemble, eig_dense,
                                eigendecompose)
from hillbasis.potential import FourierSeries

TWO_PI = 2 * math.pi


def faddeev_leverrier(m):
    """Independent characteristic polynomial [1, c1, ..., cn] via the
    Faddeev-LeVerrier trace recursion."""
    n = m.shape[0]
    ident = np.eye(n, dtype=complex)
    coeffs = [1.0 + 0j]
    aux = np.zeros((n, n), dtype=complex)
    for k in range(1, n + 1):
        aux = m @ (aux + coeffs[-1] * ident)
        coeffs.append(-np.trace(aux) / k)
    return coeffs


def durand_kerner(coeffs, iterations=200):
    """Independent root finder for a monic polynomial (complex)."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    roots = (0.4 + 0.9j) ** np.arange(n)  # standard deterministic starts
    poly = np.polynomial.polynomial.Polynomial(c[::-1])
    for _ in range(iterations):
        new = roots.copy()
        for i in range(n):
            denom = np.prod(roots[i] - np.delete(roots, i))
            if denom == 0:
                denom = 1e-30
            new[i] = roots[i] - poly(roots[i]) / denom
        if np.max(np.abs(new - roots)) < 1e-13 * (1 + np.max(np.abs(new))):
            roots = new
            break
        roots = new
    return roots


class TestAssemble:
    def test_free_operator_diagonal(self):
        op = assemble(FourierSeries({}), BoundaryClass.periodic(), 1)
        expect = np.diag([(TWO_PI) ** 2, 0.0, (TWO_PI) ** 2]).astype(complex)
        assert np.allclose(op.matrix, expect)
        assert list(op.index_map) == [-1, 0, 1]

    def test_single_mode_stripe(self):
        op = assemble(FourierSeries({1: 1.0}), BoundaryClass.periodic(), 2)
        m = op.matrix
        # q_{k-j} = 1 exactly when k - j = 1: one subdiagonal stripe
        off = m - np.diag(np.diag(m))
        assert np.allclose(np.diag(off, -1), 1.0)
        only_stripe = off.copy()
        np.fill_diagonal(only_stripe[1:, :], 0.0)
        assert np.allclose(only_stripe, 0.0)

    def test_antiperiodic_cosine(self):
        op = assemble(FourierSeries({2: 1.0, -2: 1.0}),
                      BoundaryClass.antiperiodic(), 2)
        diag = np.diag(op.matrix)
        ks = np.arange(-2, 2)
        assert np.allclose(diag, (math.pi * (2 * ks + 1)) ** 2)
        assert op.matrix[2, 0] == 1.0 and op.matrix[0, 2] == 1.0
        assert op.matrix.shape == (4, 4)

    def test_nonzero_mean_rejected(self):
        with pytest.raises(PreconditionError):
            assemble(FourierSeries({0: 1.0}), BoundaryClass.periodic(), 4)

    def test_generic_alpha_smoke(self):
        op = assemble(FourierSeries({1: 0.5j}), BoundaryClass(0.5), 3)
        ks = np.arange(-3, 4)
        assert np.allclose(np.diag(op.matrix), (TWO_PI * (ks + 0.25)) ** 2)


class TestEigendecompose:
    def test_identity(self):
        d = eig_dense(np.eye(5, dtype=complex))
        assert np.allclose(d.eigenvalues, 1.0)

    def test_diagonal(self):
        vals = np.array([3.0, -1.0, 2.0 + 1j, 0.5])
        d = eig_dense(np.diag(vals))
        assert np.allclose(sorted(d.eigenvalues, key=lambda z: (z.real, z.imag)),
                           sorted(vals, key=lambda z: (z.real, z.imag)))

    def test_random_matrix_against_root_oracle(self):
        rng = np.random.default_rng(7)
        m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        d = eig_dense(m)
        coeffs = faddeev_leverrier(m)
        roots = durand_kerner(coeffs)
        got = np.sort_complex(d.eigenvalues)
        want = np.sort_complex(roots)
        assert np.max(np.abs(got - want)) < 1e-8

    def test_residual_contract(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        d = eig_dense(m)
        for i in range(12):
            r = np.linalg.norm(m @ d.right[:, i] - d.eigenvalues[i] * d.right[:, i])
            assert r <= d.residual_norms[i] * d.matrix_norm

    def test_left_vectors_are_left(self):
        rng = np.random.default_rng(11)
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        d = eig_dense(m)
        for i in range(8):
            lhs = d.left[i] @ m
            assert np.allclose(lhs, d.eigenvalues[i] * d.left[i], atol=1e-8)
            assert d.left[i] @ d.right[:, i] == pytest.approx(1.0, abs=1e-8)

    def test_trace_preservation(self):
        q = FourierSeries({1: 1j, -1: 0.5, 3: 0.25})
        op = assemble(q, BoundaryClass.periodic(), 16)
        d = eigendecompose(op)
        assert np.sum(d.eigenvalues) == pytest.approx(np.trace(op.matrix),
                                                      rel=1e-10)

    def test_free_operator_exact(self):
        op = assemble(FourierSeries({}), BoundaryClass.periodic(), 32)
        d = eigendecompose(op)
        ks = np.arange(-32, 33)
        want = np.sort((TWO_PI * ks) ** 2)
        got = np.sort(d.eigenvalues.real)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12)
        assert np.max(np.abs(d.eigenvalues.imag)) == 0.0

    def test_real_even_potential_real_spectrum(self):
        q = FourierSeries({2: 1.0, -2: 1.0})
        op = assemble(q, BoundaryClass.periodic(), 24)
        d = eigendecompose(op)
        bound = 1e-8 * (1 + np.abs(d.eigenvalues))
        assert np.all(np.abs(d.eigenvalues.imag) <= bound)

    def test_galerkin_convergence_under_refinement(self):
        q = FourierSeries({2: 1.0, -2: 1.0})
        bc = BoundaryClass.periodic()
        lam_16 = np.sort(eigendecompose(assemble(q, bc, 16)).eigenvalues.real)
        lam_32 = np.sort(eigendecompose(assemble(q, bc, 32)).eigenvalues.real)
        # compare the pair around (2 pi n)^2 for n = 1, 2 (N = 16 >= 4n + 2*2)
        for n in (1, 2):
            c = (TWO_PI * n) ** 2
            a = lam_16[np.argsort(np.abs(lam_16 - c))[:2]]
            b = lam_32[np.argsort(np.abs(lam_32 - c))[:2]]
            assert np.max(np.abs(np.sort(a) - np.sort(b))) < 1e-8
