import math

import numpy as np
import pytest

from hillbasis.errors import PreconditionError
from hillbasis.operator import BoundaryClass, assemble, eigendecompose
from hillbasis.potential import FourierSeries
from hillbasis.spectrum import (NormalEigenPair, PairClass, alpha_n,
                                build_normal_system, classify_pair,
                                pair_spectrum)

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def free_decomp():
    op = assemble(FourierSeries({}), BoundaryClass.periodic(), 32)
    return eigendecompose(op)


@pytest.fixture(scope="module")
def mode1_decomp():
    op = assemble(FourierSeries({1: 1.0}), BoundaryClass.periodic(), 64)
    return eigendecompose(op)


@pytest.fixture(scope="module")
def cos2_decomp():
    op = assemble(FourierSeries({2: 1.0, -2: 1.0}), BoundaryClass.periodic(), 64)
    return eigendecompose(op)


class TestPairing:
    def test_free_operator_exact_pairs(self, free_decomp):
        ps = pair_spectrum(free_decomp, BoundaryClass.periodic(), 8)
        for pair in ps.pairs:
            c = (TWO_PI * pair.n) ** 2
            assert pair.lambda_1 == pytest.approx(c, rel=1e-14)
            assert pair.lambda_2 == pytest.approx(c, rel=1e-14)
        assert len(ps.unpaired_head) == 1
        assert abs(ps.unpaired_head[0]) < 1e-10

    def test_assignment_is_injective(self, cos2_decomp):
        ps = pair_spectrum(cos2_decomp, BoundaryClass.periodic(), 16)
        seen = set()
        for pair in ps.pairs:
            assert not set(pair.eig_indices) & seen
            seen.update(pair.eig_indices)

    def test_mathieu_first_gap(self, cos2_decomp):
        # independent first-order size of the first splitting: 2 |q_2| = 2
        ps = pair_spectrum(cos2_decomp, BoundaryClass.periodic(), 2)
        p1 = ps.pairs[0]
        gap = abs(p1.lambda_1 - p1.lambda_2)
        assert gap == pytest.approx(2.0, abs=0.05)

    def test_trust_rule_enforced(self, free_decomp):
        with pytest.raises(PreconditionError, match="truncation-trust"):
            pair_spectrum(free_decomp, BoundaryClass.periodic(), 9)

    def test_triangular_matrix_pairs_exact(self, mode1_decomp):
        ps = pair_spectrum(mode1_decomp, BoundaryClass.periodic(), 16)
        for pair in ps.pairs:
            c = (TWO_PI * pair.n) ** 2
            assert pair.lambda_1 == pytest.approx(c, rel=1e-12)
            assert pair.lambda_2 == pytest.approx(c, rel=1e-12)


class TestClassification:
    def test_free_operator_semisimple(self, free_decomp):
        ps = pair_spectrum(free_decomp, BoundaryClass.periodic(), 8)
        for pair in ps.pairs:
            assert classify_pair(pair, free_decomp) is PairClass.SEMISIMPLE_DOUBLE

    def test_single_mode_defective_in_certified_range(self, mode1_decomp):
        # Jordan coupling ~ (4 pi^2)^{1-2n} ((2n-1)!)^{-2}: above the noise
        # floor only for n <= 2 in double precision
        ps = pair_spectrum(mode1_decomp, BoundaryClass.periodic(), 4)
        classes = {p.n: classify_pair(p, mode1_decomp) for p in ps.pairs}
        assert classes[1] is PairClass.DEFECTIVE_DOUBLE
        assert classes[2] is PairClass.DEFECTIVE_DOUBLE

    def test_single_mode_rank_structure(self, mode1_decomp):
        # geometric multiplicity of the n = 1 double eigenvalue is 1:
        # (M - lambda I) has exactly one singular value at the null scale
        lam = (TWO_PI) ** 2
        a = mode1_decomp.matrix - lam * np.eye(mode1_decomp.matrix.shape[0])
        sv = np.linalg.svd(a, compute_uv=False)
        assert sv[-1] < 1e-16 * sv[0]
        assert sv[-2] > 1e-3  # the Jordan coupling, ~2.5e-2 at n = 1

    def test_mathieu_simple_then_double(self, cos2_decomp):
        ps = pair_spectrum(cos2_decomp, BoundaryClass.periodic(), 10)
        classes = {p.n: classify_pair(p, cos2_decomp) for p in ps.pairs}
        assert classes[1] is PairClass.SIMPLE
        assert classes[2] is PairClass.SIMPLE
        # splittings decay super-fast: far pairs are numerically double
        assert classes[8] is PairClass.SEMISIMPLE_DOUBLE
        assert classes[10] is PairClass.SEMISIMPLE_DOUBLE

    def test_raw_gap_and_angle_recorded(self, cos2_decomp):
        ps = pair_spectrum(cos2_decomp, BoundaryClass.periodic(), 3)
        for p in ps.pairs:
            classify_pair(p, cos2_decomp)
            assert p.gap >= 0
            assert 0 <= p.angle <= math.pi / 2 + 1e-12


class TestNormalPairs:
    def test_free_operator_unit_coefficients(self, free_decomp):
        pairs, _ = build_normal_system(free_decomp, BoundaryClass.periodic(), 4)
        p = pairs[0]
        assert abs(p.u_plus) == pytest.approx(1.0, abs=1e-12)
        assert abs(p.v_plus) == pytest.approx(0.0, abs=1e-12)
        assert abs(p.u_minus) == pytest.approx(0.0, abs=1e-12)
        assert abs(p.v_minus) == pytest.approx(1.0, abs=1e-12)
        assert p.remainder_l2_plus == pytest.approx(0.0, abs=1e-12)

    def test_normalization_and_residual(self, cos2_decomp):
        pairs, _ = build_normal_system(cos2_decomp, BoundaryClass.periodic(), 10)
        m = cos2_decomp.matrix
        for p in pairs:
            assert np.linalg.norm(p.phi_plus) == pytest.approx(1.0, abs=1e-10)
            if p.is_simple:
                r = np.linalg.norm(m @ p.phi_plus - p.lambda_plus * p.phi_plus)
                assert r <= 1e-8 * cos2_decomp.matrix_norm

    def test_semisimple_orthogonality(self, free_decomp):
        pairs, _ = build_normal_system(free_decomp, BoundaryClass.periodic(), 4)
        for p in pairs:
            assert p.pair_class is PairClass.SEMISIMPLE_DOUBLE
            assert abs(np.vdot(p.phi_plus, p.phi_minus)) < 1e-12

    def test_jordan_chain_contract(self, mode1_decomp):
        pairs, _ = build_normal_system(mode1_decomp, BoundaryClass.periodic(), 2)
        m = mode1_decomp.matrix
        for p in pairs:
            assert p.is_defective
            assert not p.jordan_failed
            assert abs(np.vdot(p.phi_plus, p.phi_minus)) < 1e-8 * p.psi_norm
            chain = m @ p.phi_minus - p.lambda_plus * p.phi_minus - p.phi_plus
            assert np.linalg.norm(chain) <= 1e-6 * mode1_decomp.matrix_norm
        # associated-function norms must blow up along the chain sequence
        assert pairs[1].psi_norm > 100 * pairs[0].psi_norm

    def test_parseval_split(self, cos2_decomp):
        pairs, _ = build_normal_system(cos2_decomp, BoundaryClass.periodic(), 10)
        for p in pairs:
            total = (abs(p.u_plus) ** 2 + abs(p.v_plus) ** 2
                     + p.remainder_l2_plus ** 2)
            assert total == pytest.approx(np.linalg.norm(p.phi_plus) ** 2,
                                          rel=1e-12)


class TestAlphaN:
    def test_pure_mode_zero(self):
        p = _fake_pair(np.array([0, 0, 0, 1.0, 0], dtype=complex), n=1)
        assert alpha_n(p) == 0

    def test_balanced_combination_one(self):
        vec = np.zeros(5, dtype=complex)
        vec[1] = vec[3] = 1 / math.sqrt(2)  # indices -1 and +1 of half-width 2
        p = _fake_pair(vec, n=1)
        assert alpha_n(p) == pytest.approx(1.0, abs=1e-15)

    def test_defective_pairs_degenerate(self, mode1_decomp):
        pairs, _ = build_normal_system(mode1_decomp, BoundaryClass.periodic(), 2)
        for p in pairs:
            assert abs(p.alpha_n) < 1e-10


def _fake_pair(vec, n):
    half = (len(vec) - 1) // 2
    return NormalEigenPair(
        n=n, lambda_plus=0j, lambda_minus=0j, pair_class=PairClass.SIMPLE,
        phi_plus=vec, phi_minus=vec, index_plus=n, index_minus=-n,
        row_plus=n + half, row_minus=-n + half)


class TestAntiperiodic:
    def test_pair_centers_and_indices(self):
        bc = BoundaryClass.antiperiodic()
        assert bc.pair_center(1) == pytest.approx(math.pi ** 2)
        assert bc.pair_center(2) == pytest.approx((3 * math.pi) ** 2)
        assert bc.pair_indices(1) == (0, -1)

    def test_cosine_exact_doubles(self):
        q = FourierSeries({2: 1.0, -2: 1.0})
        op = assemble(q, BoundaryClass.antiperiodic(), 32)
        decomp = eigendecompose(op)
        pairs, head = build_normal_system(decomp, BoundaryClass.antiperiodic(), 6)
        assert head == []
        for p in pairs:
            # even mirror symmetry decouples the two parity classes: the
            # antiperiodic pairs are exact semisimple doubles
            assert p.pair_class is PairClass.SEMISIMPLE_DOUBLE
            assert p.gap < 1e-9 * (1 + abs(p.lambda_plus))
