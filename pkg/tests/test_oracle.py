import math

import numpy as np
import pytest

from hillbasis.errors import InvalidInputError
from hillbasis.operator import BoundaryClass
from hillbasis.oracle import Discriminant, discriminant, find_pair, scan
from hillbasis.potential import PotentialSpec

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def zero():
    return PotentialSpec.trig({})


@pytest.fixture(scope="module")
def cos2():
    return PotentialSpec.trig({2: 1.0, -2: 1.0})


class TestDiscriminant:
    def test_zero_potential_at_zero(self, zero):
        d = discriminant(zero, 0.0, 2048)
        assert d.delta == pytest.approx(2.0, abs=1e-12)

    def test_zero_potential_antiperiodic_point(self, zero):
        d = discriminant(zero, math.pi**2, 2048)
        assert d.delta == pytest.approx(-2.0, abs=1e-10)

    def test_zero_potential_periodic_point(self, zero):
        d = discriminant(zero, (TWO_PI) ** 2, 2048)
        assert d.delta == pytest.approx(2.0, abs=1e-10)

    def test_zero_potential_closed_form_grid(self, zero):
        # |Delta - 2 cos(sqrt(lambda))| <= 1e-9 on 50 points in [0, 100]
        lams = np.linspace(0.0, 100.0, 50)
        worst = 0.0
        for lam in lams:
            d = discriminant(zero, lam, 2048)
            worst = max(worst, abs(d.delta - 2 * np.cos(np.sqrt(lam))))
        assert worst <= 1e-9

    def test_complex_lambda(self, zero):
        lam = 30.0 + 4.0j
        d = discriminant(zero, lam, 2048)
        root = np.sqrt(complex(lam))
        assert d.delta == pytest.approx(2 * np.cos(root), abs=1e-10)

    def test_richardson_fourth_order(self, cos2):
        # |D_s - D_2s| / |D_2s - D_4s| should sit near 16
        lam = 77.0
        d1 = discriminant(cos2, lam, 128).delta
        d2 = discriminant(cos2, lam, 256).delta
        d3 = discriminant(cos2, lam, 512).delta
        ratio = abs(d1 - d2) / abs(d2 - d3)
        assert 12.0 <= ratio <= 20.0

    def test_error_estimate_contract(self, cos2):
        # halving the step changes delta by less than 16x the estimate
        lam = 55.0 + 3.0j
        for steps in (256, 512, 1024):
            a = discriminant(cos2, lam, steps)
            b = discriminant(cos2, lam, 2 * steps)
            assert abs(a.delta - b.delta) <= 16.0 * a.error_estimate

    def test_min_steps_guard(self, zero):
        with pytest.raises(InvalidInputError):
            discriminant(zero, 1.0, 32)


class TestFindPair:
    def test_zero_potential_exact_double(self, zero):
        bc = BoundaryClass.periodic()
        l1, l2 = find_pair(zero, bc, 2)
        c = (TWO_PI * 2) ** 2
        assert l1 == l2
        assert l1 == pytest.approx(c, abs=1e-8)

    def test_cosine_first_split(self, cos2):
        bc = BoundaryClass.periodic()
        l1, l2 = find_pair(cos2, bc, 1)
        assert abs(l2 - l1) == pytest.approx(2.0, abs=0.05)
        mid = (l1 + l2) / 2
        assert mid.real == pytest.approx((TWO_PI) ** 2, abs=0.5)
        assert abs(mid.imag) < 1e-9

    def test_antiperiodic_sampled_sawtooth_first_pair(self):
        m = 2048
        spec = PotentialSpec.sampled(np.arange(m) / m - 0.5)
        bc = BoundaryClass.antiperiodic()
        l1, l2 = find_pair(spec, bc, 1)
        # pair near pi^2, split by about 2 |q_1| = 1/pi
        assert (l1.real + l2.real) / 2 == pytest.approx(math.pi**2, abs=0.2)
        assert abs(l2 - l1) == pytest.approx(1 / math.pi, rel=0.15)

    def test_complex_potential_roots_complex(self):
        spec = PotentialSpec.trig({1: 0.8, -1: 0.3j})
        bc = BoundaryClass.periodic()
        l1, l2 = find_pair(spec, bc, 1)
        d = discriminant(spec, l1, 8192)
        assert abs(d.delta - 2.0) < 1e-6

    def test_deterministic(self, cos2):
        bc = BoundaryClass.periodic()
        assert find_pair(cos2, bc, 3) == find_pair(cos2, bc, 3)


class TestScan:
    def test_scan_matches_pointwise(self, cos2):
        lams = np.array([10.0, 20.0, 30.0])
        pts = scan(cos2, lams, 512)
        assert len(pts) == 3
        for p, lam in zip(pts, lams):
            d = discriminant(cos2, lam, 512)
            assert p.delta == pytest.approx(d.delta, rel=1e-14)
