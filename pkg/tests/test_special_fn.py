"""Tests for the scalar special-function kernels.

Frozen reference values come from 30-digit arbitrary precision evaluation
(mpmath); identities and recurrences are checked on seeded random grids.
"""

import math

import mpmath
import numpy as np
import pytest

from specsense.special_fn import (
    Accuracy,
    ConvergenceError,
    digamma,
    kummer_1f1,
    ln_beta,
    ln_gamma,
    ln_tricomi_u_grid,
    marcum_q,
    reg_gamma_p,
    reg_gamma_q,
    tricomi_u,
)

EULER_GAMMA = 0.5772156649015329


class TestAccuracy:
    def test_defaults(self):
        acc = Accuracy()
        assert acc.rel_tol == 1e-12
        assert acc.abs_tol == 1e-300

    def test_rejects_bad_tolerances(self):
        with pytest.raises(ValueError):
            Accuracy(rel_tol=0.0)
        with pytest.raises(ValueError):
            Accuracy(rel_tol=1e-12, abs_tol=-1.0)


class TestLnGamma:
    def test_integer_anchors(self):
        assert ln_gamma(1.0) == 0.0
        assert ln_gamma(2.0) == 0.0
        assert math.isclose(ln_gamma(0.5), math.log(math.sqrt(math.pi)), rel_tol=1e-14)

    def test_frozen_values(self):
        for x, want in (
            (0.001, 6.907178885383853),
            (12.345, 18.3501469802932),
            (1e6, 12815504.569147611),
        ):
            assert math.isclose(ln_gamma(x), want, rel_tol=1e-13)

    def test_recurrence(self):
        # ln G(x+1) = ln G(x) + ln x across several decades
        for x in np.geomspace(0.05, 5e4, 40):
            lhs = ln_gamma(x + 1.0)
            rhs = ln_gamma(x) + math.log(x)
            assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ln_gamma(0.0)
        with pytest.raises(ValueError):
            ln_gamma(-3.2)


class TestDigamma:
    def test_frozen_values(self):
        for x, want in (
            (1.0, -EULER_GAMMA),
            (2.0, 1.0 - EULER_GAMMA),
            (5.0, 1.5061176684318005),
            (0.01, -100.56088545786868),
            (1e6, 13.815510057964191),
        ):
            assert math.isclose(digamma(x), want, rel_tol=1e-12)

    def test_recurrence(self):
        for x in np.geomspace(0.02, 1e4, 40):
            assert math.isclose(digamma(x + 1.0), digamma(x) + 1.0 / x, rel_tol=1e-11, abs_tol=1e-11)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            digamma(-1.0)


class TestLnBeta:
    def test_anchors(self):
        assert ln_beta(1.0, 1.0) == 0.0
        assert math.isclose(ln_beta(2.0, 3.0), -2.4849066497880004, rel_tol=1e-14)

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = rng.uniform(0.1, 60.0, size=2)
            assert ln_beta(a, b) == ln_beta(b, a)


class TestRegGamma:
    def test_exponential_case(self):
        # a = 1 reduces to the exponential survival function
        for x in (0.0, 0.3, 2.0, 40.0):
            assert math.isclose(reg_gamma_q(1.0, x), math.exp(-x), rel_tol=1e-13)

    def test_boundary_at_zero(self):
        assert reg_gamma_q(3.7, 0.0) == 1.0
        assert reg_gamma_p(3.7, 0.0) == 0.0

    def test_integer_shape_closed_form(self):
        # Q(2, x) = (1 + x) e^{-x}
        x = 3.89
        assert math.isclose(reg_gamma_q(2.0, x), (1.0 + x) * math.exp(-x), rel_tol=1e-13)

    def test_frozen_values(self):
        assert math.isclose(reg_gamma_q(2.5, 3.1), 0.2872416834255611, rel_tol=1e-13)
        assert math.isclose(reg_gamma_q(100.0, 80.0), 0.9828916869648668, rel_tol=1e-13)
        assert math.isclose(reg_gamma_q(0.5, 1e-3), 0.9643294082703201, rel_tol=1e-13)
        assert math.isclose(reg_gamma_p(5.0, 2.5), 0.10882198108584876, rel_tol=1e-13)

    def test_complement(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            a = float(rng.uniform(0.2, 150.0))
            x = float(rng.uniform(0.0, 2.0 * a + 20.0))
            assert math.isclose(reg_gamma_p(a, x) + reg_gamma_q(a, x), 1.0, rel_tol=1e-12)

    def test_monotone_in_x(self):
        xs = np.linspace(0.0, 30.0, 200)
        q = [reg_gamma_q(4.2, float(x)) for x in xs]
        assert all(q[i + 1] <= q[i] for i in range(len(q) - 1))

    def test_far_tail_is_negligible(self):
        for a in (0.5, 1.0, 3.7, 20.0, 150.0):
            x = a + 50.0 * math.sqrt(a) + 50.0
            assert reg_gamma_q(a, x) < 1e-12

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            reg_gamma_q(0.0, 1.0)
        with pytest.raises(ValueError):
            reg_gamma_q(1.0, -0.5)


class TestKummer1F1:
    def test_anchors(self):
        assert kummer_1f1(2.3, 0.9, 0.0) == 1.0
        # M(1, 1, z) = e^z
        for z in (-3.0, 0.5, 4.0):
            assert math.isclose(kummer_1f1(1.0, 1.0, z), math.exp(z), rel_tol=1e-13)

    def test_frozen_values(self):
        for (a, b, z), want in (
            ((2.5, 1.3, 0.7), 3.3524609982187656),
            ((0.4, 3.2, -5.0), 0.6628770369919242),
            ((6.0, 2.0, 12.0), 102502967.63568866),
        ):
            assert math.isclose(kummer_1f1(a, b, z), want, rel_tol=1e-12)

    def test_rejects_nonpositive_integer_b(self):
        with pytest.raises(ValueError):
            kummer_1f1(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            kummer_1f1(1.0, -3.0, 1.0)

    def test_raises_when_series_cannot_converge(self):
        with pytest.raises(ConvergenceError):
            kummer_1f1(1.0, 1.5, 1e5)


class TestTricomiU:
    def test_unit_value(self):
        # U(a, a+1, z) = z^{-a}; at a=1, z=1 this is exactly 1
        assert math.isclose(tricomi_u(1.0, 2.0, 1.0), 1.0, rel_tol=1e-12)

    def test_power_identity(self):
        # U(a, a+1, z) = z^{-a} over a wide random box
        rng = np.random.default_rng(42)
        for _ in range(100):
            a = float(10.0 ** rng.uniform(-1.0, math.log10(50.0)))
            z = float(10.0 ** rng.uniform(-3.0, 3.0))
            ln_u = float(ln_tricomi_u_grid(a, [a + 1.0], z)[0])
            assert math.isclose(ln_u, -a * math.log(z), rel_tol=1e-11, abs_tol=1e-11)

    def test_frozen_values(self):
        for (a, b, z), want in (
            ((0.8, 0.5, 2.0), 0.4112413445398791),
            ((3.0, -1.5, 8.0), 0.0004779441099693985),
            ((1.5, 1.5, 1.0), 0.4842556877173758),
            ((0.3, 2.7, 0.04), 78.85181533712202),
            ((10.0, 2.0, 3.0), 4.486380817382795e-10),
        ):
            assert math.isclose(tricomi_u(a, b, z), want, rel_tol=5e-12)

    def test_connection_to_kummer_pair(self):
        # U(a,b,z) = G(1-b)/G(a-b+1) M(a,b,z) + G(b-1)/G(a) z^{1-b} M(a-b+1,2-b,z).
        # The two terms can cancel catastrophically, which says nothing about
        # either routine, so only well-conditioned draws are kept.
        rng = np.random.default_rng(43)
        kept = 0
        attempts = 0
        while kept < 20 and attempts < 4000:
            attempts += 1
            a = float(rng.uniform(0.3, 6.0))
            b = float(rng.uniform(-2.5, 3.5))
            z = float(rng.uniform(0.1, 8.0))
            if abs(b - round(b)) < 0.15:
                continue
            try:
                m1 = kummer_1f1(a, b, z)
                m2 = kummer_1f1(a - b + 1.0, 2.0 - b, z)
            except ConvergenceError:
                continue
            t1 = math.gamma(1.0 - b) / math.gamma(a - b + 1.0) * m1
            t2 = math.gamma(b - 1.0) / math.gamma(a) * z ** (1.0 - b) * m2
            want = t1 + t2
            if want <= 0.0 or (abs(t1) + abs(t2)) / abs(want) > 1e3:
                continue
            kept += 1
            assert math.isclose(tricomi_u(a, b, z), want, rel_tol=1e-9)
        assert kept == 20

    def test_log_grid_against_arbitrary_precision(self):
        # The b ladder mirrors how the detection series consumes this routine:
        # a = m + m_s fixed, b = m_s - n + 1 marching down with the series index.
        mpmath.mp.dps = 40
        for m in (0.6, 3.5, 20.0):
            for ms in (1.1, 30.0):
                a = m + ms
                b_vals = [ms - n + 1.0 for n in (0, 5, 40, 300)]
                for z in (0.02, 1.3, 57.0, 1308.0):
                    got = ln_tricomi_u_grid(a, b_vals, z)
                    for bb, g in zip(b_vals, got):
                        want = float(mpmath.log(mpmath.hyperu(a, bb, z)))
                        assert abs(g - want) <= 5e-11 * max(1.0, abs(want))

    def test_grid_matches_scalar(self):
        got = ln_tricomi_u_grid(2.2, [0.5, -1.5, 3.0], 1.7)
        for b, g in zip((0.5, -1.5, 3.0), got):
            assert math.isclose(math.exp(float(g)), tricomi_u(2.2, b, 1.7), rel_tol=1e-12)

    def test_rejects_bad_domain(self):
        with pytest.raises(ValueError):
            tricomi_u(-1.0, 0.5, 1.0)
        with pytest.raises(ValueError):
            tricomi_u(1.0, 0.5, 0.0)


class TestMarcumQ:
    def test_zero_noncentrality_reduces_to_gamma_tail(self):
        for u in (1, 2, 5):
            for b in (0.5, 2.0, 7.0):
                assert marcum_q(u, 0.0, b) == reg_gamma_q(u, b * b / 2.0)

    def test_zero_threshold_is_certain(self):
        assert marcum_q(3, 1.7, 0.0) == 1.0

    def test_frozen_values(self):
        for (u, a, b), want in (
            ((1, 1.0, 1.0), 0.7328798037968203),
            ((2, 0.5, 1.7), 0.6061845302905624),
            ((3, 4.0, 6.2), 0.044590897121328),
        ):
            assert math.isclose(marcum_q(u, a, b), want, rel_tol=1e-12)

    def test_monotonicity(self):
        # increasing in a, decreasing in b, increasing in u
        rng = np.random.default_rng(44)
        for _ in range(200):
            u = int(rng.integers(1, 6))
            a = float(rng.uniform(0.0, 6.0))
            b = float(rng.uniform(0.1, 8.0))
            q = marcum_q(u, a, b)
            assert 0.0 <= q <= 1.0
            assert marcum_q(u, a + 0.3, b) >= q - 1e-13
            assert marcum_q(u, a, b + 0.3) <= q + 1e-13
            assert marcum_q(u + 1, a, b) >= q - 1e-13

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            marcum_q(0, 1.0, 1.0)
        with pytest.raises(ValueError):
            marcum_q(2, -0.1, 1.0)
        with pytest.raises(ValueError):
            marcum_q(2, 1.0, -1.0)


def test_convergence_error_is_arithmetic_error():
    assert issubclass(ConvergenceError, ArithmeticError)
