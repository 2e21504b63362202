"""Finite-difference derivatives of H(t) and the alternating-sign check."""

import math

import numpy as np
import pytest

from heatcontent import (
    Box,
    Estimate,
    Interval,
    MCConfig,
    NoisyEngineError,
    fd_derivative,
    hc_d2_semigroup,
    make_engine,
    sign_pattern,
)


def closed_interval_handle(length=1.0):
    return make_engine(Interval(length), "closed")


class TestFdDerivative:
    def test_first_derivative_matches_analytic(self, closed_oracles):
        f = closed_interval_handle()
        est = fd_derivative(f, 1.0, order=1, levels=3)
        exact = closed_oracles["dH"](1.0, 1.0)
        assert est.value == pytest.approx(exact, rel=1e-8)
        assert abs(est.value - exact) <= est.error_estimate + 1e-12

    def test_second_derivative_matches_analytic(self, closed_oracles):
        f = closed_interval_handle()
        est = fd_derivative(f, 1.0, order=2, levels=3)
        assert est.value == pytest.approx(closed_oracles["d2H"](1.0, 1.0), rel=1e-7)

    def test_constant_function_all_orders(self):
        f = lambda t: Estimate(2.0, 0.0, "certified", "closed")
        for order in (1, 2, 3):
            assert fd_derivative(f, 0.7, order=order).value == pytest.approx(
                0.0, abs=1e-9
            )

    def test_third_derivative_sign_and_scale(self, closed_oracles):
        # H''' for the interval is negative; exact value at t=0.7 computed
        # by 40-digit differentiation of the closed form.
        f = closed_interval_handle()
        est = fd_derivative(f, 0.7, order=3)
        assert est.value == pytest.approx(-1.218828166321188, rel=1e-4)
        assert est.richardson_levels == 1

    def test_order2_matches_semigroup_form(self):
        # FD second derivative at s = 2t against the squared-Laplacian value.
        f = closed_interval_handle()
        fd = fd_derivative(f, 1.0, order=2, levels=2)
        semi = hc_d2_semigroup(Interval(1.0), 0.5)
        assert fd.value == pytest.approx(semi, rel=1e-3)

    @pytest.mark.parametrize(
        "lengths,t", [((1.0,), 0.5), ((1.0, 1.0), 0.5), ((1.0, 2.0), 0.4)]
    )
    def test_semigroup_cross_check_boxes(self, lengths, t):
        d = Box(lengths)
        f = make_engine(d, "closed")
        fd = fd_derivative(f, 2.0 * t, order=2, levels=2)
        semi = hc_d2_semigroup(d, t)
        assert fd.value == pytest.approx(semi, rel=1e-3)

    def test_richardson_error_decreases_with_levels(self):
        f = closed_interval_handle()
        for order in (1, 2):
            errs = [
                fd_derivative(f, 1.0, order=order, levels=lv).error_estimate
                for lv in (1, 2, 3)
            ]
            assert errs[0] >= errs[1] >= errs[2]

    def test_scaled_domain_chain_rule(self, closed_oracles):
        # dH of the scaled set at s^2 t equals s^(m-2) dH at t per axis count.
        for lengths in [(1.0,), (1.0, 2.0), (1.0, 1.0, 1.0)]:
            m = len(lengths)
            for s in (0.5, 2.0):
                scaled = Box(tuple(s * v for v in lengths))
                t = 0.8
                d_scaled = fd_derivative(make_engine(scaled, "closed"), s * s * t, 1, 3)
                d_base = fd_derivative(make_engine(Box(lengths), "closed"), t, 1, 3)
                assert d_scaled.value == pytest.approx(
                    s ** (m - 2) * d_base.value, rel=1e-6
                )

    def test_mc_engine_rejected_above_order_one(self):
        f = make_engine(Interval(1.0), "mc", mc_cfg=MCConfig(seed=1))
        with pytest.raises(NoisyEngineError, match="too noisy"):
            fd_derivative(f, 1.0, order=2)
        # order 1 is allowed
        est = fd_derivative(f, 1.0, order=1)
        assert est.error_estimate > 0

    def test_step_underflow_rejected(self):
        f = closed_interval_handle()
        with pytest.raises(ValueError, match="underflow"):
            fd_derivative(f, 1.0, order=1, levels=60)

    def test_order_validation(self):
        f = closed_interval_handle()
        with pytest.raises(ValueError):
            fd_derivative(f, 1.0, order=4)
        with pytest.raises(ValueError):
            fd_derivative(f, -1.0, order=1)
        with pytest.raises(ValueError):
            fd_derivative(f, 1.0, order=1, levels=0)


class TestSignPattern:
    def test_interval_clean_pattern(self):
        f = closed_interval_handle()
        report = sign_pattern(f, np.geomspace(1e-2, 1e2, 25))
        assert report.ok, report.violations

    def test_box12_clean_pattern(self):
        f = make_engine(Box((1.0, 2.0)), "closed")
        report = sign_pattern(f, np.geomspace(1e-2, 1e2, 25))
        assert report.ok, report.violations

    def test_synthetic_probe_reports_violations(self):
        # sin(t) on (0.2, 1.5) stays positive but violates the derivative
        # signs, so the harness must flag it.
        report = sign_pattern(math.sin, np.linspace(0.2, 1.5, 8))
        names = {name for _, name, _, _ in report.violations}
        assert not report.ok
        assert "dH" in names  # cos > 0 on part of the grid
        assert "d2H" in names  # -sin < 0 everywhere on the grid

    def test_grid_must_be_ascending_positive(self):
        f = closed_interval_handle()
        with pytest.raises(ValueError):
            sign_pattern(f, [1.0, 0.5])
        with pytest.raises(ValueError):
            sign_pattern(f, [-1.0, 0.5])
        with pytest.raises(ValueError):
            sign_pattern(f, [])
