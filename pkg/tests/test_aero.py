import numpy as np
import pytest

from robustfoil.aero import (
    AeroModelVariant,
    SurrogateEvaluator,
    drag_coefficient,
    evaluate,
    form_factor,
    lift_coefficient,
    model_catalog,
)
from robustfoil.geometry import DesignVector
from robustfoil.uncertainty import UncertainInput

from conftest import assert_gradient_close, central_difference, random_designs, random_inputs


class TestCatalog:
    def test_five_variants(self, catalog):
        assert [v.id for v in catalog] == [1, 2, 3, 4, 5]
        assert [v.lift_slope_factor for v in catalog] == [1.00, 0.97, 0.99, 1.02, 1.04]
        assert [v.lift_drag_factor for v in catalog] == [0.0060, 0.0075, 0.0068, 0.0055, 0.0050]

    def test_ittc_value(self, catalog):
        assert catalog[2].skin_friction(1e7) == pytest.approx(0.075 / 25, rel=1e-14)
        assert catalog[2].skin_friction(1e7) == pytest.approx(0.0030, rel=1e-12)

    def test_power_law_value(self, catalog):
        assert catalog[0].skin_friction(1e6) == pytest.approx(0.074 * 10 ** (-6 / 5), rel=1e-14)
        assert catalog[0].skin_friction(1e6) == pytest.approx(4.667e-3, rel=1e-3)

    def test_friction_decreasing_and_positive(self, catalog):
        re = np.linspace(1e6, 1e7, 200)
        for v in catalog:
            cf = np.array([v.skin_friction(r) for r in re])
            assert np.all(cf > 0)
            assert np.all(np.diff(cf) < 0)
            assert v.skin_friction(1e7) < v.skin_friction(1e6)

    def test_overrides(self):
        cat = model_catalog(lift_slope_factors=[1, 1, 1, 1, 1], lift_drag_factors=[0] * 5)
        assert all(v.lift_slope_factor == 1 and v.lift_drag_factor == 0 for v in cat)
        with pytest.raises(ValueError):
            model_catalog(lift_slope_factors=[1, 1])
        with pytest.raises(ValueError):
            AeroModelVariant(1, "prandtl_power", -1.0, 0.0)


class TestLift:
    def test_symmetric_zero_alpha(self, catalog):
        assert lift_coefficient(np.zeros(64), 0.0, catalog[0]).c_l == 0.0

    def test_one_degree(self, catalog):
        res = lift_coefficient(np.zeros(64), 1.0, catalog[0])
        assert res.c_l == pytest.approx(2 * np.pi * np.pi / 180, rel=1e-14)
        assert res.c_l == pytest.approx(0.1097, abs=5e-5)

    def test_alpha_derivative(self, catalog):
        slopes = np.linspace(-0.05, 0.08, 64)
        for v in catalog:
            res = lift_coefficient(slopes, 2.3, v)
            fd = central_difference(lambda a: lift_coefficient(slopes, a[0], v).c_l, [2.3])[0]
            assert res.dcl_dalpha_deg == pytest.approx(fd, rel=1e-8)
            assert res.dcl_dalpha_deg == pytest.approx(v.lift_slope_factor * 2 * np.pi**2 / 180, rel=1e-15)

    def test_parabolic_camber_zero_lift_angle(self, catalog):
        # z = 4h x (1 - x): classical result alpha_L0 = -2h
        h = 0.02
        theta = (np.arange(64) + 0.5) * np.pi / 64
        x = 0.5 * (1 - np.cos(theta))
        slopes = 4 * h * (1 - 2 * x)
        res = lift_coefficient(slopes, 0.0, catalog[0])
        assert res.c_l == pytest.approx(2 * np.pi * 2 * h, rel=1e-3)

    def test_slope_partials(self, catalog):
        slopes = np.sin(np.linspace(0, 3, 32)) * 0.03
        res = lift_coefficient(slopes, 1.0, catalog[3])
        fd = central_difference(lambda s: lift_coefficient(s, 1.0, catalog[3]).c_l, slopes)
        assert_gradient_close(res.dcl_dslopes, fd, rtol=1e-7, atol=1e-12)


class TestDrag:
    def test_flat_plate_limit(self):
        v = AeroModelVariant(1, "prandtl_power", 1.0, 0.0)
        res = drag_coefficient(0.3, 0.0, 2.0, 3e6, v)
        assert form_factor(0.0) == 1.0
        assert res.c_d == pytest.approx(v.skin_friction(3e6) * 2.0, rel=1e-15)

    def test_worked_example(self, catalog):
        res = drag_coefficient(0.0, 0.12, 2.04, 1e7, catalog[2])
        expected = 0.0030 * (1 + 0.24 + 60 * 0.12**4) * 2.04
        assert res.c_d == pytest.approx(expected, rel=1e-12)
        assert res.c_d == pytest.approx(0.00767, abs=1e-5)

    def test_increasing_in_lift_magnitude(self, catalog):
        cl = np.linspace(0, 1, 21)
        for v in catalog:
            cd_pos = [drag_coefficient(c, 0.1, 2.03, 5e6, v).c_d for c in cl]
            cd_neg = [drag_coefficient(-c, 0.1, 2.03, 5e6, v).c_d for c in cl]
            assert np.all(np.diff(cd_pos) > 0)
            np.testing.assert_allclose(cd_pos, cd_neg, rtol=0, atol=0)

    def test_partials(self, catalog):
        for v in catalog:
            res = drag_coefficient(0.41, 0.11, 2.05, 4e6, v)
            fd = central_difference(
                lambda p: drag_coefficient(p[0], p[1], p[2], 4e6, v).c_d, [0.41, 0.11, 2.05]
            )
            assert_gradient_close([res.dcd_dcl, res.dcd_dt, res.dcd_dperimeter], fd, 1e-7, 1e-12)

    def test_rejects_reynolds_out_of_range(self, catalog):
        with pytest.raises(ValueError):
            drag_coefficient(0.3, 0.12, 2.04, 9.9e5, catalog[0])
        with pytest.raises(ValueError):
            drag_coefficient(0.3, 0.12, 2.04, 1.01e7, catalog[0])


class TestEvaluate:
    def test_baseline_has_no_lift(self, ctx, catalog):
        for xi in random_inputs(5):
            assert evaluate(DesignVector.zeros(16, 0.0), xi, ctx, catalog).c_l == 0.0

    def test_gradients_match_fd(self, ctx, catalog):
        designs = random_designs(ctx, 10, seed=21)
        inputs = random_inputs(10, seed=5)
        for d, xi in zip(designs, inputs):
            resp = evaluate(d, xi, ctx, catalog)
            assert resp.grad_c_l.shape == resp.grad_c_d.shape == (17,)
            for attr, grad in (("c_d", resp.grad_c_d), ("c_l", resp.grad_c_l)):
                fd = central_difference(
                    lambda t: getattr(evaluate(DesignVector.from_theta(t), xi, ctx, catalog), attr),
                    d.theta,
                )
                assert_gradient_close(grad, fd, rtol=1e-5, atol=1e-9)

    def test_gradients_for_every_variant(self, ctx, catalog):
        d = random_designs(ctx, 1, seed=99)[0]
        for model in range(1, 6):
            xi = UncertainInput(2.7e6, model)
            resp = evaluate(d, xi, ctx, catalog)
            fd = central_difference(
                lambda t: evaluate(DesignVector.from_theta(t), xi, ctx, catalog).c_d, d.theta
            )
            assert_gradient_close(resp.grad_c_d, fd, rtol=1e-5, atol=1e-9)

    def test_deterministic(self, ctx, catalog):
        d = random_designs(ctx, 1, seed=4)[0]
        xi = UncertainInput(3.3e6, 4)
        a, b = evaluate(d, xi, ctx, catalog), evaluate(d, xi, ctx, catalog)
        assert a.c_l == b.c_l and a.c_d == b.c_d
        np.testing.assert_array_equal(a.grad_c_d, b.grad_c_d)
        np.testing.assert_array_equal(a.grad_c_l, b.grad_c_l)

    def test_alpha_partial_is_constant(self, ctx, catalog):
        for d in random_designs(ctx, 3, seed=8):
            for v in catalog:
                resp = evaluate(d, UncertainInput(5e6, v.id), ctx, catalog)
                assert resp.grad_c_l[-1] == pytest.approx(v.lift_slope_factor * 2 * np.pi**2 / 180, rel=1e-15)

    def test_drag_positive(self, ctx, catalog):
        for d in random_designs(ctx, 20, seed=13, dy=0.05):
            for xi in (UncertainInput(1e6, 1), UncertainInput(1e7, 5), UncertainInput(5e6, 3)):
                assert evaluate(d, xi, ctx, catalog).c_d > 0

    def test_model_spread(self, ctx, catalog):
        base = DesignVector.zeros(16, 0.0)
        cds = [evaluate(base, UncertainInput(5e6, v.id), ctx, catalog).c_d for v in catalog]
        assert max(cds) - min(cds) > 0


class TestEvaluator:
    def test_counts_and_order(self, ctx):
        ev = SurrogateEvaluator(ctx, workers=4)
        d = random_designs(ctx, 1)[0]
        inputs = random_inputs(9)
        _, par = ev.evaluate_batch(d, inputs)
        _, seq = SurrogateEvaluator(ctx, workers=1).evaluate_batch(d, inputs)
        assert ev.n_evaluations == 9
        for a, b in zip(par, seq):
            assert a.c_d == b.c_d and a.c_l == b.c_l

    def test_single_evaluate_matches_function(self, ctx, catalog):
        ev = SurrogateEvaluator(ctx, catalog)
        d = random_designs(ctx, 1, seed=2)[0]
        xi = UncertainInput(6e6, 2)
        assert ev.evaluate(d, xi).c_d == evaluate(d, xi, ctx, catalog).c_d
        assert ev.n_evaluations == 1
