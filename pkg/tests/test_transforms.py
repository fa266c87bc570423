import math

import numpy as np
import pytest

import sigfrac as sg
from sigfrac.transforms import (AxisUnit, DistributionCurve, db_to_linear,
                                linear_to_db, linear_to_mh, mh_to_linear,
                                reaxis, sf_ccdf_to_sir_ccdf, sf_pdf_to_sir_pdf,
                                sinr_to_sfn, sir_ccdf_to_sf_ccdf,
                                sir_pdf_to_sf_pdf, t_inv, t_map)


class TestTMap:
    def test_values(self):
        assert t_map(0.0) == 0.0
        assert t_map(1.0) == 0.5
        assert t_map(3.0) == 0.75
        assert t_inv(0.0) == 0.0
        assert t_inv(0.5) == 1.0
        assert t_inv(0.75) == 3.0

    def test_domain(self):
        with pytest.raises(ValueError):
            t_map(-0.1)
        with pytest.raises(ValueError):
            t_inv(1.0)

    def test_round_trip_log_grid(self):
        # rounding x/(1+x) into a double costs eps*(1+x) relative on the
        # way back, so the achievable bound grows with x
        eps = 2.3e-16
        for x in np.logspace(-6, 6, 49):
            tol = max(1e-14, 4.0 * eps * (1.0 + x))
            assert t_inv(t_map(x)) == pytest.approx(x, rel=tol)

    def test_small_argument_linearity(self):
        for theta in (1e-6, 1e-4, 1e-3, 0.01):
            assert abs(t_map(theta) - theta) <= theta * theta

    def test_monotone(self):
        xs = np.logspace(-4, 4, 200)
        ts = [t_map(x) for x in xs]
        assert np.all(np.diff(ts) > 0)


class TestUnits:
    def test_db(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-14)
        assert linear_to_db(1.0) == 0.0

    def test_mh(self):
        assert mh_to_linear(0.5) == pytest.approx(1.0, rel=1e-14)
        assert linear_to_mh(1.0) == 0.5
        with pytest.raises(ValueError):
            mh_to_linear(1.0)

    def test_monotone(self):
        xs = np.linspace(-30, 30, 101)
        assert np.all(np.diff([db_to_linear(x) for x in xs]) > 0)
        ms = np.linspace(0, 0.99, 101)
        assert np.all(np.diff([mh_to_linear(m) for m in ms]) > 0)

    def test_sfn_is_t_map(self):
        assert sinr_to_sfn(0.0) == 0.0
        assert sinr_to_sfn(1.0) == 0.5
        assert sinr_to_sfn(9.0) == 0.9
        with pytest.raises(ValueError):
            sinr_to_sfn(-1.0)


class TestCcdfTransforms:
    def test_constant(self):
        f = sir_ccdf_to_sf_ccdf(lambda th: 1.0)
        assert f(0.0) == 1.0 and f(0.7) == 1.0

    def test_hand_derived(self):
        # Fbar_SIR(th) = 1/(1+th)  =>  Fbar_SF(t) = 1 - t
        f = sir_ccdf_to_sf_ccdf(lambda th: 1.0 / (1.0 + th))
        for t in (0.0, 0.25, 0.5, 0.9):
            assert f(t) == pytest.approx(1.0 - t, rel=1e-12)

    def test_exact_forms_agree(self, params_half):
        # SIR ccdf at theta = 1 equals SF ccdf at t = 1/2
        assert sg.sir_ccdf_exact(params_half, 1.0) == pytest.approx(
            sg.sf_ccdf_exact(params_half, 0.5), rel=1e-14)

    def test_round_trip_pointwise(self, params_half):
        fwd = sir_ccdf_to_sf_ccdf(lambda th: sg.sir_ccdf_exact(params_half, th))
        back = sf_ccdf_to_sir_ccdf(fwd)
        for th in np.logspace(-3, 2, 31):
            assert back(th) == pytest.approx(
                sg.sir_ccdf_exact(params_half, th), rel=1e-12)

    def test_monotonicity_preserved(self, params_half):
        f = sir_ccdf_to_sf_ccdf(lambda th: sg.sir_ccdf_exact(params_half, th))
        vals = [f(t) for t in np.linspace(0, 0.99, 100)]
        assert np.all(np.diff(vals) < 0)


class TestPdfTransforms:
    def test_uniform_sf(self):
        # uniform SF density on [0,1]  =>  f_SIR(th) = (1+th)^-2
        f = sf_pdf_to_sir_pdf(lambda t: 1.0)
        for th in (0.0, 0.5, 2.0, 10.0):
            assert f(th) == pytest.approx((1.0 + th) ** -2, rel=1e-13)

    def test_exponential_sir(self):
        # f_SIR(th) = e^-th  =>  f_SF(t) = e^(-t/(1-t)) / (1-t)^2
        f = sir_pdf_to_sf_pdf(lambda th: math.exp(-th))
        for t in (0.1, 0.5, 0.9):
            ref = math.exp(-t / (1.0 - t)) / (1.0 - t) ** 2
            assert f(t) == pytest.approx(ref, rel=1e-13)

    def test_mass_conservation_random_pdfs(self):
        # ten random beta densities on the SF axis keep unit mass as SIR pdfs
        rng = np.random.default_rng(7)
        for _ in range(10):
            p, q = rng.uniform(0.6, 3.0, size=2)
            c = 1.0 / sg.beta_fn(p, q)

            def sf_pdf(t, p=p, q=q, c=c):
                return c * t ** (p - 1.0) * (1.0 - t) ** (q - 1.0)

            sir_pdf = sf_pdf_to_sir_pdf(sf_pdf)
            # map back to (0,1) for the quadrature: th = u/(1-u)
            mass = sg.quad(lambda u: sir_pdf(u / (1.0 - u)) / (1.0 - u) ** 2,
                           0.0, 1.0, left_power=p, right_power=q)
            assert mass == pytest.approx(1.0, abs=1e-6)


class TestCurves:
    def _curve(self, unit=AxisUnit.LINEAR):
        args = np.linspace(0.1, 10.0, 50)
        vals = np.array([1.0 / (1.0 + a) for a in args])
        return DistributionCurve(args=args, values=vals, axis_unit=unit,
                                 kind="ccdf", variable="SIR")

    def test_validation(self):
        with pytest.raises(ValueError):
            DistributionCurve(args=np.array([0.2, 0.1]),
                              values=np.array([1.0, 0.5]),
                              axis_unit=AxisUnit.LINEAR, kind="ccdf",
                              variable="SF")
        with pytest.raises(ValueError):
            DistributionCurve(args=np.array([0.1, 0.2]),
                              values=np.array([0.5, 1.0]),
                              axis_unit=AxisUnit.LINEAR, kind="ccdf",
                              variable="SF")
        with pytest.raises(ValueError):
            DistributionCurve(args=np.array([0.5, 1.5]),
                              values=np.array([1.0, 0.5]),
                              axis_unit=AxisUnit.MH, kind="ccdf",
                              variable="SIR")

    def test_reaxis_values(self):
        c = self._curve()
        db = reaxis(c, AxisUnit.DB)
        assert db.args[0] == pytest.approx(linear_to_db(0.1), rel=1e-14)
        np.testing.assert_array_equal(db.values, c.values)
        mh = reaxis(c, AxisUnit.MH)
        assert mh.args[-1] == pytest.approx(10.0 / 11.0, rel=1e-14)

    def test_reaxis_linear_one(self):
        c = DistributionCurve(args=np.array([0.5, 1.0, 2.0]),
                              values=np.array([0.9, 0.7, 0.4]),
                              axis_unit=AxisUnit.LINEAR, kind="ccdf",
                              variable="SIR")
        assert reaxis(c, AxisUnit.DB).args[1] == 0.0
        assert reaxis(c, AxisUnit.MH).args[1] == 0.5

    def test_round_trips(self):
        c = self._curve()
        for unit in (AxisUnit.DB, AxisUnit.MH):
            back = reaxis(reaxis(c, unit), AxisUnit.LINEAR)
            np.testing.assert_allclose(back.args, c.args, rtol=1e-12)
        # dB -> MH -> dB on a 50-point grid
        db = reaxis(c, AxisUnit.DB)
        back = reaxis(reaxis(db, AxisUnit.MH), AxisUnit.DB)
        np.testing.assert_allclose(back.args, db.args, rtol=1e-12, atol=1e-12)
