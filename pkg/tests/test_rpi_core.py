import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rpi_meter.errors import ConstraintError
from rpi_meter.rpi_core import (Region, RegimeKind, Resolution,
                                classify_regime, minimal_uncertainty,
                                optimal_resolution, output_uncertainty)
from rpi_meter.units import constants


def region_with_volume(omega: float) -> Region:
    return Region(l=1.0, tau=omega)


class TestRegion:
    def test_four_volume(self):
        assert Region(l=2.0, tau=3.0).four_volume() == 24.0

    def test_causal_ratio(self):
        assert Region(l=2.0, tau=4.0).causal_ratio() == 0.5

    @pytest.mark.parametrize("l,tau", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0),
                                       (float("inf"), 1.0)])
    def test_rejects_bad_geometry(self, l, tau):
        with pytest.raises(ConstraintError):
            Region(l=l, tau=tau)


class TestResolution:
    def test_rejects_non_positive(self):
        with pytest.raises(ConstraintError):
            Resolution(delta_E_in=0.0, delta_H_in=1.0)
        with pytest.raises(ConstraintError):
            Resolution(delta_E_in=1.0, delta_H_in=-2.0)


class TestOutputUncertainty:
    def test_at_optimum(self):
        region = region_with_volume(4.0)
        res = Resolution(delta_E_in=math.sqrt(0.5), delta_H_in=math.sqrt(0.5))
        report = output_uncertainty(region, res)
        assert report.delta_E_out == pytest.approx(1.0, rel=1e-12)
        assert report.delta_H_out == pytest.approx(1.0, rel=1e-12)

    def test_classical_side(self):
        region = region_with_volume(4.0)
        report = output_uncertainty(region, Resolution(100.0, 100.0))
        expected = math.sqrt(100.0 ** 2 + 4.0 / (16.0 * 100.0 ** 2))
        assert report.delta_E_out == pytest.approx(expected, rel=1e-15)
        assert report.delta_E_out == pytest.approx(100.000000125, rel=1e-12)
        assert report.regime is RegimeKind.CLASSICAL

    def test_quantum_side(self):
        region = region_with_volume(4.0)
        report = output_uncertainty(region, Resolution(0.01, 0.01))
        assert report.delta_E_out == pytest.approx(2.0 / (4.0 * 0.01), rel=1e-4)
        assert report.regime is RegimeKind.QUANTUM

    def test_channels_independent(self):
        region = region_with_volume(4.0)
        report = output_uncertainty(region, Resolution(0.3, 7.0))
        only_e = output_uncertainty(region, Resolution(0.3, 0.3)).delta_E_out
        only_h = output_uncertainty(region, Resolution(7.0, 7.0)).delta_H_out
        assert report.delta_E_out == only_e
        assert report.delta_H_out == only_h

    def test_channels_agree_when_equal(self):
        region = Region(l=0.7, tau=3.1)
        report = output_uncertainty(region, Resolution(0.42, 0.42))
        assert report.delta_E_out == report.delta_H_out


class TestRegimeClassification:
    def test_examples(self):
        region = region_with_volume(4.0)
        assert classify_regime(region, Resolution(10.0, 10.0)) is RegimeKind.CLASSICAL
        d_opt = math.sqrt(0.5)
        assert classify_regime(region, Resolution(d_opt, d_opt)) is RegimeKind.BORDERLINE
        assert classify_regime(region, Resolution(0.01, 0.01)) is RegimeKind.QUANTUM

    def test_threshold_configurable(self):
        region = region_with_volume(4.0)
        res = Resolution(3.0, 3.0)   # ratio ~ 4.24
        assert classify_regime(region, res) is RegimeKind.BORDERLINE
        assert classify_regime(region, res, threshold=4.0) is RegimeKind.CLASSICAL

    def test_mixed_channels_are_borderline(self):
        region = region_with_volume(4.0)
        assert classify_regime(region, Resolution(100.0, 0.001)) is RegimeKind.BORDERLINE


class TestOptimalResolution:
    def test_volume_four(self):
        region = region_with_volume(4.0)
        res = optimal_resolution(region)
        assert res.delta_E_in == pytest.approx(math.sqrt(0.5), rel=1e-12)
        report = output_uncertainty(region, res)
        assert report.delta_min == pytest.approx(1.0, rel=1e-12)

    def test_volume_one(self):
        region = region_with_volume(1.0)
        res = optimal_resolution(region)
        assert res.delta_E_in == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert minimal_uncertainty(region) == pytest.approx(2.0, rel=1e-12)

    @given(st.floats(min_value=1e-6, max_value=1e6))
    def test_output_at_optimum_is_sqrt2_times_input(self, omega):
        region = region_with_volume(omega)
        res = optimal_resolution(region)
        report = output_uncertainty(region, res)
        assert report.delta_E_out == pytest.approx(
            math.sqrt(2.0) * res.delta_E_in, rel=1e-12)


class TestMinimalUncertainty:
    def test_natural_values(self):
        assert minimal_uncertainty(Region(l=1.0, tau=1.0)) == pytest.approx(2.0)
        assert minimal_uncertainty(Region(l=1.0, tau=4.0)) == pytest.approx(1.0)

    def test_cgs_value(self, cgs):
        # tau = 1 s, l = 1 cm; hand value 2*sqrt(hbar) = 6.4949e-14 statvolt/cm
        region = Region(l=cgs.length_to_natural(1.0), tau=cgs.time_to_natural(1.0))
        assert minimal_uncertainty(region, cgs) == pytest.approx(6.4949e-14, rel=1e-4)


class TestMinimizerProperty:
    def test_bound_and_uniqueness(self):
        rng = np.random.default_rng(7)
        omegas = 10.0 ** rng.uniform(-6, 6, size=1000)
        deltas = 10.0 ** rng.uniform(-6, 6, size=1000)
        for omega, rel in zip(omegas, deltas):
            region = region_with_volume(omega)
            d_opt = math.sqrt(2.0 / omega)
            d_min = 2.0 / math.sqrt(omega)
            report = output_uncertainty(region, Resolution(d_opt, d_opt))
            assert report.delta_E_out <= d_min * (1.0 + 1e-10)
            delta = d_opt * rel
            if abs(rel - 1.0) > 1e-3:
                out = output_uncertainty(region, Resolution(delta, delta))
                assert out.delta_E_out > d_min * (1.0 + 1e-8)

    def test_asymptotics(self):
        rng = np.random.default_rng(11)
        for omega in 10.0 ** rng.uniform(-4, 4, size=50):
            region = region_with_volume(omega)
            d_opt = math.sqrt(2.0 / omega)
            big = output_uncertainty(region, Resolution(1e6 * d_opt, 1e6 * d_opt))
            assert big.delta_E_out / (1e6 * d_opt) == pytest.approx(1.0, rel=1e-6)
            small = output_uncertainty(region, Resolution(1e-6 * d_opt, 1e-6 * d_opt))
            assert small.delta_E_out * 1e-6 * d_opt == pytest.approx(
                2.0 / omega, rel=1e-6)
