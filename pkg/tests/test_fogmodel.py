"""Attenuation law, transmission and fog compositing."""
import math

import numpy as np
import pytest

from fogsim import (
    AtmosphericLight,
    Attenuation,
    MetricDepth,
    RasterImage,
    TransmissionMap,
    beta_from_level,
    beta_from_visibility,
    composite,
    transmission,
)


class TestAttenuation:
    def test_visibility_1000_gives_known_beta(self):
        att = beta_from_visibility(1000.0)
        assert att.beta == pytest.approx(0.0029957322735539907, abs=1e-15)

    def test_beta_times_visibility_is_contrast_log(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            v = float(rng.uniform(5.0, 50000.0))
            att = beta_from_visibility(v)
            assert att.beta * v == pytest.approx(-math.log(0.05), rel=1e-12)

    def test_non_positive_visibility_is_rejected(self):
        for bad in (0.0, -10.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                beta_from_visibility(bad)

    def test_level_ladder_doubles(self):
        betas = [beta_from_level(k).beta for k in (1, 2, 3, 4)]
        assert betas == [1.0, 2.0, 4.0, 8.0]

    def test_custom_ladder(self):
        att = beta_from_level(7, {7: 0.25})
        assert att.beta == 0.25

    def test_unknown_level_is_rejected(self):
        with pytest.raises(ValueError, match="unknown severity level"):
            beta_from_level(5)

    def test_attenuation_must_be_positive(self):
        with pytest.raises(ValueError):
            Attenuation(0.0)
        with pytest.raises(ValueError):
            Attenuation(-1.0)


class TestTransmission:
    def test_matches_exponential_law(self):
        rng = np.random.default_rng(4)
        depth = MetricDepth(rng.uniform(1.0, 500.0, size=(16, 16)))
        att = beta_from_visibility(120.0)
        t = transmission(depth, att)
        np.testing.assert_array_equal(t.values, np.exp(-att.beta * depth.values))

    def test_half_contrast_at_visibility_distance(self):
        """An object at exactly V meters keeps 5% of its signal."""
        for v in (50.0, 100.0, 1000.0):
            att = beta_from_visibility(v)
            t = transmission(MetricDepth(np.array([[v]])), att)
            assert t.values[0, 0] == pytest.approx(0.05, abs=1e-12)

    def test_deeper_pixels_transmit_less(self):
        depth = MetricDepth(np.linspace(1.0, 100.0, 32).reshape(1, -1))
        t = transmission(depth, Attenuation(0.05)).values[0]
        assert np.all(np.diff(t) < 0.0)

    def test_values_stay_in_unit_interval(self):
        depth = MetricDepth(np.array([[1e-9, 1e9]]))
        t = transmission(depth, Attenuation(3.0))
        assert 0.0 <= t.values.min() and t.values.max() <= 1.0

    def test_map_validation(self):
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            TransmissionMap(np.array([[1.5]]))
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            TransmissionMap(np.array([[-0.1]]))
        with pytest.raises(ValueError, match="non-finite"):
            TransmissionMap(np.array([[np.nan]]))


class TestComposite:
    def test_unit_transmission_is_identity_bitwise(self):
        rng = np.random.default_rng(7)
        image = RasterImage(rng.uniform(size=(12, 9, 3)))
        out = composite(
            image,
            TransmissionMap(np.ones((12, 9))),
            AtmosphericLight((0.3, 0.9, 0.1)),
        )
        np.testing.assert_array_equal(out.values, image.values)

    def test_zero_transmission_is_airlight_everywhere(self):
        rng = np.random.default_rng(8)
        image = RasterImage(rng.uniform(size=(6, 5, 3)))
        light = AtmosphericLight((0.81, 0.79, 0.75))
        out = composite(image, TransmissionMap(np.zeros((6, 5))), light)
        np.testing.assert_array_equal(
            out.values, np.broadcast_to(light.as_array(), (6, 5, 3))
        )

    def test_output_lies_between_source_and_airlight(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            image = RasterImage(rng.uniform(size=(10, 10, 3)))
            t = TransmissionMap(rng.uniform(size=(10, 10)))
            light = AtmosphericLight(tuple(rng.uniform(size=3)))
            out = composite(image, t, light).values
            lo = np.minimum(image.values, light.as_array())
            hi = np.maximum(image.values, light.as_array())
            assert np.all(out >= lo - 1e-12)
            assert np.all(out <= hi + 1e-12)

    def test_formula(self):
        image = RasterImage(np.full((2, 2, 3), 0.25))
        t = TransmissionMap(np.full((2, 2), 0.5))
        light = AtmosphericLight((1.0, 0.5, 0.0))
        out = composite(image, t, light).values
        np.testing.assert_allclose(out[0, 0], [0.625, 0.375, 0.125], atol=1e-15)

    def test_dimension_mismatch_is_rejected(self):
        image = RasterImage(np.zeros((4, 4, 3)))
        with pytest.raises(ValueError, match="dimensions differ"):
            composite(
                image, TransmissionMap(np.ones((4, 5))), AtmosphericLight((0, 0, 0))
            )


class TestAtmosphericLight:
    def test_rejects_out_of_range_channels(self):
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            AtmosphericLight((1.2, 0.5, 0.5))
        with pytest.raises(ValueError, match="\\[0, 1\\]"):
            AtmosphericLight((-0.1, 0.5, 0.5))

    def test_rejects_wrong_channel_count(self):
        with pytest.raises(ValueError, match="3 channels"):
            AtmosphericLight((0.5, 0.5))
