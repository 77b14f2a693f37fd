"""Point-reward polynomials: published anchor values and shape properties."""

from __future__ import annotations

import numpy as np
import pytest

from steerbench.envs import reward_r1, reward_r2, signed_margin


def test_r1_midline_anchor():
    assert reward_r1(0.5) == pytest.approx(0.99985, abs=1e-9)


def test_r1_quarter_anchor():
    # 14.654/64 - 17.778/16 + 7.2252/4, worked by hand
    assert reward_r1(0.25) == pytest.approx(0.92414375, abs=1e-12)


def test_r1_zero_at_zero():
    assert reward_r1(0.0) == 0.0


def test_r1_negative_outside():
    xs = np.linspace(-2.0, -1e-6, 200)
    assert np.all(reward_r1(xs) < 0.0)


def test_r1_peak_at_midline():
    xs = np.linspace(0.0, 0.5, 5001)
    vals = reward_r1(xs)
    assert np.argmax(vals) == len(xs) - 1


def test_r2_permeability_anchors():
    assert reward_r2(200.0) == 1.0   # exact peak
    assert reward_r2(100.0) == pytest.approx(0.7, abs=1e-12)
    assert reward_r2(20.0) == pytest.approx(0.172, abs=1e-12)
    assert reward_r2(0.0) == 0.0


def test_r2_matches_coefficient_form():
    ys = np.linspace(0.0, 250.0, 501)
    direct = -2.0e-5 * ys**2 + 0.009 * ys
    np.testing.assert_allclose(reward_r2(ys), direct, atol=1e-12)


def test_signed_margin_inside_and_outside():
    top, bottom = 100.0, 120.0
    assert signed_margin(110.0, top, bottom) == pytest.approx(0.5)
    assert signed_margin(105.0, top, bottom) == pytest.approx(0.25)
    assert signed_margin(115.0, top, bottom) == pytest.approx(0.25)
    assert signed_margin(99.0, top, bottom) == pytest.approx(-0.05)
    assert signed_margin(124.0, top, bottom) == pytest.approx(-0.2)


def test_signed_margin_broadcasts():
    tvd = np.array([110.0, 95.0])
    out = signed_margin(tvd, 100.0, 120.0)
    np.testing.assert_allclose(out, [0.5, -0.25])
