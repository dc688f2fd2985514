import math

import numpy as np
import pytest

from splinepml.analytic import (
    WaveField,
    bessel_jy,
    bessel_jy_table,
    contrast_bump,
    disk_scatter_field,
    disk_scatter_series,
    erfc,
    hankel1,
    hankel_field,
    plane_wave,
)

from oracles import besselj_series, bessely_ref, erfc_series


def helmholtz_residual(field: WaveField, pts: np.ndarray) -> np.ndarray:
    """|(-lap - k^2) u| by a 5-point stencil with step 1e-4 wavelengths."""
    k = field.k
    h = 1e-4 * (2 * math.pi / k)
    pts = np.atleast_2d(pts)
    u0 = field.value(pts)
    lap = -4.0 * u0
    for dx, dy in ((h, 0), (-h, 0), (0, h), (0, -h)):
        lap = lap + field.value(pts + np.array([dx, dy]))
    lap = lap / h**2
    return np.abs(-lap - k**2 * u0)


# ---------------------------------------------------------------------------
# Bessel functions


def test_wronskian_at_one():
    j0, y0 = bessel_jy(0, 1.0)
    j1, y1 = bessel_jy(1, 1.0)
    assert j1 * y0 - j0 * y1 == pytest.approx(2 / math.pi, abs=1e-13)


def test_values_against_series_oracle():
    # frozen from the extended-precision series (J) and reference (Y)
    assert besselj_series(0, 1.0) == pytest.approx(0.7651976865579666, abs=1e-15)
    assert bessely_ref(0, 1.0) == pytest.approx(0.0882569642156769, abs=1e-15)
    j0, y0 = bessel_jy(0, 1.0)
    assert j0 == pytest.approx(0.7651976865579666, abs=1e-13)
    assert y0 == pytest.approx(0.0882569642156769, abs=1e-13)


@pytest.mark.parametrize("m", [0, 1, 3, 7, 20, 45, 60])
@pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 4.0, 9.7, 16.8, 25.0, 120.0, 1000.0])
def test_accuracy_vs_extended_precision(m, x):
    j, y = bessel_jy(m, x)
    jr = besselj_series(m, x)
    yr = bessely_ref(m, x)
    env = max(abs(jr), abs(yr))
    assert abs(j - jr) <= 1e-12 * max(abs(jr), 0.01 * env)
    assert abs(y - yr) <= 1e-12 * max(abs(yr), 0.01 * env)


def test_three_term_recurrence_residual():
    g = np.random.default_rng(1)
    xs = g.uniform(0.5, 80.0, 40)
    J, _ = bessel_jy_table(32, xs)
    for m in range(1, 31):
        resid = J[m - 1] + J[m + 1] - (2 * m / xs) * J[m]
        scale = np.abs(J[m - 1 : m + 2]).max(axis=0)
        assert np.abs(resid).max() <= 1e-12 * scale.max()


def test_wronskian_identity_sweep():
    for x in (0.5, 1.0, 5.0, 20.0, 100.0):
        J, Y = bessel_jy_table(41, np.array([float(x)]))
        w = J[1:, 0] * Y[:-1, 0] - J[:-1, 0] * Y[1:, 0]
        want = 2 / (math.pi * x)
        assert np.abs(w - want).max() <= 1e-12 * want


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        bessel_jy(0, -1.0)
    with pytest.raises(ValueError):
        bessel_jy(0, 0.0)


def test_order_cap():
    with pytest.raises(ValueError):
        bessel_jy(201, 1.0)


# ---------------------------------------------------------------------------
# Hankel functions


def test_hankel_combines_j_and_y():
    h = hankel1(0, 1.0)
    assert h.real == pytest.approx(0.76519768655796655, abs=1e-13)
    assert h.imag == pytest.approx(0.08825696421567696, abs=1e-13)


def test_hankel_modulus_dominates_components():
    g = np.random.default_rng(2)
    xs = g.uniform(0.2, 50.0, 100)
    for m in (0, 1, 4):
        j, y = bessel_jy_table(m, xs)
        h = j[m] + 1j * y[m]
        assert (np.abs(h) >= np.abs(y[m]) - 1e-15).all()


def test_hankel_large_argument_asymptotics():
    # leading-order outgoing wave; its own error is ~1/(8x) = 1.25e-3
    got = hankel1(0, 100.0)
    want = math.sqrt(2 / (100 * math.pi)) * np.exp(1j * (100 - math.pi / 4))
    assert abs(got - want) / abs(want) < 1.5e-3


# ---------------------------------------------------------------------------
# disk scattering series


def test_total_field_vanishes_on_disk():
    k, a = 8.0, 2.0
    thetas = np.linspace(0, 2 * math.pi, 37)
    pts = a * np.column_stack([np.cos(thetas), np.sin(thetas)])
    u = disk_scatter_series(k, a, pts)
    incident = np.exp(1j * k * pts[:, 0])
    assert np.abs(u + incident).max() < 1e-12


def test_disk_series_symmetric_in_theta():
    k, a = 8.0, 2.0
    up = disk_scatter_series(k, a, [(2.5, 1.3)])
    dn = disk_scatter_series(k, a, [(2.5, -1.3)])
    assert abs(up[0] - dn[0]) < 1e-14


def test_disk_series_helmholtz_residual():
    k, a = 8.0, 2.0
    field = disk_scatter_field(k, a)
    g = np.random.default_rng(3)
    r = g.uniform(2.2, 4.0, 100)
    t = g.uniform(0, 2 * math.pi, 100)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    resid = helmholtz_residual(field, pts)
    assert (resid <= 1e-6 * k**2 * (np.abs(field.value(pts)) + 1e-3)).all()


def test_disk_series_truncation_stability():
    k, a = 8.0, 2.0
    pts = [(3.0, 0.4), (2.1, -2.1), (4.0, 1.0)]
    coarse = disk_scatter_series(k, a, pts, tol=1e-10)
    fine = disk_scatter_series(k, a, pts, tol=5e-11)
    assert np.abs(coarse - fine).max() < 10 * 1e-10


def test_disk_series_rejects_interior():
    with pytest.raises(ValueError):
        disk_scatter_series(8.0, 2.0, [(1.0, 0.0)])
    # relaxed radius admits polygon chords
    vals = disk_scatter_series(8.0, 2.0, [(1.99, 0.0)], r_min=1.98)
    assert np.isfinite(vals).all()


def test_disk_gradient_matches_finite_difference():
    k, a = 8.0, 2.0
    field = disk_scatter_field(k, a)
    pts = np.array([[2.7, 0.9], [3.5, -1.2]])
    grad = field.gradient(pts)
    h = 1e-6
    for c in range(2):
        step = np.zeros(2)
        step[c] = h
        fd = (field.value(pts + step) - field.value(pts - step)) / (2 * h)
        assert np.abs(grad[:, c] - fd).max() < 1e-6 * np.abs(fd).max()


# ---------------------------------------------------------------------------
# closed-form fields


def test_hankel_field_on_positive_axis():
    k = 2.0
    field = hankel_field(1, k)
    r = 3.3
    got = field.value([(r, 0.0)])[0]
    assert got == pytest.approx(hankel1(1, k * r))


def test_hankel_field_helmholtz_residual():
    # sampled over each field's experiment domain (r >= hole size)
    g = np.random.default_rng(5)
    for order, k, rmin in ((0, 15.0, 0.3), (1, 2.0, 1.0)):
        field = hankel_field(order, k)
        r = g.uniform(rmin, 4.0, 100)
        t = g.uniform(0, 2 * math.pi, 100)
        pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
        resid = helmholtz_residual(field, pts)
        assert (resid <= 1e-6 * k**2 * (np.abs(field.value(pts)) + 1e-3)).all()


def test_hankel_field_gradient_finite_difference():
    field = hankel_field(1, 2.0)
    pts = np.array([[1.2, 0.7], [-2.0, 0.4]])
    grad = field.gradient(pts)
    h = 1e-6
    for c in range(2):
        step = np.zeros(2)
        step[c] = h
        fd = (field.value(pts + step) - field.value(pts - step)) / (2 * h)
        assert np.abs(grad[:, c] - fd).max() < 1e-6 * np.abs(fd).max()


def test_point_source_prefactor_asymptotics():
    # -i/4 H0(k r) matches the outgoing Green's function amplitude
    k = 5.0
    field = hankel_field(0, k, amplitude=-0.25j)
    r = 200.0
    got = field.value([(r, 0.0)])[0]
    want = -0.25j * math.sqrt(2 / (math.pi * k * r)) * np.exp(1j * (k * r - math.pi / 4))
    assert abs(got - want) / abs(want) < 1e-3


def test_plane_wave_residual_and_gradient():
    field = plane_wave(4.0, (1.0, 1.0))
    pts = np.array([[0.3, -0.2], [1.0, 2.0]])
    resid = helmholtz_residual(field, pts)
    assert resid.max() < 1e-6 * 16.0
    grad = field.gradient(pts)
    h = 1e-7
    fd = (field.value(pts + [h, 0]) - field.value(pts - [h, 0])) / (2 * h)
    assert np.abs(grad[:, 0] - fd).max() < 1e-5


def test_singularity_rejected():
    field = hankel_field(0, 2.0, center=(1.0, 1.0))
    with pytest.raises(ValueError):
        field.value([(1.0, 1.0)])


# ---------------------------------------------------------------------------
# erfc and the contrast bump


def test_erfc_basics():
    assert erfc(0.0) == pytest.approx(1.0, abs=1e-15)
    for x in (0.3, 1.0, 2.5):
        assert erfc(-x) + erfc(x) == pytest.approx(2.0, abs=1e-14)


def test_erfc_against_series_oracle():
    assert erfc_series(1.0) == pytest.approx(0.15729920705028513, abs=1e-15)
    assert erfc(1.0) == pytest.approx(0.15729920705028513, abs=1e-13)
    for x in (-5.5, -2.0, 0.7, 3.0, 6.0):
        assert erfc(x) == pytest.approx(erfc_series(x), abs=1e-12)


def test_contrast_bump_decay():
    t = np.linspace(0, 2 * math.pi, 50)
    pts = 1.8 * np.column_stack([np.cos(t), np.sin(t)])
    assert contrast_bump(pts).max() < 1e-8
    assert contrast_bump([(0.0, 0.0)])[0] == pytest.approx(1.0, abs=1e-10)
