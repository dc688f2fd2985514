"""Bessel/Hankel machinery and the exact reference fields.

Bessel functions of the first kind come from Miller's downward recurrence
with the even-order normalization sum; the second kind from the convergent
log series for Y0, Y1 at moderate arguments, the Hankel asymptotic
expansion beyond x = 17 (where its floor is below 1e-13), and the stable
upward recurrence in the order.  Everything is vectorized over the
argument since error grids evaluate these at ~2.5e5 points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.special

EULER_GAMMA = 0.57721566490153286060651209008240243

_MAX_ORDER = 200
# below this the Y0/Y1 log series is cancellation-free; above it the Steed
# continued fraction has converged fast and is uniformly accurate
_SERIES_SPLIT = 2.0


def _y01_series(x: np.ndarray, j0: np.ndarray, j1: np.ndarray):
    """Convergent log series for Y0 and Y1, accurate for x <= ~20."""
    q = 0.25 * x * x
    ln_term = np.log(0.5 * x)
    # Y0 = 2/pi [ (ln(x/2)+gamma) J0 + sum_{s>=1} (-1)^{s+1} H_s q^s / (s!)^2 ]
    s_sum = np.zeros_like(x)
    term = np.ones_like(x)
    harmonic = 0.0
    for s in range(1, 200):
        term = term * q / (s * s)
        harmonic += 1.0 / s
        contrib = (-1) ** (s + 1) * harmonic * term
        s_sum += contrib
        if np.all(np.abs(contrib) < 1e-18 * (np.abs(s_sum) + 1e-30)):
            break
    y0 = (2.0 / math.pi) * ((ln_term + EULER_GAMMA) * j0 + s_sum)

    # Y1 = -2/(pi x) + 2/pi ln(x/2) J1 - x/(2 pi) sum_{s>=0} (-1)^s
    #      (H_s + H_{s+1} - 2 gamma) q^s / (s! (s+1)!)
    s_sum = np.zeros_like(x)
    term = np.ones_like(x)
    h_s = 0.0
    for s in range(0, 200):
        h_s1 = h_s + 1.0 / (s + 1)
        contrib = (-1) ** s * (h_s + h_s1 - 2 * EULER_GAMMA) * term
        s_sum += contrib
        if s > 0 and np.all(np.abs(contrib) < 1e-18 * (np.abs(s_sum) + 1e-30)):
            break
        term = term * q / ((s + 1) * (s + 2))
        h_s = h_s1
    y1 = -2.0 / (math.pi * x) + (2.0 / math.pi) * ln_term * j1 - x / (2.0 * math.pi) * s_sum
    return y0, y1


def _cf2_steed(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """p + iq = (J0' + i Y0')/(J0 + i Y0) by the complex continued fraction.

    Lentz-style evaluation, reliable for x >= ~2 where it converges in a
    few dozen iterations to machine accuracy.
    """
    xi = 1.0 / x
    a = np.full_like(x, 0.25)
    p = -0.5 * xi
    q = np.ones_like(x)
    br = 2.0 * x
    bi = np.full_like(x, 2.0)
    fact = a * xi / (p * p + q * q)
    cr = br + q * fact
    ci = bi + p * fact
    den = br * br + bi * bi
    dr = br / den
    di = -bi / den
    dlr = cr * dr - ci * di
    dli = cr * di + ci * dr
    p, q = p * dlr - q * dli, p * dli + q * dlr
    tiny = 1e-290
    for it in range(2, 200):
        a = a + 2 * (it - 1)
        bi = bi + 2.0
        dr = a * dr + br
        di = a * di + bi
        small = np.abs(dr) + np.abs(di) < tiny
        dr = np.where(small, tiny, dr)
        fact = a / (cr * cr + ci * ci)
        cr_new = br + cr * fact
        ci_new = bi - ci * fact
        small = np.abs(cr_new) + np.abs(ci_new) < tiny
        cr = np.where(small, tiny, cr_new)
        ci = ci_new
        den = dr * dr + di * di
        dr, di = dr / den, -di / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        p, q = p * dlr - q * dli, p * dli + q * dlr
        if np.all(np.abs(dlr - 1.0) + np.abs(dli) < 1e-16):
            break
    return p, q


def bessel_jy_table(m_max: int, x) -> tuple[np.ndarray, np.ndarray]:
    """J_m(x) and Y_m(x) for all m = 0..m_max, vectorized over x > 0.

    Returns arrays of shape (m_max + 1, len(x)).
    """
    if m_max < 0 or m_max > _MAX_ORDER:
        raise ValueError(f"order must be in [0, {_MAX_ORDER}]")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0.0):
        raise ValueError("argument must be positive (Y is singular at 0)")
    mm = max(m_max, 1)  # Y1 is needed to start the recurrence either way

    # downward recurrence for J with normalization J0 + 2 sum J_{2s} = 1
    top = max(mm, int(np.ceil(x.max())))
    start = top + int(math.sqrt(40.0 * (top + 1))) + 20
    jp = np.zeros_like(x)
    jc = np.full_like(x, 1e-30)
    rows = np.zeros((mm + 1, len(x)))
    even_sum = np.zeros_like(x)
    if start % 2 == 0:
        even_sum += jc
    for n in range(start, 0, -1):
        jm = (2.0 * n / x) * jc - jp
        jp = jc
        jc = jm
        big = np.abs(jc) > 1e250
        if big.any():
            jc[big] *= 1e-250
            jp[big] *= 1e-250
            even_sum[big] *= 1e-250
            rows[:, big] *= 1e-250
        if (n - 1) % 2 == 0:
            even_sum += jc
        if n - 1 <= mm:
            rows[n - 1] = jc
    norm = 2.0 * even_sum - jc  # jc holds the unnormalized J_0 here
    rows /= norm

    small = x <= _SERIES_SPLIT
    y0 = np.empty_like(x)
    y1 = np.empty_like(x)
    if small.any():
        y0[small], y1[small] = _y01_series(x[small], rows[0, small], rows[1, small])
    if (~small).any():
        # Steed: Y0 = (p J0 + J1)/q and Y0' = q J0 + p Y0 = -Y1, both free of
        # divisions by J0 so there is no loss near the zeros of J0
        p, q = _cf2_steed(x[~small])
        j0, j1 = rows[0, ~small], rows[1, ~small]
        y0l = (p * j0 + j1) / q
        y0[~small] = y0l
        y1[~small] = -(q * j0 + p * y0l)

    ys = np.zeros((mm + 1, len(x)))
    ys[0] = y0
    ys[1] = y1
    for m in range(1, mm):
        ys[m + 1] = (2.0 * m / x) * ys[m] - ys[m - 1]
    return rows[: m_max + 1], ys[: m_max + 1]


def bessel_jy(m: int, x: float) -> tuple[float, float]:
    """(J_m(x), Y_m(x)) for integer order m >= 0 and real x > 0."""
    j, y = bessel_jy_table(m, np.array([float(x)]))
    return float(j[m, 0]), float(y[m, 0])


def hankel1(m: int, x) -> complex | np.ndarray:
    """Hankel function of the first kind, J_m + i Y_m."""
    if np.isscalar(x):
        j, y = bessel_jy(m, float(x))
        return complex(j, y)
    j, y = bessel_jy_table(m, x)
    return j[m] + 1j * y[m]


def hankel1_table(m_max: int, x) -> np.ndarray:
    j, y = bessel_jy_table(m_max, x)
    return j + 1j * y


def erfc(r) -> float | np.ndarray:
    """Complementary error function (2/sqrt(pi)) int_r^inf exp(-t^2) dt."""
    out = scipy.special.erfc(r)
    return float(out) if np.isscalar(r) else out


# ---------------------------------------------------------------------------
# wave fields


@dataclass(frozen=True)
class WaveField:
    """Closed-form field with gradient; vectorized over (m, 2) point arrays."""

    name: str
    k: float
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]


def plane_wave(k: float, direction=(1.0, 0.0)) -> WaveField:
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)

    def value(pts):
        pts = np.atleast_2d(pts)
        return np.exp(1j * k * (pts @ d))

    def gradient(pts):
        pts = np.atleast_2d(pts)
        return 1j * k * d[None, :] * np.exp(1j * k * (pts @ d))[:, None]

    return WaveField(f"plane_wave_k{k:g}", k, value, gradient)


def hankel_field(order: int, k: float, center=(0.0, 0.0), amplitude: complex = 1.0) -> WaveField:
    """amplitude * H_order(k r) * exp(i order theta) about the given center.

    order 0 with amplitude -i/4 is the free-space point source; order 1 is
    the rotating spherical-wave trace used for the square-scatterer runs.
    """
    if order not in (0, 1):
        raise ValueError("only orders 0 and 1 are used")
    c = np.asarray(center, dtype=float)

    def polar(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float)) - c
        r = np.hypot(pts[:, 0], pts[:, 1])
        if np.any(r <= 0.0):
            raise ValueError("field is singular at its center")
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        return r, theta

    def value(pts):
        r, theta = polar(pts)
        h = hankel1_table(order, k * r)
        return amplitude * h[order] * np.exp(1j * order * theta)

    def gradient(pts):
        r, theta = polar(pts)
        h = hankel1_table(order + 1, k * r)
        hm = h[order]
        # H'_m = H_{m-1} - (m/x) H_m, with H_{-1} = -H_1
        hprev = -h[1] if order == 0 else h[order - 1]
        dh = hprev - order / (k * r) * hm
        phase = np.exp(1j * order * theta)
        u_r = amplitude * k * dh * phase
        u_t = amplitude * hm * 1j * order * phase  # (1/r) d/dtheta included below
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        gx = u_r * cos_t - u_t * sin_t / r
        gy = u_r * sin_t + u_t * cos_t / r
        return np.column_stack([gx, gy])

    label = f"hankel{order}_k{k:g}"
    return WaveField(label, k, value, gradient)


def _disk_series_coeffs(k: float, a: float, tol: float) -> np.ndarray:
    """i^m * J_m(ka) / H_m(ka) for the sound-soft disk, adaptively truncated.

    The worst-case term magnitude over the exterior r >= a is |J_m(ka)|
    (attained on the disk itself), so truncation is driven by |J_m(ka)|,
    never below ceil(ka) + 20 terms.
    """
    m = int(np.ceil(k * a)) + 20
    while True:
        j, y = bessel_jy_table(min(m, _MAX_ORDER), np.array([k * a]))
        if abs(j[-1, 0]) < 0.01 * tol or m >= _MAX_ORDER:
            break
        m += 10
    keep = np.nonzero(np.abs(j[:, 0]) >= 0.01 * tol)[0]
    last = keep[-1] if len(keep) else len(j) - 1
    last = max(last + 1, int(np.ceil(k * a)) + 21)
    coeff = (1j ** np.arange(len(j))) * j[:, 0] / (j[:, 0] + 1j * y[:, 0])
    return coeff[:last]


def disk_scatter_series(k: float, a: float, pts, tol: float = 1e-14, r_min: float | None = None):
    """Scattered field of a plane wave (+x direction) hitting a sound-soft disk.

    u(r, theta) = -[J0(ka)/H0(ka) H0(kr)
                    + 2 sum_m i^m Jm(ka)/Hm(ka) Hm(kr) cos(m theta)].

    Points with r below ``r_min`` (the disk radius by default) are rejected;
    a smaller ``r_min`` admits the analytic continuation onto the chords of
    an inscribed polygon.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    lo = a if r_min is None else r_min
    if np.any(r < lo * (1 - 1e-12)):
        raise ValueError("point inside the scatterer disk")
    coeff = _disk_series_coeffs(k, a, tol)
    h = hankel1_table(len(coeff) - 1, k * r)
    mm = np.arange(len(coeff))
    cosmt = np.cos(mm[:, None] * theta[None, :])
    weights = np.where(mm == 0, 1.0, 2.0)[:, None]
    return -(weights * coeff[:, None] * h * cosmt).sum(axis=0)


def disk_scatter_gradient(k: float, a: float, pts, tol: float = 1e-14, r_min: float | None = None):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    lo = a if r_min is None else r_min
    if np.any(r < lo * (1 - 1e-12)):
        raise ValueError("point inside the scatterer disk")
    coeff = _disk_series_coeffs(k, a, tol)
    n = len(coeff)
    h = hankel1_table(n, k * r)  # one extra order for the derivative
    mm = np.arange(n)
    hm = h[:n]
    hprev = np.empty_like(hm)
    hprev[0] = -h[1]
    hprev[1:] = h[: n - 1]
    dh = hprev - mm[:, None] / (k * r[None, :]) * hm
    cosmt = np.cos(mm[:, None] * theta[None, :])
    sinmt = np.sin(mm[:, None] * theta[None, :])
    weights = np.where(mm == 0, 1.0, 2.0)[:, None]
    u_r = -(weights * coeff[:, None] * k * dh * cosmt).sum(axis=0)
    u_t = (weights * coeff[:, None] * hm * mm[:, None] * sinmt).sum(axis=0)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    gx = u_r * cos_t - u_t * sin_t / r
    gy = u_r * sin_t + u_t * cos_t / r
    return np.column_stack([gx, gy])


def disk_scatter_field(k: float, a: float, tol: float = 1e-14, r_min: float | None = None) -> WaveField:
    """WaveField wrapper around the sound-soft disk series (chunked)."""

    def value(pts):
        pts = np.atleast_2d(pts)
        out = np.empty(len(pts), dtype=np.complex128)
        for s in range(0, len(pts), 20000):
            out[s : s + 20000] = disk_scatter_series(k, a, pts[s : s + 20000], tol, r_min)
        return out

    def gradient(pts):
        pts = np.atleast_2d(pts)
        out = np.empty((len(pts), 2), dtype=np.complex128)
        for s in range(0, len(pts), 20000):
            out[s : s + 20000] = disk_scatter_gradient(k, a, pts[s : s + 20000], tol, r_min)
        return out

    return WaveField(f"disk_scatter_k{k:g}_a{a:g}", k, value, gradient)


# ---------------------------------------------------------------------------
# variable-medium data (scalar contrast)


def contrast_bump(pts) -> np.ndarray:
    """b(x) = 0.5 erfc(5 (|x|^2 - 1)); decays below 1e-8 outside radius 1.8."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    return 0.5 * scipy.special.erfc(5.0 * (r2 - 1.0))
