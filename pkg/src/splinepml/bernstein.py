"""Bernstein-Bezier algebra on a single triangle.

A polynomial of degree d on a triangle T = (v1, v2, v3) is stored in B-form:
coefficients indexed by multi-indices (i, j, k) with i + j + k = d, paired
with the Bernstein basis

    B_{ijk}(x, y) = d!/(i! j! k!) * b1^i b2^j b3^k,

where (b1, b2, b3) are barycentric coordinates with respect to T.  All
products and integrals of B-form polynomials are evaluated through exact
combinatorial identities, so no quadrature rule enters the computation
anywhere in this package.

Multi-index order is lexicographic, descending in i then j.  This order is
fixed globally: constraint matrices and stacked coefficient vectors depend
on it being reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, lgamma

import numpy as np

# Products reach degree 3d internally for weighted triple pairings; the
# tables in the experiments use d <= 10.
MAX_PRODUCT_DEGREE = 40


def n_coeffs(degree: int) -> int:
    """Number of B-form coefficients of a degree-d polynomial."""
    return (degree + 1) * (degree + 2) // 2


@lru_cache(maxsize=None)
def multi_indices(degree: int) -> np.ndarray:
    """All (i, j, k) with i+j+k = degree, lexicographic descending in i, j."""
    out = [
        (i, j, degree - i - j)
        for i in range(degree, -1, -1)
        for j in range(degree - i, -1, -1)
    ]
    arr = np.array(out, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def index_table(degree: int) -> np.ndarray:
    """Table mapping (i, j) -> position in multi_indices(degree); -1 if invalid."""
    lut = np.full((degree + 2, degree + 2), -1, dtype=np.int64)
    mi = multi_indices(degree)
    lut[mi[:, 0], mi[:, 1]] = np.arange(len(mi))
    lut.setflags(write=False)
    return lut


def index_of(degree: int, i: int, j: int, k: int) -> int:
    if i + j + k != degree or min(i, j, k) < 0:
        raise ValueError(f"invalid multi-index ({i},{j},{k}) for degree {degree}")
    return int(index_table(degree)[i, j])


@lru_cache(maxsize=None)
def _step_maps(degree: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index maps for one de Casteljau step, degree -> degree-1.

    For each target index (i, j, k), the maps give the positions of
    (i+1, j, k), (i, j+1, k) and (i, j, k+1) in the degree-d layout.
    """
    mi = multi_indices(degree - 1)
    lut = index_table(degree)
    m1 = lut[mi[:, 0] + 1, mi[:, 1]]
    m2 = lut[mi[:, 0], mi[:, 1] + 1]
    m3 = lut[mi[:, 0], mi[:, 1]]
    return m1, m2, m3


@dataclass(frozen=True)
class BFormPoly:
    """Polynomial on a triangle in B-form; coefficients are complex."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (n_coeffs(self.degree),):
            raise ValueError(
                f"degree {self.degree} needs {n_coeffs(self.degree)} coefficients, "
                f"got {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: complex, degree: int = 0) -> "BFormPoly":
        return cls(degree, np.full(n_coeffs(degree), value, dtype=np.complex128))


def triangle_area(tri: np.ndarray) -> float:
    """Signed area of a triangle given as a (3, 2) vertex array."""
    tri = np.asarray(tri, dtype=float)
    return 0.5 * float(
        (tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1])
        - (tri[2, 0] - tri[0, 0]) * (tri[1, 1] - tri[0, 1])
    )


def barycentric(tri: np.ndarray, p) -> np.ndarray:
    """Barycentric coordinates of point p with respect to triangle tri.

    Solves b1 + b2 + b3 = 1, sum b_i v_i = p.  Coordinates of points inside
    the triangle are nonnegative.
    """
    tri = np.asarray(tri, dtype=float)
    area2 = 2.0 * triangle_area(tri)
    scale = max(np.abs(tri).max(), 1.0)
    if abs(area2) <= 1e-14 * scale * scale:
        raise ValueError("degenerate triangle")
    mat = np.vstack([np.ones(3), tri.T])
    rhs = np.array([1.0, p[0], p[1]], dtype=float)
    return np.linalg.solve(mat, rhs)


def barycentric_direction(tri: np.ndarray, u) -> np.ndarray:
    """Barycentric coordinates of a direction vector u (they sum to zero)."""
    tri = np.asarray(tri, dtype=float)
    area2 = 2.0 * triangle_area(tri)
    scale = max(np.abs(tri).max(), 1.0)
    if abs(area2) <= 1e-14 * scale * scale:
        raise ValueError("degenerate triangle")
    # a_i = grad(b_i) . u with grad(b_i) = perp(opposite edge) / (2 area)
    v1, v2, v3 = tri
    grads = (
        np.array(
            [
                [v2[1] - v3[1], v3[0] - v2[0]],
                [v3[1] - v1[1], v1[0] - v3[0]],
                [v1[1] - v2[1], v2[0] - v1[0]],
            ]
        )
        / area2
    )
    return grads @ np.asarray(u, dtype=float)


def de_casteljau_step(degree: int, coeffs: np.ndarray, triple) -> np.ndarray:
    """One de Casteljau step with an arbitrary triple (t1, t2, t3).

    With a point triple (summing to 1) repeated steps evaluate the
    polynomial; with a direction triple (summing to 0) one step gives the
    coefficients of the directional derivative up to the factor d.
    """
    m1, m2, m3 = _step_maps(degree)
    t1, t2, t3 = triple
    return t1 * coeffs[m1] + t2 * coeffs[m2] + t3 * coeffs[m3]


def eval_bform(poly: BFormPoly, b) -> complex:
    """Evaluate a B-form polynomial at barycentric point b (de Casteljau)."""
    b = np.asarray(b, dtype=float)
    if abs(b.sum() - 1.0) > 1e-9:
        raise ValueError("barycentric point must sum to 1")
    c = poly.coeffs
    for l in range(poly.degree, 0, -1):
        c = de_casteljau_step(l, c, b)
    return complex(c[0])


def dir_derivative(poly: BFormPoly, a) -> BFormPoly:
    """Directional derivative along the direction with barycentric triple a.

    The result has degree d-1 and coefficients d*(a1 c_{i+1,j,k} +
    a2 c_{i,j+1,k} + a3 c_{i,j,k+1}).  A degree-0 input differentiates to
    the zero polynomial.
    """
    a = np.asarray(a, dtype=float)
    if abs(a.sum()) > 1e-12 * max(1.0, np.abs(a).max()):
        raise ValueError("direction triple must sum to 0")
    if poly.degree == 0:
        return BFormPoly(0, np.zeros(1, dtype=np.complex128))
    out = poly.degree * de_casteljau_step(poly.degree, poly.coeffs, a)
    return BFormPoly(poly.degree - 1, out)


def cartesian_gradient(poly: BFormPoly, tri: np.ndarray) -> tuple[BFormPoly, BFormPoly]:
    """(d/dx, d/dy) of a B-form polynomial on triangle tri, as degree d-1 polys."""
    ax = barycentric_direction(tri, (1.0, 0.0))
    ay = barycentric_direction(tri, (0.0, 1.0))
    if poly.degree == 0:
        zero = BFormPoly(0, np.zeros(1, dtype=np.complex128))
        return zero, zero
    return dir_derivative(poly, ax), dir_derivative(poly, ay)


@lru_cache(maxsize=None)
def _product_maps(d1: int, d2: int):
    """Sparse triples (out, p, q, weight) implementing B-form multiplication.

    B_{alpha}^{d1} B_{beta}^{d2} = w(alpha, beta) B_{alpha+beta}^{d1+d2} with
    w = C(alpha+beta, alpha) / C(d1+d2, d1), the C's being products of
    per-component binomials.
    """
    mi1 = multi_indices(d1)
    mi2 = multi_indices(d2)
    lut = index_table(d1 + d2)
    n1, n2 = len(mi1), len(mi2)
    a = np.repeat(np.arange(n1), n2)
    b = np.tile(np.arange(n2), n1)
    s = mi1[a] + mi2[b]
    out = lut[s[:, 0], s[:, 1]]
    lg = _lgamma_table(d1 + d2 + 3)
    # log of C(s, alpha) per component, summed
    logw = (
        lg[s[:, 0]] + lg[s[:, 1]] + lg[s[:, 2]]
        - lg[mi1[a, 0]] - lg[mi1[a, 1]] - lg[mi1[a, 2]]
        - lg[mi2[b, 0]] - lg[mi2[b, 1]] - lg[mi2[b, 2]]
    )
    logw -= np.log(comb(d1 + d2, d1))
    w = np.exp(logw)
    return out, a, b, w


@lru_cache(maxsize=None)
def _lgamma_table(n: int) -> np.ndarray:
    tab = np.array([lgamma(i + 1) for i in range(n + 1)])
    tab.setflags(write=False)
    return tab


def product(p: BFormPoly, q: BFormPoly) -> BFormPoly:
    """Exact product of two B-form polynomials (degree d1 + d2)."""
    d = p.degree + q.degree
    if d > MAX_PRODUCT_DEGREE:
        raise ValueError(f"product degree {d} exceeds limit {MAX_PRODUCT_DEGREE}")
    out_idx, a_idx, b_idx, w = _product_maps(p.degree, q.degree)
    out = np.zeros(n_coeffs(d), dtype=np.complex128)
    np.add.at(out, out_idx, w * p.coeffs[a_idx] * q.coeffs[b_idx])
    return BFormPoly(d, out)


def integral(poly: BFormPoly, tri: np.ndarray) -> complex:
    """Exact integral over the triangle: area * sum(coeffs) / C(d+2, 2)."""
    area = triangle_area(np.asarray(tri, dtype=float))
    if area <= 0.0:
        raise ValueError("triangle must have positive area")
    return complex(area * poly.coeffs.sum() / n_coeffs(poly.degree))


_OPS = ("value", "dx", "dy")


def _apply_op(poly: BFormPoly, op: str, tri: np.ndarray) -> BFormPoly:
    if op == "value":
        return poly
    if op == "dx":
        return cartesian_gradient(poly, tri)[0]
    if op == "dy":
        return cartesian_gradient(poly, tri)[1]
    raise ValueError(f"unknown operator {op!r}; expected one of {_OPS}")


def weighted_pairing(
    u: BFormPoly, u_op: str, v: BFormPoly, v_op: str, w: BFormPoly, tri: np.ndarray
) -> complex:
    """Exact value of int_T op(u) * op(v) * w, with op in {value, dx, dy}."""
    fu = _apply_op(u, u_op, tri)
    fv = _apply_op(v, v_op, tri)
    return integral(product(product(fu, fv), w), tri)


def bernstein_basis_matrix(degree: int, bary: np.ndarray) -> np.ndarray:
    """Matrix of Bernstein basis values: rows = points, columns = basis index.

    bary is an (m, 3) array of barycentric points.
    """
    bary = np.atleast_2d(np.asarray(bary, dtype=float))
    mi = multi_indices(degree)
    lg = _lgamma_table(degree + 1)
    logmult = lg[degree] - lg[mi[:, 0]] - lg[mi[:, 1]] - lg[mi[:, 2]]
    mult = np.exp(logmult)
    # powers b^e for e = 0..degree, per coordinate
    pows = np.stack(
        [np.power(bary[:, c][:, None], np.arange(degree + 1)[None, :]) for c in range(3)]
    )
    return mult[None, :] * pows[0][:, mi[:, 0]] * pows[1][:, mi[:, 1]] * pows[2][:, mi[:, 2]]


@lru_cache(maxsize=None)
def triple_tensor(d1: int, d2: int, dw: int) -> np.ndarray:
    """G[a, b, g] = (1/area) * int_T B_a^{d1} B_b^{d2} B_g^{dw}.

    Uses int_T b^alpha = 2 area * alpha! / (|alpha|+2)! componentwise, which
    makes the tensor independent of the triangle up to the area factor.
    """
    mi1, mi2, mi3 = multi_indices(d1), multi_indices(d2), multi_indices(dw)
    lg = _lgamma_table(d1 + d2 + dw + 3)
    base = (
        lg[d1] - lg[mi1[:, 0]] - lg[mi1[:, 1]] - lg[mi1[:, 2]],
        lg[d2] - lg[mi2[:, 0]] - lg[mi2[:, 1]] - lg[mi2[:, 2]],
        lg[dw] - lg[mi3[:, 0]] - lg[mi3[:, 1]] - lg[mi3[:, 2]],
    )
    s0 = mi1[:, None, None, :] + mi2[None, :, None, :] + mi3[None, None, :, :]
    logg = (
        base[0][:, None, None]
        + base[1][None, :, None]
        + base[2][None, None, :]
        + lg[s0[..., 0]] + lg[s0[..., 1]] + lg[s0[..., 2]]
        + np.log(2.0)
        - lg[d1 + d2 + dw + 2]
    )
    out = np.exp(logg)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def pair_tensor(d1: int, d2: int) -> np.ndarray:
    """P[a, b] = (1/area) * int_T B_a^{d1} B_b^{d2}."""
    out = triple_tensor(d1, d2, 0)[:, :, 0].copy()
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def edge_pair_matrix(degree: int) -> np.ndarray:
    """E[a, b] = (1/L) * int_edge B_a(t) B_b(t) dt for univariate Bernstein."""
    d = degree
    idx = np.arange(d + 1)
    ca = np.array([comb(d, int(a)) for a in idx], dtype=float)
    out = np.empty((d + 1, d + 1))
    for a in idx:
        for b in idx:
            out[a, b] = ca[a] * ca[b] / (comb(2 * d, int(a + b)) * (2 * d + 1))
    out.setflags(write=False)
    return out
