"""Global spline spaces as stacked per-triangle B-form coefficients.

A spline of degree d over a mesh with nt triangles is a coefficient vector
of length nt * (d+1)(d+2)/2, triangle-major, multi-index order within each
triangle.  Smoothness is not built into basis functions: membership in
C^r is expressed by sparse linear constraints H c = 0 assembled here, and
Dirichlet data by D c = g.  The solver enforces both as side constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from splinepml import bernstein as bb
from splinepml.mesh import Triangulation

OUTSIDE = None


@dataclass(frozen=True)
class SplineSpaceDef:
    """Degree-d spline space over a mesh with smoothness r in {0, 1}.

    Smoothness r = 1 is allowed for any d >= 2; note the classical
    approximation theory assumes d >= 3r + 2, so error guarantees below
    that are empirical only.
    """

    mesh: Triangulation
    degree: int
    smoothness: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if self.smoothness not in (0, 1):
            raise ValueError("smoothness must be 0 or 1")
        if self.smoothness == 1 and self.degree < 2:
            raise ValueError("C1 spaces need degree >= 2")

    @property
    def n_local(self) -> int:
        return bb.n_coeffs(self.degree)

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_triangles * self.n_local

    def local_coeffs(self, c: np.ndarray, t: int) -> np.ndarray:
        n = self.n_local
        return c[t * n : (t + 1) * n]


def _edge_slots(mesh: Triangulation, edge_idx: np.ndarray):
    """Local vertex slots (slot of u, slot of v, opposite slot) per triangle side."""
    u = mesh.edges[edge_idx, 0]
    v = mesh.edges[edge_idx, 1]
    out = []
    for side in (0, 1):
        t = mesh.edge_tris[edge_idx, side]
        tri = mesh.triangles[t]
        su = np.argmax(tri == u[:, None], axis=1)
        sv = np.argmax(tri == v[:, None], axis=1)
        so = 3 - su - sv
        out.append((t, su, sv, so))
    return out


def _grad_rows(mesh: Triangulation, tris: np.ndarray) -> np.ndarray:
    """Barycentric gradient vectors, shape (m, 3, 2): rows are grad(b_slot)."""
    tc = mesh.tri_coords[tris]
    areas2 = 2.0 * mesh.areas()[tris]
    g = np.empty((len(tris), 3, 2))
    for s in range(3):
        a = tc[:, (s + 1) % 3]
        b = tc[:, (s + 2) % 3]
        g[:, s, 0] = a[:, 1] - b[:, 1]
        g[:, s, 1] = b[:, 0] - a[:, 0]
    return g / areas2[:, None, None]


def build_smoothness(space: SplineSpaceDef) -> sp.csr_matrix:
    """Sparse matrix H with H c = 0 iff the stacked spline is C^r.

    Per interior edge: d+1 continuity rows matching edge coefficients, plus
    (for r = 1) d rows matching first derivatives along a transversal
    direction, taken from one opposite vertex to the other.  Rows are scaled
    to unit max entry; row order is edge-major, continuity rows first.
    """
    mesh = space.mesh
    d = space.degree
    n = space.n_local
    lut = bb.index_table(d)
    interior = mesh.interior_edges()
    ne = len(interior)
    (t1, su1, sv1, so1), (t2, su2, sv2, so2) = _edge_slots(mesh, interior)

    rows, cols, vals = [], [], []

    def edge_local_index(su, sv, j, k):
        m = np.zeros((len(su), 3), dtype=np.int64)
        m[np.arange(len(su)), su] = j
        m[np.arange(len(su)), sv] = k
        return lut[m[:, 0], m[:, 1]]

    row_base = 0
    for pos, j in enumerate(range(d, -1, -1)):
        k = d - j
        r = row_base + np.arange(ne) * (d + 1) + pos
        rows.extend([r, r])
        cols.extend([t1 * n + edge_local_index(su1, sv1, j, k), t2 * n + edge_local_index(su2, sv2, j, k)])
        vals.extend([np.ones(ne), -np.ones(ne)])
    row_base += ne * (d + 1)

    if space.smoothness == 1:
        # transversal direction: from the opposite vertex of the first
        # triangle to the opposite vertex of the second
        p1 = mesh.vertices[mesh.triangles[t1, :][np.arange(ne), so1]]
        p2 = mesh.vertices[mesh.triangles[t2, :][np.arange(ne), so2]]
        a_vec = p2 - p1
        alpha = np.einsum("esd,ed->es", _grad_rows(mesh, t1), a_vec)
        beta = np.einsum("esd,ed->es", _grad_rows(mesh, t2), a_vec)

        for pos, j in enumerate(range(d - 1, -1, -1)):
            k = d - 1 - j
            r = row_base + np.arange(ne) * d + pos
            row_vals = np.empty((ne, 6))
            row_cols = np.empty((ne, 6), dtype=np.int64)
            for s in range(3):
                m = np.zeros((ne, 3), dtype=np.int64)
                m[np.arange(ne), su1] = j
                m[np.arange(ne), sv1] = k
                m[np.arange(ne), s] += 1
                row_cols[:, s] = t1 * n + lut[m[:, 0], m[:, 1]]
                row_vals[:, s] = alpha[:, s]
                m2 = np.zeros((ne, 3), dtype=np.int64)
                m2[np.arange(ne), su2] = j
                m2[np.arange(ne), sv2] = k
                m2[np.arange(ne), s] += 1
                row_cols[:, 3 + s] = t2 * n + lut[m2[:, 0], m2[:, 1]]
                row_vals[:, 3 + s] = -beta[:, s]
            row_vals /= np.abs(row_vals).max(axis=1)[:, None]
            rows.append(np.repeat(r, 6))
            cols.append(row_cols.ravel())
            vals.append(row_vals.ravel())
        row_base += ne * d

    if not rows:
        return sp.csr_matrix((0, space.n_dofs))
    rows = np.concatenate([np.asarray(r).ravel() for r in rows])
    cols = np.concatenate([np.asarray(c).ravel() for c in cols])
    vals = np.concatenate([np.asarray(v).ravel() for v in vals])
    H = sp.coo_matrix((vals, (rows, cols)), shape=(row_base, space.n_dofs))
    # duplicate (row, col) pairs may appear when a raised multi-index lands on
    # the same coefficient from two slots; summing them is the correct row
    return H.tocsr()


def build_dirichlet(space: SplineSpaceDef, tags, g) -> tuple[sp.csr_matrix, np.ndarray]:
    """Dirichlet constraint D c = g_vec by edge interpolation.

    Samples the boundary trace g at d+1 equally spaced points on each
    tagged boundary edge; each row holds the univariate Bernstein values of
    the owning triangle's edge coefficients at that point.
    """
    mesh = space.mesh
    d = space.degree
    n = space.n_local
    lut = bb.index_table(d)
    if isinstance(tags, str):
        tags = (tags,)
    edge_idx = np.concatenate([mesh.boundary_edges(tag) for tag in tags]) if tags else np.array([], dtype=int)
    edge_idx = np.sort(edge_idx)
    ne = len(edge_idx)
    if ne == 0:
        return sp.csr_matrix((0, space.n_dofs)), np.zeros(0, dtype=np.complex128)

    u = mesh.edges[edge_idx, 0]
    v = mesh.edges[edge_idx, 1]
    t = mesh.edge_tris[edge_idx, 0]
    tri = mesh.triangles[t]
    su = np.argmax(tri == u[:, None], axis=1)
    sv = np.argmax(tri == v[:, None], axis=1)

    lam = np.arange(d + 1) / d  # weight of vertex u at each sample
    pts = (
        lam[None, :, None] * mesh.vertices[u][:, None, :]
        + (1 - lam)[None, :, None] * mesh.vertices[v][:, None, :]
    )
    gvals = np.asarray(g(pts.reshape(-1, 2)), dtype=np.complex128).reshape(ne, d + 1)

    # univariate Bernstein values: coefficient (j at slot u, k at slot v)
    mult = np.array([math.comb(d, j) for j in range(d + 1)], dtype=float)
    basis = mult[None, :] * lam[:, None] ** np.arange(d + 1)[None, :] * (1 - lam[:, None]) ** (
        d - np.arange(d + 1)
    )[None, :]  # (sample, j)

    cols = np.empty((ne, d + 1), dtype=np.int64)
    for j in range(d + 1):
        m = np.zeros((ne, 3), dtype=np.int64)
        m[np.arange(ne), su] = j
        m[np.arange(ne), sv] = d - j
        cols[:, j] = t * n + lut[m[:, 0], m[:, 1]]

    scale = np.abs(basis).max(axis=1)
    rows = np.repeat(np.arange(ne * (d + 1)), d + 1)
    col_list = np.tile(cols[:, None, :], (1, d + 1, 1)).reshape(-1)
    val_list = np.tile(basis[None, :, :] / scale[None, :, None], (ne, 1, 1)).reshape(-1)
    D = sp.coo_matrix(
        (val_list, (rows, col_list)), shape=(ne * (d + 1), space.n_dofs)
    ).tocsr()
    gvec = (gvals / scale[None, :]).reshape(-1)
    return D, gvec


def interpolate_scalar(mesh: Triangulation, degree: int, f) -> np.ndarray:
    """Interpolate a scalar field into the C0 spline space of given degree.

    Solves the (d+1)(d+2)/2-point interpolation problem at the domain points
    of every triangle.  Because shared edge points coincide, the result is
    continuous whenever f is.
    """
    d = degree
    mi = bb.multi_indices(d) / d
    pts = np.einsum("mk,tkd->tmd", mi, mesh.tri_coords)
    vals = np.asarray(f(pts.reshape(-1, 2)), dtype=np.complex128).reshape(
        mesh.n_triangles, -1
    )
    basis = bb.bernstein_basis_matrix(d, mi)
    lu, piv = scipy.linalg.lu_factor(basis)
    coeffs = scipy.linalg.lu_solve((lu, piv), vals.T).T
    return np.ascontiguousarray(coeffs.reshape(-1))


def eval_spline(space: SplineSpaceDef, c: np.ndarray, p):
    """Value of the stacked spline at a point; None when outside the mesh."""
    hit = space.mesh.locate(p)
    if hit is OUTSIDE:
        return OUTSIDE
    t, bary = hit
    poly = bb.BFormPoly(space.degree, space.local_coeffs(c, t))
    return bb.eval_bform(poly, bary)


def eval_spline_gradient(space: SplineSpaceDef, c: np.ndarray, p):
    """Gradient (du/dx, du/dy) of the spline at a point; None outside."""
    hit = space.mesh.locate(p)
    if hit is OUTSIDE:
        return OUTSIDE
    t, bary = hit
    poly = bb.BFormPoly(space.degree, space.local_coeffs(c, t))
    px, py = bb.cartesian_gradient(poly, space.mesh.tri_coords[t])
    return np.array([bb.eval_bform(px, bary), bb.eval_bform(py, bary)])


def eval_spline_many(
    space: SplineSpaceDef, c: np.ndarray, pts: np.ndarray, gradient: bool = False
):
    """Batch spline evaluation.

    Returns (values, grads, inside_mask); grads is None unless requested.
    Points outside the mesh get value 0 and mask False.
    """
    mesh = space.mesh
    d = space.degree
    n = space.n_local
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    ids, bary = mesh.locate_many(pts)
    values = np.zeros(len(pts), dtype=np.complex128)
    grads = np.zeros((len(pts), 2), dtype=np.complex128) if gradient else None
    inside = ids >= 0
    if not inside.any():
        return values, grads, inside

    order = np.argsort(ids[inside], kind="stable")
    pidx = np.nonzero(inside)[0][order]
    tids = ids[pidx]
    starts = np.nonzero(np.diff(tids, prepend=tids[0] - 1))[0]
    coeffs = c.reshape(mesh.n_triangles, n)
    for s, e in zip(starts, np.append(starts[1:], len(tids))):
        t = int(tids[s])
        sel = pidx[s:e]
        B = bb.bernstein_basis_matrix(d, bary[sel])
        values[sel] = B @ coeffs[t]
        if gradient:
            poly = bb.BFormPoly(d, coeffs[t])
            px, py = bb.cartesian_gradient(poly, mesh.tri_coords[t])
            Bg = bb.bernstein_basis_matrix(d - 1, bary[sel])
            grads[sel, 0] = Bg @ px.coeffs
            grads[sel, 1] = Bg @ py.coeffs
    return values, grads, inside
