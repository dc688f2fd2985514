"""Cartesian PML stretching, the weight fields it induces, and the Robin
truncation used for comparison.

The absorbing layer lives between the interface box [-a1,a1] x [-a2,a2] and
the outer box [-b1,b1] x [-b2,b2].  Complex stretching gamma_j = 1 + i
sigma_j(x_j) turns the Helmholtz operator into a weighted one with the
diagonal matrix weight A = diag(gamma2/gamma1, gamma1/gamma2) and scalar
weight J = gamma1 * gamma2.  Inside the interface box A = I and J = 1 and
nothing changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from splinepml import bernstein as bb
from splinepml.mesh import OUTER_PML, Triangulation
from splinepml.spline_space import SplineSpaceDef, interpolate_scalar


@dataclass(frozen=True)
class PmlConfig:
    """Layer geometry and strength.

    The quartic profile (exponent 4) is the default; it gave the best
    accuracy among the low-order polynomial profiles in our runs.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    sigma0: float
    exponent: int = 4

    def __post_init__(self):
        if not (0 < self.a1 < self.b1 and 0 < self.a2 < self.b2):
            raise ValueError(f"need 0 < a_j < b_j, got {self}")
        if self.sigma0 < 0:
            raise ValueError("sigma0 must be >= 0")
        if self.exponent < 0 or self.exponent != int(self.exponent):
            raise ValueError("profile exponent must be a nonnegative integer")

    def halves(self, axis: int) -> tuple[float, float]:
        return (self.a1, self.b1) if axis == 0 else (self.a2, self.b2)


def sigma(cfg: PmlConfig, axis: int, x) -> np.ndarray:
    """Absorption profile sigma0 * ((|x| - a)/(b - a))^n, zero inside |x| < a.

    Only the truncated branch |x| <= b is meaningful here; the computational
    box ends at b where a homogeneous Dirichlet condition is imposed.
    """
    a, b = cfg.halves(axis)
    x = np.asarray(x, dtype=float)
    t = np.clip((np.abs(x) - a) / (b - a), 0.0, None)
    return cfg.sigma0 * t**cfg.exponent


def stretching(cfg: PmlConfig, axis: int, x) -> np.ndarray:
    """gamma_j(x_j) = 1 + i sigma_j(x_j)."""
    return 1.0 + 1j * sigma(cfg, axis, x)


def weights_at(cfg: PmlConfig, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A11, A22, J) at the given points (m, 2).

    A11 = gamma2/gamma1, A22 = gamma1/gamma2, J = gamma1*gamma2, so
    A11 * A22 = 1 identically.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    b = np.array([cfg.b1, cfg.b2])
    if np.any(np.abs(pts) > b[None, :] * (1 + 1e-9)):
        raise ValueError("point outside the outer box")
    g1 = stretching(cfg, 0, pts[:, 0])
    g2 = stretching(cfg, 1, pts[:, 1])
    return g2 / g1, g1 / g2, g1 * g2


def weights_to_splines(
    cfg: PmlConfig, mesh: Triangulation, degree: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interpolate A11, A22, J into the C0 spline space of the trial degree.

    On meshes aligned with the interface box the interpolants are exactly
    (1, 1, 1) on every triangle inside it.  On unaligned meshes the kink of
    the profile at |x_j| = a_j limits the local interpolation order there;
    this is accepted, not special-cased.
    """
    fields = [
        lambda p: weights_at(cfg, p)[0],
        lambda p: weights_at(cfg, p)[1],
        lambda p: weights_at(cfg, p)[2],
    ]
    return tuple(interpolate_scalar(mesh, degree, f) for f in fields)


def robin_boundary_term(k: float, space: SplineSpaceDef) -> sp.csr_matrix:
    """ik-scaled boundary mass matrix on the outer boundary.

    Implements the first-order absorbing condition du/dn - ik u = 0: the
    weak form gains -ik * int_edge u v over the outer boundary, assembled
    here exactly from univariate Bernstein products.  The result is complex
    symmetric (not Hermitian).
    """
    mesh = space.mesh
    d = space.degree
    n = space.n_local
    lut = bb.index_table(d)
    E = bb.edge_pair_matrix(d)
    rows, cols, vals = [], [], []
    for eidx in mesh.boundary_edges(OUTER_PML):
        u, v = mesh.edges[eidx]
        t = int(mesh.edge_tris[eidx, 0])
        tri = mesh.triangles[t]
        su = int(np.argmax(tri == u))
        sv = int(np.argmax(tri == v))
        length = float(np.linalg.norm(mesh.vertices[v] - mesh.vertices[u]))
        local = np.empty(d + 1, dtype=np.int64)
        for j in range(d + 1):
            m = [0, 0, 0]
            m[su] = j
            m[sv] = d - j
            local[j] = lut[m[0], m[1]]
        gcols = t * n + local
        rows.append(np.repeat(gcols, d + 1))
        cols.append(np.tile(gcols, d + 1))
        vals.append((length * E).ravel())
    if not rows:
        return sp.csr_matrix((space.n_dofs, space.n_dofs), dtype=np.complex128)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.n_dofs, space.n_dofs),
    )
    return (1j * k * mat).tocsr()
