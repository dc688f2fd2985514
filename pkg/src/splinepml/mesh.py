"""Conforming triangulations of rectangular annular domains.

The solver meshes a rectangle [-b1, b1] x [-b2, b2] with a hole cut out for
the scatterer.  Three hole templates cover the experiments:

* ``RectHole`` -- axis-aligned rectangular hole, meshed by dropping grid
  cells (exact when the hole edges lie on grid lines);
* ``DiskHole`` -- a regular polygon inscribed in a circle, connected to the
  surrounding Cartesian grid by a blended radial band;
* ``GridMaskHole`` -- arbitrary obstacle given by an inside-predicate, meshed
  by removing grid cells whose center is inside (a staircase approximation,
  exact for grid-aligned rectilinear obstacles).

Meshes are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SCATTERER = "Scatterer"
OUTER_PML = "OuterPml"
_TAG_CODES = {SCATTERER: 1, OUTER_PML: 2}
_CODE_TAGS = {v: k for k, v in _TAG_CODES.items()}


@dataclass(frozen=True)
class RectHole:
    """Rectangular hole [-c1, c1] x [-c2, c2]."""

    c1: float
    c2: float


@dataclass(frozen=True)
class DiskHole:
    """Disk of given radius, approximated by an inscribed regular polygon.

    With ``n_poly`` unset the vertex count is 4 * ceil(pi * radius / h), a
    multiple of four so the polygon shares the symmetries of the grid.
    """

    radius: float
    n_poly: int | None = None


@dataclass(frozen=True)
class GridMaskHole:
    """Obstacle described by a point predicate; meshed by cell removal."""

    inside: Callable[[np.ndarray], np.ndarray]
    name: str = "mask"


Hole = RectHole | DiskHole | GridMaskHole


@dataclass(frozen=True)
class DomainSpec:
    """Rectangular computational box with a scatterer hole.

    ``outer`` gives the half-widths (b1, b2) of the full box including the
    absorbing layer; ``align`` optionally gives the half-widths (a1, a2) of
    the interior interface the mesh must not cross.
    """

    outer: tuple[float, float]
    hole: Hole | None = None
    align: tuple[float, float] | None = None

    def validate(self) -> None:
        b1, b2 = self.outer
        if not (b1 > 0 and b2 > 0):
            raise ValueError(f"outer half-widths must be positive, got {self.outer}")
        a1, a2 = self.align if self.align is not None else (b1, b2)
        if not (0 < a1 <= b1 and 0 < a2 <= b2):
            raise ValueError(f"interface box {self.align} not inside outer box {self.outer}")
        if self.align is not None and not (a1 < b1 and a2 < b2):
            raise ValueError(f"interface box {self.align} must be strictly inside {self.outer}")
        if isinstance(self.hole, RectHole):
            if not (0 < self.hole.c1 < a1 and 0 < self.hole.c2 < a2):
                raise ValueError(
                    f"hole {self.hole} not strictly inside interface box ({a1}, {a2})"
                )
        elif isinstance(self.hole, DiskHole):
            if not 0 < self.hole.radius < min(a1, a2):
                raise ValueError(
                    f"disk radius {self.hole.radius} not strictly inside ({a1}, {a2})"
                )


def _snap_count(length: float, h: float, what: str) -> int:
    n = round(length / h)
    if n < 1 or abs(n * h - length) > 1e-9 * max(1.0, length):
        raise ValueError(f"mesh width {h} does not divide {what} extent {length}")
    return n


class Triangulation:
    """Conforming triangle mesh with boundary tags and adjacency tables.

    ``vertices`` is (nv, 2) float, ``triangles`` (nt, 3) int with
    counterclockwise orientation.  Boundary edges carry exactly one tag
    (Scatterer or OuterPml); interior edges have two incident triangles.
    """

    def __init__(
        self,
        vertices: np.ndarray,
        triangles: np.ndarray,
        *,
        boundary_tags: dict[tuple[int, int], str] | None = None,
        outer_half_widths: tuple[float, float] | None = None,
        declared_area: float | None = None,
    ):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError("vertices must be (nv, 2)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must be (nt, 3)")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("vertex coordinates must be finite")
        tc = self.vertices[self.triangles]
        areas = 0.5 * (
            (tc[:, 1, 0] - tc[:, 0, 0]) * (tc[:, 2, 1] - tc[:, 0, 1])
            - (tc[:, 2, 0] - tc[:, 0, 0]) * (tc[:, 1, 1] - tc[:, 0, 1])
        )
        if np.any(areas <= 0):
            bad = int(np.argmin(areas))
            raise ValueError(f"triangle {bad} is degenerate or clockwise (area {areas[bad]:g})")
        self._areas = areas
        self._tri_coords = tc
        self._build_edges()
        self._assign_tags(boundary_tags, outer_half_widths)
        self.outer_half_widths = outer_half_widths
        self.declared_area = declared_area
        self._locator = None
        for arr in (self.vertices, self.triangles, self._areas, self.edges, self.edge_tris, self.boundary_codes):
            arr.setflags(write=False)

    # -- construction helpers ------------------------------------------------

    def _build_edges(self) -> None:
        t = self.triangles
        raw = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        if np.any(raw[:, 0] == raw[:, 1]):
            raise ValueError("triangle with repeated vertex")
        key = np.sort(raw, axis=1)
        edges, inverse = np.unique(key, axis=0, return_inverse=True)
        owner = np.tile(np.arange(len(t)), 3)
        counts = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            raise ValueError("non-conforming mesh: an edge has more than two triangles")
        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        order = np.argsort(inverse, kind="stable")
        ei = inverse[order]
        tri_sorted = owner[order]
        first = np.searchsorted(ei, np.arange(len(edges)))
        edge_tris[:, 0] = tri_sorted[first]
        has_two = counts == 2
        edge_tris[has_two, 1] = tri_sorted[first[has_two] + 1]
        self.edges = edges
        self.edge_tris = edge_tris

    def _assign_tags(self, boundary_tags, outer_half_widths) -> None:
        codes = np.zeros(len(self.edges), dtype=np.int8)
        boundary = self.edge_tris[:, 1] < 0
        if boundary_tags is not None:
            for idx in np.nonzero(boundary)[0]:
                key = (int(self.edges[idx, 0]), int(self.edges[idx, 1]))
                tag = boundary_tags.get(key)
                if tag is None:
                    raise ValueError(f"boundary edge {key} has no tag")
                codes[idx] = _TAG_CODES[tag]
        elif outer_half_widths is not None:
            b1, b2 = outer_half_widths
            v = self.vertices
            on_outer = (np.abs(np.abs(v[:, 0]) - b1) < 1e-9 * max(1.0, b1)) | (
                np.abs(np.abs(v[:, 1]) - b2) < 1e-9 * max(1.0, b2)
            )
            both = on_outer[self.edges[:, 0]] & on_outer[self.edges[:, 1]]
            codes[boundary & both] = _TAG_CODES[OUTER_PML]
            codes[boundary & ~both] = _TAG_CODES[SCATTERER]
        else:
            raise ValueError("need boundary_tags or outer_half_widths to tag the boundary")
        self.boundary_codes = codes

    # -- queries ---------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def tri_coords(self) -> np.ndarray:
        """Vertex coordinates per triangle, shape (nt, 3, 2)."""
        return self._tri_coords

    def areas(self) -> np.ndarray:
        return self._areas

    def diameters(self) -> np.ndarray:
        tc = self._tri_coords
        e = np.stack(
            [
                np.linalg.norm(tc[:, 1] - tc[:, 0], axis=1),
                np.linalg.norm(tc[:, 2] - tc[:, 1], axis=1),
                np.linalg.norm(tc[:, 0] - tc[:, 2], axis=1),
            ]
        )
        return e.max(axis=0)

    def interior_edges(self) -> np.ndarray:
        return np.nonzero(self.edge_tris[:, 1] >= 0)[0]

    def boundary_edges(self, tag: str | None = None) -> np.ndarray:
        mask = self.edge_tris[:, 1] < 0
        if tag is not None:
            mask &= self.boundary_codes == _TAG_CODES[tag]
        return np.nonzero(mask)[0]

    def edge_tag(self, edge_idx: int) -> str | None:
        return _CODE_TAGS.get(int(self.boundary_codes[edge_idx]))

    def boundary_loops(self) -> list[tuple[str, list[int]]]:
        """Boundary loops as (tag, vertex cycle); raises if loops are broken."""
        # orient each boundary edge as it appears in its owning triangle
        succ: dict[int, tuple[int, int]] = {}
        for idx in self.boundary_edges():
            t = self.triangles[self.edge_tris[idx, 0]]
            u, v = self.edges[idx]
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                if {a, b} == {u, v}:
                    if int(a) in succ:
                        raise ValueError("boundary is not a disjoint union of simple loops")
                    succ[int(a)] = (int(b), idx)
                    break
        loops = []
        seen: set[int] = set()
        for start in sorted(succ):
            if start in seen:
                continue
            cycle, tags = [], set()
            v = start
            while True:
                cycle.append(v)
                seen.add(v)
                v, eidx = succ[v]
                tags.add(self.edge_tag(eidx))
                if v == start:
                    break
            if len(tags) != 1:
                raise ValueError("boundary loop mixes tags")
            loops.append((tags.pop(), cycle))
        return loops

    # -- point location ----------------------------------------------------------

    def _build_locator(self):
        tc = self._tri_coords
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        cell = max(float(self.diameters().max()), 1e-12)
        dims = np.maximum(((hi - lo) / cell).astype(int) + 1, 1)
        tmin = np.floor((tc.min(axis=1) - lo) / cell).astype(int)
        tmax = np.floor((tc.max(axis=1) - lo) / cell).astype(int)
        tmax = np.minimum(tmax, dims - 1)
        buckets: dict[int, list[int]] = {}
        for t in range(len(tc)):
            for ix in range(tmin[t, 0], tmax[t, 0] + 1):
                for iy in range(tmin[t, 1], tmax[t, 1] + 1):
                    buckets.setdefault(ix * dims[1] + iy, []).append(t)
        bucket_arrays = {k: np.array(v, dtype=np.int64) for k, v in buckets.items()}
        ones = np.ones((len(tc), 3, 1))
        mats = np.concatenate([ones, tc], axis=2).transpose(0, 2, 1)  # rows (1, x, y)
        tinv = np.linalg.inv(mats)
        self._locator = (lo, cell, dims, bucket_arrays, tinv)

    def locate_many(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Locate many points; returns (triangle ids with -1 outside, barycentric)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self._locator is None:
            self._build_locator()
        lo, cell, dims, buckets, tinv = self._locator
        ids = np.full(len(pts), -1, dtype=np.int64)
        bary = np.zeros((len(pts), 3))
        cxy = np.floor((pts - lo) / cell).astype(int)
        inside_box = (cxy >= 0).all(axis=1) & (cxy < dims).all(axis=1)
        keys = cxy[:, 0] * dims[1] + cxy[:, 1]
        keys[~inside_box] = -1
        order = np.argsort(keys, kind="stable")
        sorted_keys = keys[order]
        starts = np.nonzero(np.diff(sorted_keys, prepend=sorted_keys[0] - 1))[0]
        homo = np.column_stack([np.ones(len(pts)), pts])
        for s, e in zip(starts, np.append(starts[1:], len(pts))):
            key = int(sorted_keys[s])
            cand = buckets.get(key)
            if key < 0 or cand is None:
                continue
            pidx = order[s:e]
            b = np.einsum("cij,pj->pci", tinv[cand], homo[pidx])
            ok = (b >= -1e-12).all(axis=2)
            any_ok = ok.any(axis=1)
            first = np.argmax(ok, axis=1)
            hit = pidx[any_ok]
            ids[hit] = cand[first[any_ok]]
            bary[hit] = b[np.arange(len(pidx))[any_ok], first[any_ok]]
        return ids, bary

    def locate(self, p) -> tuple[int, np.ndarray] | None:
        """Locate a single point; None when outside the meshed domain."""
        ids, bary = self.locate_many(np.asarray(p, dtype=float)[None, :])
        if ids[0] < 0:
            return None
        return int(ids[0]), bary[0]

    # -- text serialization --------------------------------------------------------

    def save_text(self, path) -> None:
        with open(path, "w") as f:
            f.write(f"vertices {self.n_vertices} triangles {self.n_triangles}\n")
            for x, y in self.vertices:
                f.write(f"{float(x)!r} {float(y)!r}\n")
            for i, j, k in self.triangles:
                f.write(f"{i} {j} {k}\n")
            f.write("boundary\n")
            for idx in self.boundary_edges():
                u, v = self.edges[idx]
                f.write(f"edge {u} {v} {self.edge_tag(idx)}\n")

    @classmethod
    def load_text(cls, path) -> "Triangulation":
        with open(path) as f:
            lines = [ln.strip() for ln in f if ln.strip()]
        head = lines[0].split()
        if head[0] != "vertices" or head[2] != "triangles":
            raise ValueError(f"bad mesh header: {lines[0]!r}")
        nv, nt = int(head[1]), int(head[3])
        verts = np.array([[float(t) for t in ln.split()] for ln in lines[1 : 1 + nv]])
        tris = []
        for ln in lines[1 + nv : 1 + nv + nt]:
            parts = ln.split()
            tris.append([int(parts[0]), int(parts[1]), int(parts[2])])  # optional tags ignored
        tags: dict[tuple[int, int], str] = {}
        rest = lines[1 + nv + nt :]
        if rest and rest[0] == "boundary":
            for ln in rest[1:]:
                parts = ln.split()
                if parts[0] != "edge":
                    raise ValueError(f"bad boundary line: {ln!r}")
                u, v, tag = int(parts[1]), int(parts[2]), parts[3]
                if tag not in _TAG_CODES:
                    raise ValueError(f"unknown boundary tag {tag!r}")
                tags[(min(u, v), max(u, v))] = tag
        return cls(verts, np.array(tris, dtype=np.int64), boundary_tags=tags)


# -- mesh builders -------------------------------------------------------------


class _VertexPool:
    """Deduplicates lattice vertices; band vertices get fresh indices."""

    def __init__(self, h: float, origin: np.ndarray):
        self.h = h
        self.origin = origin
        self.coords: list[tuple[float, float]] = []
        self._lattice: dict[tuple[int, int], int] = {}

    def lattice(self, ix: int, iy: int) -> int:
        key = (ix, iy)
        idx = self._lattice.get(key)
        if idx is None:
            idx = len(self.coords)
            self._lattice[key] = idx
            self.coords.append(
                (self.origin[0] + ix * self.h, self.origin[1] + iy * self.h)
            )
        return idx

    def free(self, x: float, y: float) -> int:
        self.coords.append((x, y))
        return len(self.coords) - 1


def _square_point(theta: float, half: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    scale = half / max(abs(c), abs(s))
    return np.array([scale * c, scale * s])


def _zip_loops(inner_idx, inner_ang, outer_idx, outer_ang) -> list[tuple[int, int, int]]:
    """Triangulate the strip between two nested CCW loops by an angular merge."""
    tris = []
    na, nb = len(inner_idx), len(outer_idx)
    i = j = 0
    two_pi = 2 * math.pi

    def nxt(ang, pos, n):
        if pos >= n:
            return math.inf
        wrap = two_pi if pos + 1 >= n else 0.0
        return ang[(pos + 1) % n] + wrap

    while i < na or j < nb:
        if nxt(inner_ang, i, na) <= nxt(outer_ang, j, nb):
            tris.append((inner_idx[i % na], outer_idx[j % nb], inner_idx[(i + 1) % na]))
            i += 1
        else:
            tris.append((inner_idx[i % na], outer_idx[j % nb], outer_idx[(j + 1) % nb]))
            j += 1
    return tris


def _disk_band(pool: _VertexPool, hole: DiskHole, h: float, center: tuple[int, int]):
    """Triangles between the polygon on the circle and the transition square."""
    a = hole.radius
    half = h * math.ceil((a + 0.5 * h) / h - 1e-12)
    n_te = round(half / h)
    n_poly = hole.n_poly if hole.n_poly is not None else 4 * math.ceil(math.pi * a / h - 1e-12)
    if n_poly < 8:
        n_poly = 8
    layers = max(1, round((math.sqrt(2.0) * half - a) / (1.5 * h)))

    # ring of lattice vertices on the transition square, CCW from angle ~0
    ring: list[tuple[int, int]] = []
    for k in range(0, n_te):
        ring.append((n_te, k))
    for k in range(n_te, -n_te, -1):
        ring.append((k, n_te))
    for k in range(n_te, -n_te, -1):
        ring.append((-n_te, k))
    for k in range(-n_te, n_te, 1):
        ring.append((k, -n_te))
    for k in range(-n_te, 0):
        ring.append((n_te, k))
    cx, cy = center
    ring_idx = [pool.lattice(ix + cx, iy + cy) for ix, iy in ring]
    ring_ang = [math.atan2(iy, ix) % (2 * math.pi) for ix, iy in ring]

    loops_idx = []
    loops_ang = []
    for lev in range(layers):
        t = lev / layers
        if lev == 0:
            n_here = n_poly
        else:
            n_here = 4 * max(2, round(((layers - lev) * n_poly + lev * len(ring)) / (4 * layers)))
        angs = [2 * math.pi * m / n_here for m in range(n_here)]
        idxs = []
        for th in angs:
            p = (1 - t) * a * np.array([math.cos(th), math.sin(th)]) + t * _square_point(th, half)
            idxs.append(pool.free(p[0], p[1]))
        loops_idx.append(idxs)
        loops_ang.append(angs)
    loops_idx.append(ring_idx)
    loops_ang.append(ring_ang)

    tris = []
    for lev in range(layers):
        tris.extend(
            _zip_loops(loops_idx[lev], loops_ang[lev], loops_idx[lev + 1], loops_ang[lev + 1])
        )
    polygon_area = 0.5 * n_poly * a * a * math.sin(2 * math.pi / n_poly)
    return tris, half, polygon_area, n_poly


def build_mesh(spec: DomainSpec, h: float) -> Triangulation:
    """Build a conforming mesh of the annular domain with target width h.

    Grid cells of width h are split into two triangles each.  The hole and
    the alignment interface must lie on grid lines.  Raises ValueError for
    infeasible specs.
    """
    if h <= 0:
        raise ValueError("mesh width must be positive")
    spec.validate()
    b1, b2 = spec.outer
    n1 = _snap_count(2 * b1, h, "outer box x")
    n2 = _snap_count(2 * b2, h, "outer box y")
    if spec.align is not None:
        _snap_count(2 * spec.align[0], h, "interface box x")
        _snap_count(2 * spec.align[1], h, "interface box y")
    origin = np.array([-b1, -b2])
    pool = _VertexPool(h, origin)

    drop_cell = None
    band_tris: list[tuple[int, int, int]] = []
    declared = 4.0 * b1 * b2
    if isinstance(spec.hole, RectHole):
        m1 = _snap_count(2 * spec.hole.c1, h, "hole x")
        m2 = _snap_count(2 * spec.hole.c2, h, "hole y")
        if n1 % 2 or n2 % 2 or m1 % 2 or m2 % 2:
            raise ValueError("box and hole extents must contain whole symmetric cells")

        def drop_cell(ix, iy):
            # cell [ix, ix+1] x [iy, iy+1] in lattice units, origin-based
            x0, y0 = ix - n1 // 2, iy - n2 // 2
            return -m1 // 2 <= x0 < m1 // 2 and -m2 // 2 <= y0 < m2 // 2

        declared -= 4.0 * spec.hole.c1 * spec.hole.c2
    elif isinstance(spec.hole, DiskHole):
        if n1 % 2 or n2 % 2:
            raise ValueError("box extents must contain whole symmetric cells")
        band_tris, half, poly_area, _ = _disk_band(pool, spec.hole, h, (n1 // 2, n2 // 2))
        n_te = round(half / h)

        def drop_cell(ix, iy, n_te=n_te):
            x0, y0 = ix - n1 // 2, iy - n2 // 2
            return -n_te <= x0 < n_te and -n_te <= y0 < n_te

        declared -= poly_area
    elif isinstance(spec.hole, GridMaskHole):
        centers_x = origin[0] + (np.arange(n1) + 0.5) * h
        centers_y = origin[1] + (np.arange(n2) + 0.5) * h
        gx, gy = np.meshgrid(centers_x, centers_y, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        inside = np.asarray(spec.hole.inside(pts), dtype=bool).reshape(n1, n2)
        if inside.all():
            raise ValueError("mask hole removes every cell")

        def drop_cell(ix, iy):
            return bool(inside[ix, iy])

        declared -= float(inside.sum()) * h * h

    tris: list[tuple[int, int, int]] = []
    for ix in range(n1):
        for iy in range(n2):
            if drop_cell is not None and drop_cell(ix, iy):
                continue
            v00 = pool.lattice(ix, iy)
            v10 = pool.lattice(ix + 1, iy)
            v01 = pool.lattice(ix, iy + 1)
            v11 = pool.lattice(ix + 1, iy + 1)
            # split along the diagonal closer to the radial direction, making
            # the mesh symmetric under the reflections of the box
            cx = origin[0] + (ix + 0.5) * h
            cy = origin[1] + (iy + 0.5) * h
            if cx * cy > 0:
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))
            else:
                tris.append((v00, v10, v01))
                tris.append((v10, v11, v01))
    tris.extend(band_tris)
    if not tris:
        raise ValueError("empty mesh: hole covers the whole box")

    mesh = Triangulation(
        np.array(pool.coords, dtype=float),
        np.array(tris, dtype=np.int64),
        outer_half_widths=(b1, b2),
        declared_area=declared,
    )
    return mesh


def refine_uniform(mesh: Triangulation) -> Triangulation:
    """Quadrisect every triangle via edge midpoints; tags are inherited.

    Children of triangle t are written at positions 4t .. 4t+3, with the
    central (inverted) child last.
    """
    nv = mesh.n_vertices
    mid_of_edge = {}
    mids = []
    for idx, (u, v) in enumerate(mesh.edges):
        mid_of_edge[(int(u), int(v))] = nv + idx
        mids.append(0.5 * (mesh.vertices[u] + mesh.vertices[v]))
    verts = np.vstack([mesh.vertices, np.array(mids)])

    def mid(u, v):
        return mid_of_edge[(min(u, v), max(u, v))]

    tris = np.empty((4 * mesh.n_triangles, 3), dtype=np.int64)
    for t, (a, b, c) in enumerate(mesh.triangles):
        a, b, c = int(a), int(b), int(c)
        mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
        tris[4 * t + 0] = (a, mab, mca)
        tris[4 * t + 1] = (mab, b, mbc)
        tris[4 * t + 2] = (mca, mbc, c)
        tris[4 * t + 3] = (mab, mbc, mca)

    tags: dict[tuple[int, int], str] = {}
    for idx in mesh.boundary_edges():
        u, v = int(mesh.edges[idx, 0]), int(mesh.edges[idx, 1])
        m = mid(u, v)
        tag = mesh.edge_tag(idx)
        tags[(min(u, m), max(u, m))] = tag
        tags[(min(m, v), max(m, v))] = tag

    return Triangulation(
        verts,
        tris,
        boundary_tags=tags,
        outer_half_widths=mesh.outer_half_widths,
        declared_area=mesh.declared_area,
    )


def quasi_uniformity(mesh: Triangulation) -> float:
    """max over triangles of diameter / inradius.

    The shape measure divides the longest edge by the inscribed-circle
    radius; dividing area by inradius instead would only rescale it.
    Any triangle scores at least 2*sqrt(3) (the equilateral one).
    """
    tc = mesh.tri_coords
    l1 = np.linalg.norm(tc[:, 1] - tc[:, 0], axis=1)
    l2 = np.linalg.norm(tc[:, 2] - tc[:, 1], axis=1)
    l3 = np.linalg.norm(tc[:, 0] - tc[:, 2], axis=1)
    s = 0.5 * (l1 + l2 + l3)
    areas = mesh.areas()
    if np.any(areas <= 0):
        raise ValueError("degenerate triangle")
    inradius = areas / s
    return float((np.maximum(np.maximum(l1, l2), l3) / inradius).max())
