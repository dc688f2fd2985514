"""Error metrics and field sampling on equally spaced grids.

Errors are the discrete relative l2 norms of the value and of the gradient
over a point grid (default 500 x 500), mirroring how the convergence
tables are measured.  By default the grid covers only the region of
physical interest between the scatterer and the interior PML interface;
inside the layer the computed solution deliberately decays away from the
true exterior field, so including it would not measure discretization
quality.  Pass a region spanning the full box to include the layer.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from splinepml.analytic import WaveField
from splinepml.spline_space import SplineSpaceDef, eval_spline_many

CSV_HEADER = ["experiment", "k", "sigma0", "d", "h", "dofs", "h1_rel", "l2_rel"]


@dataclass(frozen=True)
class SampleRegion:
    """Axis-aligned sampling window with an optional exclusion predicate."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    exclude: Callable[[np.ndarray], np.ndarray] | None = None

    def grid(self, n: int) -> np.ndarray:
        xs = np.linspace(self.xmin, self.xmax, n)
        ys = np.linspace(self.ymin, self.ymax, n)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def keep(self, pts: np.ndarray) -> np.ndarray:
        mask = np.ones(len(pts), dtype=bool)
        if self.exclude is not None:
            mask &= ~np.asarray(self.exclude(pts), dtype=bool)
        return mask


@dataclass(frozen=True)
class ErrorReport:
    """Relative discrete errors plus the run's identifying metadata."""

    experiment: str
    k: float
    sigma0: float
    degree: int
    h: float
    dofs: int
    h1_rel: float
    l2_rel: float

    def csv_row(self) -> list:
        return [
            self.experiment,
            f"{self.k:g}",
            f"{self.sigma0:g}",
            self.degree,
            f"{self.h:g}",
            self.dofs,
            f"{self.h1_rel:.6e}",
            f"{self.l2_rel:.6e}",
        ]


def grid_errors(
    space: SplineSpaceDef,
    c: np.ndarray,
    exact: WaveField,
    region: SampleRegion,
    grid: int = 500,
    *,
    experiment: str = "",
    sigma0: float = 0.0,
    h: float = 0.0,
) -> ErrorReport:
    """Relative discrete l2 errors of value and gradient on the region grid.

    Points outside the mesh or excluded by the region are dropped; the
    remaining set must be nonempty.
    """
    pts = region.grid(grid)
    pts = pts[region.keep(pts)]
    values, grads, inside = eval_spline_many(space, c, pts, gradient=True)
    if not inside.any():
        raise ValueError("empty sample set: region does not meet the mesh")
    pts = pts[inside]
    values = values[inside]
    grads = grads[inside]
    u = exact.value(pts)
    gu = exact.gradient(pts)
    l2 = float(np.linalg.norm(values - u) / np.linalg.norm(u))
    h1 = float(np.linalg.norm((grads - gu).ravel()) / np.linalg.norm(gu.ravel()))
    return ErrorReport(
        experiment=experiment,
        k=exact.k,
        sigma0=sigma0,
        degree=space.degree,
        h=h,
        dofs=space.n_dofs,
        h1_rel=h1,
        l2_rel=l2,
    )


def field_snapshot(
    space: SplineSpaceDef, c: np.ndarray, region: SampleRegion, resolution: int = 500
):
    """Sample the spline on a grid; returns (points, values, inside mask).

    Cells outside the meshed domain are flagged, not interpolated.
    """
    pts = region.grid(resolution)
    values, _, inside = eval_spline_many(space, c, pts)
    return pts, values, inside


def snapshot_to_csv(path, pts, values, inside) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["x", "y", "re", "im", "abs", "mask"])
        for (x, y), v, ok in zip(pts, values, inside):
            if ok:
                w.writerow([f"{x:.8g}", f"{y:.8g}", f"{v.real:.8e}", f"{v.imag:.8e}", f"{abs(v):.8e}", 1])
            else:
                w.writerow([f"{x:.8g}", f"{y:.8g}", "", "", "", 0])


def append_error_rows(path, reports: list[ErrorReport]) -> None:
    """Append report rows to a CSV, writing the header on first touch."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as f:
        w = csv.writer(f)
        if fresh:
            w.writerow(CSV_HEADER)
        for rep in reports:
            w.writerow(rep.csv_row())
