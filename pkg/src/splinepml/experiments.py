"""Experiment driver: declarative configs -> meshes -> solves -> CSV rows.

A config names one scattering scenario (geometry plus data), the wavenumber,
the spline degrees and mesh widths to run, and the truncation (absorbing
layer or first-order Robin).  Each (degree, h) pair is built fresh, solved,
and measured against the scenario's reference field on the region between
the scatterer and the interior interface.  Scenarios without a closed-form
reference (the trapping obstacle and the amphitheater section) emit field
snapshots instead of error rows.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from splinepml import analytic
from splinepml.assembly_solver import assemble, solve_abc, solve_constrained
from splinepml.evaluation import (
    ErrorReport,
    SampleRegion,
    append_error_rows,
    field_snapshot,
    grid_errors,
    snapshot_to_csv,
)
from splinepml.mesh import (
    OUTER_PML,
    SCATTERER,
    DiskHole,
    DomainSpec,
    GridMaskHole,
    RectHole,
    Triangulation,
    build_mesh,
)
from splinepml.pml import PmlConfig, robin_boundary_term, weights_to_splines
from splinepml.spline_space import SplineSpaceDef, build_dirichlet, build_smoothness, interpolate_scalar

SCENARIOS = ("disk_scatter", "square_scatter", "variable_medium", "trapping", "amphitheater")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    scenario: str
    k: float
    degrees: tuple[int, ...]
    h_values: tuple[float, ...]
    sigma0: float
    smoothness: int | None = None  # default: 0 for degree 1, else 1
    exponent: int = 4
    truncation: str = "pml"
    heavy: bool = False
    outer_half_width: float = 5.0
    pml_half_width: float = 3.0
    hole_half_width: float = 1.0
    hole_radius: float = 2.0
    mesh_file: str | None = None
    tol: float = 1e-10
    max_iters: int = 12
    grid: int = 500
    include_pml: bool = False
    sigma0_values: tuple[float, ...] = ()
    width_values: tuple[float, ...] = ()
    degree_values: tuple[int, ...] = ()

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.truncation not in ("pml", "abc"):
            raise ConfigError(f"truncation must be 'pml' or 'abc', got {self.truncation!r}")
        if not self.degrees or any(d < 1 for d in self.degrees):
            raise ConfigError("need at least one degree >= 1")
        if not self.h_values or any(h <= 0 for h in self.h_values):
            raise ConfigError("need at least one mesh width > 0")
        if self.sigma0 < 0:
            raise ConfigError("sigma0 must be >= 0")
        if not (0 < self.pml_half_width <= self.outer_half_width):
            raise ConfigError("need 0 < pml_half_width <= outer_half_width")
        if self.truncation == "pml" and self.pml_half_width >= self.outer_half_width:
            raise ConfigError("the absorbing layer needs pml_half_width < outer_half_width")

    def smoothness_for(self, degree: int) -> int:
        if self.smoothness is not None:
            return self.smoothness
        return 0 if degree == 1 else 1


def _parse_list(text: str, conv):
    return tuple(conv(tok) for tok in text.split())


def _parse_width(tok: str) -> float:
    # mesh widths may be given as fractions like 1/3
    if "/" in tok:
        num, den = tok.split("/")
        return float(num) / float(den)
    return float(tok)


def parse_config(path) -> ExperimentConfig:
    """Read a flat key-value config file with [experiment]/[geometry]/... sections."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    ini = configparser.ConfigParser()
    try:
        ini.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if "experiment" not in ini:
        raise ConfigError(f"{path} has no [experiment] section")
    exp = ini["experiment"]
    geo = ini["geometry"] if "geometry" in ini else {}
    sol = ini["solver"] if "solver" in ini else {}
    ev = ini["evaluation"] if "evaluation" in ini else {}
    sw = ini["sweep"] if "sweep" in ini else {}

    def need(section, key, conv=str):
        if key not in section:
            raise ConfigError(f"missing required key {key!r}")
        return conv(section[key])

    try:
        cfg = ExperimentConfig(
            name=need(exp, "name"),
            scenario=need(exp, "scenario"),
            k=need(exp, "k", float),
            degrees=_parse_list(need(exp, "degrees"), int),
            h_values=_parse_list(need(exp, "h_values"), _parse_width),
            sigma0=need(exp, "sigma0", float),
            smoothness=int(exp["smoothness"]) if "smoothness" in exp else None,
            exponent=int(exp.get("profile_exponent", 4)),
            truncation=exp.get("truncation", "pml"),
            heavy=exp.get("heavy", "false").lower() in ("1", "true", "yes"),
            outer_half_width=float(geo.get("outer_half_width", 5.0)),
            pml_half_width=float(geo.get("pml_half_width", 3.0)),
            hole_half_width=float(geo.get("hole_half_width", 1.0)),
            hole_radius=float(geo.get("hole_radius", 2.0)),
            mesh_file=geo.get("mesh_file") or None,
            tol=float(sol.get("tol", 1e-10)),
            max_iters=int(sol.get("max_iters", 12)),
            grid=int(ev.get("grid", 500)),
            include_pml=ev.get("include_pml", "false").lower() in ("1", "true", "yes"),
            sigma0_values=_parse_list(sw.get("sigma0_values", ""), float),
            width_values=_parse_list(sw.get("width_values", ""), float),
            degree_values=_parse_list(sw.get("degree_values", ""), int),
        )
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"bad value in {path}: {exc}") from exc
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# scenario geometry and data


def _trapping_mask(p: np.ndarray) -> np.ndarray:
    in_square = (np.abs(p[:, 0]) < 3.0) & (np.abs(p[:, 1]) < 3.0)
    in_notch = (np.abs(p[:, 0]) < 1.0) & (p[:, 1] < -1.0)
    return in_square & ~in_notch


_ELLIPSE_IN = (1.5, 1.0)
_ELLIPSE_OUT = (1.8, 1.3)
AMPHITHEATER_FOCUS = (-math.sqrt(_ELLIPSE_IN[0] ** 2 - _ELLIPSE_IN[1] ** 2), 0.0)


def _ring_mask(p: np.ndarray) -> np.ndarray:
    rin = (p[:, 0] / _ELLIPSE_IN[0]) ** 2 + (p[:, 1] / _ELLIPSE_IN[1]) ** 2
    rout = (p[:, 0] / _ELLIPSE_OUT[0]) ** 2 + (p[:, 1] / _ELLIPSE_OUT[1]) ** 2
    return (rin >= 1.0) & (rout <= 1.0)


@dataclass
class ScenarioSetup:
    spec: DomainSpec
    region: SampleRegion
    exact: analytic.WaveField | None
    scatter_data: object  # callable p -> complex boundary values
    mass_weight: object | None = None  # callable p -> complex, replaces J
    rhs: object | None = None  # callable p -> complex source
    outer_data: object | None = None  # callable; default homogeneous


def _scenario_setup(cfg: ExperimentConfig, h: float, b1: float | None = None) -> ScenarioSetup:
    a = cfg.pml_half_width
    abc = cfg.truncation == "abc"
    # with the Robin truncation there is no layer: the box ends at the
    # interface and carries the absorbing condition itself
    b = a if abc else (b1 if b1 is not None else cfg.outer_half_width)
    align = None if abc else (a, a)

    if cfg.scenario == "square_scatter":
        c = cfg.hole_half_width
        spec = DomainSpec(outer=(b, b), hole=RectHole(c, c), align=align)
        hole = lambda p: (np.abs(p[:, 0]) < c - 1e-12) & (np.abs(p[:, 1]) < c - 1e-12)
        region = SampleRegion(-a, a, -a, a, exclude=hole)
        if cfg.k == 0.0:
            # degenerate smoke mode: a linear harmonic with its exact trace
            # on every boundary exercises the whole pipeline at any degree
            exact = analytic.WaveField(
                "harmonic_linear",
                0.0,
                lambda p: (p[:, 0] + 2.0 * p[:, 1]).astype(np.complex128),
                lambda p: np.broadcast_to(np.array([1.0 + 0j, 2.0 + 0j]), (len(p), 2)).copy(),
            )
            return ScenarioSetup(spec, region, exact, exact.value, outer_data=exact.value)
        exact = analytic.hankel_field(1, cfg.k)
        return ScenarioSetup(spec, region, exact, exact.value)

    if cfg.scenario == "disk_scatter":
        rad = cfg.hole_radius
        spec = DomainSpec(outer=(b, b), hole=DiskHole(rad), align=align)
        n_poly = 4 * math.ceil(math.pi * rad / h - 1e-12)
        r_min = rad * math.cos(math.pi / max(n_poly, 8)) * 0.999
        exact = analytic.disk_scatter_field(cfg.k, rad, r_min=r_min)
        hole = lambda p: np.hypot(p[:, 0], p[:, 1]) < rad
        region = SampleRegion(-a, a, -a, a, exclude=hole)
        return ScenarioSetup(spec, region, exact, exact.value)

    if cfg.scenario == "variable_medium":
        rad = cfg.hole_radius
        spec = DomainSpec(outer=(b, b), hole=DiskHole(rad), align=align)
        exact = analytic.hankel_field(0, cfg.k)
        hole = lambda p: np.hypot(p[:, 0], p[:, 1]) < rad
        region = SampleRegion(-a, a, -a, a, exclude=hole)
        k2 = cfg.k**2
        rhs = lambda p: k2 * analytic.contrast_bump(p) * exact.value(p)
        contrast = lambda p: 1.0 - analytic.contrast_bump(p)
        return ScenarioSetup(spec, region, exact, exact.value, mass_weight=contrast, rhs=rhs)

    if cfg.scenario == "trapping":
        spec = DomainSpec(outer=(b, b), hole=GridMaskHole(_trapping_mask, name="trap"), align=align)
        region = SampleRegion(-b, b, -b, b)
        incident = analytic.plane_wave(cfg.k, (1.0, 1.0))
        data = lambda p: -incident.value(p)  # sound-soft: scattered = -incident
        return ScenarioSetup(spec, region, None, data)

    if cfg.scenario == "amphitheater":
        spec = DomainSpec(outer=(b, b), hole=GridMaskHole(_ring_mask, name="walls"), align=align)
        region = SampleRegion(-b, b, -b, b)
        source = analytic.hankel_field(0, cfg.k, center=AMPHITHEATER_FOCUS, amplitude=-0.25j)
        return ScenarioSetup(spec, region, None, source.value)

    raise ConfigError(f"unknown scenario {cfg.scenario!r}")


# ---------------------------------------------------------------------------
# running


def _build_mesh_for(cfg: ExperimentConfig, setup: ScenarioSetup, h: float) -> Triangulation:
    if cfg.mesh_file:
        return Triangulation.load_text(cfg.mesh_file)
    return build_mesh(setup.spec, h)


def run_single(
    cfg: ExperimentConfig, d: int, h: float, *, b1: float | None = None, sigma0: float | None = None,
    label: str | None = None,
):
    """One (degree, h) run; returns (ErrorReport | None, snapshot | None)."""
    s0 = cfg.sigma0 if sigma0 is None else sigma0
    setup = _scenario_setup(cfg, h, b1=b1)
    mesh = _build_mesh_for(cfg, setup, h)
    space = SplineSpaceDef(mesh, d, cfg.smoothness_for(d))
    b = setup.spec.outer[0]
    a = cfg.pml_half_width

    if cfg.truncation == "pml":
        pml = PmlConfig(a, a, b, b, s0, exponent=cfg.exponent)
        a11, a22, jw = weights_to_splines(pml, mesh, d)
        if setup.mass_weight is not None:
            jw = interpolate_scalar(
                mesh, d, lambda p, pml=pml: analytic_weights_j(pml, p) * setup.mass_weight(p)
            )
        f = interpolate_scalar(mesh, d, setup.rhs) if setup.rhs is not None else None
        system = assemble(space, a11, a22, jw, cfg.k, f=f)
        H = build_smoothness(space)
        Ds, gs = build_dirichlet(space, SCATTERER, setup.scatter_data)
        outer = setup.outer_data if setup.outer_data is not None else lambda p: np.zeros(len(p))
        Do, go = build_dirichlet(space, OUTER_PML, outer)
        D = sp.vstack([Ds, Do]).tocsr()
        g = np.concatenate([gs, go])
        report = solve_constrained(system, H, D, g, tol=cfg.tol, max_iters=cfg.max_iters)
    else:
        ones = np.ones(space.n_dofs, dtype=np.complex128)
        jw = ones
        if setup.mass_weight is not None:
            jw = interpolate_scalar(mesh, d, setup.mass_weight)
        f = interpolate_scalar(mesh, d, setup.rhs) if setup.rhs is not None else None
        R = robin_boundary_term(cfg.k, space)
        system = assemble(space, ones, ones.copy(), jw, cfg.k, f=f, robin=R)
        H = build_smoothness(space)
        Ds, gs = build_dirichlet(space, SCATTERER, setup.scatter_data)
        report = solve_abc(system, H, Ds, gs, tol=cfg.tol, max_iters=cfg.max_iters)

    name = label if label is not None else cfg.name
    if setup.exact is None:
        snap = field_snapshot(space, report.coeffs, setup.region, resolution=cfg.grid)
        return None, snap
    region = setup.region
    if cfg.include_pml:
        region = SampleRegion(-b, b, -b, b, exclude=setup.region.exclude)
    err = grid_errors(
        space, report.coeffs, setup.exact, region, grid=cfg.grid,
        experiment=name, sigma0=s0, h=h,
    )
    return err, None


def analytic_weights_j(pml: PmlConfig, p: np.ndarray) -> np.ndarray:
    from splinepml.pml import weights_at

    return weights_at(pml, p)[2]


def run(cfg: ExperimentConfig, out_dir, heavy: bool = False) -> list[ErrorReport]:
    """Run the experiment matrix; writes CSV (and snapshots) under out_dir."""
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    if cfg.heavy and not heavy:
        print(f"{cfg.name}: marked heavy, skipped (pass --heavy to run)")
        return []
    csv_path = os.path.join(out_dir, f"{cfg.name}.csv")
    if os.path.exists(csv_path):
        os.remove(csv_path)
    reports = []
    for d in cfg.degrees:
        for h in cfg.h_values:
            err, snap = run_single(cfg, d, h)
            if err is not None:
                reports.append(err)
                append_error_rows(csv_path, [err])
                print(f"{cfg.name}: d={d} h={h:g} dofs={err.dofs} "
                      f"h1={err.h1_rel:.3e} l2={err.l2_rel:.3e}")
            else:
                pts, values, inside = snap
                snap_path = os.path.join(out_dir, f"{cfg.name}_d{d}_h{h:g}_field.csv")
                snapshot_to_csv(snap_path, pts, values, inside)
                print(f"{cfg.name}: d={d} h={h:g} wrote {snap_path}")
    return reports


def sweep(cfg: ExperimentConfig, axis: str, out_dir) -> list[ErrorReport]:
    """Cross-product sweep along one axis (sigma0 | width | degree).

    A sigma0 sweep crosses with width_values when those are present, so a
    single config describes a strength-times-thickness study.
    """
    cfg.validate()
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{cfg.name}_{axis}_sweep.csv")
    if os.path.exists(csv_path):
        os.remove(csv_path)
    d = cfg.degrees[0]
    h = cfg.h_values[0]
    reports = []

    if axis == "degree":
        for dd in cfg.degree_values:
            err, _ = run_single(cfg, dd, h, label=f"{cfg.name}_d{dd}")
            if err is not None:
                reports.append(err)
    elif axis == "width":
        for m in cfg.width_values:
            b1 = cfg.pml_half_width + m
            err, _ = run_single(cfg, d, h, b1=b1, label=f"{cfg.name}_M{m:g}")
            if err is not None:
                reports.append(err)
    elif axis == "sigma0":
        widths = cfg.width_values if cfg.width_values else (cfg.outer_half_width - cfg.pml_half_width,)
        for m in widths:
            b1 = cfg.pml_half_width + m
            for s0 in cfg.sigma0_values:
                err, _ = run_single(cfg, d, h, b1=b1, sigma0=s0, label=f"{cfg.name}_M{m:g}_s{s0:g}")
                if err is not None:
                    reports.append(err)
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected sigma0, width or degree")

    append_error_rows(csv_path, reports)
    for err in reports:
        print(f"{err.experiment}: d={err.degree} h1={err.h1_rel:.3e} l2={err.l2_rel:.3e}")
    return reports
