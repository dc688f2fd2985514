import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from splinepml.analytic import hankel_field
from splinepml.assembly_solver import (
    SolveError,
    assemble,
    dump_coo,
    solve_abc,
    solve_constrained,
)
from splinepml.mesh import (
    OUTER_PML,
    SCATTERER,
    DomainSpec,
    RectHole,
    Triangulation,
    build_mesh,
)
from splinepml.pml import PmlConfig, robin_boundary_term, weights_to_splines
from splinepml.spline_space import (
    SplineSpaceDef,
    build_dirichlet,
    build_smoothness,
    eval_spline_many,
)

ANNULUS = DomainSpec(outer=(5.0, 5.0), hole=RectHole(1.0, 1.0), align=(3.0, 3.0))
PML_OFF = PmlConfig(3.0, 3.0, 5.0, 5.0, 0.0)


def unit_triangle_space(d=1):
    tri = Triangulation(
        np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        np.array([[0, 1, 2]]),
        boundary_tags={(0, 1): SCATTERER, (1, 2): SCATTERER, (0, 2): SCATTERER},
    )
    return SplineSpaceDef(tri, d, 0)


def identity_weights(space):
    ones = np.ones(space.n_dofs, dtype=complex)
    return ones, ones.copy(), ones.copy()


def dirichlet_all(space, f):
    return build_dirichlet(space, (SCATTERER, OUTER_PML), f)


# ---------------------------------------------------------------------------
# element matrices


def test_p1_stiffness_block_matches_hand_oracle():
    space = unit_triangle_space(1)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    want = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
    assert np.allclose(sys_.stiffness.toarray().real, want, atol=1e-14)
    assert np.abs(sys_.stiffness.toarray().imag).max() == 0.0


def test_p1_mass_block_exact():
    space = unit_triangle_space(1)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    want = 0.5 / 12.0 * np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
    assert np.allclose(sys_.mass.toarray().real, want, atol=1e-15)


def test_stiffness_annihilates_constants():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 3, 0)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    ones = np.ones(space.n_dofs, dtype=complex)
    assert np.abs(sys_.stiffness @ ones).max() < 1e-12


def test_block_structure_no_cross_triangle_coupling():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    sys_ = assemble(space, *identity_weights(space), k=1.0)
    n = space.n_local
    for mat in (sys_.stiffness, sys_.mass):
        coo = mat.tocoo()
        keep = coo.data != 0
        assert (coo.row[keep] // n == coo.col[keep] // n).all()


def test_matrices_real_symmetric_when_pml_off():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    w = weights_to_splines(PML_OFF, mesh, 2)
    sys_ = assemble(space, *w, k=2.0)
    for mat in (sys_.stiffness, sys_.mass):
        arr = mat.tocsr()
        assert np.abs(arr.imag).max() < 1e-14
        assert abs(arr - arr.T).max() < 1e-12


def test_weight_shape_mismatch_rejected():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    bad = np.ones(7, dtype=complex)
    with pytest.raises(ValueError):
        assemble(space, bad, bad, bad, k=1.0)


# ---------------------------------------------------------------------------
# constrained solves


def test_laplace_constant_data():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 1, 0)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: np.ones(len(p)))
    rep = solve_constrained(sys_, H, D, g)
    assert np.abs(rep.coeffs - 1.0).max() < 1e-10
    assert rep.converged


def test_harmonic_polynomial_reproduction():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 1)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: p[:, 0] ** 2 - p[:, 1] ** 2)
    rep = solve_constrained(sys_, H, D, g)
    pts = np.random.default_rng(1).uniform(-5, 5, size=(100, 2))
    vals, _, inside = eval_spline_many(space, rep.coeffs, pts)
    exact = pts[:, 0] ** 2 - pts[:, 1] ** 2
    assert np.abs(vals[inside] - exact[inside]).max() < 1e-8


def test_source_scaling_linearity():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: np.zeros(len(p)))
    f = np.cos(np.linspace(0, 3, space.n_dofs)).astype(complex)
    w = identity_weights(space)
    rep1 = solve_constrained(assemble(space, *w, k=1.0, f=f), H, D, g)
    rep3 = solve_constrained(assemble(space, *w, k=1.0, f=3.0 * f), H, D, g)
    scale = np.abs(rep3.coeffs).max()
    assert np.abs(rep3.coeffs - 3.0 * rep1.coeffs).max() < 1e-9 * max(scale, 1.0)


def test_determinism_bitwise():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 1)
    H = build_smoothness(space)
    exact = hankel_field(1, 2.0)
    D, g = dirichlet_all(space, exact.value)
    w = identity_weights(space)
    rep1 = solve_constrained(assemble(space, *w, k=2.0), H, D, g)
    rep2 = solve_constrained(assemble(space, *w, k=2.0), H, D, g)
    assert rep1.coeffs.tobytes() == rep2.coeffs.tobytes()
    assert rep1.to_text() == rep2.to_text()


def test_galerkin_consistency_on_projected_tests():
    # residual of the solved system is orthogonal to every test vector that
    # satisfies the homogeneous constraint rows
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    sys_ = assemble(space, *identity_weights(space), k=1.5)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: p[:, 0] + 0.5 * p[:, 1])
    rep = solve_constrained(sys_, H, D, g, tol=1e-12, max_iters=8)
    A = sys_.operator()
    r = A @ rep.coeffs - sys_.load
    C = sp.vstack([H, D]).toarray()
    _, S, Vh = np.linalg.svd(C)
    rank = int((S > 1e-10 * S[0]).sum())
    Z = Vh[rank:].conj().T  # basis of the homogeneous-constraint test space
    gen = np.random.default_rng(3)
    for _ in range(50):
        v = Z @ gen.standard_normal(Z.shape[1])
        resid = abs(v @ r)
        assert resid <= 10 * 1e-10 * np.linalg.norm(v) * max(np.linalg.norm(r), 1.0)


def test_near_eigenvalue_surfaces_as_error():
    space = unit_triangle_space(2)
    w = identity_weights(space)
    sys_probe = assemble(space, *w, k=0.0)
    K = sys_probe.stiffness.toarray().real
    M = sys_probe.mass.toarray().real
    evals = scipy.linalg.eigh(K, M, eigvals_only=True)
    k_eig = float(np.sqrt(evals[evals > 1e-8][0]))
    sys_sing = assemble(space, *w, k=k_eig)
    empty = sp.csr_matrix((0, space.n_dofs))
    with pytest.raises(SolveError, match="eigenvalue"):
        solve_constrained(sys_sing, empty, empty, np.zeros(0, dtype=complex))


def test_iteration_cap_failure_reports_residuals():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 1, 0)
    sys_ = assemble(space, *identity_weights(space), k=1.0)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: np.ones(len(p)))
    # a uselessly small penalty leaves the constraints visibly violated
    with pytest.raises(SolveError, match="residual"):
        solve_constrained(sys_, H, D, g, tol=0.0, max_iters=2, rho=1e-8)


def test_solve_abc_requires_robin_matrix():
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 1, 0)
    sys_ = assemble(space, *identity_weights(space), k=1.0)
    H = build_smoothness(space)
    D, g = build_dirichlet(space, SCATTERER, lambda p: np.ones(len(p)))
    with pytest.raises(SolveError, match="Robin"):
        solve_abc(sys_, H, D, g)


def test_solve_abc_runs_with_robin():
    mesh = build_mesh(DomainSpec(outer=(3.0, 3.0), hole=RectHole(1.0, 1.0)), 1.0)
    space = SplineSpaceDef(mesh, 2, 0)
    k = 2.0
    R = robin_boundary_term(k, space)
    sys_ = assemble(space, *identity_weights(space), k=k, robin=R)
    H = build_smoothness(space)
    exact = hankel_field(1, k)
    D, g = build_dirichlet(space, SCATTERER, exact.value)
    rep = solve_abc(sys_, H, D, g)
    assert rep.converged
    assert np.isfinite(rep.coeffs).all()


def test_report_serialization_and_dump(tmp_path):
    mesh = build_mesh(ANNULUS, 1.0)
    space = SplineSpaceDef(mesh, 1, 0)
    sys_ = assemble(space, *identity_weights(space), k=0.0)
    H = build_smoothness(space)
    D, g = dirichlet_all(space, lambda p: np.ones(len(p)))
    rep = solve_constrained(sys_, H, D, g)
    text = rep.to_text()
    assert "h_residual" in text and "iterations" in text
    dump_coo(H, tmp_path / "h.txt")
    first = (tmp_path / "h.txt").read_text().splitlines()
    assert first[0].startswith("# shape")
    assert len(first) == H.nnz + 1
