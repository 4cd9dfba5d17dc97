"""Physical solutions, generalized Fourier maps, and time evolution.

Closed forms used here: the free Neumann solution 2 cos(kx) and Dirichlet
solution -2i sin(kx); the cosine transform of e^{-x}; the free Gaussian
propagator by the method of images (oracles.py).  The discrete Hamiltonian is
cross-checked against an independently assembled dense matrix and against the
transcendental bound-state oracle for a square well.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid, simpson_weights, trapezoid_weights
from scatterkit.jost import jost_matrix, solve_faddeev
from scatterkit.potentials import box_potential, zero_potential
from scatterkit.scattering import smatrix
from scatterkit.spectral import (
    BoundStatesPresent,
    SpectralError,
    WindowOverflow,
    _build_stage,
    bound_states,
    boundary_residual,
    discrete_hamiltonian,
    evolve_discrete,
    evolve_spectral,
    f0_synthesis,
    f0_transform,
    field_norm,
    fourier_maps,
    fourier_maps_adjoint,
    interacting_after_free,
    physical_solution,
)


def _free_table(bc: BoundaryPair, grid: KXGrid):
    jt = jost_matrix(solve_faddeev(zero_potential(bc.n), grid, refine=2), bc)
    return physical_solution(jt, smatrix(jt))


@pytest.fixture(scope="module")
def golden_physical(golden_scatter):
    jt, table = golden_scatter
    return physical_solution(jt, table)


@pytest.fixture(scope="module")
def small_grid():
    return KXGrid.build(kmax=8.0, nk=128, dx=1 / 16, xmax=8.0)


@pytest.fixture(scope="module")
def wide_grid():
    return KXGrid.build(kmax=8.0, nk=256, dx=1 / 16, xmax=100.0)


def test_free_neumann_solution_is_cosine(small_grid):
    pt = _free_table(BoundaryPair.neumann(1), small_grid)
    expected = 2.0 * np.cos(np.outer(pt.k, pt.xv))
    assert np.abs(pt.psi[:, :, 0, 0] - expected).max() < 1e-12
    assert boundary_residual(pt) < 1e-12


def test_free_dirichlet_solution_is_sine(small_grid):
    pt = _free_table(BoundaryPair.dirichlet(1), small_grid)
    expected = -2j * np.sin(np.outer(pt.k, pt.xv))
    assert np.abs(pt.psi[:, :, 0, 0] - expected).max() < 1e-12
    assert boundary_residual(pt) < 1e-12


def test_golden_far_field_and_boundary_residual(golden_physical):
    pt = golden_physical
    # beyond the support the solution is an exact plane-wave combination
    xe = pt.xv[-1]
    far = np.exp(-1j * pt.k * xe)[:, None, None] * np.eye(1) + (
        np.exp(1j * pt.k * xe)[:, None, None] * pt.S
    )
    assert np.abs(pt.psi[:, -1] - far).max() < 1e-8
    assert boundary_residual(pt) < 1e-6


def test_mismatched_grids_rejected(golden_scatter, small_grid):
    _, table = golden_scatter
    jt_other = solve_faddeev(zero_potential(1), small_grid, refine=2)
    with pytest.raises(SpectralError, match="momentum grids"):
        physical_solution(jt_other, table)


def test_stationary_equation_residual_scales(golden_potential, golden_boundary):
    """Interior second-difference residual of the solution is O(dx^2); the
    constant is grid-stable (halving dx divides the residual by about 4)."""

    def residual(dx):
        grid = KXGrid.build(kmax=8.0, nk=64, dx=dx, xmax=4.0)
        jt = jost_matrix(solve_faddeev(golden_potential, grid), golden_boundary)
        pt = physical_solution(jt, smatrix(jt))
        V = golden_potential.value_at(pt.xv)
        second = (pt.psi[:, 2:] - 2 * pt.psi[:, 1:-1] + pt.psi[:, :-2]) / dx**2
        res = (
            -second
            + np.einsum("xij,axjl->axil", V[1:-1], pt.psi[:, 1:-1])
            - (pt.k**2)[:, None, None, None] * pt.psi[:, 1:-1]
        )
        # the step edge carries an O(1) curvature jump; skip nodes next to it
        keep = np.abs(pt.xv[1:-1] - 1.0) > 1.5 * dx
        node = np.argmin(np.abs(pt.k - 3.6))
        return float(np.abs(res[node][keep]).max()), dx

    coarse, dxc = residual(1 / 64)
    fine, dxf = residual(1 / 128)
    assert coarse < 30.0 * dxc**2
    assert fine < 30.0 * dxf**2
    assert 3.2 < coarse / fine < 4.8


def test_f0_closed_form_exponential(golden_scatter):
    jt, _ = golden_scatter
    grid = jt.grid
    phi = f0_transform(grid, np.exp(-grid.x))
    exact = np.sqrt(2.0 / np.pi) / (1.0 + grid.kpos**2)
    assert np.abs(phi[:, 0] - exact).max() < 5e-7


def test_f0_zero_parseval_involution(golden_scatter):
    jt, _ = golden_scatter
    grid = jt.grid
    assert np.abs(f0_transform(grid, np.zeros(grid.x.size))).max() == 0.0
    bump = np.exp(-((grid.x - 4.0) ** 2) / 2.0)
    phi = f0_transform(grid, bump)
    norm_x = np.sqrt(np.sum(simpson_weights(grid.x) * bump**2))
    norm_k = np.sqrt(grid.dk * np.sum(np.abs(phi) ** 2))
    assert abs(norm_x - norm_k) / norm_x < 1e-6
    # self-inverse on data whose even extension is smooth (centered bump)
    even = np.exp(-(grid.x**2) / 2.0)
    back = f0_synthesis(grid, f0_transform(grid, even))
    assert np.abs(back[:, 0] - even).max() < 1e-6


def test_free_maps_equal_cosine_transform(wide_grid):
    pt = _free_table(BoundaryPair.neumann(1), wide_grid)
    Y = np.exp(-((wide_grid.x - 6.0) ** 2) / 2.0)
    phi0 = f0_transform(wide_grid, Y)
    for sign in (+1, -1):
        assert np.abs(fourier_maps(pt, Y, sign) - phi0).max() < 1e-6
        assert np.abs(fourier_maps(pt, np.zeros_like(Y), sign)).max() == 0.0


def test_golden_isometry_and_projector(golden_physical):
    pt = golden_physical
    grid = pt.grid
    Y = np.exp(-((grid.x - 4.0) ** 2) / 2.0).astype(complex)
    norm_y = field_norm(Y, grid.wx)
    for sign in (+1, -1):
        phi = fourier_maps(pt, Y, sign)
        norm_phi = float(np.sqrt(grid.dk * np.sum(np.abs(phi) ** 2)))
        assert abs(norm_phi - norm_y) / norm_y < 2e-3
        back = fourier_maps_adjoint(pt, phi, sign)
        assert np.abs(back[:, 0] - Y).max() < 2e-3  # no bound states: P_ac = 1


def test_duality_is_exact(golden_physical):
    pt = golden_physical
    grid = pt.grid
    rng = np.random.default_rng(7)
    Y = np.exp(-((grid.x - 4.0) ** 2) / 2.0).astype(complex)
    Z = rng.normal(size=(grid.npos, 1)) + 1j * rng.normal(size=(grid.npos, 1))
    Z *= np.exp(-0.02 * grid.kpos[:, None] ** 2)
    for sign in (+1, -1):
        lhs = np.sum(grid.dk * np.conj(fourier_maps(pt, Y, sign)) * Z)
        rhs = np.sum(
            grid.wx[:, None]
            * np.conj(Y[:, None])
            * fourier_maps_adjoint(pt, Z, sign)
        )
        assert abs(lhs - rhs) < 1e-8
    assert np.abs(fourier_maps_adjoint(pt, np.zeros_like(Z), +1)).max() == 0.0


def test_free_evolution_matches_image_propagator(wide_grid):
    pt = _free_table(BoundaryPair.neumann(1), wide_grid)
    x = wide_grid.x
    Y = np.exp(-((x - 6.0) ** 2) / 2.0)
    for t in (0.5, 2.0):
        out = evolve_spectral(pt, Y, t)
        exact = oracles.free_neumann_evolution(x, t, x0=6.0, sigma=1.0)
        assert np.abs(out[:, 0] - exact).max() < 2e-3


def test_evolution_at_zero_time_projects(golden_physical):
    pt = golden_physical
    Y = np.exp(-((pt.grid.x - 4.0) ** 2) / 2.0).astype(complex)
    out = evolve_spectral(pt, Y, 0.0)
    ref = fourier_maps_adjoint(pt, fourier_maps(pt, Y, +1), +1)
    assert np.abs(out - ref).max() < 1e-12
    assert np.abs(out[:, 0] - Y).max() < 2e-3


def test_norm_conservation(wide_grid, golden_physical):
    x = wide_grid.x
    pt_free = _free_table(BoundaryPair.neumann(1), wide_grid)
    Y = np.exp(-((x - 6.0) ** 2) / 2.0)
    norms = []
    for t in (0.0, 0.5, 1.0, 2.0, 4.0):
        out = evolve_spectral(pt_free, Y, t, xmax_out=90.0)
        xo = np.arange(out.shape[0]) * wide_grid.dx
        norms.append(field_norm(out, trapezoid_weights(xo)))
    norms = np.asarray(norms)
    assert (norms.max() - norms.min()) / norms[0] < 1e-6
    # interacting case: near-field quadrature limits the drift but it stays small
    pt = golden_physical
    Yg = np.exp(-((pt.grid.x - 4.0) ** 2) / 2.0).astype(complex)
    gn = []
    for t in (0.5, 2.0):
        out = evolve_spectral(pt, Yg, t, xmax_out=80.0)
        xo = np.arange(out.shape[0]) * pt.grid.dx
        gn.append(field_norm(out, trapezoid_weights(xo)))
    base = field_norm(Yg, pt.grid.wx)
    assert np.abs(np.asarray(gn) - base).max() / base < 5e-6


def test_spectral_matches_discrete_exponential(wide_grid):
    pt = _free_table(BoundaryPair.neumann(1), wide_grid)
    dh = discrete_hamiltonian(zero_potential(1), BoundaryPair.neumann(1), wide_grid.x)
    Y = np.exp(-(wide_grid.x**2) / (2.0 * 6.0**2))
    for t in (10.0, 50.0):
        a = evolve_spectral(pt, Y, t)
        b = evolve_discrete(dh, Y[:, None], t)
        assert np.abs(a - b).max() < 2e-3


def test_discrete_hamiltonian_hermitian_against_dense(matrix_potential):
    bc = BoundaryPair.robin(np.array([np.pi, 0.9]), n=2)
    xg = np.arange(0.0, 6.0, 1 / 16)
    dh = discrete_hamiltonian(matrix_potential, bc, xg)
    N = dh.size
    banded = np.zeros((N, N), dtype=complex)
    for u in range(dh.band.shape[0]):
        for i in range(N - u):
            banded[i + u, i] = dh.band[u, i]
            if u:
                banded[i, i + u] = np.conj(dh.band[u, i])
    # rebuild the lopsided ghost-point stencil densely, then symmetrize it
    from scatterkit.boundary import diagonalize_boundary

    form = diagonalize_boundary(bc)
    dx = 1 / 16
    vrot = np.einsum(
        "ij,xjl,lm->xim", form.M.conj().T, matrix_potential.value_at(xg), form.M
    )
    dense = np.zeros((N, N), dtype=complex)
    for j in range(xg.size - 1):
        for c in range(2):
            i = dh.index[j, c]
            if i < 0:
                continue
            robin = 2 / dx**2 * (1 - dx / np.tan(form.thetas[c]))
            dense[i, i] = (robin if j == 0 else 2 / dx**2) + vrot[j, c, c]
            for c2 in range(2):
                if c2 != c and dh.index[j, c2] >= 0:
                    dense[dh.index[j, c2], i] = vrot[j, c2, c]
            for j2 in (j - 1, j + 1):
                if 0 <= j2 < xg.size - 1 and dh.index[j2, c] >= 0:
                    hop = 2.0 if (j == 0 and j2 == 1) else 1.0
                    dense[i, dh.index[j2, c]] += -hop / dx**2
    sym = np.diag(dh.boundary_scale) @ dense @ np.diag(1.0 / dh.boundary_scale)
    assert np.abs(sym - banded).max() < 1e-10
    assert np.abs(sym - sym.conj().T).max() < 1e-10


def test_free_neumann_discrete_spectrum_bounds(wide_grid):
    dh = discrete_hamiltonian(zero_potential(1), BoundaryPair.neumann(1), wide_grid.x)
    w, _ = dh.eigenpairs
    assert w.min() > 0.0
    assert w.max() < 4.0 / wide_grid.dx**2
    assert bound_states(dh).size == 0


def test_free_dirichlet_discrete_no_negatives(small_grid):
    dh = discrete_hamiltonian(zero_potential(1), BoundaryPair.dirichlet(1), small_grid.x)
    assert bound_states(dh).size == 0
    assert dh.index[0, 0] == -1  # boundary node eliminated


def test_well_bound_state_count_matches_oracle():
    xg = np.arange(0.0, 30.0, 1 / 64)
    dh = discrete_hamiltonian(box_potential(-5.0, 0.0, 1.0), BoundaryPair.neumann(1), xg)
    found = np.sort(bound_states(dh))
    exact = np.sort(oracles.box_well_bound_states(depth=5.0, width=1.0))
    assert found.size == exact.size
    assert np.abs(found - exact).max() < 2e-2  # first-order error at the step edge


def test_golden_discrete_spectrum_nonnegative(golden_potential, golden_boundary):
    xg = np.arange(0.0, 30.0, 1 / 64)
    dh = discrete_hamiltonian(golden_potential, golden_boundary, xg)
    w, _ = dh.eigenpairs
    assert w.min() > -1e-8
    assert bound_states(dh).size == 0


def test_bound_state_warning_and_projection(wide_grid):
    pot = box_potential(-5.0, 0.0, 1.0)
    bc = BoundaryPair.neumann(1)
    jt = jost_matrix(solve_faddeev(pot, wide_grid), bc)
    pt = physical_solution(jt, smatrix(jt))  # plateau not needed here
    dh = discrete_hamiltonian(pot, bc, wide_grid.x)
    Y = np.exp(-((wide_grid.x - 3.0) ** 2) / 1.5)
    with pytest.warns(BoundStatesPresent, match="absolutely continuous"):
        out = evolve_spectral(pt, Y, 0.0, hamiltonian=dh, xmax_out=50.0)
    # the projection strips the bound component: overlap with the discrete
    # ground state collapses and some mass is lost
    w, v = dh.eigenpairs
    ground = np.zeros(wide_grid.x.size, dtype=complex)
    mask = dh.index[:, 0] >= 0
    ground[mask] = (v[:, np.argmin(w)] / dh.boundary_scale)[dh.index[mask, 0]]
    ground /= field_norm(ground, wide_grid.wx)
    before = abs(np.sum(wide_grid.wx * np.conj(ground) * Y))
    nout = out.shape[0]
    wxo = trapezoid_weights(np.arange(nout) * wide_grid.dx)
    after = abs(np.sum(wxo * np.conj(ground[:nout]) * out[:, 0]))
    assert after < 0.05 * before
    assert field_norm(out, wxo) < field_norm(Y, wide_grid.wx)


def test_window_overflow_monitor(wide_grid):
    pt = _free_table(BoundaryPair.neumann(1), wide_grid)
    Y = np.exp(-((wide_grid.x - 3.0) ** 2) / 1.5)
    stage = _build_stage(pt, 3.0, 12.0)  # far too small for t = 60
    phi = stage.analysis(stage.resample(Y[:, None]), Y[: pt.xv.size, None], +1)
    shifted = np.exp(-1j * 60.0 * stage.kq**2)[:, None] * phi
    with pytest.raises(WindowOverflow, match="outer tenth"):
        stage.synthesis(shifted, +1, wide_grid.dx, wide_grid.x.size)


def test_wave_limit_identity_for_free_neumann():
    grid = KXGrid.build(kmax=12.0, nk=768, dx=1 / 32, xmax=16.0)
    pt = _free_table(BoundaryPair.neumann(1), grid)
    Y = np.exp(-((grid.x - 4.0) ** 2) / 2.0).astype(complex)
    for t in (0.0, 50.0):
        theta = interacting_after_free(pt, Y, t)
        assert np.abs(theta[:, 0] - Y).max() < 5e-4


@settings(max_examples=10, deadline=None)
@given(
    x0=st.floats(min_value=2.0, max_value=6.0),
    sigma=st.floats(min_value=0.5, max_value=1.5),
)
def test_duality_property_free(x0, sigma):
    grid = KXGrid.build(kmax=8.0, nk=128, dx=1 / 16, xmax=16.0)
    pt = _free_table(BoundaryPair.neumann(1), grid)
    Y = np.exp(-((grid.x - x0) ** 2) / (2 * sigma**2)).astype(complex)
    Z = np.exp(-((grid.kpos - 2.0) ** 2))[:, None].astype(complex)
    lhs = np.sum(grid.dk * np.conj(fourier_maps(pt, Y, +1)) * Z)
    rhs = np.sum(
        grid.wx[:, None] * np.conj(Y[:, None]) * fourier_maps_adjoint(pt, Z, +1)
    )
    assert abs(lhs - rhs) < 1e-10
    phi = fourier_maps(pt, Y, +1)
    norm_phi = float(np.sqrt(grid.dk * np.sum(np.abs(phi) ** 2)))
    assert abs(norm_phi - field_norm(Y, grid.wx)) < 5e-5
