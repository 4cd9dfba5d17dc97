"""Wave operators: domain-tagged primitives, the three equivalent routes,
adjoints, finite-time limits, and the L^p boundedness probes.

Closed forms used here: the Hilbert transform pair 1/(1+x^2) -> x/(1+x^2);
the free Dirichlet wave operator +-i R H E_even; the free Neumann collapse of
every route to the identity; and the kernel Schur bound integrated in closed
form for the unit step.  All discrete adjoints are exact transposes of the
forward quadratures, so duality tests run at rounding level.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid
from scatterkit.jost import marchenko_kernel, solve_faddeev, jost_matrix
from scatterkit.potentials import zero_potential
from scatterkit.scattering import fs_symbol, p_symbols, s_limits, scattering_table, smatrix
from scatterkit.spectral import WindowOverflow, evolve_spectral, f0_synthesis, f0_transform, physical_solution
from scatterkit.waveop import (
    DomainMismatch,
    DomainReflection,
    FieldR,
    FieldRplus,
    GridMismatch,
    HypothesisViolated,
    OperatorPipeline,
    SchurUnbounded,
    WindowTooSmall,
    bump_family,
    convolve,
    convolve_adjoint,
    extend_even,
    extend_even_adjoint,
    extend_odd,
    halfline_band_projection,
    hilbert,
    kernel_apply,
    kernel_apply_adjoint,
    lp_probe,
    pipeline_sum,
    restrict,
    restrict_adjoint,
    stage_extend_even,
    stage_hilbert,
    stage_restrict,
    t_split_terms,
    wave_op_adjoint,
    wave_op_decomposed,
    wave_op_l1_form,
    wave_op_stationary,
    wave_op_time_limit,
)


@pytest.fixture(scope="module")
def golden_wave(golden_scatter):
    """Physical-solution, scattering, and kernel tables for the unit step."""
    jt, table = golden_scatter
    return physical_solution(jt, table), table, marchenko_kernel(jt)


@pytest.fixture(scope="module")
def dirichlet_fine():
    """Free Dirichlet tables on a fine momentum grid (the stationary route's
    midpoint momentum sum carries an O(dk^2 x) boundary term, so closed-form
    comparisons want small dk)."""
    grid = KXGrid.build(kmax=20.0, nk=4096, dx=1 / 128, xmax=16.0)
    jt = jost_matrix(solve_faddeev(zero_potential(1), grid, refine=2), BoundaryPair.dirichlet(1))
    return jt, smatrix(jt)


@pytest.fixture(scope="module")
def neumann_free():
    grid = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=16.0)
    jt = jost_matrix(solve_faddeev(zero_potential(1), grid, refine=2), BoundaryPair.neumann(1))
    table = scattering_table(jt)
    return physical_solution(jt, table), table, marchenko_kernel(jt)


def _inner_plus(f: FieldRplus, g: FieldRplus) -> complex:
    return complex(np.sum(f.weights[:, None] * f.values.conj() * g.values))


def _inner_line(f: FieldR, g: FieldR) -> complex:
    return complex(np.sum(f.weights[:, None] * f.values.conj() * g.values))


# -- fields and domain tags ---------------------------------------------------


def test_field_contracts():
    x = np.arange(0.0, 4.0, 0.25)
    f = FieldRplus(x, np.ones(x.size))
    assert f.n == 1 and f.dx == 0.25
    assert f.norm(1) == pytest.approx(np.trapezoid(np.ones(x.size), x))
    assert f.norm(np.inf) == pytest.approx(1.0)
    with pytest.raises(GridMismatch, match="start at 0"):
        FieldRplus(x + 1.0, np.ones(x.size))
    xs = np.arange(-3.0, 3.0 + 1e-12, 0.25)
    FieldR(xs, np.ones(xs.size))
    with pytest.raises(GridMismatch, match="symmetric about 0"):
        FieldR(xs[:-1], np.ones(xs.size - 1))


def test_extension_restriction_algebra():
    x = np.arange(0.0, 5.0, 0.125)
    vals = np.exp(-((x - 2.0) ** 2)) * (1.0 + 0.3j)
    f = FieldRplus(x, vals)
    ev = extend_even(f)
    od = extend_odd(f)
    assert np.array_equal(restrict(ev).values, f.values)
    assert np.abs(ev.values - ev.values[::-1]).max() == 0.0
    assert np.abs(od.values + od.values[::-1]).max() == 0.0
    assert od.values[od.center] == 0.0  # principal value at the origin
    ones = FieldRplus(x, np.ones(x.size))
    sign_field = extend_odd(ones).values[:, 0]
    assert np.array_equal(np.sign(sign_field), np.sign(extend_odd(ones).x))


def test_extension_adjoints_are_exact():
    rng = np.random.default_rng(11)
    x = np.arange(0.0, 6.0, 0.25)
    xs = np.concatenate([-x[:0:-1], x])
    f = FieldRplus(x, rng.normal(size=(x.size, 2)) + 1j * rng.normal(size=(x.size, 2)))
    g = FieldR(xs, rng.normal(size=(xs.size, 2)) + 1j * rng.normal(size=(xs.size, 2)))
    lhs = _inner_line(extend_even(f), g)
    rhs = _inner_plus(f, extend_even_adjoint(g))
    assert abs(lhs - rhs) < 1e-12
    lhs = _inner_plus(restrict(g), f)
    rhs = _inner_line(g, restrict_adjoint(f))
    assert abs(lhs - rhs) < 1e-12


# -- Hilbert transform and band projections -----------------------------------


def test_hilbert_matches_lorentzian_pair():
    # (1/pi) PV int (1/(1+y^2)) / (x-y) dy = x/(1+x^2)
    x = np.arange(-100.0, 100.0 + 1e-9, 1 / 8)
    f = FieldR(x, 1.0 / (1.0 + x**2))
    h = hilbert(f).values[:, 0]
    target = x / (1.0 + x**2)
    assert np.abs(h - target).max() < 5e-4
    inner = np.abs(x) < 50.0
    assert np.abs(h - target)[inner].max() < 1e-4


def test_hilbert_involution_on_gaussian():
    x = np.arange(-1600.0, 1600.0 + 1e-9, 0.25)
    g = FieldR(x, np.exp(-(x**2) / 2.0))
    twice = hilbert(hilbert(g))
    assert np.abs(twice.values + g.values).max() < 2e-3


def test_hilbert_parity_and_window_gate():
    x = np.arange(-40.0, 40.0 + 1e-9, 1 / 8)
    even = FieldR(x, np.exp(-(x**2) / 4.0))
    h = hilbert(even).values
    assert np.abs(h + h[::-1]).max() < 1e-12  # image of even is odd
    edge = FieldR(x, np.exp(-((x - 38.0) ** 2)))
    with pytest.raises(WindowTooSmall, match="outer tenth"):
        hilbert(edge)
    tiny = FieldR(x, 1e-14 * np.exp(-((x - 38.0) ** 2)))
    hilbert(tiny)  # numerically-zero mass: the precondition is moot


def test_band_projections_equal_hilbert_combination():
    rng = np.random.default_rng(5)
    x = np.arange(-30.0, 30.0 + 1e-9, 1 / 8)
    f = FieldR(x, (rng.normal(size=(x.size, 2)) + 1j * rng.normal(size=(x.size, 2)))
               * np.exp(-(x[:, None] ** 2) / 40.0))
    h = hilbert(f)
    for branch in (+1, -1):
        proj = halfline_band_projection(f, branch)
        combo = branch * 0.5j * h.values + 0.5 * f.values
        assert np.abs(proj.values - combo).max() < 1e-12


# -- convolution and kernel application ---------------------------------------


def _delta_kernel(xs: np.ndarray, shift_nodes: int, dx: float) -> FieldR:
    g = np.zeros((xs.size, 1, 1))
    g[xs.size // 2 + shift_nodes, 0, 0] = 1.0 / dx
    return FieldR(xs, g)


def test_convolve_shift_and_young():
    x = np.arange(0.0, 8.0, 1 / 16)
    xs = np.concatenate([-x[:0:-1], x])
    f = extend_even(FieldRplus(x, np.exp(-((x - 3.0) ** 2))))
    shifted = convolve(_delta_kernel(xs, 8, f.dx), f)
    assert np.abs(shifted.values[8:, 0] - f.values[:-8, 0]).max() < 1e-12
    rng = np.random.default_rng(2)
    g = FieldR(xs, np.exp(-np.abs(xs[:, None, None])) * rng.normal(size=(xs.size, 1, 1)))
    young = np.sum(np.abs(g.values[:, 0, 0])) * f.dx * f.norm(1)
    assert convolve(g, f).norm(1) <= young * (1.0 + 1e-12)


def test_convolve_adjoint_duality():
    rng = np.random.default_rng(7)
    x = np.arange(0.0, 6.0, 1 / 8)
    xs = np.concatenate([-x[:0:-1], x])
    g = FieldR(xs, (rng.normal(size=(xs.size, 2, 2)) + 1j * rng.normal(size=(xs.size, 2, 2)))
               * np.exp(-np.abs(xs))[:, None, None])
    f = FieldR(xs, rng.normal(size=(xs.size, 2)) + 1j * rng.normal(size=(xs.size, 2)))
    z = FieldR(xs, rng.normal(size=(xs.size, 2)) + 1j * rng.normal(size=(xs.size, 2)))
    lhs = _inner_line(z, convolve(g, f))
    rhs = _inner_line(convolve_adjoint(g, z), f)
    assert abs(lhs - rhs) < 1e-12
    bad = FieldR(xs, np.zeros((xs.size, 1, 2)))
    with pytest.raises(GridMismatch, match="channel"):
        convolve(bad, f)


def test_kernel_apply_matches_row_quadrature(golden_wave):
    _, _, kt = golden_wave
    xg = np.arange(0.0, 16.0, 1 / 128)
    f = FieldRplus(xg, np.exp(-((xg - 2.0) ** 2)) * (1.0 - 0.5j))
    out = kernel_apply(kt, f)
    ny = kt.y.size
    rows = np.array([
        np.trapezoid(kt.raw[i, :, 0, 0] * f.values[:ny, 0], kt.y) for i in range(kt.x.size)
    ])
    assert np.abs(out.values[: kt.x.size, 0] - rows).max() < 1e-12
    assert np.abs(out.values[kt.x.size :]).max() == 0.0
    lhs = _inner_plus(f, out)
    rhs = _inner_plus(kernel_apply_adjoint(kt, f), f)
    assert abs(lhs - rhs) < 1e-10
    with pytest.raises(SchurUnbounded):
        kernel_apply(kt, f, schur_bound=1e-3)
    coarse = FieldRplus(np.arange(0.0, 16.0, 1 / 64), np.ones(1024))
    with pytest.raises(GridMismatch):
        kernel_apply(kt, coarse)


def test_kernel_schur_below_closed_form_bound(golden_wave):
    # |K(x,y)| <= (1/2) sigma((x+y)/2) e^{sigma_1(x)} integrates in closed
    # form for the unit step: the row integral is at most
    # e^{sigma_1(x)} sigma_1(x) <= e^{1/2} / 2.
    _, _, kt = golden_wave
    assert kt.schur_row <= 0.5 * np.exp(0.5) + 1e-12
    assert kt.schur_col <= 0.5 * np.exp(0.5) + 1e-12


# -- pipelines -----------------------------------------------------------------


def test_pipeline_domain_validation():
    with pytest.raises(DomainMismatch, match="restrict"):
        OperatorPipeline((stage_restrict(), stage_restrict()))
    pipe = OperatorPipeline((stage_extend_even(), stage_hilbert(), stage_restrict()))
    x = np.arange(0.0, 8.0, 1 / 16)
    out = pipe(FieldRplus(x, np.exp(-((x - 3.0) ** 2))))
    assert isinstance(out, FieldRplus)
    with pytest.raises(DomainMismatch):
        pipe(extend_even(FieldRplus(x, np.ones(x.size))))
    summed = pipeline_sum([pipe, pipe], [0.25, 0.75])
    f = FieldRplus(x, np.exp(-((x - 3.0) ** 2)))
    assert np.allclose(summed(f).values, pipe(f).values, atol=1e-14)


# -- the three routes ----------------------------------------------------------


def test_free_neumann_routes_are_identity(neumann_free):
    pt, table, kt = neumann_free
    x = pt.grid.x
    f = FieldRplus(x, np.exp(-(x**2) / 2.0))
    for sign in (+1, -1):
        assert np.abs(wave_op_stationary(pt, f, sign).values - f.values).max() < 1e-8
        assert np.abs(wave_op_decomposed(table, kt, f, sign).values - f.values).max() < 1e-12
        assert np.abs(wave_op_l1_form(table, kt, f, sign).values - f.values).max() < 1e-12
    terms = t_split_terms(pt, table, kt, f, +1)
    for idx in (1, 3, 4, 5):
        assert np.abs(terms[idx].values).max() < 1e-12
    assert np.abs(terms[0].values + terms[2].values - f.values).max() < 1e-12


def test_free_dirichlet_stationary_closed_form(dirichlet_fine):
    jt, table = dirichlet_fine
    assert np.abs(table.S + 1.0).max() < 1e-14  # S is exactly -identity
    pt = physical_solution(jt, table)
    x = pt.grid.x
    for x0, sig in ((4.0, 1.0), (6.0, 1.5), (3.0, 0.75)):
        f = FieldRplus(x, np.exp(-((x - x0) ** 2) / (2.0 * sig**2)))
        reference = restrict(hilbert(extend_even(f)))
        for sign in (+1, -1):
            w = wave_op_stationary(pt, f, sign)
            defect = w.replace_values(w.values - sign * 1j * reference.values)
            assert defect.norm(2) / f.norm(2) < 1e-3


def test_l1_form_requires_identity_limits(dirichlet_fine):
    jt, table = dirichlet_fine
    full = p_symbols(fs_symbol(s_limits(table)))
    kt = marchenko_kernel(jt)
    f = FieldRplus(jt.grid.x, np.exp(-((jt.grid.x - 4.0) ** 2)))
    with pytest.raises(HypothesisViolated) as err:
        wave_op_l1_form(full, kt, f, +1)
    assert err.value.s0_defect > 1.5
    assert err.value.sinf_defect > 1.5


def test_routes_agree_pairwise(golden_wave):
    pt, table, kt = golden_wave
    x = pt.grid.x
    fields = [
        np.exp(-((x - 6.0) ** 2) / 2.0),
        np.exp(2j * x) * np.exp(-((x - 8.0) ** 2) / 4.0),
        (x / 6.0) * np.exp(-((x - 5.0) ** 2) / 3.0),
    ]
    for vals in fields:
        f = FieldRplus(x, vals)
        scale = f.norm(2)
        for sign in (+1, -1):
            a = wave_op_stationary(pt, f, sign).values
            b = wave_op_decomposed(table, kt, f, sign).values
            c = wave_op_l1_form(table, kt, f, sign).values
            for u, v in ((a, b), (a, c), (b, c)):
                assert FieldRplus(x, u - v).norm(2) / scale < 2e-3


def test_routes_are_linear(golden_wave):
    pt, table, kt = golden_wave
    x = pt.grid.x
    fa = FieldRplus(x, np.exp(2j * x) * np.exp(-((x - 9.0) ** 2) / 6.0))
    fb = FieldRplus(x, (x / 6.0) * np.exp(-((x - 6.0) ** 2) / 3.0))
    a, b = 0.7 - 0.4j, -1.1 + 0.2j
    comb = FieldRplus(x, a * fa.values + b * fb.values)
    for op in (
        lambda f: wave_op_stationary(pt, f, +1),
        lambda f: wave_op_decomposed(table, kt, f, +1),
        lambda f: wave_op_l1_form(table, kt, f, +1),
    ):
        defect = op(comb).values - a * op(fa).values - b * op(fb).values
        assert np.abs(defect).max() < 1e-10


def test_t_split_terms_sum_to_stationary(golden_wave):
    pt, table, kt = golden_wave
    x = pt.grid.x
    f = FieldRplus(x, np.exp(-((x - 6.0) ** 2) / 2.0))
    terms = t_split_terms(pt, table, kt, f, +1)
    total = sum(term.values for term in terms)
    w = wave_op_stationary(pt, f, +1)
    assert FieldRplus(x, total - w.values).norm(2) / f.norm(2) < 1e-4


# -- adjoint, projector, intertwining ------------------------------------------


def test_adjoint_duality_and_projector(golden_wave):
    pt, table, kt = golden_wave
    x = pt.grid.x
    rng = np.random.default_rng(17)
    env = np.exp(-((x - 7.0) ** 2) / 8.0)
    f = FieldRplus(x, env * (rng.normal(size=x.size) + 1j * rng.normal(size=x.size)))
    z = FieldRplus(x, np.exp(1.5j * x) * np.exp(-((x - 5.0) ** 2) / 4.0))
    for sign in (+1, -1):
        lhs = _inner_plus(z, wave_op_l1_form(table, kt, f, sign))
        rhs = _inner_plus(wave_op_adjoint(table, kt, z, sign), f)
        assert abs(lhs - rhs) < 1e-8
    # no bound states for the touchstone data: W^dagger W = identity on L^2
    y = FieldRplus(x, np.exp(-((x - 6.0) ** 2) / 2.0))
    wy = wave_op_l1_form(table, kt, y, +1)
    back = wave_op_adjoint(table, kt, wy, +1)
    assert FieldRplus(x, back.values - y.values).norm(2) / y.norm(2) < 2e-3


def test_intertwining_with_free_evolution(golden_wave):
    # f(H) P_ac = W f(H_0) W^dagger for f = exp(-i lambda), evaluated at t = 1
    pt, table, kt = golden_wave
    x = pt.grid.x
    y = FieldRplus(x, np.exp(-((x - 6.0) ** 2) / 2.0))
    lhs = evolve_spectral(pt, y.values, 1.0)
    wd = wave_op_adjoint(table, kt, y, +1)
    phi = f0_transform(pt.grid, wd.values) * np.exp(-1j * pt.grid.kpos**2)[:, None]
    rhs = wave_op_l1_form(table, kt, y.replace_values(f0_synthesis(pt.grid, phi)), +1)
    assert FieldRplus(x, lhs - rhs.values).norm(2) / y.norm(2) < 5e-3


# -- finite-time limits ---------------------------------------------------------


def test_time_limit_free_neumann_is_flat(neumann_free):
    pt, _, _ = neumann_free
    x = pt.grid.x
    f = FieldRplus(x, np.exp(-((x - 5.0) ** 2) / 4.0))
    report = wave_op_time_limit(pt, f, +1, tschedule=(5.0, 15.0))
    assert report["nonincreasing"]
    assert report["relative"].max() < 1e-4
    assert report["t"][0] == 5.0


def test_time_limit_converts_window_overflow(golden_wave, monkeypatch):
    pt, _, _ = golden_wave
    x = pt.grid.x
    f = FieldRplus(x, np.exp(-((x - 5.0) ** 2) / 4.0))

    def blow_up(*args, **kwargs):
        raise WindowOverflow("field mass reached the outer tenth of the window")

    monkeypatch.setattr("scatterkit.waveop.interacting_after_free", blow_up)
    with pytest.raises(DomainReflection, match="outer tenth"):
        wave_op_time_limit(pt, f, +1, tschedule=(5.0,))


# -- L^p probes ------------------------------------------------------------------


def test_bump_family_shapes():
    x = np.arange(0.0, 20.0, 1 / 32)
    fam = bump_family(x, scales=5, center=8.0, base_width=2.0, n=2)
    assert len(fam) == 5
    assert all(f.values.shape == (x.size, 2) for f in fam)
    sups = [f.norm(np.inf) for f in fam]
    assert np.allclose(sups, 1.0)
    l1 = np.array([f.norm(1) for f in fam])
    assert np.allclose(l1[:-1] / l1[1:], 2.0, rtol=1e-6)  # widths halve


def test_lp_probe_identity_operator():
    x = np.arange(0.0, 30.0 + 1e-9, 1 / 64)
    report = lp_probe(lambda xg: (lambda f: f), x, 1)
    assert np.abs(report["ratios"] - 1.0).max() < 1e-12
    assert report["classification"] == "bounded"
    assert report["window_sensitivity"] < 1e-12
    assert "evidence" in report and "not a proof" in report["evidence"]


def test_lp_probe_dichotomy(golden_scatter):
    x = np.arange(0.0, 30.0 + 1e-9, 1 / 128)

    def dirichlet_factory(xg):
        g = KXGrid.build(kmax=20.0, nk=1024, dx=float(xg[1] - xg[0]), xmax=float(xg[-1]))
        jt = jost_matrix(solve_faddeev(zero_potential(1), g, refine=2), BoundaryPair.dirichlet(1))
        table = scattering_table(jt)
        kt = marchenko_kernel(jt)
        return lambda f: wave_op_decomposed(table, kt, f, +1)

    jt0, table0 = golden_scatter

    def golden_factory(xg):
        g = KXGrid.build(kmax=40.0, nk=2048, dx=float(xg[1] - xg[0]), xmax=float(xg[-1]))
        jt = jost_matrix(solve_faddeev(jt0.potential, g, refine=2), table0.boundary)
        table = scattering_table(jt)
        kt = marchenko_kernel(jt)
        return lambda f: wave_op_decomposed(table, kt, f, +1)

    unbounded = lp_probe(dirichlet_factory, x, 1)
    assert unbounded["classification"] == "growing"
    ratios = unbounded["ratios"]
    assert np.all(np.diff(ratios) > 0)
    assert ratios[-1] / ratios[0] > 2.0
    assert unbounded["window_sensitivity"] > 0.1  # log growth keeps moving

    bounded = lp_probe(golden_factory, x, 1)
    assert bounded["classification"] == "bounded"
    assert bounded["ratios"].max() / bounded["ratios"].min() < 2.0
    assert bounded["window_sensitivity"] < 0.05


# -- property: the extension adjoints hold for arbitrary data -------------------


@settings(max_examples=15, deadline=None)
@given(nodes=st.integers(min_value=8, max_value=60), seed=st.integers(0, 2**31 - 1))
def test_extension_duality_property(nodes, seed):
    rng = np.random.default_rng(seed)
    x = 0.2 * np.arange(nodes)
    xs = np.concatenate([-x[:0:-1], x])
    f = FieldRplus(x, rng.normal(size=(nodes, 1)) + 1j * rng.normal(size=(nodes, 1)))
    g = FieldR(xs, rng.normal(size=(xs.size, 1)) + 1j * rng.normal(size=(xs.size, 1)))
    assert abs(_inner_line(extend_even(f), g) - _inner_plus(f, extend_even_adjoint(g))) < 1e-10
    assert abs(_inner_plus(restrict(g), f) - _inner_line(g, restrict_adjoint(f))) < 1e-10
