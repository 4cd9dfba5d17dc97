import time

import numpy as np

from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid
from scatterkit.jost import jost_matrix, marchenko_kernel, solve_faddeev
from scatterkit.potentials import box_potential, zero_potential
from scatterkit.scattering import scattering_table, smatrix
from scatterkit.spectral import physical_solution
from scatterkit.waveop import (
    FieldRplus,
    bump_family,
    extend_even,
    hilbert,
    lp_probe,
    restrict,
    wave_op_decomposed,
    wave_op_l1_form,
    wave_op_stationary,
    wave_op_time_limit,
)


def golden(grid):
    ft = solve_faddeev(box_potential(1.0, 0.0, 1.0), grid, refine=2)
    theta = float(np.arctan(1 / np.tanh(1.0)))
    jt = jost_matrix(ft, BoundaryPair.robin(theta))
    st = scattering_table(jt)
    return physical_solution(jt, st), st, marchenko_kernel(jt)


# --- criterion 3, Dirichlet at fine dk --------------------------------------
t0 = time.time()
gridd = KXGrid.build(kmax=20.0, nk=4096, dx=1 / 128, xmax=16.0)
jtd = jost_matrix(solve_faddeev(zero_potential(1), gridd, refine=2), BoundaryPair.dirichlet(1))
std = smatrix(jtd)
ptd = physical_solution(jtd, std)
print("S+I:", np.abs(std.S + 1.0).max())
for x0, sig in ((4.0, 1.0), (6.0, 1.5), (3.0, 0.75)):
    Yd = FieldRplus(gridd.x, np.exp(-((gridd.x - x0) ** 2) / (2 * sig**2)))
    for s in (+1, -1):
        W = wave_op_stationary(ptd, Yd, s)
        ref = restrict(hilbert(extend_even(Yd)))
        rel = W.replace_values(W.values - s * 1j * ref.values).norm(2) / Yd.norm(2)
        print(f"dirichlet x0={x0} sig={sig} sign {s:+d}: {rel:.2e}")
print("c3 time:", time.time() - t0)

# --- criterion 5 on the acceptance default grid ------------------------------
t0 = time.time()
grid = KXGrid.build(kmax=40.0, nk=4096, dx=1 / 256, xmax=40.0)
pt, st, kt = golden(grid)
print("build time:", time.time() - t0)
x = grid.x
fields = {
    "plain": np.exp(-((x - 10.0) ** 2) / 4.0),
    "packet": np.exp(2j * x) * np.exp(-((x - 12.0) ** 2) / 8.0),
    "wide": (x / 8.0) * np.exp(3j * x) * np.exp(-((x - 8.0) ** 2) / 18.0),
}
t0 = time.time()
for name, vals in fields.items():
    Y = FieldRplus(x, vals)
    for s in (+1, -1):
        a = wave_op_stationary(pt, Y, s).values
        b = wave_op_decomposed(st, kt, Y, s).values
        c = wave_op_l1_form(st, kt, Y, s).values
        nrm = Y.norm(2)
        dd = lambda u, v: FieldRplus(x, u - v).norm(2) / nrm
        print(f"c5 {name} sign {s:+d}: sd={dd(a,b):.2e} sl={dd(a,c):.2e} dl={dd(b,c):.2e}")
print("c5 time:", time.time() - t0)

# --- criterion 6 time limit ---------------------------------------------------
t0 = time.time()
Y6 = FieldRplus(x, np.exp(-((x - 8.0) ** 2) / 8.0))
rep = wave_op_time_limit(pt, Y6, +1)
print("c6:", {k: rep[k] for k in ("t", "relative", "nonincreasing", "final_distance")})
print("c6 time:", time.time() - t0)

# --- criterion 7 probes -------------------------------------------------------
t0 = time.time()
xp = np.arange(0.0, 30.0 + 1e-9, 1 / 128)


def dirichlet_factory(xw):
    g = KXGrid.build(kmax=20.0, nk=1024, dx=float(xw[1] - xw[0]), xmax=float(xw[-1]))
    jt = jost_matrix(solve_faddeev(zero_potential(1), g, refine=2), BoundaryPair.dirichlet(1))
    stl = scattering_table(jt)
    ktl = marchenko_kernel(jt)
    return lambda f: wave_op_decomposed(stl, ktl, f, +1)


def golden_factory(xw):
    g = KXGrid.build(kmax=40.0, nk=2048, dx=float(xw[1] - xw[0]), xmax=float(xw[-1]))
    ptl, stl, ktl = golden(g)
    return lambda f: wave_op_decomposed(stl, ktl, f, +1)


for nm, fac in (("dirichlet", dirichlet_factory), ("golden", golden_factory)):
    rep = lp_probe(fac, xp, 1)
    print(f"c7 {nm}: class={rep['classification']} sens={rep['window_sensitivity']:.3f}")
    print("   ratios:", np.array2string(np.asarray(rep["ratios"]), precision=3))
print("c7 time:", time.time() - t0)
