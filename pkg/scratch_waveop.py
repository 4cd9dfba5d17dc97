import numpy as np

from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid
from scatterkit.jost import jost_matrix, marchenko_kernel, solve_faddeev
from scatterkit.potentials import box_potential, zero_potential
from scatterkit.scattering import scattering_table, smatrix
from scatterkit.spectral import physical_solution
from scatterkit.waveop import (
    FieldR,
    FieldRplus,
    HypothesisViolated,
    convolve,
    convolve_adjoint,
    extend_even,
    extend_even_adjoint,
    hilbert,
    halfline_band_projection,
    kernel_apply,
    kernel_apply_adjoint,
    restrict,
    restrict_adjoint,
    t_split_terms,
    wave_op_adjoint,
    wave_op_decomposed,
    wave_op_l1_form,
    wave_op_stationary,
)

rng = np.random.default_rng(11)


def inner_plus(f, g):
    return np.sum(f.weights[:, None] * np.conj(f.values) * g.values)


def inner_sym(f, g):
    return np.sum(f.weights[:, None] * np.conj(f.values) * g.values)


# --- 1. convolution centering: narrow normalized Gaussian ~ identity -------
x = np.arange(0.0, 30.0 + 1e-12, 1 / 16)
Y = FieldRplus(x, np.exp(-((x - 8.0) ** 2) / 2.0))
E = extend_even(Y)
w = 0.05
gker = np.exp(-(E.x**2) / (2 * w**2)) / (w * np.sqrt(2 * np.pi))
G = FieldR(E.x, gker[:, None, None])
QE = convolve(G, E)
print("mollifier deviation:", np.abs(QE.values - E.values).max())

# delta-like kernel shifted by one node -> shift the field
gd = np.zeros((E.x.size, 1, 1))
gd[E.x.size // 2 + 1, 0, 0] = 1.0 / E.dx
Gd = FieldR(E.x, gd)
shifted = convolve(Gd, E)
print("shift-by-node deviation:", np.abs(shifted.values[1:] - E.values[:-1]).max())

# --- 2. Hilbert oracle ------------------------------------------------------
for X in (60.0, 100.0, 200.0):
    xl = np.arange(0.0, X + 1e-12, 1 / 16)
    lor = FieldRplus(xl, 1.0 / (1.0 + xl**2))
    Elor = extend_even(lor)
    H = hilbert(Elor)
    exact = Elor.x / (1.0 + Elor.x**2)
    err = np.abs(H.values[:, 0] - exact)
    inner = np.abs(Elor.x) <= 0.8 * X
    print(f"hilbert lorentzian X={X}: max {err.max():.2e}  inner {err[inner].max():.2e}")
xl = np.arange(0.0, 60.0 + 1e-12, 1 / 16)
lor = FieldRplus(xl, 1.0 / (1.0 + xl**2))
Elor = extend_even(lor)

for X, dxh in ((60.0, 1 / 8), (200.0, 1 / 8), (400.0, 1 / 8), (1280.0, 1 / 4)):
    xw = np.arange(-X, X + 1e-9, dxh)
    gauss = FieldR(xw, np.exp(-(xw**2) / 2.0))
    HH = hilbert(hilbert(gauss))
    print(f"H^2 = -I (X={X}):", np.abs(HH.values + gauss.values).max())
gauss = FieldR(Elor.x, np.exp(-((Elor.x) ** 2) / 8.0))
Hg = hilbert(gauss)
print("odd antisym:", np.abs(Hg.values + Hg.values[::-1]).max())

# --- 3. band projection identity -------------------------------------------
for branch in (+1, -1):
    P = halfline_band_projection(gauss, branch)
    ref = branch * 0.5j * hilbert(gauss).values + 0.5 * gauss.values
    print(f"projection branch {branch:+d}:", np.abs(P.values - ref).max())

# --- 4. extension / restriction dualities -----------------------------------
A = FieldRplus(x, rng.normal(size=(x.size, 2)) + 1j * rng.normal(size=(x.size, 2)))
B = FieldR(
    np.concatenate([-x[:0:-1], x]),
    rng.normal(size=(2 * x.size - 1, 2)) + 1j * rng.normal(size=(2 * x.size - 1, 2)),
)
lhs = inner_sym(extend_even(A), B)
rhs = inner_plus(A, extend_even_adjoint(B))
print("E_even duality:", abs(lhs - rhs))
lhs = inner_plus(restrict(B), A)
rhs = inner_sym(B, restrict_adjoint(A))
print("R duality:", abs(lhs - rhs))

Gm = FieldR(
    B.x,
    (rng.normal(size=(B.x.size, 2, 2)) + 1j * rng.normal(size=(B.x.size, 2, 2)))
    * np.exp(-np.abs(B.x)[:, None, None]),
)
Z = FieldR(B.x, rng.normal(size=(B.x.size, 2)) + 1j * rng.normal(size=(B.x.size, 2)))
lhs = inner_sym(convolve(Gm, B), Z)
rhs = inner_sym(B, convolve_adjoint(Gm, Z))
print("Q duality:", abs(lhs - rhs) / abs(lhs))

# --- 5. golden tables --------------------------------------------------------
grid = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=16.0)
pot = box_potential(1.0, 0.0, 1.0)
bc = BoundaryPair.robin(0.9199161587718891)
jt = jost_matrix(solve_faddeev(pot, grid), bc)
st = scattering_table(jt)
pt = physical_solution(jt, st)
kt = marchenko_kernel(jt)
print("schur:", kt.schur_row, kt.schur_col)

xg = grid.x
Yg = FieldRplus(xg, np.exp(-((xg - 4.0) ** 2) / 2.0))

Wst = {s: wave_op_stationary(pt, Yg, s) for s in (+1, -1)}
Wdec = {s: wave_op_decomposed(st, kt, Yg, s) for s in (+1, -1)}
Wl1 = {s: wave_op_l1_form(st, kt, Yg, s) for s in (+1, -1)}
ny = Yg.norm(2)
for s in (+1, -1):
    d1 = Wst[s].replace_values(Wst[s].values - Wdec[s].values).norm(2) / ny
    d2 = Wst[s].replace_values(Wst[s].values - Wl1[s].values).norm(2) / ny
    d3 = Wst[s].replace_values(Wdec[s].values - Wl1[s].values).norm(2) / ny
    print(f"sign {s:+d}: |stat-dec| {d1:.2e}  |stat-l1| {d2:.2e}  |dec-l1| {d3:.2e}")

# six-term split
terms = t_split_terms(pt, st, kt, Yg, +1)
tot = sum(t.values for t in terms)
print("t-split vs stationary:", Wst[+1].replace_values(tot - Wst[+1].values).norm(2) / ny)

# adjoint duality + partial isometry
Zg = FieldRplus(
    xg,
    (rng.normal(size=(xg.size, 1)) + 1j * rng.normal(size=(xg.size, 1)))
    * np.exp(-((xg - 6.0) ** 2) / 8.0)[:, None],
)
lhs = inner_plus(Wl1[+1], Zg)
rhs = inner_plus(Yg, wave_op_adjoint(st, kt, Zg, +1))
print("W duality:", abs(lhs - rhs) / abs(lhs))
WtW = wave_op_adjoint(st, kt, wave_op_l1_form(st, kt, Yg, +1), +1)
print("W'W - Y:", WtW.replace_values(WtW.values - Yg.values).norm(2) / ny)

# intertwining e^{-iH} P_ac = W e^{-iH0} W'
from scatterkit.spectral import evolve_spectral, f0_synthesis, f0_transform, fourier_maps, fourier_maps_adjoint

lhs_f = evolve_spectral(pt, Yg.values, 1.0)
Wd = wave_op_adjoint(st, kt, Yg, +1)
phi0 = f0_transform(grid, Wd.values) * np.exp(-1j * grid.kpos**2)[:, None]
free_evolved = f0_synthesis(grid, phi0)
rhs_f = wave_op_l1_form(st, kt, Yg.replace_values(free_evolved), +1)
print("intertwining:", Yg.replace_values(lhs_f - rhs_f.values).norm(2) / ny)

# --- 6. free Dirichlet: W = +- i R H E_even ---------------------------------
gridd = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=16.0)
jtd = jost_matrix(solve_faddeev(zero_potential(1), gridd, refine=2), BoundaryPair.dirichlet(1))
std = smatrix(jtd)
ptd = physical_solution(jtd, std)
Yd = FieldRplus(gridd.x, np.exp(-((gridd.x - 4.0) ** 2) / 2.0))
for s in (+1, -1):
    W = wave_op_stationary(ptd, Yd, s)
    ref = restrict(hilbert(extend_even(Yd)))
    refv = s * 1j * ref.values
    print(f"dirichlet sign {s:+d}:", W.replace_values(W.values - refv).norm(2) / Yd.norm(2))

# hypothesis gate
from scatterkit.scattering import s_limits, fs_symbol, p_symbols

std_full = p_symbols(fs_symbol(s_limits(std)))
ktd = marchenko_kernel(jtd)
try:
    wave_op_l1_form(std_full, ktd, Yd, +1)
    print("HypothesisViolated NOT raised")
except HypothesisViolated as e:
    print("HypothesisViolated raised:", e.s0_defect, e.sinf_defect)

# --- 7. free Neumann: everything collapses ----------------------------------
jtn = jost_matrix(solve_faddeev(zero_potential(1), gridd, refine=2), BoundaryPair.neumann(1))
stn = scattering_table(jtn)
ptn = physical_solution(jtn, stn)
ktn = marchenko_kernel(jtn)
Yc = FieldRplus(gridd.x, np.exp(-(gridd.x**2) / 2.0))
for s in (+1, -1):
    W = wave_op_stationary(ptn, Yc, s)
    print(f"neumann stationary identity sign {s:+d}:", np.abs(W.values - Yc.values).max())
    Wd2 = wave_op_decomposed(stn, ktn, Yc, s)
    print(f"neumann decomposed identity sign {s:+d}:", np.abs(Wd2.values - Yc.values).max())
    Wl = wave_op_l1_form(stn, ktn, Yc, s)
    print(f"neumann l1-form identity sign {s:+d}:", np.abs(Wl.values - Yc.values).max())
terms = t_split_terms(ptn, stn, ktn, Yc, +1)
print("neumann T2,T4,T5,T6 max:", max(np.abs(t.values).max() for t in (terms[1], terms[3], terms[4], terms[5])))
print("neumann T1+T3-Y:", np.abs(terms[0].values + terms[2].values - Yc.values).max())
