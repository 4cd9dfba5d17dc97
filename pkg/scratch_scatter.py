import time

import numpy as np

import sys
sys.path.insert(0, "tests")
from oracles import step_smatrix_closed, remark_theta, rational_p_minus, free_robin_fs

from scatterkit.grids import KXGrid
from scatterkit.potentials import PotentialSpec, box_potential
from scatterkit.boundary import BoundaryPair
from scatterkit.jost import solve_faddeev, jost_matrix
from scatterkit.scattering import (
    smatrix, s_limits, fs_symbol, p_symbols, sdot_asymptotics, h1_membership,
    ScatteringTable, scattering_table,
)

theta = remark_theta()
v = box_potential(1.0, 0.0, 1.0)
robin = BoundaryPair.robin(theta)
diri = BoundaryPair.dirichlet(1)

t0 = time.time()
grid = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=16.0)
jt = solve_faddeev(v, grid)
print(f"solve: {time.time()-t0:.2f}s")

jtr = jost_matrix(jt, robin)
st = smatrix(jtr)
print("unitarity defect:", st.unitarity_defect)
print("symmetry defect:", st.symmetry_defect)
print("exceptional:", st.exceptional)

# closed-form node check (sampled nodes)
idx = np.arange(16, 2048, 64)
Sc = np.array([step_smatrix_closed(float(kk), theta) for kk in grid.k[idx]])
print("node max err vs closed form:", np.abs(st.S[idx, 0, 0] - Sc).max())

st = s_limits(st)
print("S0:", st.S0.ravel(), " err:", abs(st.S0[0, 0] - 1))
print("Sinf:", st.S_infinity.ravel(), " err:", abs(st.S_infinity[0, 0] - 1))
print("plateau dev:", st.plateau_deviation)

# frozen-value spot check via interpolation
sq = st.s_at(np.array([1.0, 5.0]))[:, 0, 0]
print("s_at(1):", sq[0], " err:", abs(sq[0] - (0.8603462471589842 + 0.5097100499298124j)))
print("s_at(5):", sq[1], " err:", abs(sq[1] - (0.9928836534741219 + 0.11908841532189383j)))

st = fs_symbol(st)
print("fs_l1:", st.fs_l1)
y = st.Fs_y
norms = np.abs(st.Fs[:, 0, 0])
from scatterkit.grids import trapezoid_weights
wy = trapezoid_weights(y)
tail = norms[np.abs(y) > y.max() / 2] @ wy[np.abs(y) > y.max() / 2]
print("tail fraction:", tail / st.fs_l1)

# reconstruction at interior nodes
inner = np.abs(grid.k) <= 0.45 * grid.kmax
phases = np.exp(-1j * np.outer(grid.k[inner], y))
rec = st.S_infinity[0, 0] + phases @ (st.Fs[:, 0, 0] * wy)
print("reconstruction err (interior):", np.abs(rec - st.S[inner, 0, 0]).max())

rep = sdot_asymptotics(st)
print("slope_sdot:", rep["slope_sdot"], " slope_smsinf:", rep["slope_s_minus_sinf"])

std = s_limits(smatrix(jost_matrix(jt, diri)))
repd = sdot_asymptotics(std)
print("dirichlet low-energy ratio:", repd["low_energy_ratio"])
print("dirichlet S0:", std.S0.ravel(), "Sinf:", std.S_infinity.ravel())

st = h1_membership(st)
print("h1 (kmax=40):", st.h1norm)
g20 = KXGrid.build(kmax=20.0, nk=1024, dx=1 / 128, xmax=16.0)
st20 = h1_membership(s_limits(smatrix(jost_matrix(solve_faddeev(v, g20), robin))))
print("h1 (kmax=20):", st20.h1norm, " rel change:", abs(st.h1norm - st20.h1norm) / st.h1norm)

# rational toy
t0 = time.time()
gt = KXGrid.build(kmax=640.0, nk=16384, dx=1 / 1024, xmax=4.0)
Stoy = (1.0 + 1.0 / (1.0 + 1j * gt.k)).reshape(-1, 1, 1)
toy = ScatteringTable(k=gt.k, S=Stoy, n=1, exceptional=False, unitarity_defect=0.0,
                      symmetry_defect=0.0, grid=gt,
                      S0=np.array([[2.0]]), S_infinity=np.array([[1.0]]),
                      plateau_deviation=0.0)
xq = np.array([0.5, 1.0, 2.0])
toy = p_symbols(toy, xq)
frozen = [0.3032653298563167 + 0.04384691602784141j,
          0.18393972058572117 + 0.11095882886637572j,
          0.06766764161830635 + 0.1067106375207389j]
for i, xv in enumerate(xq):
    err = abs(toy.Pminus[i, 0, 0] - frozen[i])
    print(f"P-({xv}): {toy.Pminus[i,0,0]:.9f} err {err:.2e}  Re-vs-exp/2 {abs(toy.Pminus[i,0,0].real - np.exp(-xv)/2):.2e}")
print("p conj defect:", toy.p_conjugation_defect)
# full-line (no cutoff) check: P+ + P- = full transform = e^{-x}
full = toy.Pminus[:, 0, 0] + toy.Pplus[:, 0, 0]
print("P+ + P- vs e^{-x}:", np.abs(full - np.exp(-xq)).max())
print(f"toy time: {time.time()-t0:.2f}s")

# free-Robin Fs oracle
vz = PotentialSpec.from_cells(1, [(0.0, 1.0, 0.0)])
th2 = 1.0
jtz = solve_faddeev(vz, grid)
stz = fs_symbol(s_limits(smatrix(jost_matrix(jtz, BoundaryPair.robin(th2)))))
mask = (y >= 0.5) & (y <= 8.0)
oracle = free_robin_fs(y[mask], th2)
print("free-robin fs err:", np.abs(stz.Fs[mask, 0, 0] - oracle).max())
print("free-robin fs at y<-0.5:", np.abs(stz.Fs[y < -0.5, 0, 0]).max())
print("free-robin Sinf:", stz.S_infinity.ravel(), "S0:", stz.S0.ravel())
# closed form S0 for free robin: -(cos/ (cos)) = -(cos - 0)/(cos + 0) = -1? S(0) = -J(0-)/J(0): J=cos th + ik sin th -> S(0) = -1
print("free-robin plateau dev:", stz.plateau_deviation)

# NoPlateau synthetic
g10 = KXGrid.build(kmax=10.0, nk=512, dx=1 / 128, xmax=4.0)
Ssyn = np.exp(5j / g10.k).reshape(-1, 1, 1)
syn = ScatteringTable(k=g10.k, S=Ssyn, n=1, exceptional=False,
                      unitarity_defect=0.0, symmetry_defect=0.0, grid=g10)
try:
    s_limits(syn)
    print("NoPlateau NOT raised")
except Exception as e:
    print("NoPlateau raised:", type(e).__name__, e)
