import time

import numpy as np

import sys
sys.path.insert(0, "tests")

from scatterkit.grids import KXGrid
from scatterkit.potentials import PotentialSpec, box_potential
from scatterkit.boundary import BoundaryPair
from scatterkit.jost import solve_faddeev, jost_matrix
from scatterkit.scattering import (
    smatrix, s_limits, fs_symbol, p_symbols, sdot_asymptotics, h1_membership,
    ScatteringTable, scattering_table,
)

# (a) dilation covariance, V=1 on (0,1) vs 4 on (0,0.5), lambda=2
base = KXGrid.build(kmax=20.0, nk=2048, dx=1 / 256, xmax=4.0)
scaled = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 256, xmax=4.0)
assert np.abs(scaled.k - 2 * base.k).max() == 0.0
v1 = box_potential(1.0, 0.0, 1.0)
v2 = box_potential(4.0, 0.0, 0.5)
t0 = time.time()
j1 = solve_faddeev(v1, base, refine=8)
j2 = solve_faddeev(v2, scaled, refine=8)
print(f"dilation solves: {time.time()-t0:.2f}s")
for bc, name in [(BoundaryPair.dirichlet(1), "dirichlet"), (BoundaryPair.neumann(1), "neumann")]:
    s1 = smatrix(jost_matrix(j1, bc))
    s2 = smatrix(jost_matrix(j2, bc))
    print(f"dilation defect ({name}):", np.abs(s2.S - s1.S).max())

# (b) complex Hermitian matrix potential on medium grid
vm = PotentialSpec.from_cells(2, [
    (0.0, 1.0, [[1.0, 0.5j], [-0.5j, 2.0]]),
    (1.0, 2.0, [[-0.3, 0.0], [0.0, 0.4]]),
])
grid = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=8.0)
gridm = KXGrid.build(kmax=20.0, nk=512, dx=1 / 64, xmax=8.0)
t0 = time.time()
jm = solve_faddeev(vm, gridm)
print(f"matrix solve: {time.time()-t0:.2f}s")
bmix = BoundaryPair.robin(np.array([np.pi, 0.9]), n=2)
stm = scattering_table(jost_matrix(jm, bmix))
print("matrix unitarity:", stm.unitarity_defect, " symmetry:", stm.symmetry_defect)
print("matrix p-conj defect:", stm.p_conjugation_defect, " scale:", np.abs(stm.Pminus).max())
print("matrix plateau dev:", stm.plateau_deviation)
from scatterkit.boundary import diagonalize_boundary, predicted_s_infinity
pred = predicted_s_infinity(diagonalize_boundary(bmix))
print("matrix Sinf vs boundary prediction:", np.abs(stm.S_infinity - pred).max())
print("matrix h1:", stm.h1norm, " fs_l1:", stm.fs_l1)
repm = sdot_asymptotics(stm)
print("matrix slopes:", repm["slope_sdot"], repm["slope_s_minus_sinf"])

# free potentials: Neumann, Dirichlet, delta Lambda=0
vz1 = PotentialSpec.from_cells(1, [(0.0, 1.0, 0.0)])
jz = solve_faddeev(vz1, grid)
stn = scattering_table(jost_matrix(jz, BoundaryPair.neumann(1)))
eye = np.eye(1)
print("neumann free |S-I|:", np.abs(stn.S - eye).max(), " S0:", stn.S0.ravel(),
      " Sinf:", stn.S_infinity.ravel(), " fs_l1:", stn.fs_l1, " h1:", stn.h1norm)
repn = sdot_asymptotics(stn)
print("neumann free flat:", repn["flat"], " slopes:", repn["slope_sdot"])
std = scattering_table(jost_matrix(jz, BoundaryPair.dirichlet(1)))
print("dirichlet free |S+I|:", np.abs(std.S + eye).max())

from scatterkit.boundary import line_interaction_matrices
vz2 = PotentialSpec.from_cells(2, [(0.0, 1.0, [[0.0, 0.0], [0.0, 0.0]])])
jz2 = solve_faddeev(vz2, grid)
bdelta0 = line_interaction_matrices(np.zeros((1, 1)))
std0 = smatrix(jost_matrix(jz2, bdelta0))
swap = np.array([[0.0, 1.0], [1.0, 0.0]])
print("delta0 |S-swap|:", np.abs(std0.S - swap).max())

# (e) acceptance-default golden: kmax=40 nk=4096 dx=1/256 xmax=40
t0 = time.time()
gacc = KXGrid.build(kmax=40.0, nk=4096, dx=1 / 256, xmax=40.0)
from oracles import remark_theta
jacc = solve_faddeev(box_potential(1.0, 0.0, 1.0), gacc)
tsolve = time.time() - t0
stacc = s_limits(smatrix(jost_matrix(jacc, BoundaryPair.robin(remark_theta()))))
print(f"acceptance solve: {tsolve:.2f}s  total: {time.time()-t0:.2f}s")
print("acc unitarity:", stacc.unitarity_defect, " symmetry:", stacc.symmetry_defect)
print("acc S0 err:", abs(stacc.S0[0, 0] - 1), " Sinf err:", abs(stacc.S_infinity[0, 0] - 1))
print("acc J0 min sv:", jost_matrix(jacc, BoundaryPair.robin(remark_theta())).jmatrix.min_sv0)

# free-Robin Fs via synthetic wide grid
gt = KXGrid.build(kmax=640.0, nk=16384, dx=1 / 1024, xmax=4.0)
a = 1.0 / np.tan(1.0)
Sfr = (-(np.cos(1.0) - 1j * gt.k * np.sin(1.0)) / (np.cos(1.0) + 1j * gt.k * np.sin(1.0))).reshape(-1, 1, 1)
syn = ScatteringTable(k=gt.k, S=Sfr, n=1, exceptional=False, unitarity_defect=0.0,
                      symmetry_defect=0.0, grid=gt)
syn = s_limits(syn)
print("syn free-robin Sinf err:", abs(syn.S_infinity[0, 0] - 1.0))
yq = np.linspace(-4.0, 4.0, 801)
syn = fs_symbol(syn, yq)
from oracles import free_robin_fs
oracle = free_robin_fs(yq, 1.0)
mask = np.abs(yq - 0.0) > 0.05
print("syn free-robin fs err (|y|>0.05):", np.abs(syn.Fs[mask, 0, 0] - oracle[mask]).max())
mask2 = np.abs(yq) > 0.25
print("syn free-robin fs err (|y|>0.25):", np.abs(syn.Fs[mask2, 0, 0] - oracle[mask2]).max())

