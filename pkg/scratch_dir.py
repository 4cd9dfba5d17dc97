import numpy as np

from scatterkit.boundary import BoundaryPair
from scatterkit.grids import KXGrid
from scatterkit.jost import jost_matrix, solve_faddeev
from scatterkit.potentials import zero_potential
from scatterkit.scattering import smatrix
from scatterkit.spectral import physical_solution
from scatterkit.waveop import FieldR, FieldRplus, extend_even, hilbert, restrict, wave_op_stationary

# H^2 at X=1600
xw = np.arange(-1600.0, 1600.0 + 1e-9, 1 / 4)
g = FieldR(xw, np.exp(-(xw**2) / 2.0))
HH = hilbert(hilbert(g))
print("H^2 = -I (X=1600):", np.abs(HH.values + g.values).max())

gridd = KXGrid.build(kmax=40.0, nk=2048, dx=1 / 128, xmax=16.0)
jtd = jost_matrix(solve_faddeev(zero_potential(1), gridd, refine=2), BoundaryPair.dirichlet(1))
std = smatrix(jtd)
print("max |S+1|:", np.abs(std.S + 1.0).max())
ptd = physical_solution(jtd, std)
Yd = FieldRplus(gridd.x, np.exp(-((gridd.x - 4.0) ** 2) / 2.0))
W = wave_op_stationary(ptd, Yd, +1)
ref = restrict(hilbert(extend_even(Yd)))
diff = W.values - 1j * ref.values
i = int(np.argmax(np.abs(diff)))
print("max |diff|:", np.abs(diff).max(), "at x =", gridd.x[i])
for xq in (0.0, 1.0, 4.0, 8.0, 12.0, 15.0, 16.0):
    j = int(round(xq / gridd.dx))
    print(f"  diff({xq}) = {diff[j, 0]:.3e}")

# oracle: direct fine midpoint quadrature of (1/sqrt(2pi)) * int 2i sin(kx) phi(k) dk
# with phi the exact cosine transform of the Gaussian:
# phi(k) = sqrt(2/pi) * int_0^inf cos(k y) e^{-(y-4)^2/2} dy
#        = sqrt(2/pi) * Re int_{-inf}^{inf} ... (center far from 0: one-sided ok)
kf = (np.arange(200000) + 0.5) * (40.0 / 200000)
phi = np.sqrt(2 / np.pi) * np.sqrt(np.pi / 2) * np.exp(-(kf**2) / 2) * np.cos(4 * kf) * 2
# exact: int_-inf^inf cos(ky) e^{-(y-4)^2/2} dy = sqrt(2 pi) e^{-k^2/2} cos(4k); half-line tail negligible
xs = gridd.x[:: 64]
orac = (2.0 / np.sqrt(2 * np.pi)) * (np.sin(np.outer(xs, kf)) * phi).sum(axis=1) * (40.0 / 200000)
Wc = W.values[:: 64, 0]
Hc = 1j * ref.values[:: 64, 0]
print("stationary vs oracle:", np.abs(1j * orac - Wc).max())
print("hilbert ref vs oracle:", np.abs(1j * orac - Hc).max())
