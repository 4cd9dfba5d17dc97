"""Stationary scattering for matrix Schrodinger operators on the half line.

The package computes, for -d^2/dx^2 + V(x) on x >= 0 with a general
self-adjoint boundary condition at the origin:

* Jost (Faddeev) solutions and the Jost matrix,
* the scattering matrix, its zero/infinite-energy limits and Fourier symbols,
* the Marchenko integral kernel of the Jost-solution representation,
* generalized Fourier maps, spectral time evolution and bound states,
* wave operators in three equivalent forms (spectral, three-term
  Hilbert-transform decomposition, four-term convolution form),
* full-line problems with point interactions reduced to half-line systems of
  doubled size, and the full-line scattering matrix assembled from the
  reflection/transmission blocks.

Everything is table-driven: build a :class:`~scatterkit.grids.KXGrid`, solve
for the Faddeev tables, then derive scattering/spectral/wave-operator objects
from them.  The ``scatter`` command line exposes the same pipeline.
"""

from .grids import KXGrid, GridError, GridTooCoarse
from .potentials import (
    PotentialSpec,
    Moments,
    NonHermitian,
    EmptySupport,
    validate_potential,
    moments,
    l1gamma_norm,
    fold_line_potential,
)
from .boundary import (
    BoundaryPair,
    DiagonalForm,
    NotSelfAdjointPair,
    DegeneratePair,
    NonHermitianCoupling,
    validate_boundary,
    diagonalize_boundary,
    line_interaction_matrices,
    predicted_s_infinity_identity,
)
from .jost import (
    JostTable,
    JostMatrix,
    KernelTable,
    NoConvergence,
    TailNotNegligible,
    solve_faddeev,
    jost_matrix,
    marchenko_kernel,
    jost_representation_check,
)

__version__ = "0.1.0"
