"""Discretization grids shared by every table in the package.

A :class:`KXGrid` bundles the two one-dimensional grids everything else is
sampled on:

* ``k`` -- a uniform, symmetric momentum grid with *half-offset* nodes
  ``k_j = (j + 1/2 - N_k/2) * dk``.  The grid never contains ``k = 0`` (the
  Jost matrix may be singular there), is closed under ``k -> -k``
  (``k[::-1] == -k`` exactly), and its positive half doubles as a midpoint
  quadrature rule for integrals over ``(0, inf)``.
* ``x`` -- a uniform node-aligned grid on ``[0, X_max]`` used for spatial
  fields and trapezoid quadrature.

Notes
-----
The spatial step must resolve the fastest oscillation ``e^{2i k_max x}``
appearing in the Volterra iteration; construction enforces the sampling
condition ``dx <= pi / (4 k_max)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_KMAX = 40.0
DEFAULT_NK = 4096
DEFAULT_DX = 1.0 / 256.0
DEFAULT_XMAX = 40.0

#: fraction of the momentum range occupied by the smooth spectral taper
TAPER_FRACTION = 0.10


class GridError(ValueError):
    """Base class for grid construction/consistency failures."""


class GridTooCoarse(GridError):
    """Spatial step too large for the requested momentum range."""


def cosine_taper(k: np.ndarray, kmax: float, fraction: float = TAPER_FRACTION) -> np.ndarray:
    """Raised-cosine window: 1 on the inner part of ``[-kmax, kmax]``, rolling
    smoothly to 0 over the outer ``fraction`` of the range.

    Parameters
    ----------
    k : ndarray
        Momentum samples.
    kmax : float
        Nominal half-width of the momentum window.
    fraction : float
        Relative width of the roll-off region at each edge.

    Returns
    -------
    ndarray
        Window values in ``[0, 1]``, same shape as ``k``.
    """
    edge = (1.0 - fraction) * kmax
    width = fraction * kmax
    a = np.abs(k)
    w = np.ones_like(a)
    roll = a > edge
    w[roll] = np.cos(0.5 * np.pi * np.clip((a[roll] - edge) / width, 0.0, 1.0)) ** 2
    return w


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Trapezoid quadrature weights for a sorted 1-d grid.

    A single-node grid spans a zero-length interval, so its weight is zero.
    """
    if x.size < 2:
        return np.zeros_like(x)
    w = np.empty_like(x)
    w[1:-1] = 0.5 * (x[2:] - x[:-2])
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    return w


def simpson_weights(x: np.ndarray) -> np.ndarray:
    """Composite-Simpson weights on a uniform grid (trapezoid fallback on the
    last interval when the interval count is odd)."""
    npts = x.size
    if npts < 3:
        return trapezoid_weights(x)
    h = x[1] - x[0]
    w = np.zeros(npts)
    last = npts if npts % 2 == 1 else npts - 1
    w[0:last:2] += 2.0
    w[1:last:2] += 4.0
    w[0] -= 1.0
    w[last - 1] -= 1.0
    w *= h / 3.0
    if last != npts:  # odd interval count: close with one trapezoid panel
        w[-2] += 0.5 * h
        w[-1] += 0.5 * h
    return w


@dataclass(frozen=True)
class KXGrid:
    """Paired momentum/space grids with their quadrature weights.

    Attributes
    ----------
    k : ndarray
        Symmetric half-offset momentum nodes, ascending, ``k[::-1] == -k``.
    x : ndarray
        Uniform nodes on ``[0, X_max]`` including both endpoints.
    """

    k: np.ndarray
    x: np.ndarray

    @classmethod
    def build(
        cls,
        kmax: float = DEFAULT_KMAX,
        nk: int = DEFAULT_NK,
        dx: float = DEFAULT_DX,
        xmax: float = DEFAULT_XMAX,
    ) -> "KXGrid":
        """Construct the standard grid pair.

        Raises
        ------
        GridError
            If ``nk`` is odd or any size is non-positive.
        GridTooCoarse
            If ``dx > pi / (4 kmax)``.
        """
        if nk < 2 or nk % 2:
            raise GridError(f"momentum grid needs an even node count, got {nk}")
        if kmax <= 0 or dx <= 0 or xmax <= 0:
            raise GridError("grid sizes must be positive")
        if dx > np.pi / (4.0 * kmax) * (1 + 1e-12):
            raise GridTooCoarse(
                f"dx={dx} cannot resolve oscillations at kmax={kmax}; "
                f"need dx <= pi/(4 kmax) = {np.pi / (4 * kmax):.6g}"
            )
        dk = 2.0 * kmax / nk
        j = np.arange(nk)
        k = (j + 0.5 - nk / 2.0) * dk
        nx = int(round(xmax / dx))
        x = np.arange(nx + 1) * dx
        return cls(k=k, x=x)

    # -- momentum-side helpers -------------------------------------------------

    @cached_property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    @cached_property
    def kmax(self) -> float:
        """Nominal half-width of the momentum window (half a step beyond the
        outermost node)."""
        return float(self.k[-1] + 0.5 * self.dk)

    @cached_property
    def kpos(self) -> np.ndarray:
        """Positive-momentum nodes (midpoint rule for integrals over (0, inf))."""
        return self.k[self.k > 0]

    @property
    def npos(self) -> int:
        return self.kpos.size

    @cached_property
    def taper(self) -> np.ndarray:
        """Smooth window over the full momentum grid."""
        return cosine_taper(self.k, self.kmax)

    @cached_property
    def taper_pos(self) -> np.ndarray:
        return cosine_taper(self.kpos, self.kmax)

    def flip_k(self, table: np.ndarray, axis: int = 0) -> np.ndarray:
        """View of a k-indexed table evaluated at ``-k`` (exact node map)."""
        return np.flip(table, axis=axis)

    # -- space-side helpers ----------------------------------------------------

    @cached_property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @cached_property
    def xmax(self) -> float:
        return float(self.x[-1])

    @cached_property
    def wx(self) -> np.ndarray:
        """Trapezoid weights on the spatial grid."""
        return trapezoid_weights(self.x)

    @cached_property
    def x_sym(self) -> np.ndarray:
        """Symmetric spatial grid on ``[-X_max, X_max]`` aligned with ``x``."""
        return np.concatenate([-self.x[:0:-1], self.x])

    def index_of_x(self, value: float) -> int:
        """Index of the node nearest to ``value`` (must lie on the grid)."""
        idx = int(round(value / self.dx))
        if not (0 <= idx < self.x.size) or abs(self.x[idx] - value) > 1e-9 * max(1.0, abs(value)):
            raise GridError(f"{value} is not a node of the spatial grid")
        return idx
