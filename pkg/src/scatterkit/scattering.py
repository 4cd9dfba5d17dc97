"""Scattering matrix, its limits, and the Fourier symbols built from it.

The scattering matrix on the momentum grid is assembled from the Jost matrix
by batched linear solves; its zero- and high-energy limits are estimated by
polynomial extrapolation and plateau averaging, and the symbols used by the
wave-operator formulas (the full-line transform of ``S - S_inf`` and its two
half-line restrictions) are synthesized with the grid's tapered quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .grids import KXGrid, trapezoid_weights
from .jost import JostTable

__all__ = [
    "ScatteringError",
    "SingularJost",
    "NoPlateau",
    "ScatteringTable",
    "smatrix",
    "s_limits",
    "fs_symbol",
    "p_symbols",
    "sdot_asymptotics",
    "h1_membership",
    "scattering_table",
]

INNER_FIT_NODES = 6
OUTER_PLATEAU_FRACTION = 0.10
PLATEAU_TOL = 1e-2
UNITARITY_GUARD = 1e-3


class ScatteringError(RuntimeError):
    """Base class for scattering-matrix failures."""


class SingularJost(ScatteringError):
    """The Jost matrix is numerically singular at a real grid momentum."""

    def __init__(self, k: float, min_sv: float):
        self.k = float(k)
        self.min_sv = float(min_sv)
        super().__init__(
            f"Jost matrix singular at k={k:.6g} (min singular value {min_sv:.3e}); "
            "exclude a neighborhood of k=0 in the exceptional case"
        )


class NoPlateau(ScatteringError):
    """The high-energy plateau of S(k) has not formed inside the window."""


@dataclass(frozen=True)
class ScatteringTable:
    """Scattering data on the momentum grid.

    Attributes
    ----------
    k : ndarray
        Momentum nodes (symmetric, half-offset).
    S : ndarray
        ``S(k) = -J(-k) J(k)^{-1}``, shape ``(len(k), n, n)``.
    S0, S_infinity : ndarray or None
        Extrapolated zero-energy limit and plateau estimate (see s_limits).
    Fs, Fs_y : ndarray or None
        Samples of the full-line transform of ``S - S_inf`` and their nodes.
    Pplus, Pminus, P_x : ndarray or None
        The two half-line symbols and their common spatial nodes.
    """

    k: np.ndarray
    S: np.ndarray
    n: int
    exceptional: bool
    unitarity_defect: float
    symmetry_defect: float
    grid: KXGrid | None = None
    boundary: object = None
    S0: np.ndarray | None = None
    S_infinity: np.ndarray | None = None
    plateau_deviation: float | None = None
    Fs: np.ndarray | None = None
    Fs_y: np.ndarray | None = None
    fs_l1: float | None = None
    Pplus: np.ndarray | None = None
    Pminus: np.ndarray | None = None
    P_x: np.ndarray | None = None
    p_conjugation_defect: float | None = None
    h1norm: float | None = None

    @cached_property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    def s_at(self, k_query: np.ndarray) -> np.ndarray:
        """S at arbitrary momenta by cubic interpolation of the grid samples
        (entrywise, real and imaginary parts)."""
        from scipy.interpolate import CubicSpline

        spline = CubicSpline(self.k, self.S, axis=0)
        return spline(np.asarray(k_query, dtype=float))


def smatrix(jt: JostTable) -> ScatteringTable:
    """Scattering matrix ``S(k) = -J(-k) J(k)^{-1}`` on the grid.

    Solves ``S(k) J(k) = -J(-k)`` as one batched linear system per momentum;
    the symmetric half-offset grid never contains ``k = 0``, so the
    exceptional case needs no special-casing here.

    Raises
    ------
    SingularJost
        If some ``J(k)`` is numerically singular (relative to the table's
        largest singular value).
    ScatteringError
        If the computed matrix fails unitarity beyond a loose solver-sanity
        guard (indicates an under-resolved solve, not physics).
    """
    jm = jt.jmatrix
    if jm is None:
        raise ScatteringError("attach a Jost matrix (jost_matrix) before smatrix")
    J = jm.J
    sv = np.linalg.svd(J, compute_uv=False)
    scale = float(sv.max())
    worst = int(np.argmin(sv.min(axis=1)))
    if sv[worst].min() < 1e-12 * scale:
        raise SingularJost(jt.k[worst], float(sv[worst].min()))
    Jm = J[::-1]  # J(-k), exact node map
    # S J = -J(-k)  <=>  J^T S^T = -J(-k)^T
    S = -np.linalg.solve(J.transpose(0, 2, 1), Jm.transpose(0, 2, 1)).transpose(0, 2, 1)
    eye = np.eye(jt.n)
    unit = float(np.abs(S.conj().swapaxes(-1, -2) @ S - eye).max())
    symm = float(np.abs(S[::-1] - S.conj().swapaxes(-1, -2)).max())
    if unit > UNITARITY_GUARD:
        raise ScatteringError(
            f"unitarity defect {unit:.2e} exceeds the sanity guard; "
            "increase the solver refinement"
        )
    return ScatteringTable(
        k=jt.k,
        S=S,
        n=jt.n,
        exceptional=jm.exceptional,
        unitarity_defect=unit,
        symmetry_defect=symm,
        grid=jt.grid,
        boundary=jm.boundary,
    )


def s_limits(
    st: ScatteringTable,
    inner_nodes: int = INNER_FIT_NODES,
    outer_fraction: float = OUTER_PLATEAU_FRACTION,
    plateau_tol: float = PLATEAU_TOL,
) -> ScatteringTable:
    """Estimate ``S(0)`` and ``S_inf`` and attach them to the table.

    ``S(0)`` is extrapolated entrywise with a quadratic fit in ``k`` over the
    ``inner_nodes`` smallest ``|k|`` nodes (never by inverting ``J(0)``, which
    may be singular).  ``S_inf`` averages the Hermitian-symmetrized samples
    ``(S(k) + S(-k))/2`` over the outer ``outer_fraction`` of nodes; the
    symmetrization cancels the anti-Hermitian ``O(1/k)`` leading tail, leaving
    an ``O(1/k^2)`` bias.

    Raises
    ------
    NoPlateau
        If the symmetrized outer samples deviate from their mean by more than
        ``plateau_tol``: the momentum window ends before the plateau forms.
    """
    k, S = st.k, st.S
    order = np.argsort(np.abs(k), kind="stable")
    sel = order[:inner_nodes]
    design = np.vander(k[sel], 3)  # columns k^2, k, 1
    coef, *_ = np.linalg.lstsq(design, S[sel].reshape(inner_nodes, -1), rcond=None)
    S0 = coef[2].reshape(st.n, st.n)

    sym = 0.5 * (S + S[::-1])  # S(-k) = S(k)^dagger: Hermitian part, pairwise
    m = max(2, int(round(outer_fraction * k.size / 2)))
    outer = np.concatenate([sym[:m], sym[-m:]], axis=0)
    S_inf = outer.mean(axis=0)
    deviation = float(np.abs(outer - S_inf).max())
    if deviation > plateau_tol:
        raise NoPlateau(
            f"high-energy plateau deviation {deviation:.2e} exceeds {plateau_tol:.1e}; "
            "increase the momentum window"
        )
    return replace(st, S0=S0, S_infinity=S_inf, plateau_deviation=deviation)


def _require_sinf(st: ScatteringTable) -> ScatteringTable:
    return st if st.S_infinity is not None else s_limits(st)


def fs_symbol(st: ScatteringTable, y: np.ndarray | None = None) -> ScatteringTable:
    """Full-line transform ``(1/2pi) integral (S(k) - S_inf) e^{iky} dk``.

    Synthesized with the grid's tapered midpoint quadrature on the default
    symmetric spatial nodes (or given ``y``); also records the integrated
    spectral norm (finite for Hermitian potentials with a first moment).
    """
    st = _require_sinf(st)
    if y is None:
        if st.grid is None:
            raise ScatteringError("no default spatial nodes: pass y explicitly")
        y = st.grid.x_sym
    y = np.asarray(y, dtype=float)
    taper = (
        st.grid.taper
        if st.grid is not None
        else np.ones_like(st.k)
    )
    g = (st.S - st.S_infinity) * taper[:, None, None]
    phases = np.exp(1j * np.outer(st.k, y))
    Fs = np.tensordot(phases, g.reshape(st.k.size, -1), axes=(0, 0))
    Fs = (st.dk / (2.0 * np.pi)) * Fs.reshape(y.size, st.n, st.n)
    norms = np.linalg.norm(Fs, ord=2, axis=(-2, -1))
    l1 = float(norms @ trapezoid_weights(y))
    return replace(st, Fs=Fs, Fs_y=y, fs_l1=l1)


def p_symbols(st: ScatteringTable, x: np.ndarray | None = None) -> ScatteringTable:
    """The two positive-momentum symbols

    ``P_plus(x)  = (1/2pi) integral_0^inf e^{-ikx} (S(-k) - S_inf) dk``
    ``P_minus(x) = (1/2pi) integral_0^inf e^{+ikx} (S(k) - S_inf) dk``

    on the symmetric spatial nodes; ``P_minus(x) = P_plus(x)^dagger`` holds
    exactly on the symmetric grid and is asserted.
    """
    st = _require_sinf(st)
    if x is None:
        if st.grid is None:
            raise ScatteringError("no default spatial nodes: pass x explicitly")
        x = st.grid.x_sym
    x = np.asarray(x, dtype=float)
    pos = st.k > 0
    kp = st.k[pos]
    taper = (
        st.grid.taper_pos
        if st.grid is not None
        else np.ones_like(kp)
    )
    gp = (st.S[pos] - st.S_infinity) * taper[:, None, None]
    gm = (st.S[::-1][pos] - st.S_infinity) * taper[:, None, None]  # S(-k), k > 0
    ph_minus = np.exp(1j * np.outer(kp, x))
    Pminus = np.tensordot(ph_minus, gp.reshape(kp.size, -1), axes=(0, 0))
    Pplus = np.tensordot(ph_minus.conj(), gm.reshape(kp.size, -1), axes=(0, 0))
    scalefac = st.dk / (2.0 * np.pi)
    Pminus = scalefac * Pminus.reshape(x.size, st.n, st.n)
    Pplus = scalefac * Pplus.reshape(x.size, st.n, st.n)
    # exact when the table has exact momentum-reflection symmetry; of the
    # order of the solver's symmetry defect otherwise
    mismatch = float(np.abs(Pminus - Pplus.conj().swapaxes(-1, -2)).max())
    return replace(
        st, Pplus=Pplus, Pminus=Pminus, P_x=x, p_conjugation_defect=mismatch
    )


def sdot_asymptotics(
    st: ScatteringTable,
    fit_lo: float | None = None,
    fit_hi: float | None = None,
) -> dict:
    """Momentum-derivative report: high-energy decay slopes and low-energy
    boundedness statistics.

    ``S'`` is computed by central differences.  The report contains log-log
    slopes over ``[K_max/5, K_max/1.2]`` for both ``|S'(k)|`` and
    ``|S(k) - S_inf|`` (the two quantities scale differently: for unimodular
    scalar ``S = e^{i phi}`` with ``phi ~ c/k``, the former decays like
    ``1/k^2`` while the latter decays like ``1/k``), plus the low-energy
    maximum of ``|S'|`` on ``0 < k <= 0.5`` against its value at ``k = 1``.
    """
    st = _require_sinf(st)
    k, S = st.k, st.S
    dk = st.dk
    kin = k[1:-1]
    Sdot = (S[2:] - S[:-2]) / (2.0 * dk)
    nd = np.linalg.norm(Sdot, ord=2, axis=(-2, -1))
    ns = np.linalg.norm(S[1:-1] - st.S_infinity, ord=2, axis=(-2, -1))
    kmax = float(np.abs(k).max()) + 0.5 * dk  # nominal window edge
    lo = kmax / 5.0 if fit_lo is None else fit_lo
    hi = kmax / 1.2 if fit_hi is None else fit_hi
    band = (kin >= lo) & (kin <= hi)

    flat = bool(nd.max() < 1e-12)
    if flat or not band.any():
        slope_sdot = slope_smsinf = None
    else:
        logk = np.log(kin[band])
        slope_sdot = float(np.polyfit(logk, np.log(np.maximum(nd[band], 1e-300)), 1)[0])
        slope_smsinf = float(np.polyfit(logk, np.log(np.maximum(ns[band], 1e-300)), 1)[0])

    low = (kin > 0) & (kin <= 0.5)
    i1 = int(np.argmin(np.abs(kin - 1.0)))
    low_max = float(nd[low].max()) if low.any() else float("nan")
    at_one = float(nd[i1])
    return {
        "k": kin,
        "sdot_norm": nd,
        "fit_band": (lo, hi),
        "slope_sdot": slope_sdot,
        "slope_s_minus_sinf": slope_smsinf,
        "flat": flat,
        "low_energy_max": low_max,
        "sdot_at_one": at_one,
        "low_energy_ratio": low_max / at_one if at_one > 0 else float("inf"),
    }


def h1_membership(st: ScatteringTable) -> ScatteringTable:
    """Discrete first-order Sobolev norm of ``S - S_inf`` over the window:
    ``integral (|S - S_inf|_F^2 + |S'|_F^2) dk`` (central differences,
    midpoint weights).  Finite and grid-stable for Hermitian first-moment
    potentials; attach the value to the table."""
    st = _require_sinf(st)
    S = st.S
    dk = st.dk
    diff2 = np.abs(S - st.S_infinity) ** 2
    sdot2 = np.abs((S[2:] - S[:-2]) / (2.0 * dk)) ** 2
    total = dk * (
        diff2.sum() - 0.5 * (diff2[0].sum() + diff2[-1].sum()) + sdot2.sum()
    )
    return replace(st, h1norm=float(total))


def scattering_table(jt: JostTable) -> ScatteringTable:
    """One-call pipeline: S, its limits, both symbols, and the Sobolev norm."""
    return h1_membership(p_symbols(fs_symbol(s_limits(smatrix(jt)))))
