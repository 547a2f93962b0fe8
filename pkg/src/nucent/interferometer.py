"""Single-photon propagation through the two-arm interferometer.

Chain, in the order the photon meets the elements:

    BS1 -> diag(psi_R(t), psi_L(t)) -> mirror (-1) -> BS2

with each beam splitter the unitary ``(1/sqrt 2) [[1, i], [i, 1]]``.  Mode
``a`` exits toward detector B, mode ``b`` toward detector C.  For a single
photon, <a^dag a> reduces to |a|^2 of the classical mode amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import DomainError, GridMismatchError
from .nuclear_response import TimeGrid, switched_amplitudes

__all__ = [
    "BEAM_SPLITTER",
    "MIRROR",
    "TwoModeField",
    "LinearElement",
    "FringePoint",
    "beam_splitter",
    "mirror",
    "sample_element",
    "apply_element",
    "single_photon_input",
    "propagate_chain",
    "which_path_chain",
    "detector_intensities",
    "fringe_scan",
    "prompt_routing",
    "delayed_fraction_b",
]

BEAM_SPLITTER = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
MIRROR = -np.eye(2, dtype=complex)


@dataclass
class TwoModeField:
    """Time-sampled complex amplitudes of the two interferometer modes."""

    grid: TimeGrid
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        n = self.grid.n
        self.a = np.broadcast_to(np.asarray(self.a, dtype=complex), (n,)).copy()
        self.b = np.broadcast_to(np.asarray(self.b, dtype=complex), (n,)).copy()
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise DomainError("TwoModeField samples must be finite")

    def __mul__(self, c):
        return TwoModeField(self.grid, c * self.a, c * self.b)

    __rmul__ = __mul__


@dataclass
class LinearElement:
    """2x2 linear optical element, static or time dependent.

    ``m`` is either a ``(2, 2)`` matrix or a ``(n, 2, 2)`` stack with one
    matrix per grid sample.
    """

    m: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.m = np.asarray(self.m, dtype=complex)
        if self.m.shape[-2:] != (2, 2) or self.m.ndim not in (2, 3):
            raise DomainError("LinearElement matrix must be 2x2 or a stack of 2x2")

    @property
    def time_dependent(self):
        return self.m.ndim == 3


@dataclass(frozen=True)
class FringePoint:
    t_phi: float
    q_b: float
    q_c: float

    @property
    def q_b_norm(self):
        total = self.q_b + self.q_c
        return self.q_b / total if total > 0 else float("nan")


def beam_splitter():
    return LinearElement(BEAM_SPLITTER, "bs")


def mirror():
    return LinearElement(MIRROR, "mirror")


def sample_element(psi_r, psi_l, theta=0.0):
    """Diagonal element diag(psi_R e^{i theta}, psi_L) from sampled arms.

    ``theta`` is an optional static phase on the right arm.
    """
    psi_r = np.asarray(psi_r, dtype=complex) * np.exp(1j * theta)
    psi_l = np.asarray(psi_l, dtype=complex)
    if psi_r.shape != psi_l.shape:
        raise GridMismatchError("arm amplitudes differ in length")
    m = np.zeros(psi_r.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = psi_r
    m[..., 1, 1] = psi_l
    return LinearElement(m, "sample")


def apply_element(e, f):
    """Pointwise matrix-vector product of ``e`` with ``f`` at every sample."""
    m = e.m
    if e.time_dependent and m.shape[0] != f.grid.n:
        raise GridMismatchError(
            f"element has {m.shape[0]} samples, field has {f.grid.n}"
        )
    a = m[..., 0, 0] * f.a + m[..., 0, 1] * f.b
    b = m[..., 1, 0] * f.a + m[..., 1, 1] * f.b
    return TwoModeField(f.grid, a, b)


def single_photon_input(grid):
    """Canonical input: unit pulse in mode a, vacuum in mode b."""
    return TwoModeField(grid, np.ones(grid.n), np.zeros(grid.n))


def propagate_chain(s, t_phi, grid, input=None, theta=0.0):
    """Send ``input`` through BS1, the samples, the mirror and BS2.

    For the canonical input the result is
    ``a_out = -(psi_R - psi_L)/2`` and ``b_out = -i (psi_R + psi_L)/2``.
    """
    grid.require_resolves(s.delta_b)
    if input is None:
        input = single_photon_input(grid)
    elif input.grid != grid:
        raise GridMismatchError("input field is sampled on a different grid")
    psi_r, psi_l = switched_amplitudes(s, t_phi, grid.times)
    f = apply_element(beam_splitter(), input)
    f = apply_element(sample_element(psi_r, psi_l, theta), f)
    f = apply_element(mirror(), f)
    return apply_element(beam_splitter(), f)


def which_path_chain(s, t_phi, grid, input=None, theta=0.0):
    """Chain with BS2 removed: mode a carries the right arm, b the left arm."""
    grid.require_resolves(s.delta_b)
    if input is None:
        input = single_photon_input(grid)
    elif input.grid != grid:
        raise GridMismatchError("input field is sampled on a different grid")
    psi_r, psi_l = switched_amplitudes(s, t_phi, grid.times)
    f = apply_element(beam_splitter(), input)
    f = apply_element(sample_element(psi_r, psi_l, theta), f)
    return apply_element(mirror(), f)


def detector_intensities(out):
    """Trapezoidal time integrals of |a_out|^2 and |b_out|^2."""
    dx = out.grid.dt
    q_b = float(trapezoid(np.abs(out.a) ** 2, dx=dx))
    q_c = float(trapezoid(np.abs(out.b) ** 2, dx=dx))
    return q_b, q_c


def fringe_scan(s, t_phi_list, grid=None, theta=0.0):
    """Integrated detector intensities for each inversion time."""
    t_phi_list = list(t_phi_list)
    if not t_phi_list:
        raise DomainError("fringe_scan needs at least one t_phi")
    if grid is None:
        grid = TimeGrid()
    points = []
    for t_phi in t_phi_list:
        if t_phi < 0:
            raise DomainError("fringe_scan: t_phi must be >= 0")
        q_b, q_c = detector_intensities(propagate_chain(s, t_phi, grid, theta=theta))
        points.append(FringePoint(float(t_phi), q_b, q_c))
    return points


def prompt_routing(grid=None, theta=0.0):
    """Exit probabilities (p_b, p_c) of a photon that is not absorbed.

    Both samples act as unit transmission; ``theta`` is a static phase on
    the right arm.  The result is independent of ``grid``.
    """
    if grid is None:
        grid = TimeGrid(0.0, 1.0, 1.0)
    ones = np.ones(grid.n)
    f = apply_element(beam_splitter(), single_photon_input(grid))
    f = apply_element(sample_element(ones, ones, theta), f)
    f = apply_element(mirror(), f)
    f = apply_element(beam_splitter(), f)
    p_b = float(np.abs(f.a[0]) ** 2)
    p_c = float(np.abs(f.b[0]) ** 2)
    return p_b, p_c


def delayed_fraction_b(s, t_phi, t, theta=0.0):
    """|a_out|^2 / (|a_out|^2 + |b_out|^2) at arbitrary delays ``t``.

    Where both outputs vanish the fraction is taken as 1/2.
    """
    psi_r, psi_l = switched_amplitudes(s, t_phi, t)
    psi_r = psi_r * np.exp(1j * theta)
    ia = np.abs(psi_r - psi_l) ** 2
    ib = np.abs(psi_r + psi_l) ** 2
    total = ia + ib
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, ia / np.where(total > 0, total, 1.0), 0.5)
