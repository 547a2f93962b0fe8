"""Photon-number-basis reconstruction of the two-path state and its concurrence.

Basis order is |00>, |01>, |10>, |11> with the first label counting photons
from the left crystal and the second from the right one.  Only the sparse
pattern diag(p00, [[p01, d], [d*, p10]], p11) is reconstructed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, DomainError, InconsistentCountsError, UndefinedVisibilityError

__all__ = [
    "DiagonalProbs",
    "Visibility",
    "TPEDensityMatrix",
    "visibility_from_fringe",
    "coherence_estimate",
    "concurrence",
    "assemble_rho",
    "tpe_projector",
]

_TOL = 1e-9


def _check_prob(name, value):
    if not (math.isfinite(value) and -_TOL <= value <= 1 + _TOL):
        raise DomainError(f"{name}={value} is not a probability")


@dataclass(frozen=True)
class DiagonalProbs:
    """Detection probabilities p_ij: i photons from the left, j from the right.

    ``p00`` may be ``None`` when it was not measured; :func:`assemble_rho`
    then fills it from the complement.
    """

    p01: float
    p10: float
    p11: float = 0.0
    p00: float | None = None

    def __post_init__(self):
        for name in ("p01", "p10", "p11"):
            _check_prob(name, getattr(self, name))
        if self.p00 is not None:
            _check_prob("p00", self.p00)
            if self.p00 + self.p01 + self.p10 + self.p11 > 1 + _TOL:
                raise InconsistentCountsError("p00 + p01 + p10 + p11 exceeds 1")

    def completed(self):
        """Copy with p00 = 1 - (p01 + p10 + p11) when p00 is missing."""
        if self.p00 is not None:
            return self
        p00 = 1.0 - (self.p01 + self.p10 + self.p11)
        if p00 < -_TOL:
            raise InconsistentCountsError(f"inferred p00 = {p00:.6g} is negative")
        return DiagonalProbs(self.p01, self.p10, self.p11, max(p00, 0.0))


@dataclass(frozen=True)
class Visibility:
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and 0.0 <= self.v <= 1.0):
            raise DomainError(f"visibility {self.v} outside [0, 1]")

    def __float__(self):
        return float(self.v)


@dataclass(frozen=True)
class TPEDensityMatrix:
    """Unnormalised two-path density matrix with trace ``big_p``.

    ``d_tpe`` is the |01>-|10> coherence.  The relative factor i of the
    two-path state is a fixed convention, so ``d_tpe`` is stored real and
    non-negative by :func:`assemble_rho`.
    """

    probs: DiagonalProbs
    d_tpe: complex
    big_p: float

    def __post_init__(self):
        p = self.probs
        if p.p00 is None:
            raise DomainError("TPEDensityMatrix needs p00; use DiagonalProbs.completed()")
        if abs(self.d_tpe) > math.sqrt(p.p01 * p.p10) + _TOL:
            raise DomainError("|d_tpe| exceeds sqrt(p01 p10): matrix not positive")
        expected = p.p00 + p.p01 + p.p10 + p.p11
        if abs(self.big_p - expected) > 1e-12 * max(1.0, expected):
            raise DomainError("big_p must equal the sum of the diagonal")

    @property
    def matrix(self):
        """Unnormalised 4x4 array in the |00>,|01>,|10>,|11> basis."""
        p = self.probs
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = p.p00
        m[1, 1] = p.p01
        m[2, 2] = p.p10
        m[3, 3] = p.p11
        m[1, 2] = self.d_tpe
        m[2, 1] = np.conj(self.d_tpe)
        return m

    @property
    def normalized(self):
        if self.big_p <= 0:
            raise DegenerateStateError("density matrix has zero trace")
        return self.matrix / self.big_p


def visibility_from_fringe(points):
    """Michelson contrast of the normalised B channel q_b / (q_b + q_c).

    Points whose total intensity is zero carry no fringe information and
    are skipped.
    """
    points = list(points)
    if len(points) < 2:
        raise UndefinedVisibilityError("need at least two fringe points")
    q = []
    for pt in points:
        total = pt.q_b + pt.q_c
        if total > 0:
            q.append(pt.q_b / total)
    if len(q) < 2:
        raise UndefinedVisibilityError("fewer than two fringe points carry intensity")
    q_max, q_min = max(q), min(q)
    if q_max == q_min:
        raise UndefinedVisibilityError("flat fringe: all points equal")
    return Visibility(min(1.0, (q_max - q_min) / (q_max + q_min)))


def coherence_estimate(probs, v):
    """d_tpe approximated as V (p01 + p10) / 2."""
    return float(v) * (probs.p01 + probs.p10) / 2.0


def concurrence(rho):
    """Lower bound max{0, (2/P)(|d| - sqrt(p00 p11))}."""
    if rho.big_p <= 0:
        raise DegenerateStateError("density matrix has zero trace")
    p = rho.probs
    c = 2.0 / rho.big_p * (abs(rho.d_tpe) - math.sqrt(p.p00 * p.p11))
    return min(1.0, max(0.0, c))


def assemble_rho(probs, v):
    """Fill the sparse two-path density matrix from probabilities and V."""
    full = probs.completed()
    d = coherence_estimate(full, v)
    big_p = full.p00 + full.p01 + full.p10 + full.p11
    # V (p01 + p10)/2 <= sqrt(p01 p10) fails for unbalanced arms; clip to keep
    # the central block positive
    d = min(d, math.sqrt(full.p01 * full.p10))
    return TPEDensityMatrix(full, d, big_p)


def tpe_projector():
    """|TPE><TPE| for (|10> + i|01>)/sqrt 2 in the |00>,|01>,|10>,|11> basis."""
    psi = np.array([0.0, 1j, 1.0, 0.0]) / math.sqrt(2.0)
    return np.outer(psi, psi.conj())
