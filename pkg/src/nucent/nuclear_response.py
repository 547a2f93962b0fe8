"""Time-domain forward-scattering response of a Mössbauer crystal.

The coherently re-emitted field of a thin resonant sample driven by a
short pulse is

    psi(t) = A(t) * cos(delta_b * t),
    A(t)   = alpha / sqrt(alpha*gamma*t) * J1(2*sqrt(alpha*gamma*t)) * exp(-gamma*t/2),

with ``alpha`` the effective resonant thickness, ``gamma`` the decay rate and
``delta_b`` the Zeeman shift of the two driven lines.  Time is in ns and
rates in 1/ns throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "FE57_GAMMA",
    "SampleParams",
    "FieldSchedule",
    "TimeGrid",
    "Wavepacket",
    "bessel_j1",
    "envelope",
    "scattered_wavepacket",
    "accumulated_phase",
    "phase_jump",
    "scheduled_wavepacket",
    "switched_pair",
    "switched_amplitudes",
]

#: 57Fe decay rate, 1/(141 ns).
FE57_GAMMA = 1.0 / 141.0

# Below this argument J1 is summed from its power series, above it by
# Miller's backward recurrence.
_SERIES_LIMIT = 12.0
_RESCALE = 1e100


# ---------------------------------------------------------------------------
# Bessel function of the first kind, order one
# ---------------------------------------------------------------------------

def _check_argument(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("bessel_j1: argument must be finite")
    if np.any(x < 0):
        raise DomainError("bessel_j1: argument must be non-negative")
    return x


def _ratio_series(y):
    """sum_k (-y)^k / (k! (k+1)!) by Horner, term count fixed from max(y)."""
    ymax = float(np.max(y)) if y.size else 0.0
    n_terms = 1
    term = 1.0
    while term > 1e-18 or n_terms < 2:
        term *= ymax / (n_terms * (n_terms + 1))
        n_terms += 1
    total = np.ones_like(y)
    for k in range(n_terms, 0, -1):
        total = 1.0 - y * total / (k * (k + 1))
    return total


def _j1_series(x):
    """Ascending series sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!)."""
    half = 0.5 * x
    return half * _ratio_series(half * half)


def _j1_miller(x):
    """Miller backward recurrence normalised by J0 + 2*sum J_2k = 1."""
    xmax = float(np.max(x))
    start = int(xmax + 12.0 * xmax ** (1.0 / 3.0) + 40.0)
    start += start % 2
    two_over_x = 2.0 / x
    j_next = np.zeros_like(x)
    j_curr = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    for n in range(start, 0, -1):
        # j_curr holds J_n, produce J_{n-1}
        j_prev = n * two_over_x * j_curr - j_next
        j_next, j_curr = j_curr, j_prev
        m = n - 1
        if m == 1:
            j1 = j_curr.copy()
        if m > 0 and m % 2 == 0:
            norm += 2.0 * j_curr
        big = np.abs(j_curr) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_curr *= scale
            j_next *= scale
            norm *= scale
            j1 *= scale
    norm += j_curr  # J0
    return j1 / norm


def bessel_j1(x):
    """Bessel function J1 for non-negative finite arguments.

    Accepts a scalar or an array and returns the same shape.  Absolute
    accuracy is better than 1e-12 on [0, 200].
    """
    arr = _check_argument(x)
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _j1_series(flat[small])
    if np.any(~small):
        out[~small] = _j1_miller(flat[~small])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def _j1_ratio(y):
    """J1(2*sqrt(y)) / sqrt(y) with the y -> 0 limit (= 1) built in."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    small = y <= (0.5 * _SERIES_LIMIT) ** 2
    if np.any(small):
        out[small] = _ratio_series(y[small])
    if np.any(~small):
        root = np.sqrt(y[~small])
        out[~small] = bessel_j1(2.0 * root) / root
    return out


# ---------------------------------------------------------------------------
# Parameters and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleParams:
    """Resonant-sample constants for one interferometer arm.

    ``delta_b`` is the beat angular frequency in rad/ns; use
    :meth:`from_gamma_multiple` to give it in units of ``gamma``.
    """

    alpha: float = 1.0
    gamma: float = FE57_GAMMA
    delta_b: float = 30.0 * FE57_GAMMA

    def __post_init__(self):
        for name in ("alpha", "gamma", "delta_b"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"SampleParams.{name} must be finite")
        if self.alpha <= 0:
            raise DomainError("SampleParams.alpha must be > 0")
        if self.gamma <= 0:
            raise DomainError("SampleParams.gamma must be > 0")
        if self.delta_b < 0:
            raise DomainError("SampleParams.delta_b must be >= 0")

    @classmethod
    def from_gamma_multiple(cls, alpha=1.0, gamma=FE57_GAMMA, multiple=30.0):
        return cls(alpha=alpha, gamma=gamma, delta_b=multiple * gamma)

    @property
    def delta_b_over_gamma(self):
        return self.delta_b / self.gamma

    @property
    def beat_period(self):
        """Period of the intensity beat and of the fringe, pi/delta_b."""
        if self.delta_b == 0:
            return math.inf
        return math.pi / self.delta_b


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling ``t_start, t_start + dt, ...`` up to ``t_end``."""

    t_start: float = 0.0
    t_end: float = 1410.0
    dt: float = 0.01

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end) and math.isfinite(self.dt)):
            raise DomainError("TimeGrid fields must be finite")
        if self.t_start < 0:
            raise DomainError("TimeGrid.t_start must be >= 0")
        if self.t_end <= self.t_start:
            raise DomainError("TimeGrid.t_end must exceed t_start")
        if self.dt <= 0:
            raise DomainError("TimeGrid.dt must be > 0")

    @property
    def n(self):
        return int(math.floor((self.t_end - self.t_start) / self.dt + 1e-9)) + 1

    @property
    def times(self):
        return self.t_start + self.dt * np.arange(self.n)

    def resolves(self, delta_b):
        """True when dt is fine enough to sample the beat at ``delta_b``."""
        return delta_b <= 0 or self.dt <= math.pi / (20.0 * delta_b)

    def require_resolves(self, delta_b):
        if not self.resolves(delta_b):
            raise DomainError(
                f"TimeGrid.dt={self.dt} does not resolve the beat; "
                f"need dt <= {math.pi / (20.0 * delta_b):.6g} ns"
            )


@dataclass
class Wavepacket:
    """Real amplitude samples on a :class:`TimeGrid` (unnormalised)."""

    grid: TimeGrid
    amplitude: np.ndarray

    def __post_init__(self):
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        if self.amplitude.shape != (self.grid.n,):
            raise DomainError("Wavepacket amplitude does not match its grid")
        if not np.all(np.isfinite(self.amplitude)):
            raise DomainError("Wavepacket amplitude must be finite")

    @property
    def times(self):
        return self.grid.times


@dataclass(frozen=True)
class FieldSchedule:
    """Piecewise-constant sign of the hyperfine field on one arm.

    ``segments`` is a sequence of ``(start_time, sign)`` pairs; each sign
    holds until the next start time.
    """

    segments: tuple = ((0.0, 1),)
    arm: str = "left"

    def __post_init__(self):
        segs = tuple((float(t), int(s)) for t, s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise DomainError("FieldSchedule.segments needs at least one entry")
        if segs[0][0] != 0.0:
            raise DomainError("FieldSchedule.segments must start at t = 0")
        starts = [t for t, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise DomainError("FieldSchedule.segments start times must be strictly increasing")
        if any(s not in (1, -1) for _, s in segs):
            raise DomainError("FieldSchedule.segments signs must be +1 or -1")
        if self.arm not in ("left", "right"):
            raise DomainError("FieldSchedule.arm must be 'left' or 'right'")

    @classmethod
    def constant(cls, arm="left"):
        return cls(((0.0, 1),), arm)

    @classmethod
    def inverted_at(cls, t_phi, arm="right"):
        """Field switched from +B to -B at ``t_phi``."""
        if t_phi < 0:
            raise DomainError("inversion time must be >= 0")
        if t_phi == 0:
            return cls(((0.0, -1),), arm)
        return cls(((0.0, 1), (float(t_phi), -1)), arm)

    def signed_time(self, tau):
        """Integral of the sign over [0, tau]; vectorised over ``tau``."""
        tau = np.asarray(tau, dtype=float)
        total = np.zeros_like(tau)
        starts = [t for t, _ in self.segments]
        ends = starts[1:] + [math.inf]
        for (start, sign), end in zip(self.segments, ends):
            total += sign * np.clip(tau - start, 0.0, end - start)
        return total


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def envelope(s, t):
    """Bessel multiple-scattering envelope A(t), including the decay factor.

    Returns ``alpha`` at ``t = 0``.  Works on scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise DomainError("envelope: time must be finite")
    if np.any(t_arr < 0):
        raise DomainError("envelope: time must be >= 0")
    y = s.alpha * s.gamma * np.atleast_1d(t_arr)
    out = s.alpha * _j1_ratio(y) * np.exp(-0.5 * s.gamma * np.atleast_1d(t_arr))
    if t_arr.ndim == 0:
        return float(out[0])
    return out.reshape(t_arr.shape)


def scattered_wavepacket(s, grid):
    """Sample psi(t) = A(t) cos(delta_b t) on ``grid``."""
    grid.require_resolves(s.delta_b)
    t = grid.times
    return Wavepacket(grid, envelope(s, t) * np.cos(s.delta_b * t))


def accumulated_phase(sched, s, tau):
    """Phase integral of the signed Zeeman shift over [0, tau], in rad."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise DomainError("accumulated_phase: tau must be >= 0")
    phase = s.delta_b * sched.signed_time(tau_arr)
    if tau_arr.ndim == 0:
        return float(phase)
    return phase


def phase_jump(s, t_phi):
    """Relative phase imprinted on the inverted arm: -2 * delta_b * t_phi."""
    return -2.0 * s.delta_b * t_phi


def scheduled_wavepacket(s, sched, grid):
    """psi under a field schedule: A(t) cos(phase accumulated up to t)."""
    grid.require_resolves(s.delta_b)
    t = grid.times
    return Wavepacket(grid, envelope(s, t) * np.cos(accumulated_phase(sched, s, t)))


def switched_amplitudes(s, t_phi, t):
    """Right/left arm amplitudes at delays ``t`` after the inversion time.

    Right arm (field inverted at ``t_phi``): A(t_phi+t) cos(delta_b (t_phi-t)).
    Left arm (field untouched):              A(t_phi+t) cos(delta_b (t_phi+t)).
    """
    if t_phi < 0:
        raise DomainError("switched_pair: t_phi must be >= 0")
    t = np.asarray(t, dtype=float)
    amp = envelope(s, t_phi + t)
    psi_r = amp * np.cos(s.delta_b * (t_phi - t))
    psi_l = amp * np.cos(s.delta_b * (t_phi + t))
    return psi_r, psi_l


def switched_pair(s, t_phi, grid):
    """Wavepackets of the two arms after only the right field is inverted.

    The grid variable is the delay after ``t_phi``.  The right-arm amplitude
    is evaluated in closed form so that it stays finite where
    cos(delta_b (t_phi + t)) vanishes.
    """
    grid.require_resolves(s.delta_b)
    psi_r, psi_l = switched_amplitudes(s, t_phi, grid.times)
    return Wavepacket(grid, psi_r), Wavepacket(grid, psi_l)
