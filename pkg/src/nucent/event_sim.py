"""Seeded Monte Carlo of heralded trials.

Every trial starts with an idler click at detector A.  The signal photon is
either absorbed by the crystals (probability ``p_abs``) or passes straight
through to B/C.  An absorbed photon decays incoherently into 4 pi with
probability ``eps_inc``; otherwise it is re-emitted at a delay drawn from the
total output intensity and leaves through B or C with the time-local
intensity ratio.  Each x-ray detection succeeds with probability ``eta_x``.
A delayed detection is accompanied by a spurious click in the other detector
with probability ``dark_rate``; such coincidences feed p11.

Random numbers come from fixed-size event blocks, each with its own
``SeedSequence`` keyed by (seed, mode, stream, block).  The event log is
therefore identical for any number of workers.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DegenerateDensityError, DomainError, InconsistentCountsError, UndefinedVisibilityError
from .interferometer import FringePoint, delayed_fraction_b, prompt_routing
from .nuclear_response import SampleParams, TimeGrid, switched_amplitudes
from .tomography import DiagonalProbs, Visibility, assemble_rho, concurrence, visibility_from_fringe

__all__ = [
    "BLOCK_SIZE",
    "Outcome",
    "ExperimentConfig",
    "EventRecord",
    "EventLog",
    "CountSummary",
    "EmissionSampler",
    "TomographyResult",
    "sample_emission_time",
    "run_events",
    "empirical_probs",
    "tomography_pipeline",
    "end_to_end_concurrence",
]

BLOCK_SIZE = 8192
_N_UNIFORMS = 6
_MODES = {"fringe": 0, "which_path": 1}


class Outcome(enum.IntEnum):
    PromptB = 0
    PromptC = 1
    DelayedB = 2
    DelayedC = 3
    Incoherent4pi = 4
    Lost = 5


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo settings.

    ``mode`` is ``"fringe"`` (full interferometer) or ``"which_path"`` (second
    beam splitter removed, B looks at the right arm and C at the left arm).
    ``window`` is how long after the herald a delayed photon is still
    accepted; ``None`` means 10 lifetimes.
    """

    n_events: int = 100_000
    seed: int = 0
    p_abs: float = 1.0
    eta_x: float = 1.0
    eps_inc: float = 0.0
    dark_rate: float = 0.0
    t_phi: float = 0.0
    theta: float = 0.0
    window: float | None = None
    mode: str = "fringe"
    sample: SampleParams = field(default_factory=SampleParams)
    grid: TimeGrid = field(default_factory=TimeGrid)

    def __post_init__(self):
        if int(self.n_events) != self.n_events or self.n_events < 1:
            raise DomainError("n_events must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in 64 unsigned bits")
        for name in ("p_abs", "eta_x", "eps_inc", "dark_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1]")
        if not (math.isfinite(self.t_phi) and self.t_phi >= 0):
            raise DomainError("t_phi must be >= 0")
        if self.window is not None and not self.window > 0:
            raise DomainError("window must be > 0")
        if self.mode not in _MODES:
            raise DomainError(f"mode must be one of {sorted(_MODES)}")

    @property
    def effective_window(self):
        return 10.0 / self.sample.gamma if self.window is None else self.window


@dataclass(frozen=True)
class EventRecord:
    event_id: int
    outcome: Outcome
    detection_time: float
    coincidence: bool = False


class EventLog:
    """Column-oriented event storage; indexing yields :class:`EventRecord`."""

    def __init__(self, outcome, detection_time, coincidence, first_id=0):
        self.outcome = np.asarray(outcome, dtype=np.int8)
        self.detection_time = np.asarray(detection_time, dtype=float)
        self.coincidence = np.asarray(coincidence, dtype=bool)
        self.event_id = first_id + np.arange(len(self.outcome))

    def __len__(self):
        return len(self.outcome)

    def __getitem__(self, i):
        return EventRecord(
            int(self.event_id[i]),
            Outcome(int(self.outcome[i])),
            float(self.detection_time[i]),
            bool(self.coincidence[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, EventLog):
            return NotImplemented
        return (
            np.array_equal(self.event_id, other.event_id)
            and np.array_equal(self.outcome, other.outcome)
            and np.array_equal(self.detection_time, other.detection_time)
            and np.array_equal(self.coincidence, other.coincidence)
        )


@dataclass(frozen=True)
class CountSummary:
    """Outcome counts of one run; ``doubles_b``/``doubles_c`` are the
    delayed B/C detections that came with a spurious second click."""

    counts: dict
    doubles_b: int = 0
    doubles_c: int = 0
    mode: str = "fringe"

    def __post_init__(self):
        full = {o: int(self.counts.get(o, 0)) for o in Outcome}
        object.__setattr__(self, "counts", full)

    def __add__(self, other):
        if self.mode != other.mode:
            raise DomainError("cannot merge summaries from different modes")
        return CountSummary(
            {o: self.counts[o] + other.counts[o] for o in Outcome},
            self.doubles_b + other.doubles_b,
            self.doubles_c + other.doubles_c,
            self.mode,
        )

    @property
    def n_events(self):
        return sum(self.counts.values())

    @property
    def heralds(self):
        """Trials with an A click and no prompt photon at B or C."""
        return self.n_events - self.counts[Outcome.PromptB] - self.counts[Outcome.PromptC]

    @property
    def singles_b(self):
        return self.counts[Outcome.DelayedB] - self.doubles_b

    @property
    def singles_c(self):
        return self.counts[Outcome.DelayedC] - self.doubles_c

    @property
    def doubles(self):
        return self.doubles_b + self.doubles_c

    def _per_herald(self, count):
        h = self.heralds
        return (count / h, math.sqrt(count) / h) if h > 0 else (0.0, 0.0)

    @property
    def q_b(self):
        return self._per_herald(self.singles_b)[0]

    @property
    def q_c(self):
        return self._per_herald(self.singles_c)[0]

    @property
    def q_b_err(self):
        return self._per_herald(self.singles_b)[1]

    @property
    def q_c_err(self):
        return self._per_herald(self.singles_c)[1]

    @property
    def fraction_b(self):
        """Delayed B share among delayed singles, with its binomial error."""
        nb, nc = self.singles_b, self.singles_c
        n = nb + nc
        if n == 0:
            return float("nan"), float("nan")
        f = nb / n
        return f, math.sqrt(max(f * (1 - f), 0.0) / n)

    @property
    def probs(self):
        """Diagonal probabilities; meaningful for which-path runs."""
        h = self.heralds
        if h == 0:
            return DiagonalProbs(0.0, 0.0, 0.0, 1.0)
        return DiagonalProbs(self.singles_b / h, self.singles_c / h, self.doubles / h).completed()

    def fringe_point(self, t_phi):
        return FringePoint(float(t_phi), float(self.singles_b), float(self.singles_c))


# ---------------------------------------------------------------------------
# Emission-time sampling
# ---------------------------------------------------------------------------

class EmissionSampler:
    """Inverse-CDF sampler of the re-emission delay.

    The density is |a_out|^2 + |b_out|^2 = (psi_R^2 + psi_L^2)/2 on the grid,
    identical with or without the second beam splitter.  The CDF is the
    cumulative trapezoid, inverted linearly inside each cell.
    """

    def __init__(self, s, t_phi, grid):
        grid.require_resolves(s.delta_b)
        self.grid = grid
        self.times = grid.times
        psi_r, psi_l = switched_amplitudes(s, t_phi, self.times)
        self.density = 0.5 * (psi_r**2 + psi_l**2)
        cdf = cumulative_trapezoid(self.density, dx=grid.dt, initial=0.0)
        total = cdf[-1]
        if not total > 0:
            raise DegenerateDensityError("re-emitted intensity is zero on the grid")
        self.total = total
        self.cdf = cdf / total
        self.cdf[-1] = 1.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        cdf = self.cdf
        k = np.searchsorted(cdf, u, side="right")
        k = np.clip(k, 1, len(cdf) - 1)
        lo = cdf[k - 1]
        width = cdf[k] - lo
        frac = np.where(width > 0, (u - lo) / np.where(width > 0, width, 1.0), 0.0)
        t = self.times[k - 1] + np.clip(frac, 0.0, 1.0) * self.grid.dt
        return t

    def cdf_at(self, t):
        return np.interp(t, self.times, self.cdf)


def sample_emission_time(s, t_phi, grid, u):
    """Delay (ns) whose normalised cumulative intensity equals ``u``.

    ``u = 0`` maps to the left edge of the first grid cell carrying
    intensity.
    """
    t = EmissionSampler(s, t_phi, grid)(u)
    return float(t) if np.ndim(t) == 0 else t


# ---------------------------------------------------------------------------
# Event generation
# ---------------------------------------------------------------------------

def _block_uniforms(seed, mode_code, stream, block, n):
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(mode_code, stream, block))
    return np.random.Generator(np.random.PCG64(ss)).random((n, _N_UNIFORMS))


def _simulate_block(cfg, sampler, p_b_prompt, stream, block, n):
    u = _block_uniforms(cfg.seed, _MODES[cfg.mode], stream, block, n)
    outcome = np.full(n, Outcome.Lost, dtype=np.int8)
    det_time = np.zeros(n)
    coinc = np.zeros(n, dtype=bool)

    absorbed = u[:, 0] < cfg.p_abs
    detected = u[:, 4] < cfg.eta_x

    prompt = ~absorbed & detected
    outcome[prompt] = np.where(u[prompt, 3] < p_b_prompt, Outcome.PromptB, Outcome.PromptC)

    incoherent = absorbed & (u[:, 1] < cfg.eps_inc)
    outcome[incoherent] = Outcome.Incoherent4pi

    emitted = absorbed & ~incoherent
    if np.any(emitted):
        t = sampler(u[emitted, 2])
        if cfg.mode == "fringe":
            f_b = delayed_fraction_b(cfg.sample, cfg.t_phi, t, cfg.theta)
        else:
            psi_r, psi_l = switched_amplitudes(cfg.sample, cfg.t_phi, t)
            total = psi_r**2 + psi_l**2
            f_b = np.where(total > 0, psi_r**2 / np.where(total > 0, total, 1.0), 0.5)
        ok = detected[emitted] & (t <= cfg.effective_window)
        chan = np.where(u[emitted, 3] < f_b, Outcome.DelayedB, Outcome.DelayedC)
        idx = np.flatnonzero(emitted)[ok]
        outcome[idx] = chan[ok]
        det_time[idx] = t[ok]
        coinc[idx] = u[idx, 5] < cfg.dark_rate
    return outcome, det_time, coinc


def _prompt_b_probability(cfg):
    if cfg.mode == "which_path":
        return 0.5
    return prompt_routing(theta=cfg.theta)[0]


def run_events(cfg, stream=0, workers=1):
    """Generate ``cfg.n_events`` trials; returns ``(EventLog, CountSummary)``.

    ``stream`` selects an independent random stream for the same seed (used
    to give each scan point its own draws).  ``workers`` only changes
    wall-clock time, never the result.
    """
    sampler = EmissionSampler(cfg.sample, cfg.t_phi, cfg.grid)
    p_b_prompt = _prompt_b_probability(cfg)
    n = int(cfg.n_events)
    blocks = [(b, min(BLOCK_SIZE, n - b * BLOCK_SIZE)) for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)]

    def job(item):
        b, size = item
        return _simulate_block(cfg, sampler, p_b_prompt, stream, b, size)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, blocks))
    else:
        parts = [job(item) for item in blocks]

    outcome = np.concatenate([p[0] for p in parts])
    det_time = np.concatenate([p[1] for p in parts])
    coinc = np.concatenate([p[2] for p in parts])
    log = EventLog(outcome, det_time, coinc)
    return log, summarize(log, cfg.mode)


def summarize(log, mode="fringe"):
    counts = np.bincount(log.outcome, minlength=len(Outcome))
    doubles_b = int(np.count_nonzero(log.coincidence & (log.outcome == Outcome.DelayedB)))
    doubles_c = int(np.count_nonzero(log.coincidence & (log.outcome == Outcome.DelayedC)))
    return CountSummary({o: int(counts[o]) for o in Outcome}, doubles_b, doubles_c, mode)


# ---------------------------------------------------------------------------
# Tomography from counts
# ---------------------------------------------------------------------------

def empirical_probs(summary, which_path_run):
    """Diagonal probabilities from a which-path run.

    p01 (right arm only) and p10 (left arm only) are the delayed single
    detections per herald in ``which_path_run``.  p11 pools the spurious
    coincidences of both runs; ``summary`` may be ``None``.
    """
    if which_path_run.mode != "which_path":
        raise DomainError("which_path_run must come from a which-path run")
    h = which_path_run.heralds
    if h == 0:
        raise InconsistentCountsError("which-path run has no heralded events")
    doubles, heralds = which_path_run.doubles, h
    if summary is not None:
        doubles += summary.doubles
        heralds += summary.heralds
    p01 = which_path_run.singles_b / h
    p10 = which_path_run.singles_c / h
    p11 = doubles / heralds if heralds else 0.0
    p00 = 1.0 - (p01 + p10 + p11)
    if p00 < -1e-12:
        raise InconsistentCountsError(f"inferred p00 = {p00:.6g} is negative")
    return DiagonalProbs(p01, p10, p11, max(p00, 0.0))


@dataclass
class TomographyResult:
    points: list
    summaries: list
    which_path: CountSummary
    visibility: Visibility
    probs: DiagonalProbs
    rho: object
    concurrence: float


def tomography_pipeline(cfg, t_phi_scan, workers=1):
    """Fringe scan for V, which-path run for p_ij, then the concurrence.

    Scan point ``i`` uses random stream ``i``; the which-path run uses
    stream 0 of its own mode.  A fringe without delayed counts gives V = 0.
    """
    t_phi_scan = list(t_phi_scan)
    if not t_phi_scan:
        raise DomainError("t_phi_scan must not be empty")
    fringe_cfg = replace(cfg, mode="fringe")
    summaries, points = [], []
    for i, t_phi in enumerate(t_phi_scan):
        _, summ = run_events(replace(fringe_cfg, t_phi=float(t_phi)), stream=i, workers=workers)
        summaries.append(summ)
        points.append(summ.fringe_point(t_phi))
    try:
        vis = visibility_from_fringe(points)
    except UndefinedVisibilityError:
        vis = Visibility(0.0)
    _, wp = run_events(replace(cfg, mode="which_path"), stream=0, workers=workers)
    merged = summaries[0]
    for summ in summaries[1:]:
        merged = merged + summ
    probs = empirical_probs(merged, wp)
    rho = assemble_rho(probs, vis)
    return TomographyResult(points, summaries, wp, vis, probs, rho, concurrence(rho))


def end_to_end_concurrence(cfg, t_phi_scan, workers=1):
    """Concurrence lower bound reconstructed from simulated counts."""
    return tomography_pipeline(cfg, t_phi_scan, workers).concurrence
