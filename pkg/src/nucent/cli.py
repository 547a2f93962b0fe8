"""Configuration parsing, drivers and CSV emission.

Usage::

    nucent {wavepacket,fringe,simulate,tomography,rate} [--config PATH] [--out PATH] [--seed N] [--workers N]

The config file is YAML with the sections ``sample``, ``schedule``, ``grid``,
``experiment``, ``scan``, ``tomography``, ``xpdc``, ``pump`` and ``source``.
Every key is optional; unknown keys are rejected.  Exit codes: 0 success,
1 invalid configuration, 2 runtime failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, DomainError, NucentError
from .event_sim import ExperimentConfig, Outcome, run_events, tomography_pipeline
from .interferometer import fringe_scan
from .nuclear_response import (
    FieldSchedule,
    SampleParams,
    TimeGrid,
    envelope,
    scattered_wavepacket,
    scheduled_wavepacket,
)
from .rate_estimator import PumpParams, SourceReference, XPDCParams, rate_report
from .tomography import DiagonalProbs, Visibility, assemble_rho, concurrence

__all__ = [
    "MODES",
    "OUTPUT_DIR_ENV",
    "ScanConfig",
    "MeasuredTomography",
    "RunConfig",
    "parse_config",
    "emit_config",
    "execute",
    "run",
    "main",
]

MODES = ("wavepacket", "fringe", "simulate", "tomography", "rate")
OUTPUT_DIR_ENV = "NUCENT_OUTPUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats such as ``1e7``."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)

_GAMMA_EXPR = re.compile(r"^\s*(?:([-+0-9.eE]+)\s*\*\s*)?gamma\s*$")


@dataclass(frozen=True)
class ScanConfig:
    """Inversion times ``start, start + step, ...`` up to ``stop``."""

    start: float = 0.0
    stop: float = 60.0
    step: float = 0.5

    def __post_init__(self):
        if self.start < 0:
            raise DomainError("start must be >= 0")
        if self.stop < self.start:
            raise DomainError("stop must be >= start")
        if not self.step > 0:
            raise DomainError("step must be > 0")

    @property
    def values(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)


@dataclass(frozen=True)
class MeasuredTomography:
    """Measured probabilities and visibility for direct reconstruction."""

    p01: float
    p10: float
    visibility: float
    p11: float = 0.0
    p00: float | None = None


@dataclass(frozen=True)
class RunConfig:
    mode: str = "fringe"
    sample: SampleParams = field(default_factory=SampleParams)
    schedule: FieldSchedule | None = None
    grid: TimeGrid = field(default_factory=TimeGrid)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    tomography: MeasuredTomography | None = None
    xpdc: XPDCParams = field(default_factory=XPDCParams)
    pump: PumpParams = field(default_factory=PumpParams)
    source: SourceReference = field(default_factory=SourceReference)
    output_path: str | None = None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_SECTION_KEYS = {
    "sample": ("alpha", "gamma", "delta_b"),
    "schedule": ("arm", "segments"),
    "grid": ("t_start", "t_end", "dt"),
    "experiment": ("n_events", "seed", "p_abs", "eta_x", "eps_inc", "dark_rate", "t_phi", "theta", "window", "mode"),
    "scan": ("start", "stop", "step"),
    "tomography": ("p00", "p01", "p10", "p11", "visibility"),
    "xpdc": ("signal_ev", "idler_ev", "n_cell", "f_v111", "q111"),
    "pump": ("photons_per_pulse", "rep_rate", "spot_area"),
    "source": ("chi_ref", "ip_ref", "xi_ref", "bandwidth"),
}
_TOP_KEYS = ("mode", "output_path") + tuple(_SECTION_KEYS)
_INT_KEYS = {"experiment.n_events", "experiment.seed"}
_STR_KEYS = {"schedule.arm", "experiment.mode"}
_NULLABLE = {"experiment.window", "tomography.p00"}


def _number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(value).__name__}")
    if key in _INT_KEYS:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(key, "expected an integer")
        return int(value)
    return float(value)


def _section(doc, name):
    raw = doc.get(name)
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected a mapping")
    out = {}
    for key, value in raw.items():
        path = f"{name}.{key}"
        if key not in _SECTION_KEYS[name]:
            raise ConfigError(path, "unknown key")
        if value is None and path in _NULLABLE:
            out[key] = None
        elif path in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(path, "expected a string")
            out[key] = value
        elif path == "sample.delta_b" and isinstance(value, str):
            out[key] = value
        elif path == "schedule.segments":
            out[key] = value
        else:
            out[key] = _number(path, value)
    return out


def _build(name, cls, kwargs):
    try:
        return cls(**kwargs)
    except (DomainError, TypeError, ValueError) as exc:
        message = str(exc)
        for key in kwargs:
            if re.search(rf"\b{re.escape(key)}\b", message):
                raise ConfigError(f"{name}.{key}", message) from exc
        raise ConfigError(name, message) from exc


def _resolve_delta_b(value, gamma):
    if not isinstance(value, str):
        return value
    m = _GAMMA_EXPR.match(value)
    if not m:
        raise ConfigError("sample.delta_b", f"cannot parse {value!r}; use a number or 'k*gamma'")
    try:
        factor = float(m.group(1)) if m.group(1) else 1.0
    except ValueError as exc:
        raise ConfigError("sample.delta_b", f"bad multiplier in {value!r}") from exc
    return factor * gamma


def _parse_segments(value):
    if not isinstance(value, list) or not value:
        raise ConfigError("schedule.segments", "expected a non-empty list of [start, sign] pairs")
    segs = []
    for i, item in enumerate(value):
        path = f"schedule.segments[{i}]"
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ConfigError(path, "expected [start, sign]")
        start = _number(path, item[0])
        sign = item[1]
        if isinstance(sign, bool) or sign not in (1, -1):
            raise ConfigError(path, "sign must be +1 or -1")
        segs.append((start, int(sign)))
    return tuple(segs)


def parse_config(text):
    """Validate a YAML document and return a :class:`RunConfig`.

    An empty document gives the defaults: alpha = 1, gamma = 1/141 ns^-1,
    delta_b = 30 gamma.
    """
    try:
        doc = yaml.load(text, Loader=_Loader) if text and text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"malformed YAML: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "top level must be a mapping")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(str(key), "unknown key")

    mode = doc.get("mode", "fringe")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    output_path = doc.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError("output_path", "expected a string")

    sample_kw = _section(doc, "sample")
    gamma = sample_kw.get("gamma", SampleParams.gamma)
    if "delta_b" in sample_kw:
        sample_kw["delta_b"] = _resolve_delta_b(sample_kw["delta_b"], gamma)
    sample = _build("sample", SampleParams, sample_kw)

    grid = _build("grid", TimeGrid, _section(doc, "grid"))
    if not grid.resolves(sample.delta_b):
        raise ConfigError("grid.dt", f"must be <= {math.pi / (20 * sample.delta_b):.6g} ns to resolve the beat")

    exp_kw = _section(doc, "experiment")
    experiment = _build("experiment", ExperimentConfig, dict(exp_kw, sample=sample, grid=grid))

    schedule = None
    if doc.get("schedule") is not None:
        sched_kw = _section(doc, "schedule")
        if "segments" in sched_kw:
            sched_kw["segments"] = _parse_segments(sched_kw["segments"])
        schedule = _build("schedule", FieldSchedule, sched_kw)

    tomo = None
    if doc.get("tomography") is not None:
        tomo_kw = _section(doc, "tomography")
        for key in ("p01", "p10", "visibility"):
            if key not in tomo_kw:
                raise ConfigError(f"tomography.{key}", "required when the tomography section is present")
        tomo = MeasuredTomography(**tomo_kw)
        _build("tomography", DiagonalProbs, {k: tomo_kw[k] for k in ("p01", "p10", "p11", "p00") if k in tomo_kw})
        _build("tomography", Visibility, {"v": tomo.visibility})

    return RunConfig(
        mode=mode,
        sample=sample,
        schedule=schedule,
        grid=grid,
        experiment=experiment,
        scan=_build("scan", ScanConfig, _section(doc, "scan")),
        tomography=tomo,
        xpdc=_build("xpdc", XPDCParams, _section(doc, "xpdc")),
        pump=_build("pump", PumpParams, _section(doc, "pump")),
        source=_build("source", SourceReference, _section(doc, "source")),
        output_path=output_path,
    )


def _as_dict(obj, keys):
    return {k: getattr(obj, k) for k in keys}


def emit_config(cfg):
    """YAML text that :func:`parse_config` maps back to ``cfg``."""
    doc = {"mode": cfg.mode}
    if cfg.output_path is not None:
        doc["output_path"] = cfg.output_path
    doc["sample"] = _as_dict(cfg.sample, _SECTION_KEYS["sample"])
    if cfg.schedule is not None:
        doc["schedule"] = {
            "arm": cfg.schedule.arm,
            "segments": [[float(t), int(s)] for t, s in cfg.schedule.segments],
        }
    doc["grid"] = _as_dict(cfg.grid, _SECTION_KEYS["grid"])
    doc["experiment"] = _as_dict(cfg.experiment, _SECTION_KEYS["experiment"])
    doc["scan"] = _as_dict(cfg.scan, _SECTION_KEYS["scan"])
    if cfg.tomography is not None:
        doc["tomography"] = {
            k: v for k, v in _as_dict(cfg.tomography, [f.name for f in fields(cfg.tomography)]).items()
            if v is not None
        }
    doc["xpdc"] = _as_dict(cfg.xpdc, _SECTION_KEYS["xpdc"])
    doc["pump"] = _as_dict(cfg.pump, _SECTION_KEYS["pump"])
    doc["source"] = _as_dict(cfg.source, _SECTION_KEYS["source"])
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _header(cfg):
    lines = [f"# nucent {__version__} mode={cfg.mode} seed={cfg.experiment.seed}"]
    lines += ["# " + line for line in emit_config(cfg).splitlines()]
    return "\n".join(lines) + "\n"


def _write_csv(path, cfg, columns, rows):
    buf = io.StringIO()
    buf.write(_header(cfg))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def _default_out(cfg, out):
    if out is not None:
        return Path(out)
    if cfg.output_path is not None:
        return Path(cfg.output_path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    return Path(base or ".") / f"{cfg.mode}.csv"


def _sibling(path, suffix):
    return path.with_name(f"{path.stem}_{suffix}{path.suffix or '.csv'}")


# ---------------------------------------------------------------------------
# Drivers
# ---------------------------------------------------------------------------

def _run_wavepacket(cfg, path, workers):
    sched = cfg.schedule or FieldSchedule.inverted_at(cfg.experiment.t_phi, "right")
    t = cfg.grid.times
    env = envelope(cfg.sample, t)
    psi = scattered_wavepacket(cfg.sample, cfg.grid).amplitude
    psi_s = scheduled_wavepacket(cfg.sample, sched, cfg.grid).amplitude
    rows = zip(t, env, psi, psi_s)
    return [_write_csv(path, cfg, ["t_ns", "envelope", "psi", "psi_scheduled"], rows)]


def _run_fringe(cfg, path, workers):
    points = fringe_scan(cfg.sample, cfg.scan.values, cfg.grid, cfg.experiment.theta)
    rows = [(p.t_phi, p.q_b, p.q_c, p.q_b_norm) for p in points]
    return [_write_csv(path, cfg, ["t_phi_ns", "q_b", "q_c", "q_b_norm"], rows)]


def _run_simulate(cfg, path, workers):
    log, summ = run_events(cfg.experiment, workers=workers)
    names = [o.name for o in Outcome]
    events = zip(log.event_id, (names[o] for o in log.outcome), log.detection_time, log.coincidence)
    written = [_write_csv(path, cfg, ["event_id", "outcome", "detection_time_ns", "coincidence"], events)]
    rows = [(o.name, summ.counts[o], math.sqrt(summ.counts[o])) for o in Outcome]
    rows += [
        ("doubles", summ.doubles, math.sqrt(summ.doubles)),
        ("heralds", summ.heralds, math.sqrt(summ.heralds)),
        ("q_b", summ.q_b, summ.q_b_err),
        ("q_c", summ.q_c, summ.q_c_err),
    ]
    written.append(_write_csv(_sibling(path, "summary"), cfg, ["quantity", "value", "error"], rows))
    return written


def _run_tomography(cfg, path, workers):
    if cfg.tomography is not None:
        m = cfg.tomography
        probs = DiagonalProbs(m.p01, m.p10, m.p11, m.p00)
        vis = Visibility(m.visibility)
        rho = assemble_rho(probs, vis)
        conc = concurrence(rho)
    else:
        result = tomography_pipeline(cfg.experiment, cfg.scan.values, workers=workers)
        probs, vis, rho, conc = result.probs, result.visibility, result.rho, result.concurrence
    labels = ("00", "01", "10", "11")
    mat = rho.normalized
    rows = [(f"rho_{labels[i]}_{labels[j]}", mat[i, j].real, mat[i, j].imag) for i in range(4) for j in range(4)]
    full = rho.probs
    rows += [
        ("p00", full.p00, 0.0),
        ("p01", full.p01, 0.0),
        ("p10", full.p10, 0.0),
        ("p11", full.p11, 0.0),
        ("trace", rho.big_p, 0.0),
        ("d_tpe", complex(rho.d_tpe).real, complex(rho.d_tpe).imag),
        ("visibility", float(vis), 0.0),
        ("concurrence", conc, 0.0),
    ]
    return [_write_csv(path, cfg, ["quantity", "real", "imag"], rows)]


def _run_rate(cfg, path, workers):
    report = rate_report(cfg.xpdc, cfg.pump, cfg.source)
    return [_write_csv(path, cfg, ["quantity", "value", "unit", "flag"], report.rows())]


_DRIVERS = {
    "wavepacket": _run_wavepacket,
    "fringe": _run_fringe,
    "simulate": _run_simulate,
    "tomography": _run_tomography,
    "rate": _run_rate,
}


def execute(cfg, out=None, workers=1):
    """Run ``cfg.mode`` and return the list of files written."""
    path = _default_out(cfg, out)
    return _DRIVERS[cfg.mode](cfg, path, workers)


def run(cfg, out=None, workers=1, stderr=None):
    """Run a configuration and return the process exit code."""
    stderr = stderr or sys.stderr
    try:
        execute(cfg, out, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=stderr)
        return EXIT_IO
    except NucentError as exc:
        print(f"runtime error: {exc}", file=stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _parser():
    parser = argparse.ArgumentParser(prog="nucent", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", type=Path, help="YAML configuration file")
        p.add_argument("--out", type=Path, help="output CSV path")
        p.add_argument("--seed", type=int, help="override experiment.seed")
        p.add_argument("--workers", type=int, default=1, help="threads for event generation")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text)
        cfg = replace(cfg, mode=args.mode)
        if args.seed is not None:
            try:
                experiment = replace(cfg.experiment, seed=args.seed)
            except DomainError as exc:
                raise ConfigError("experiment.seed", str(exc)) from exc
            cfg = replace(cfg, experiment=experiment)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out, args.workers)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
