"""End-to-end Monte Carlo runs: acquire, estimate, transmit, cancel, detect, count.

Random streams are derived from ``(seed, repetition, purpose)`` only, so all
points of a sweep see the same symbols and channel realization for a given
repetition (common random numbers) and acquisition captures of different
lengths are prefixes of one another.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import __version__
from .cancellation import cancel, prediction_gain, prime
from .channel import (
    SampleBuffer,
    acquire_noise_only,
    acquire_obstructed,
    transmit_through,
)
from .detection import compute_ser, detect_stream
from .estimation import (
    EstimationError,
    PredictorModel,
    estimate_acf,
    estimate_noise_power,
    interference_acf,
    solve_yule_walker,
)
from .ppm import modulate, random_symbols
from .scenario import ConfigError, ScenarioConfig, SweepSpec

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "axis_name",
    "axis_value",
    "filtering",
    "order_M",
    "n_frames",
    "n_errors",
    "ser",
    "ser_ci_low",
    "ser_ci_high",
    "prediction_gain_db",
    "predictor_order",
    "residual_variance",
    "seed",
)

# purposes; each repetition owns a block of stream ids
_OBSTRUCTED, _ACQUISITION, _SYMBOLS, _TRANSMIT = range(4)
_STREAMS_PER_REP = 8


@dataclass
class ResultRow:
    axis_name: str
    axis_value: object
    filtering: str
    order_M: int
    n_frames: int
    n_errors: int
    ser: float
    ser_ci_low: float
    ser_ci_high: float
    prediction_gain_db: float
    predictor_order: int
    residual_variance: float
    seed: int
    repetition: int = 0
    requested_filtering: str = ""
    realization_digest: str = ""
    coefficients: list = field(default_factory=list)
    warning: str = ""
    failure: str = ""

    def csv_values(self) -> list:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


@dataclass
class ExperimentReport:
    rows: List[ResultRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def select(self, **criteria) -> List[ResultRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in criteria.items())]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _seed(cfg: ScenarioConfig, repetition: int, purpose: int):
    return cfg.seed.child(cfg.seed.stream_id + _STREAMS_PER_REP * repetition + purpose)


@dataclass
class _Estimate:
    model: Optional[PredictorModel]
    dc_level: float
    warmup: SampleBuffer
    warning: str = ""


def interference_detected(r0_interference: float, noise_power: float, n_acq: int, n_obs: int, z: float) -> bool:
    """Is the noise-subtracted zero-lag power distinguishable from estimation noise?

    Both mean-square estimates of white noise carry a relative standard error
    of ``sqrt(2/N)``; their difference is tested at ``z`` standard errors.
    """
    threshold = z * noise_power * math.sqrt(2.0 / n_acq + 2.0 / n_obs)
    return r0_interference > threshold


def _estimate(cfg: ScenarioConfig, repetition: int) -> _Estimate:
    fs = cfg.ppm.sample_rate
    p = cfg.predictor_order
    obstructed = acquire_obstructed(cfg.noise, cfg.obstructed_samples, fs, _seed(cfg, repetition, _OBSTRUCTED))
    noise_power = estimate_noise_power(obstructed)
    acquired = acquire_noise_only(
        cfg.effective_interference,
        cfg.noise,
        cfg.acquisition_samples,
        fs,
        _seed(cfg, repetition, _ACQUISITION),
    )
    acf_y = estimate_acf(acquired, p, demean=True)
    acf_i = interference_acf(acf_y, noise_power)
    if not interference_detected(
        acf_i.values[0], noise_power, cfg.acquisition_samples, cfg.obstructed_samples, cfg.significance_z
    ):
        return _Estimate(
            PredictorModel.zero(p, float(acf_y.values[0])),
            acf_y.mean,
            acquired,
            "interference below noise floor; predictor set to zero",
        )
    try:
        model = solve_yule_walker(acf_i, p)
    except EstimationError as exc:
        return _Estimate(None, acf_y.mean, acquired, f"estimation failed ({exc}); filtering downgraded to off")
    return _Estimate(model, acf_y.mean, acquired, "regularized" if model.regularized else "")


def _digest(symbols, received: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(symbols, dtype=np.int64).tobytes())
    h.update(np.ascontiguousarray(received, dtype=np.float64).tobytes())
    return h.hexdigest()[:16]


def run_scenario(
    cfg: ScenarioConfig,
    repetition: int = 0,
    axis_name: str = "",
    axis_value=None,
) -> List[ResultRow]:
    """Run one operating point; returns the unfiltered and/or filtered rows.

    Both rows of a ``filtering="both"`` run are computed on the very same
    received waveform.
    """
    ppm = cfg.ppm
    est = _estimate(cfg, repetition)

    symbols = random_symbols(cfg.n_frames, ppm, _seed(cfg, repetition, _SYMBOLS).generator())
    x = modulate(symbols, ppm)
    r_full = transmit_through(
        x, cfg.channel, cfg.effective_interference, cfg.noise, _seed(cfg, repetition, _TRANSMIT)
    )
    d = cfg.channel.delay_samples
    r = SampleBuffer(r_full.samples[d : d + len(x)], r_full.sample_rate)
    digest = _digest(symbols.symbols, r.samples)

    common = dict(
        axis_name=axis_name,
        axis_value=axis_value,
        order_M=ppm.order_M,
        n_frames=cfg.n_frames,
        seed=cfg.seed.seed,
        repetition=repetition,
        realization_digest=digest,
    )

    def row(filtering, requested, decided, gain_db, model, warning=""):
        rep = compute_ser(decided, symbols)
        return ResultRow(
            filtering=filtering,
            requested_filtering=requested,
            n_errors=rep.n_errors,
            ser=rep.ser,
            ser_ci_low=rep.wilson_interval_95[0],
            ser_ci_high=rep.wilson_interval_95[1],
            prediction_gain_db=gain_db,
            predictor_order=model.order_p if model is not None else 0,
            residual_variance=model.residual_variance if model is not None else 0.0,
            coefficients=[float(a) for a in model.coefficients] if model is not None else [],
            warning=warning,
            **common,
        )

    rows = []
    if cfg.filtering in ("off", "both"):
        rows.append(row("off", "off", detect_stream(r, ppm), 0.0, None))
    if cfg.filtering in ("on", "both"):
        if est.model is None:
            log.warning("%s", est.warning)
            rows.append(row("off", "on", detect_stream(r, ppm), 0.0, None, est.warning))
        else:
            state = prime(est.model, est.dc_level, est.warmup)
            z = cancel(state, r)
            centered = SampleBuffer(r.samples - est.dc_level, r.sample_rate)
            try:
                gain_db = prediction_gain(centered, z)
            except ZeroDivisionError:
                gain_db = 0.0
            rows.append(row("on", "on", detect_stream(z, ppm), gain_db, est.model, est.warning))
    return rows


def _failure_rows(cfg: ScenarioConfig, repetition: int, axis_name: str, axis_value, reason: str):
    modes = ("off", "on") if cfg.filtering == "both" else (cfg.filtering,)
    nan = float("nan")
    return [
        ResultRow(
            axis_name=axis_name,
            axis_value=axis_value,
            filtering=m,
            order_M=cfg.ppm.order_M,
            n_frames=cfg.n_frames,
            n_errors=0,
            ser=nan,
            ser_ci_low=nan,
            ser_ci_high=nan,
            prediction_gain_db=nan,
            predictor_order=0,
            residual_variance=nan,
            seed=cfg.seed.seed,
            repetition=repetition,
            requested_filtering=m,
            failure=reason,
        )
        for m in modes
    ]


def _run_point(args):
    cfg, axis, value, repetition = args
    try:
        point_cfg = cfg.with_axis(axis, value)
        return run_scenario(point_cfg, repetition, axis, value)
    except (EstimationError, ValueError) as exc:
        log.warning("point %s=%r rep %d failed: %s", axis, value, repetition, exc)
        return _failure_rows(cfg, repetition, axis, value, f"{type(exc).__name__}: {exc}")


def _sort_key(row: ResultRow):
    v = row.axis_value
    return (isinstance(v, str), v if not isinstance(v, str) else 0, str(v), row.repetition, row.filtering, row.requested_filtering)


def run_sweep(sweep: SweepSpec, workers: int = 1, axis_label: Optional[str] = None) -> ExperimentReport:
    """Run every ``(value, repetition)`` point of ``sweep``.

    Failed points produce rows carrying the failure reason instead of
    aborting. Row order is independent of ``workers``.
    """
    if not isinstance(sweep, SweepSpec):
        raise ConfigError("run_sweep expects a SweepSpec")
    label = axis_label or sweep.axis
    jobs = [(sweep.base, sweep.axis, v, rep) for v in sweep.values for rep in range(sweep.repetitions)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(job) for job in jobs]
    rows = [row for chunk in results for row in chunk]
    for row in rows:
        row.axis_name = label
    rows.sort(key=_sort_key)
    metadata = {
        "config_hash": sweep.base.digest(),
        "seed": sweep.base.seed.seed,
        "stream_id": sweep.base.seed.stream_id,
        "tool_version": __version__,
        "axis": label,
        "values": list(sweep.values),
        "repetitions": sweep.repetitions,
        "scenario": sweep.base.to_dict(),
    }
    return ExperimentReport(rows, metadata)


def merge_reports(reports) -> ExperimentReport:
    """Concatenate reports (e.g. one per distance of a grid)."""
    reports = list(reports)
    rows = [row for rep in reports for row in rep.rows]
    return ExperimentReport(rows, {"parts": [rep.metadata for rep in reports], "tool_version": __version__})


# ---------------------------------------------------------------------------
# output


def emit_report(report: ExperimentReport, format: str = "csv") -> bytes:
    """Serialize to CSV (fixed columns) or JSON (all row fields plus metadata)."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow(row.csv_values())
        return buf.getvalue().encode()
    if format == "json":
        doc = {"metadata": report.metadata, "rows": [asdict(r) for r in report.rows]}
        return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}")


def parse_report(data: bytes) -> ExperimentReport:
    """Inverse of ``emit_report(report, "json")``."""
    doc = json.loads(data)
    return ExperimentReport([ResultRow(**r) for r in doc["rows"]], doc["metadata"])
