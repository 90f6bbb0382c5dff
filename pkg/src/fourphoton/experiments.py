"""Distinguishability-transition sweeps and phase-fringe envelopes.

Two path-length schedules are provided:

* continuous: ``x = (0, y, -y, 2y)``, for which ``x1 + x2 - x3 - x4 = 0`` and
  the fast phase stays fixed;
* stepwise: starting from ``(0, 220, 440, 660)`` um, ``x2``, ``x3`` and ``x4``
  are tuned to zero one after another.

Each sweep point is an independent evaluation; with ``workers > 1`` points
are farmed out to a process pool and reassembled in grid order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import EventDistribution, event_order, output_distribution
from .multiport import build_four_port
from .source import SettingWeights, gram_schmidt, setting_weights, wavelength_to_spec

UM = 1e-6
NM = 1e-9

DEFAULT_LAMBDA0 = 780 * NM
DEFAULT_DELTA_LAMBDA = 5 * NM
DEFAULT_PHI_SAMPLES = 64
STEPWISE_START = (0.0, 220 * UM, 440 * UM, 660 * UM)
STEPWISE_POINTS_PER_LEG = 60

SCENARIOS = ("continuous", "stepwise", "custom")


class ConfigError(ValueError):
    """Invalid scenario configuration."""


def continuous_paths(y: float) -> tuple[float, float, float, float]:
    return (0.0, y, -y, 2 * y)


def continuous_grid(start: float = -180 * UM, stop: float = 0.0, step: float = 1 * UM) -> np.ndarray:
    """Default 181-point grid from -180 um to 0 in 1 um steps."""
    n = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, n)


def stepwise_schedule(start=STEPWISE_START, points_per_leg: int = STEPWISE_POINTS_PER_LEG):
    """Tune ``x2``, then ``x3``, then ``x4`` linearly to zero.

    Returns ``(sweep_values, paths)`` where the sweep value is the total path
    length tuned so far. The first leg includes its starting point, so the
    schedule opens at ``start`` and closes at all-zero with
    ``3 * points_per_leg`` points in total.
    """
    if points_per_leg < 2:
        raise ValueError("points_per_leg must be >= 2")
    x = [float(v) for v in start]
    paths, values = [], []
    travelled = 0.0
    for leg, port in enumerate((1, 2, 3)):
        x0 = x[port]
        samples = np.linspace(x0, 0.0, points_per_leg if leg == 0 else points_per_leg + 1)
        if leg > 0:
            samples = samples[1:]
        for v in samples:
            x[port] = float(v)
            paths.append(tuple(x))
            values.append(travelled + abs(x0 - v))
        travelled += abs(x0)
        x[port] = 0.0
    return np.array(values), paths


def phi_grid(n: int, offset: float = 0.0) -> np.ndarray:
    """``n`` equally spaced phases covering one period, starting at ``offset``."""
    return offset + 2 * math.pi * np.arange(n) / n


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one sweep.

    ``paths`` lists the four path lengths (metres) for each entry of
    ``sweep_grid``. ``phi_samples = 0`` disables fringe envelopes.
    """

    sweep_grid: np.ndarray
    paths: list
    lambda0: float = DEFAULT_LAMBDA0
    delta_lambda_fwhm: float = DEFAULT_DELTA_LAMBDA
    alpha: float = 0.0
    phi: float = 0.0
    phi_samples: int = 0
    scenario: str = "custom"
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.sweep_grid = np.asarray(self.sweep_grid, dtype=float)
        self.paths = [tuple(float(v) for v in p) for p in self.paths]
        if self.sweep_grid.size == 0:
            raise ConfigError("sweep grid is empty")
        if len(self.paths) != self.sweep_grid.size:
            raise ConfigError(f"{len(self.paths)} path tuples for {self.sweep_grid.size} sweep values")
        if any(len(p) != 4 for p in self.paths):
            raise ConfigError("each path tuple needs four lengths")
        if np.any(np.diff(self.sweep_grid) < 0):
            raise ConfigError("sweep grid must be sorted")
        if self.phi_samples and self.phi_samples < 2:
            raise ConfigError("phi_samples must be 0 or >= 2")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}")

    @property
    def phis(self) -> np.ndarray | None:
        return phi_grid(self.phi_samples, self.phi) if self.phi_samples else None

    def spec(self, paths):
        return wavelength_to_spec(self.lambda0, self.delta_lambda_fwhm, paths)

    def metadata(self) -> dict:
        s = self.spec(self.paths[0])
        meta = {
            "scenario": self.scenario,
            "lambda0_nm": self.lambda0 / NM,
            "delta_lambda_fwhm_nm": self.delta_lambda_fwhm / NM,
            "alpha_rad": self.alpha,
            "phi_rad": self.phi,
            "phi_samples": self.phi_samples,
            "points": int(self.sweep_grid.size),
            "omega0_rad_per_s": s.omega0,
            "delta_omega_rad_per_s": s.delta_omega,
            "coherence_length_um": s.coherence_length / UM,
        }
        meta.update(self.notes)
        return meta


def continuous_config(grid=None, *, lambda0=DEFAULT_LAMBDA0, delta_lambda_fwhm=DEFAULT_DELTA_LAMBDA,
                      alpha=0.0, phi=0.0, phi_samples=0) -> ScenarioConfig:
    notes = {}
    if grid is None:
        grid = continuous_grid()
        notes["grid_choice"] = "default: y from -180 um to 0 um in 1 um steps (range not given by the source)"
    grid = np.asarray(grid, dtype=float)
    return ScenarioConfig(grid, [continuous_paths(y) for y in grid], lambda0, delta_lambda_fwhm,
                          alpha, phi, phi_samples, "continuous", notes)


def stepwise_config(start=STEPWISE_START, points_per_leg=STEPWISE_POINTS_PER_LEG, *, lambda0=DEFAULT_LAMBDA0,
                    delta_lambda_fwhm=DEFAULT_DELTA_LAMBDA, alpha=math.pi, phi=0.0,
                    phi_samples=DEFAULT_PHI_SAMPLES) -> ScenarioConfig:
    values, paths = stepwise_schedule(start, points_per_leg)
    notes = {"grid_choice": f"linear legs, {points_per_leg} points each; intermediate waypoints are a choice"}
    return ScenarioConfig(values, paths, lambda0, delta_lambda_fwhm, alpha, phi, phi_samples, "stepwise", notes)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    sweep_value: float
    path_lengths: tuple
    probabilities: np.ndarray
    setting_weights: SettingWeights
    envelope_min: np.ndarray | None = None
    envelope_max: np.ndarray | None = None

    def probability(self, event) -> float:
        return float(self.probabilities[event_order().index(tuple(event))])

    def envelope_width(self, event) -> float:
        i = event_order().index(tuple(event))
        return float(self.envelope_max[i] - self.envelope_min[i])


def _scan(exp, alpha: float, phis) -> np.ndarray:
    return np.array([output_distribution(exp, build_four_port(alpha, p)).probabilities for p in phis])


def fringe_envelope(config: ScenarioConfig, base_point) -> tuple[np.ndarray, np.ndarray]:
    """Per-event min and max of the event probabilities over ``config``'s phase grid.

    ``base_point`` holds the four (coarse) path lengths, held fixed while the
    fast phase ``phi`` is scanned over one period.
    """
    phis = config.phis
    if phis is None or len(phis) < 2:
        raise ConfigError("fringe envelopes need phi_samples >= 2")
    scan = _scan(gram_schmidt(config.spec(base_point)), config.alpha, phis)
    return scan.min(axis=0), scan.max(axis=0)


def evaluate_point(config: ScenarioConfig, i: int) -> SweepRow:
    paths = config.paths[i]
    exp = gram_schmidt(config.spec(paths))
    dist = output_distribution(exp, build_four_port(config.alpha, config.phi))
    row = SweepRow(float(config.sweep_grid[i]), paths, dist.probabilities, setting_weights(exp))
    if config.phi_samples:
        # phi grid starts at config.phi, so the row's own value is one of the samples
        scan = _scan(exp, config.alpha, config.phis)
        row.envelope_min, row.envelope_max = scan.min(axis=0), scan.max(axis=0)
    return row


def _evaluate_chunk(config: ScenarioConfig, indices) -> list[SweepRow]:
    return [evaluate_point(config, i) for i in indices]


def resolve_workers(workers: int | None = None) -> int:
    """Worker count; ``None`` reads ``SIM_THREADS`` (unset or 0 means all cores)."""
    if workers is None:
        workers = int(os.environ.get("SIM_THREADS", "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def run_scenario(config: ScenarioConfig, workers: int = 1) -> list[SweepRow]:
    """Evaluate every sweep point, in grid order."""
    n = config.sweep_grid.size
    workers = resolve_workers(workers)
    if workers == 1 or n < 2 * workers:
        return _evaluate_chunk(config, range(n))
    chunks = [range(k, n, workers) for k in range(workers)]
    rows: list = [None] * n
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk, result in zip(chunks, pool.map(_evaluate_chunk, [config] * workers, chunks)):
            for i, row in zip(chunk, result):
                rows[i] = row
    return rows


def scenario_continuous(grid=None, *, alpha=0.0, phi=0.0, phi_samples=0, workers=1, **kwargs) -> list[SweepRow]:
    """Continuous transition ``x = (0, y, -y, 2y)``; defaults to ``alpha = phi = 0``."""
    return run_scenario(continuous_config(grid, alpha=alpha, phi=phi, phi_samples=phi_samples, **kwargs), workers)


def scenario_stepwise(start=STEPWISE_START, points_per_leg=STEPWISE_POINTS_PER_LEG, *, alpha=math.pi, phi=0.0,
                      phi_samples=DEFAULT_PHI_SAMPLES, workers=1, **kwargs) -> list[SweepRow]:
    """Step-wise transition with fringe envelopes; defaults to ``alpha = pi``."""
    config = stepwise_config(start, points_per_leg, alpha=alpha, phi=phi, phi_samples=phi_samples, **kwargs)
    return run_scenario(config, workers)


@dataclass(frozen=True)
class NonmonotonicityReport:
    event: tuple
    max_value: float
    argmax: float
    endpoint_values: tuple[float, float]
    interior_max: bool
    monotone_decreasing: bool
    monotone_increasing: bool


def nonmonotonicity_report(rows, event, tol: float = 1e-12) -> NonmonotonicityReport:
    """Locate the largest value of ``P(event)`` along a sweep.

    ``interior_max`` is set when a non-endpoint value exceeds both endpoints
    by more than ``tol``.
    """
    if len(rows) < 3:
        raise ValueError("need at least 3 sweep rows")
    values = np.array([r.probability(event) for r in rows])
    k = int(np.argmax(values))
    ends = (float(values[0]), float(values[-1]))
    interior = values[1:-1].max() > max(ends) + tol
    steps = np.diff(values)
    return NonmonotonicityReport(
        event=tuple(event),
        max_value=float(values[k]),
        argmax=rows[k].sweep_value,
        endpoint_values=ends,
        interior_max=bool(interior),
        monotone_decreasing=bool(np.all(steps <= tol)),
        monotone_increasing=bool(np.all(steps >= -tol)),
    )


# ---------------------------------------------------------------------------
# JSON configuration
# ---------------------------------------------------------------------------


def _get(data: dict, key: str, kind, default=None):
    if key not in data:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = data[key]
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r}: cannot interpret {value!r} as {kind.__name__}") from None


def config_from_dict(data: dict) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from the JSON scenario schema.

    Common keys: ``scenario`` (``continuous`` | ``stepwise`` | ``custom``),
    ``lambda0_nm``, ``delta_lambda_fwhm_nm``, ``alpha_rad``, ``phi_rad``,
    ``phi_samples``. Grid keys: ``y_start_um``/``y_stop_um``/``y_step_um``
    (continuous), ``start_um``/``points_per_leg`` (stepwise), ``points_um``
    (custom, a list of four-length lists).
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    scenario = _get(data, "scenario", str)
    if scenario not in SCENARIOS:
        raise ConfigError(f"key 'scenario': expected one of {SCENARIOS}, got {scenario!r}")
    common = dict(
        lambda0=_get(data, "lambda0_nm", float, DEFAULT_LAMBDA0 / NM) * NM,
        delta_lambda_fwhm=_get(data, "delta_lambda_fwhm_nm", float, DEFAULT_DELTA_LAMBDA / NM) * NM,
        phi=_get(data, "phi_rad", float, 0.0),
    )
    for key in ("lambda0", "delta_lambda_fwhm"):
        if not common[key] > 0:
            raise ConfigError(f"key {key + '_nm'!r} must be positive")
    if scenario == "continuous":
        if "y_points_um" in data:
            grid = np.asarray(data["y_points_um"], dtype=float) * UM
        elif any(k in data for k in ("y_start_um", "y_stop_um", "y_step_um")):
            grid = continuous_grid(_get(data, "y_start_um", float, -180.0) * UM,
                                   _get(data, "y_stop_um", float, 0.0) * UM,
                                   _get(data, "y_step_um", float, 1.0) * UM)
        else:
            grid = None
        return continuous_config(grid, alpha=_get(data, "alpha_rad", float, 0.0),
                                 phi_samples=_get(data, "phi_samples", int, 0), **common)
    if scenario == "stepwise":
        start = data.get("start_um", [v / UM for v in STEPWISE_START])
        if not (isinstance(start, list) and len(start) == 4):
            raise ConfigError("key 'start_um' must be a list of four lengths")
        return stepwise_config([float(v) * UM for v in start],
                               _get(data, "points_per_leg", int, STEPWISE_POINTS_PER_LEG),
                               alpha=_get(data, "alpha_rad", float, math.pi),
                               phi_samples=_get(data, "phi_samples", int, DEFAULT_PHI_SAMPLES), **common)
    points = data.get("points_um")
    if not isinstance(points, list) or not points:
        raise ConfigError("custom scenario needs a non-empty 'points_um' list")
    if any(not isinstance(p, list) or len(p) != 4 for p in points):
        raise ConfigError("each entry of 'points_um' must list four path lengths")
    paths = [[float(v) * UM for v in p] for p in points]
    return ScenarioConfig(np.arange(len(paths), dtype=float), paths, alpha=_get(data, "alpha_rad", float, 0.0),
                          phi_samples=_get(data, "phi_samples", int, 0), scenario="custom", **common)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None
    return config_from_dict(data)


def distribution_of(row: SweepRow) -> EventDistribution:
    return EventDistribution(tuple(event_order()), row.probabilities)
