"""Discrete PID loop against a first-order lag plant.

The controller mirrors a fixed-step embedded loop: proportional on the
current error, rectangular-rule integral, backward-difference derivative,
and a hard output clamp to a safe actuation range.  The plant pulls its
measured value toward gain * output with time constant tau.

A gains table is judged by closed-loop settling: the preferred row must
settle strictly faster than every alternative, and every alternative must
still settle within the horizon.  That is what validate_table checks and
what the demo fixture is tuned for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from io import StringIO

from .errors import ParameterError, StateError
from .logic_encode import ParamTable

SETTLE_BAND = 0.02  # fraction of |set_point| the error must stay inside
DEFAULT_HORIZON = 5000


@dataclass
class PidConfig:
    kp: float
    ki: float
    kd: float
    dt: float
    set_point: float
    safe_lower: float
    safe_upper: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ParameterError("dt must be positive")
        if self.safe_lower >= self.safe_upper:
            raise ParameterError("safe range must be a nonempty interval")


@dataclass
class PidState:
    previous_integral: float = 0.0
    previous_error: float = 0.0
    mode: str = "init"


@dataclass
class PlantModel:
    """First-order lag: measured += (gain * output - measured) * dt / tau."""

    gain: float
    tau: float
    initial: float = 0.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ParameterError("tau must be positive")


@dataclass
class TraceMetrics:
    settling_steps: float  # math.inf when the loop never settles
    overshoot_ratio: float
    integral_squared_error: float


@dataclass
class Trace:
    t: list[float] = field(default_factory=list)
    measured: list[float] = field(default_factory=list)
    output: list[float] = field(default_factory=list)
    error: list[float] = field(default_factory=list)

    def metrics(self, set_point: float, dt: float) -> TraceMetrics:
        tol = SETTLE_BAND * abs(set_point)
        for i in range(len(self.error) - 1, -1, -1):
            if abs(self.error[i]) > tol:
                settling = math.inf if i == len(self.error) - 1 else float(i + 1)
                break
        else:
            settling = 0.0
        if set_point != 0 and self.measured:
            toward = 1.0 if set_point > 0 else -1.0
            excess = max((m - set_point) * toward for m in self.measured)
            overshoot = max(0.0, excess) / abs(set_point)
        else:
            overshoot = 0.0
        ise = sum(e * e for e in self.error) * dt
        return TraceMetrics(settling, overshoot, ise)


def pid_init(state: PidState) -> None:
    state.previous_integral = 0.0
    state.previous_error = 0.0
    state.mode = "execute"


def pid_step(state: PidState, cfg: PidConfig, measured: float) -> float:
    """One control update; returns the clamped actuation output."""
    if state.mode != "execute":
        raise StateError("controller must be initialized before stepping")
    error = cfg.set_point - measured
    p = error
    i = state.previous_integral + error * cfg.dt
    d = (error - state.previous_error) / cfg.dt
    state.previous_integral = i
    state.previous_error = error
    output = cfg.kp * p + cfg.ki * i + cfg.kd * d
    if output > cfg.safe_upper:
        output = cfg.safe_upper
    if output < cfg.safe_lower:
        output = cfg.safe_lower
    return output


def simulate(plant: PlantModel, cfg: PidConfig, steps: int = DEFAULT_HORIZON) -> Trace:
    """Run the closed loop for a fixed number of steps."""
    if steps < 1:
        raise ParameterError("steps must be positive")
    state = PidState()
    pid_init(state)
    measured = plant.initial
    trace = Trace()
    for i in range(steps):
        error = cfg.set_point - measured
        output = pid_step(state, cfg, measured)
        trace.t.append(i * cfg.dt)
        trace.measured.append(measured)
        trace.output.append(output)
        trace.error.append(error)
        measured += (plant.gain * output - measured) * cfg.dt / plant.tau
    return trace


@dataclass
class TableEntry:
    triple: tuple
    metrics: TraceMetrics


@dataclass
class TableValidation:
    entries: list[TableEntry]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def validate_table(
    plant: PlantModel,
    table: ParamTable,
    horizon: int = DEFAULT_HORIZON,
    cfg: PidConfig | None = None,
) -> TableValidation:
    """Simulate every row; the preferred row must settle strictly fastest
    and every alternative must settle within the horizon."""
    if cfg is None:
        from .fixtures import demo_loop_config

        cfg = demo_loop_config()
    entries = []
    for triple in table.triples:
        row_cfg = PidConfig(
            kp=triple[0],
            ki=triple[1],
            kd=triple[2],
            dt=cfg.dt,
            set_point=cfg.set_point,
            safe_lower=cfg.safe_lower,
            safe_upper=cfg.safe_upper,
        )
        trace = simulate(plant, row_cfg, horizon)
        entries.append(TableEntry(triple, trace.metrics(cfg.set_point, cfg.dt)))

    failures = []
    best = entries[0].metrics.settling_steps
    if math.isinf(best):
        failures.append(f"preferred row {entries[0].triple} never settles")
    for e in entries[1:]:
        if math.isinf(e.metrics.settling_steps):
            failures.append(f"alternative {e.triple} never settles within {horizon}")
        elif e.metrics.settling_steps <= best:
            failures.append(
                f"alternative {e.triple} settles in {e.metrics.settling_steps:.0f}"
                f" <= preferred {best:.0f}"
            )
    return TableValidation(entries=entries, failures=failures)


def trace_to_csv(trace: Trace) -> str:
    """Six-significant-digit CSV with a versioned header comment."""
    buf = StringIO()
    buf.write("# pufbind trace v1\n")
    buf.write("t,measured,output,error\n")
    for row in zip(trace.t, trace.measured, trace.output, trace.error):
        buf.write(",".join(f"{v:.6g}" for v in row) + "\n")
    return buf.getvalue()
