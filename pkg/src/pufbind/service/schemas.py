"""Request and response envelopes for the provisioning service.

Nested documents (device, helper, secret, bundle) stay as plain dicts
here; the core serializers own their field-level validation, and the
service converts their errors into 400 responses.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

TempName = Literal["low", "room", "high"]

Triple = tuple[int | float, int | float, int | float]


class NewDeviceRequest(BaseModel):
    seed: int
    cell_count: int = 4096
    stable_fraction: float = 0.85
    epsilon: float = 0.001


class CloneDeviceRequest(BaseModel):
    device: dict
    seed: int


class DeviceResponse(BaseModel):
    device: dict


class StartupRequest(BaseModel):
    device: dict
    temperature: TempName = "room"
    noise_seed: int = 0


class StartupResponse(BaseModel):
    bits: str
    cell_count: int
    temperature: TempName


class EnrollRequest(BaseModel):
    device: dict
    sz: int = 256
    hd: int = 2
    key_len: int = 18
    threshold: float = 0.999
    seed: int = 0
    startups_per_temperature: int = 100
    temperatures: list[TempName] = Field(default_factory=lambda: ["room"])


class EnrollResponse(BaseModel):
    helper: dict
    secret: dict
    offset: int
    stable_count: int


class VerifyRequest(BaseModel):
    device: dict
    helper: dict
    secret: dict
    trials: int = 100
    cutoff: float = 0.05
    seed: int = 1


class VerifyResponse(BaseModel):
    trials: int
    failures: int
    failure_rate: float
    cutoff: float
    passed: bool


class BindRequest(BaseModel):
    table: list[Triple]
    helper: dict
    secret: dict
    k: int
    c: int | None = None
    keep: Literal["low", "high"] = "low"
    seed: int = 0
    key_helper: dict | None = None
    key_secret: dict | None = None


class BundleResponse(BaseModel):
    bundle: dict


class PlantSpec(BaseModel):
    gain: float
    tau: float
    initial: float = 0.0


class LoopSpec(BaseModel):
    dt: float = 0.001
    set_point: float = 1.0
    safe_lower: float = -1000.0
    safe_upper: float = 1000.0


class RunRequest(BaseModel):
    bundle: dict
    device: dict
    temperature: TempName = "room"
    noise_seed: int = 0
    plant: PlantSpec | None = None
    loop: LoopSpec | None = None
    horizon: int = 5000


class RunResponse(BaseModel):
    triple: Triple
    settling_steps: float | None
    overshoot_ratio: float
    integral_squared_error: float
    trace_csv: str


class StaticAttackRequest(BaseModel):
    bundle: dict


class CloneAttackRequest(BaseModel):
    bundle: dict
    phi: str
    plant: PlantSpec | None = None
    loop: LoopSpec | None = None
    horizon: int = 5000


class AttackResponse(BaseModel):
    scenario: str
    s: list[Triple] | None
    s_prime: list[Triple]
    s_minus: list[Triple] | None
    best_triple: Triple | None
    effort: dict[str, int]


class BenchRequest(BaseModel):
    k_values: list[int]
    m_values: list[int]
    reps: int = 3
    seed: int = 0


class BenchRowModel(BaseModel):
    k: int
    m: int
    rep: int
    expr_literal_count: int
    eval_time_ns: float
    bundle_bytes: int


class BenchResponse(BaseModel):
    rows: list[BenchRowModel]
    csv: str


class HealthResponse(BaseModel):
    status: str
    version: str
