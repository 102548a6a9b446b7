"""Enrollment: find a stable window, lock a key to it, verify the result.

Enrollment samples the array many times (optionally across temperature
corners), keeps the window whose bits are most reliably constant, builds a
stability mask over it, and locks a fresh uniformly random key K to the
masked reference pattern.  The helper data that comes out is public; K
itself stays in a vendor-side secret record.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random

import numpy as np

from . import fuzzy_extractor, sram_sim
from .bitops import derive_seed
from .errors import EnrollmentError, ParameterError
from .fuzzy_extractor import HelperData
from .sram_sim import DeviceModel, Temperature

DEFAULT_THRESHOLD = 0.999
DEFAULT_KEY_LEN = 18
MIN_KEY_LEN = 17  # 16 bytes of cipher key plus at least one assignment byte
DEFAULT_CUTOFF = 0.05


@dataclass
class SamplingPlan:
    startups_per_temperature: int = 100
    temperatures: tuple[Temperature, ...] = (Temperature.ROOM,)

    def __post_init__(self):
        if self.startups_per_temperature < 2:
            raise ParameterError("need at least 2 startups per temperature")
        if not self.temperatures:
            raise ParameterError("need at least one temperature")
        self.temperatures = tuple(Temperature(t) for t in self.temperatures)


@dataclass
class EnrollmentRecord:
    offset: int
    sz: int
    sm: np.ndarray  # stability mask over the window
    b: np.ndarray | None  # masked majority reference pattern; None once persisted
    key: bytes
    helper: HelperData
    plan: SamplingPlan = field(default_factory=SamplingPlan)


@dataclass
class VerificationReport:
    trials: int
    failures: int
    cutoff: float

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    @property
    def passed(self) -> bool:
        return self.failure_rate <= self.cutoff


def collect_samples(device: DeviceModel, plan: SamplingPlan, seed: int) -> np.ndarray:
    """Stack plan startups into a (num_samples, cell_count) 0/1 matrix."""
    rows = []
    for t_idx, temp in enumerate(plan.temperatures):
        for i in range(plan.startups_per_temperature):
            noise = derive_seed("enroll-sample", seed, t_idx, i)
            rows.append(sram_sim.startup(device, temp, noise).bits)
    return np.stack(rows)


def find_stable_window(samples: np.ndarray, sz: int, threshold: float = DEFAULT_THRESHOLD):
    """Pick the sz-bit window with the most stable cells.

    A cell is stable when its majority value shows up in at least
    threshold of the samples.  Ties go to the lowest offset.  Returns
    (offset, sm, b) where b is the majority pattern with unstable
    positions forced to zero.
    """
    samples = np.asarray(samples, dtype=np.uint8)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise ParameterError("need a (num_samples >= 2, cell_count) matrix")
    num, cells = samples.shape
    if not 1 <= sz <= cells:
        raise ParameterError(f"window size {sz} does not fit {cells} cells")

    ones = samples.sum(axis=0, dtype=np.int64)
    majority = (2 * ones >= num).astype(np.uint8)
    agree = np.maximum(ones, num - ones)
    # small slack absorbs float rounding in threshold * num
    stable = (agree + 1e-9 >= threshold * num).astype(np.uint8)

    window_counts = np.convolve(stable, np.ones(sz, dtype=np.int64), mode="valid")
    offset = int(np.argmax(window_counts))  # argmax takes the first max
    if window_counts[offset] == 0:
        raise EnrollmentError("no window contains a single stable bit")
    sm = stable[offset : offset + sz].copy()
    b = majority[offset : offset + sz] & sm
    return offset, sm, b


def enroll(
    device: DeviceModel,
    plan: SamplingPlan | None = None,
    sz: int = 256,
    hd: int = 2,
    key_len: int = DEFAULT_KEY_LEN,
    threshold: float = DEFAULT_THRESHOLD,
    seed: int = 0,
) -> EnrollmentRecord:
    """Full enrollment pass; deterministic in (device, plan, seed)."""
    plan = plan or SamplingPlan()
    if key_len < MIN_KEY_LEN:
        raise ParameterError(f"key_len must be >= {MIN_KEY_LEN}")
    if fuzzy_extractor.mask_count(sz, hd) > fuzzy_extractor.MASK_CAP:
        raise EnrollmentError(
            f"C({sz},{hd}) lockers exceed the cap of {fuzzy_extractor.MASK_CAP}"
        )
    samples = collect_samples(device, plan, seed)
    offset, sm, b = find_stable_window(samples, sz, threshold)
    key = Random(derive_seed("enroll-key", seed)).randbytes(key_len)
    masks = fuzzy_extractor.gen_masks(sz, hd)
    lockers = fuzzy_extractor.lock(key, b, masks, nonce_seed=derive_seed("enroll-nonce", seed))
    helper = HelperData(offset=offset, sz=sz, hd=hd, sm=sm, lockers=lockers)
    return EnrollmentRecord(offset=offset, sz=sz, sm=sm, b=b, key=key, helper=helper, plan=plan)


def verify_enrollment(
    device: DeviceModel,
    rec: EnrollmentRecord,
    trials: int = 100,
    cutoff: float = DEFAULT_CUTOFF,
    seed: int = 1,
) -> VerificationReport:
    """Fresh startups across the plan's temperatures; count unlock misses."""
    if trials < 1:
        raise ParameterError("trials must be positive")
    temps = rec.plan.temperatures
    failures = 0
    for t in range(trials):
        temp = temps[t % len(temps)]
        sample = sram_sim.startup(device, temp, derive_seed("verify", seed, t))
        window = sample.bits[rec.offset : rec.offset + rec.sz]
        if fuzzy_extractor.unlock(rec.helper, window) != rec.key:
            failures += 1
    return VerificationReport(trials=trials, failures=failures, cutoff=cutoff)


def secret_to_dict(rec: EnrollmentRecord) -> dict:
    return {
        "version": 1,
        "key": rec.key.hex(),
        "plan": {
            "startups_per_temperature": rec.plan.startups_per_temperature,
            "temperatures": [t.value for t in rec.plan.temperatures],
        },
    }


def record_from_dicts(helper_doc: dict, secret_doc: dict) -> EnrollmentRecord:
    """Rebuild the vendor-side record from the two persisted documents."""
    helper = fuzzy_extractor.helper_from_dict(helper_doc)
    plan_doc = secret_doc.get("plan", {})
    plan = SamplingPlan(
        startups_per_temperature=plan_doc.get("startups_per_temperature", 100),
        temperatures=tuple(plan_doc.get("temperatures", ["room"])),
    )
    key = bytes.fromhex(secret_doc["key"])
    # b is not persisted: it is only needed at lock time.
    return EnrollmentRecord(
        offset=helper.offset,
        sz=helper.sz,
        sm=helper.sm,
        b=None,
        key=key,
        helper=helper,
        plan=plan,
    )
