"""Simulated SRAM power-up behaviour.

A device is a vector of per-cell power-up biases: the probability that a
cell reads 1 after a cold start.  Most cells are stable (bias pinned next
to 0 or 1, split about evenly between the two), the rest float somewhere
in the middle and give a different answer from startup to startup.  The
stable majority is what makes the array usable as a fingerprint; the
unstable minority is what enrollment has to mask out.

A clone shares every public parameter of the original device but draws a
fresh bias vector, so its stable pattern agrees with the original only by
coin flip.  All randomness is routed through explicit integer seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bitops import derive_seed
from .errors import ParameterError

DEFAULT_CELL_COUNT = 4096
DEFAULT_STABLE_FRACTION = 0.85
DEFAULT_EPSILON = 0.001

# Biases are stored at four-decimal resolution so a model survives a
# serialization round trip bit for bit.
_QUANTUM = 10_000


class Temperature(str, Enum):
    LOW = "low"
    ROOM = "room"
    HIGH = "high"


@dataclass(eq=False)
class DeviceModel:
    device_seed: int
    cell_count: int
    stable_fraction: float
    epsilon: float
    bias: np.ndarray  # float64 in [0, 1], one entry per cell

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeviceModel):
            return NotImplemented
        return (
            self.device_seed == other.device_seed
            and self.cell_count == other.cell_count
            and self.stable_fraction == other.stable_fraction
            and self.epsilon == other.epsilon
            and np.array_equal(self.bias, other.bias)
        )


@dataclass
class StartupSample:
    bits: np.ndarray  # uint8 0/1, length cell_count
    temperature: Temperature


def _quantize(values: np.ndarray) -> np.ndarray:
    return np.round(values * _QUANTUM) / _QUANTUM


def new_device(
    seed: int,
    cell_count: int = DEFAULT_CELL_COUNT,
    stable_fraction: float = DEFAULT_STABLE_FRACTION,
    epsilon: float = DEFAULT_EPSILON,
) -> DeviceModel:
    """Draw a fresh device model from a seed.

    A ceil(stable_fraction * cell_count) subset of cells gets bias epsilon
    or 1 - epsilon (fair coin per cell); the rest are uniform in (0.2, 0.8).
    """
    if cell_count < 8:
        raise ParameterError("cell_count must be at least 8")
    if not 0.0 < stable_fraction <= 1.0:
        raise ParameterError("stable_fraction must lie in (0, 1]")
    if not 0.0 <= epsilon < 0.5:
        raise ParameterError("epsilon must lie in [0, 0.5)")

    rng = np.random.default_rng(derive_seed("device", seed))
    n_stable = min(cell_count, math.ceil(stable_fraction * cell_count))
    stable_idx = rng.permutation(cell_count)[:n_stable]

    bias = rng.uniform(0.2, 0.8, size=cell_count)
    leans_one = rng.random(n_stable) < 0.5
    bias[stable_idx] = np.where(leans_one, 1.0 - epsilon, epsilon)
    return DeviceModel(
        device_seed=seed,
        cell_count=cell_count,
        stable_fraction=stable_fraction,
        epsilon=epsilon,
        bias=_quantize(bias),
    )


def clone_device(device: DeviceModel, clone_seed: int) -> DeviceModel:
    """Same public parameters, fresh physical fingerprint."""
    return new_device(
        clone_seed,
        cell_count=device.cell_count,
        stable_fraction=device.stable_fraction,
        epsilon=device.epsilon,
    )


def _effective_bias(device: DeviceModel, temperature: Temperature) -> np.ndarray:
    if temperature is Temperature.ROOM:
        return device.bias
    # Temperature extremes triple each cell's distance from its nearest
    # rail; the result is clipped back into [0, 1].
    b = device.bias
    tripled = np.where(b <= 0.5, 3.0 * b, 1.0 - 3.0 * (1.0 - b))
    return np.clip(tripled, 0.0, 1.0)


def startup(
    device: DeviceModel,
    temperature: Temperature = Temperature.ROOM,
    noise_seed: int = 0,
) -> StartupSample:
    """One power-up read of the whole array, deterministic in the seed."""
    try:
        temperature = Temperature(temperature)
    except ValueError as exc:
        raise ParameterError(f"unknown temperature label: {temperature!r}") from exc
    p = _effective_bias(device, temperature)
    rng = np.random.default_rng(
        derive_seed("startup", device.device_seed, temperature.value, noise_seed)
    )
    bits = (rng.random(device.cell_count) < p).astype(np.uint8)
    return StartupSample(bits=bits, temperature=temperature)


def majority_pattern(device: DeviceModel) -> np.ndarray:
    """The bit each cell leans toward (bias rounded to the nearest rail)."""
    return (device.bias > 0.5).astype(np.uint8)


def device_to_dict(device: DeviceModel) -> dict:
    quantized = np.round(device.bias * _QUANTUM).astype(np.uint16)
    return {
        "version": 1,
        "device_seed": device.device_seed,
        "cell_count": device.cell_count,
        "stable_fraction": device.stable_fraction,
        "epsilon": device.epsilon,
        "bias_hex": quantized.astype(">u2").tobytes().hex(),
    }


def device_from_dict(doc: dict) -> DeviceModel:
    raw = bytes.fromhex(doc["bias_hex"])
    quantized = np.frombuffer(raw, dtype=">u2").astype(np.float64)
    bias = quantized / _QUANTUM
    if bias.size != doc["cell_count"]:
        raise ParameterError("bias length does not match cell_count")
    return DeviceModel(
        device_seed=doc["device_seed"],
        cell_count=doc["cell_count"],
        stable_fraction=doc["stable_fraction"],
        epsilon=doc["epsilon"],
        bias=bias,
    )
