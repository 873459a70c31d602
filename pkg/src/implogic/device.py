"""Device-level model of a bipolar metal-oxide memristor.

A device is described by a static parameter set (switching-threshold ranges
and ON/OFF read conductances), a binary logic state with an analog
degradation scale, and an I-V law that is either ohmic per state or a
sinh-shaped nonlinearity per state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "Logic",
    "LinearIV",
    "SinhIV",
    "MemristorSpec",
    "DeviceState",
    "ThresholdSample",
    "current",
    "differential_conductance",
    "read_conductance",
    "sample_thresholds",
    "nominal_thresholds",
    "decode_bit",
    "sinh_iv_from_conductances",
    "bottom_device_spec",
    "top_device_spec",
    "ideal_device_spec",
    "PARTIAL_RESET_FACTOR",
    "READ_VOLTAGE",
]

READ_VOLTAGE = 0.1
# One partial-reset event multiplies the conductance scale by this factor.
PARTIAL_RESET_FACTOR = 0.7


class Logic(Enum):
    OFF = 0
    ON = 1


@dataclass(frozen=True)
class LinearIV:
    """Ohmic branch per state: I = G * V."""

    kind: str = field(default="linear", init=False)


@dataclass(frozen=True)
class SinhIV:
    """Per-state I(V) = a * sinh(b * V); odd and strictly increasing.

    The small-signal slope a*b must match the declared read conductance of
    the owning spec to within 1%.
    """

    a_on: float
    b_on: float
    a_off: float
    b_off: float
    kind: str = field(default="sinh", init=False)

    def __post_init__(self):
        for name in ("a_on", "b_on", "a_off", "b_off"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"SinhIV.{name} must be > 0")


def sinh_iv_from_conductances(g_on: float, g_off: float,
                              b_on: float, b_off: float) -> SinhIV:
    """Build a sinh I-V whose zero-bias slopes equal the read conductances."""
    return SinhIV(a_on=g_on / b_on, b_on=b_on, a_off=g_off / b_off, b_off=b_off)


@dataclass(frozen=True)
class MemristorSpec:
    """Static per-device parameters.

    Voltages are in volts (set thresholds positive, reset thresholds
    negative, with v_reset_max the more negative guaranteed-full-reset
    level); conductances in siemens.
    """

    v_set_min: float
    v_set_max: float
    v_reset_min: float
    v_reset_max: float
    g_on: float
    g_off: float
    iv_model: LinearIV | SinhIV = field(default_factory=LinearIV)

    def __post_init__(self):
        if not 0.0 < self.v_set_min <= self.v_set_max:
            raise ValueError("require 0 < v_set_min <= v_set_max")
        if not self.v_reset_max <= self.v_reset_min < 0.0:
            raise ValueError("require v_reset_max <= v_reset_min < 0")
        if not 0.0 < self.g_off < self.g_on:
            raise ValueError("require 0 < g_off < g_on")
        if isinstance(self.iv_model, SinhIV):
            for slope, g in ((self.iv_model.a_on * self.iv_model.b_on, self.g_on),
                             (self.iv_model.a_off * self.iv_model.b_off, self.g_off)):
                if abs(slope - g) > 0.01 * g:
                    raise ValueError(
                        "sinh small-signal slope deviates more than 1% from "
                        f"the declared read conductance ({slope:.4g} vs {g:.4g})")

    @property
    def v_set_star(self) -> float:
        return 0.5 * (self.v_set_max + self.v_set_min)

    @property
    def set_half_width(self) -> float:
        return 0.5 * (self.v_set_max - self.v_set_min)

    def to_json(self) -> dict:
        out = {
            "v_set_min": self.v_set_min,
            "v_set_max": self.v_set_max,
            "v_reset_min": self.v_reset_min,
            "v_reset_max": self.v_reset_max,
            "g_on": self.g_on,
            "g_off": self.g_off,
        }
        if isinstance(self.iv_model, SinhIV):
            out["iv"] = {"kind": "sinh", "a_on": self.iv_model.a_on,
                         "b_on": self.iv_model.b_on, "a_off": self.iv_model.a_off,
                         "b_off": self.iv_model.b_off}
        else:
            out["iv"] = {"kind": "linear"}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MemristorSpec":
        iv = obj.get("iv", {"kind": "linear"})
        if iv.get("kind", "linear") == "linear":
            model: LinearIV | SinhIV = LinearIV()
        elif iv["kind"] == "sinh":
            model = SinhIV(a_on=float(iv["a_on"]), b_on=float(iv["b_on"]),
                           a_off=float(iv["a_off"]), b_off=float(iv["b_off"]))
        else:
            raise ValueError(f"unknown iv kind {iv.get('kind')!r}")
        return cls(v_set_min=float(obj["v_set_min"]), v_set_max=float(obj["v_set_max"]),
                   v_reset_min=float(obj["v_reset_min"]), v_reset_max=float(obj["v_reset_max"]),
                   g_on=float(obj["g_on"]), g_off=float(obj["g_off"]), iv_model=model)


@dataclass(frozen=True)
class DeviceState:
    """Binary logic state plus a conductance scale in (0, 1].

    The scale multiplies the nominal state conductance and models partial
    reset (a degraded ON/OFF ratio). Any ideal write or complete switching
    event restores scale 1.
    """

    logic: Logic = Logic.OFF
    conductance_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.conductance_scale <= 1.0:
            raise ValueError("conductance_scale must be in (0, 1]")


ON = DeviceState(Logic.ON)
OFF = DeviceState(Logic.OFF)


@dataclass(frozen=True)
class ThresholdSample:
    """One cycle's realized switching thresholds."""

    v_set: float
    v_reset_onset: float
    v_reset_full: float

    def __post_init__(self):
        if self.v_reset_full > self.v_reset_onset:
            raise ValueError("v_reset_full must be <= v_reset_onset")


def current(spec: MemristorSpec, state: DeviceState, v: float) -> float:
    """Device current at voltage drop v for the given state.

    Both I-V variants are odd in v, so the sign of the result follows the
    sign of v.
    """
    scale = state.conductance_scale
    model = spec.iv_model
    if isinstance(model, SinhIV):
        if state.logic is Logic.ON:
            return scale * model.a_on * math.sinh(model.b_on * v)
        return scale * model.a_off * math.sinh(model.b_off * v)
    g = spec.g_on if state.logic is Logic.ON else spec.g_off
    return scale * g * v


def differential_conductance(spec: MemristorSpec, state: DeviceState, v: float) -> float:
    """dI/dV at drop v; used by the Newton node solver."""
    scale = state.conductance_scale
    model = spec.iv_model
    if isinstance(model, SinhIV):
        if state.logic is Logic.ON:
            return scale * model.a_on * model.b_on * math.cosh(model.b_on * v)
        return scale * model.a_off * model.b_off * math.cosh(model.b_off * v)
    g = spec.g_on if state.logic is Logic.ON else spec.g_off
    return scale * g


def read_conductance(spec: MemristorSpec, state: DeviceState,
                     v_read: float = READ_VOLTAGE) -> float:
    """Static conductance I(v_read)/v_read at the read voltage."""
    return current(spec, state, v_read) / v_read


def decode_bit(spec: MemristorSpec, state: DeviceState) -> int:
    """Read out a logic bit: 1 if the read conductance is above the
    geometric mean of the ON and OFF conductances, else 0."""
    return int(read_conductance(spec, state) > math.sqrt(spec.g_on * spec.g_off))


def sample_thresholds(spec: MemristorSpec, rng: np.random.Generator) -> ThresholdSample:
    """Draw one cycle's thresholds from the cycle-to-cycle ranges.

    The set threshold and the reset onset are uniform on their ranges; the
    guaranteed full-reset level is taken deterministically.
    """
    v_set = float(rng.uniform(spec.v_set_min, spec.v_set_max))
    v_onset = float(rng.uniform(spec.v_reset_max, spec.v_reset_min))
    return ThresholdSample(v_set=v_set, v_reset_onset=v_onset,
                           v_reset_full=spec.v_reset_max)


def nominal_thresholds(spec: MemristorSpec) -> ThresholdSample:
    """Midpoint thresholds used when cycle-to-cycle variation is disabled."""
    return ThresholdSample(
        v_set=spec.v_set_star,
        v_reset_onset=0.5 * (spec.v_reset_min + spec.v_reset_max),
        v_reset_full=spec.v_reset_max,
    )


def bottom_device_spec(iv_model: LinearIV | SinhIV | None = None) -> MemristorSpec:
    """Measured bottom-level device: set range 1.1-1.9 V, 115/10 uS read."""
    return MemristorSpec(v_set_min=1.1, v_set_max=1.9, v_reset_min=-1.5,
                         v_reset_max=-2.2, g_on=115e-6, g_off=10e-6,
                         iv_model=iv_model or LinearIV())


def top_device_spec(iv_model: LinearIV | SinhIV | None = None) -> MemristorSpec:
    """Measured top-level device: set range 0.7-1.6 V, 125/5 uS read."""
    return MemristorSpec(v_set_min=0.7, v_set_max=1.6, v_reset_min=-1.5,
                         v_reset_max=-2.2, g_on=125e-6, g_off=5e-6,
                         iv_model=iv_model or LinearIV())


def ideal_device_spec(v_set: float = 1.5, g_on: float = 115e-6,
                      g_off: float = 10e-6) -> MemristorSpec:
    """Zero-variation device with a sharp set threshold; handy for logic
    verification where every correct step must succeed."""
    return MemristorSpec(v_set_min=v_set, v_set_max=v_set, v_reset_min=-1.5,
                         v_reset_max=-2.2, g_on=g_on, g_off=g_off)
