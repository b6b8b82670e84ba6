"""Physical interferometer parameters and presets."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

HBAR = 1.054571817e-34  # J s
C_LIGHT = 2.99792458e8  # m / s

PRESET_DIR_ENV = "GWQNOISE_PRESET_DIR"

PRESETS = {
    "initial-ligo": {
        "mirror_mass_kg": 11.0,
        "arm_length_m": 4000.0,
        "finesse": 200.0,
        "wavelength_m": 1.064e-6,
    },
}


@dataclass(frozen=True)
class DetectorConfig:
    """Fabry-Perot Michelson interferometer; derived quantities are properties."""

    mirror_mass: float
    arm_length: float
    finesse: float
    wavelength: float
    hbar: float = HBAR
    c: float = C_LIGHT

    def __post_init__(self):
        for name in ("mirror_mass", "arm_length", "finesse", "wavelength", "hbar", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.c / self.wavelength

    @property
    def tau(self) -> float:
        """Cavity storage time ``L F / (pi c)``."""
        return self.arm_length * self.finesse / (math.pi * self.c)

    @property
    def bounces(self) -> float:
        return self.tau * self.c / (2 * self.arm_length)

    @property
    def phase_gain(self) -> float:
        """``d phi / d z = omega tau / L``."""
        return self.omega * self.tau / self.arm_length

    @property
    def a_pc(self) -> float:
        return (self.arm_length / (self.omega * self.tau)) ** 2

    @property
    def a_rp(self) -> float:
        return (self.hbar * self.omega * self.tau**2 / (self.mirror_mass * self.arm_length)) ** 2

    @property
    def momentum_per_jx(self) -> float:
        """Momentum difference transferred to the end mirrors per unit ``Jx``."""
        return 2 * self.hbar * self.omega * self.tau / self.arm_length

    def power(self, nbar: float) -> float:
        return self.hbar * self.omega * nbar / self.tau

    def nbar_for_power(self, power: float) -> float:
        return power * self.tau / (self.hbar * self.omega)

    def to_json(self) -> dict:
        return {
            "mirror_mass_kg": self.mirror_mass,
            "arm_length_m": self.arm_length,
            "finesse": self.finesse,
            "wavelength_m": self.wavelength,
        }

    @classmethod
    def from_json(cls, d: dict) -> "DetectorConfig":
        try:
            return cls(
                mirror_mass=float(d["mirror_mass_kg"]),
                arm_length=float(d["arm_length_m"]),
                finesse=float(d["finesse"]),
                wavelength=float(d["wavelength_m"]),
            )
        except KeyError as exc:
            raise ValueError(f"detector config is missing field {exc.args[0]!r}") from None

    @classmethod
    def preset(cls, name: str) -> "DetectorConfig":
        override = os.environ.get(PRESET_DIR_ENV)
        if override:
            path = Path(override) / f"{name}.json"
            if path.is_file():
                return cls.from_json(json.loads(path.read_text()))
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        return cls.from_json(PRESETS[name])

    @classmethod
    def load(cls, source: str) -> "DetectorConfig":
        """Preset name or path to a JSON file."""
        path = Path(source)
        if path.suffix == ".json" or path.is_file():
            return cls.from_json(json.loads(path.read_text()))
        return cls.preset(source)


def initial_ligo() -> DetectorConfig:
    return DetectorConfig.preset("initial-ligo")
