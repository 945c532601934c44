"""Serializable experiment reports.

JSON is the canonical output; reports are deterministic for identical
parameters and seeds (keys sorted, floats serialized with full round-trip
precision).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

ARTIFACT_VERSION = "0.1.0"


@dataclass
class Assertion:
    name: str
    lhs: float
    rhs: float
    holds: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "holds": bool(self.holds)}


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    timing_ms: float = 0.0
    artifact_version: str = ARTIFACT_VERSION

    def check(self, name: str, lhs: float, rhs: float, holds: bool) -> None:
        self.assertions.append(Assertion(name, float(lhs), float(rhs), bool(holds)))

    @property
    def all_hold(self) -> bool:
        return all(a.holds for a in self.assertions)

    def as_dict(self, include_timing: bool = True) -> dict:
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "values": self.values,
            "assertions": [a.as_dict() for a in self.assertions],
            "timing_ms": self.timing_ms if include_timing else 0.0,
            "artifact_version": self.artifact_version,
        }

    def to_json(self, include_timing: bool = False) -> str:
        """Canonical JSON. Timing is zeroed by default so identical runs are
        byte-identical; pass include_timing=True for wall-clock data."""
        return json.dumps(self.as_dict(include_timing), sort_keys=True,
                          indent=2, default=_coerce)


def _coerce(obj):
    import numpy as np

    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON serializable: {type(obj)}")


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self.t0) * 1000.0
        return False
