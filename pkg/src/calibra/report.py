"""Structured verification reports with lossless JSON round-tripping.

The document is deterministic for a fixed command and seed: wall time is
measured but serialized as null unless timing is explicitly requested, so
that repeated runs are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1


@dataclass
class DefectReport:
    """Per-run verification summary."""

    structure: str
    immersion: str
    immersion_params: dict
    samples: int
    defects: dict                 # condition -> max |defect|
    tolerance: float
    verdicts: dict                # condition -> bool
    seed: int
    extra: dict = field(default_factory=dict)
    wall_time_s: float | None = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "structure": self.structure,
            "immersion": self.immersion,
            "immersion_params": self.immersion_params,
            "samples": self.samples,
            "defects": {k: float(v) for k, v in self.defects.items()},
            "tolerance": float(self.tolerance),
            "verdicts": {k: bool(v) for k, v in self.verdicts.items()},
            "passed": self.passed,
            "seed": self.seed,
            "extra": self.extra,
            "wall_time_s": self.wall_time_s if include_timing else None,
        }
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DefectReport":
        d = json.loads(text)
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')}")
        return cls(
            structure=d["structure"],
            immersion=d["immersion"],
            immersion_params=d["immersion_params"],
            samples=d["samples"],
            defects=d["defects"],
            tolerance=d["tolerance"],
            verdicts=d["verdicts"],
            seed=d["seed"],
            extra=d.get("extra", {}),
            wall_time_s=d.get("wall_time_s"),
        )
