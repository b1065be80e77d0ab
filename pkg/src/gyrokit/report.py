"""Verification reports and their canonical serialization.

Reports are plain data. The serialized form is canonical: keys sorted,
floats printed with 17 significant digits, no NaN/Inf. Two runs with the
same configuration produce byte-identical output except for the
``wall_time_s`` field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """Outcome of a single named check inside a suite."""

    name: str
    passed: bool
    max_residual: float = 0.0
    samples: object = 0  # int count, or the string "exhaustive"
    witness: object = None  # JSON-able payload on failure

    def to_dict(self):
        d = {
            "name": self.name,
            "pass": bool(self.passed),
            "max_residual": float(self.max_residual),
            "samples_or_exhaustive": self.samples,
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class VerificationReport:
    suite: str
    checks: list = field(default_factory=list)
    seed: int | None = None
    tolerances: dict = field(default_factory=dict)
    depth: int | None = None
    model: str | None = None
    wall_time_s: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def max_residual(self) -> float:
        return max((c.max_residual for c in self.checks), default=0.0)

    def to_dict(self):
        d = {
            "suite": self.suite,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "tolerances": dict(self.tolerances),
            "wall_time_s": float(self.wall_time_s),
        }
        if self.seed is not None:
            d["seed"] = int(self.seed)
        if self.depth is not None:
            d["depth"] = int(self.depth)
        if self.model is not None:
            d["model"] = self.model
        if self.notes:
            d["notes"] = dict(self.notes)
        return d


def _canon(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(_json_string(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError("canonical reports must not contain NaN or Inf")
        if obj == int(obj) and abs(obj) < 1e16:
            # stable short form for exact integers stored as floats
            out.append(repr(float(obj)))
        else:
            out.append(format(obj, ".17g"))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for k in sorted(obj):
            if not isinstance(k, str):
                raise TypeError("report keys must be strings")
            if not first:
                out.append(",")
            first = False
            out.append(_json_string(k))
            out.append(":")
            _canon(obj[k], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _canon(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot canonically serialize {type(obj).__name__}")


_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _json_string(s):
    parts = ['"']
    for ch in s:
        if ch in _ESCAPES:
            parts.append(_ESCAPES[ch])
        elif ord(ch) < 0x20:
            parts.append(f"\\u{ord(ch):04x}")
        else:
            parts.append(ch)
    parts.append('"')
    return "".join(parts)


def canonical_json(obj) -> str:
    """Serialize to deterministic JSON (sorted keys, 17-digit floats)."""
    out = []
    _canon(obj, out)
    return "".join(out)
