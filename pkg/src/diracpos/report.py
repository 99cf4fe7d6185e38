"""JSON report assembly; schema in docs/report_schema.md."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .checks import CheckResult

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class Report:
    command: str
    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    error: str | None = None

    def add(self, result: CheckResult) -> CheckResult:
        if any(c.name == result.name for c in self.checks):
            raise ValueError(f"check {result.name!r} scheduled twice")
        self.checks.append(result)
        return result

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_CONFIG
        return EXIT_FAIL if any(c.status == "fail" for c in self.checks) else EXIT_OK

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "checks": [asdict(c) for c in self.checks],
            "summary": self.summary(),
            "extra": self.extra,
            "error": self.error,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "tolist"):
        return x.tolist()
    if hasattr(x, "item"):
        return x.item()
    return str(x)
