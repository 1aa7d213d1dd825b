from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of an exhaustive check: a name, violations found, and side data."""

    name: str
    violations: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, msg: str) -> None:
        self.violations.append(msg)

    def require(self, cond: bool, msg: str) -> bool:
        if not cond:
            self.fail(msg)
        return cond

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "violations": self.violations[:20], "data": self.data}
