from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import SizeLimitError


@dataclass(frozen=True)
class Violation:
    axiom: str
    cells: tuple

    def __str__(self) -> str:
        return f"{self.axiom}: {self.cells!r}"


@dataclass
class CoherenceReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, axiom: str, *cells: Any) -> None:
        self.violations.append(Violation(axiom, tuple(cells)))

    def extend(self, other: "CoherenceReport", prefix: str = "") -> None:
        for v in other.violations:
            self.violations.append(Violation(prefix + v.axiom, v.cells))

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def __repr__(self) -> str:
        if self.ok:
            return "CoherenceReport(ok)"
        head = ", ".join(str(v) for v in self.violations[:3])
        more = len(self.violations) - 3
        return f"CoherenceReport({head}{f', +{more} more' if more > 0 else ''})"


@dataclass
class Verdict:
    """Boolean answer of a decision procedure plus its evidence."""

    holds: bool
    witness: Any = None
    counterexample: Any = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class Bounds:
    max_obs: int = 64
    max_one_cells: int = 512
    max_two_cells: int = 4096

    def check(self, n_obs: int, n_one: int, n_two: int, what: str = "input") -> None:
        if n_obs > self.max_obs or n_one > self.max_one_cells or n_two > self.max_two_cells:
            raise SizeLimitError(
                f"{what} has {n_obs} 0-cells, {n_one} 1-cells, {n_two} 2-cells; "
                f"bounds are {self.max_obs}/{self.max_one_cells}/{self.max_two_cells}"
            )


DEFAULT_BOUNDS = Bounds()
