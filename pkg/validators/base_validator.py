"""
Base checker interface for tower conditions.

This module provides the result types and the abstract base class that all
condition checkers must implement.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from models.tower import ConnectorSpec, Flavor, TowerFamilySpec, TowerStage
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class ConditionResult:
    """
    Result of checking one condition on a pair of consecutive stages.

    Attributes:
        name: Condition name (e.g. 'nlc1', 'phiCfp')
        passed: Whether the condition holds
        message: Human-readable explanation of a failure
        witness: Concrete violating tuple when the condition fails
        required: Whether a failure should stop the tower (structural or toggled)
    """
    name: str
    passed: bool
    message: str = ""
    witness: Optional[Any] = None
    required: bool = False

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class ConditionReport:
    """All condition results for the step from ``level`` to ``level + 1``."""
    level: int
    results: List[ConditionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def failures(self, required_only: bool = False) -> List[ConditionResult]:
        return [r for r in self.results if not r.passed and (r.required or not required_only)]

    def first_failure(self, required_only: bool = False) -> Optional[ConditionResult]:
        failures = self.failures(required_only)
        return failures[0] if failures else None

    def get(self, name: str) -> Optional[ConditionResult]:
        return next((r for r in self.results if r.name == name), None)

    def summary(self) -> Dict[str, str]:
        return {r.name: r.status for r in self.results}


@dataclass
class CheckContext:
    """The two stages and the specs that produced the upper one."""
    lower: TowerStage
    upper: TowerStage
    spec: ConnectorSpec
    family: TowerFamilySpec

    @property
    def flavor(self) -> Flavor:
        return self.family.construction

    @property
    def grave_source(self) -> Optional[str]:
        return self.lower.meta.grave if self.family.stably_projectionless else None

    @property
    def sources(self) -> List[str]:
        return list(self.lower.dual.y_blocks)


class BaseConditionChecker(ABC):
    """
    Base interface for a single tower condition.

    Subclasses set ``name``, the flavors they apply to and whether they are
    structural (always required) rather than opt-in via a family toggle.
    """

    name: str = ""
    flavors: Tuple[Flavor, ...] = (Flavor.PATH, Flavor.CONN)
    structural: bool = False

    def applies(self, ctx: CheckContext) -> bool:
        return ctx.flavor in self.flavors

    def is_required(self, ctx: CheckContext) -> bool:
        return self.structural or any(t.value == self.name for t in ctx.family.toggles)

    @abstractmethod
    def check(self, ctx: CheckContext) -> ConditionResult:
        """
        Check the condition on the stage pair.

        Args:
            ctx: Stages and specs

        Returns:
            ConditionResult with a witness when failing
        """

    def ok(self) -> ConditionResult:
        return ConditionResult(name=self.name, passed=True)

    def fail(self, message: str, witness: Any = None) -> ConditionResult:
        logger.debug(f"Condition {self.name} failed: {message}")
        return ConditionResult(name=self.name, passed=False, message=message, witness=witness)
