"""
Tower condition checkers.

This module provides:
- Base classes and result types for condition checkers
- A registry for looking checkers up by condition name
- check_conditions, running the checkers that apply to a tower flavor
"""
from typing import List, Optional

from models.tower import ConnectorSpec, TowerFamilySpec, TowerStage
from utils.metrics import record_condition_failure
from .base_validator import BaseConditionChecker, CheckContext, ConditionReport, ConditionResult
from .validator_registry import (
    ConditionRegistry,
    register_condition,
    get_condition,
    get_registry
)

# Auto-register built-in checkers
try:
    from .conditions import ALL_CHECKERS
    for _checker in ALL_CHECKERS:
        register_condition(_checker.name, _checker)
except ImportError:
    # Checkers not available, skip registration
    pass


def check_conditions(lower: TowerStage, upper: TowerStage, spec: ConnectorSpec, family: TowerFamilySpec,
                     names: Optional[List[str]] = None) -> ConditionReport:
    """
    Check tower conditions on a pair of consecutive stages.

    Args:
        lower: Stage n
        upper: Stage n+1, built from lower with ``spec``
        spec: Connector block table
        family: Family options (flavor, toggles, grave flavor)
        names: Restrict to these conditions; all applicable ones when omitted

    Returns:
        ConditionReport listing results in registration order
    """
    ctx = CheckContext(lower=lower, upper=upper, spec=spec, family=family)
    registry = get_registry()
    report = ConditionReport(level=lower.level)
    for name in registry.list_registered():
        if names is not None and name not in names:
            continue
        checker = registry.get(name)
        if not checker.applies(ctx):
            continue
        result = checker.check(ctx)
        result.required = names is not None or checker.is_required(ctx)
        if not result.passed:
            record_condition_failure(name)
        report.results.append(result)
    return report


__all__ = [
    "BaseConditionChecker",
    "CheckContext",
    "ConditionReport",
    "ConditionResult",
    "ConditionRegistry",
    "register_condition",
    "get_condition",
    "get_registry",
    "check_conditions",
]
