"""
Registry of tower condition checkers.

This module provides a registry system that makes it easy to add new
conditions and to run the ones applicable to a tower flavor.
"""
from typing import Dict, List, Optional, Type

from utils.logger import get_logger
from .base_validator import BaseConditionChecker

logger = get_logger(__name__)


class ConditionRegistry:
    """
    Registry for condition checkers.

    Keeps registration order, which is also the order reports list results in.
    """

    def __init__(self):
        """Initialize the condition registry."""
        self._checkers: Dict[str, Type[BaseConditionChecker]] = {}

    def register(self, name: str, checker_class: Type[BaseConditionChecker]) -> None:
        """
        Register a checker for a condition.

        Args:
            name: Condition name (e.g. "nlc1")
            checker_class: Checker class (must inherit from BaseConditionChecker)

        Raises:
            ValueError: If checker_class doesn't inherit from BaseConditionChecker
        """
        if not issubclass(checker_class, BaseConditionChecker):
            raise ValueError(
                f"Checker class {checker_class.__name__} must inherit from BaseConditionChecker"
            )
        self._checkers[name] = checker_class
        logger.debug(f"Registered condition checker: {name}")

    def get(self, name: str) -> Optional[BaseConditionChecker]:
        """
        Get a checker instance for a condition.

        Args:
            name: Condition name

        Returns:
            Checker instance or None if not found
        """
        checker_class = self._checkers.get(name)
        if checker_class:
            return checker_class()
        return None

    def is_registered(self, name: str) -> bool:
        return name in self._checkers

    def list_registered(self) -> List[str]:
        """
        List all registered condition names.

        Returns:
            Condition names in registration order
        """
        return list(self._checkers.keys())


# Global condition registry instance
_global_registry = ConditionRegistry()


def register_condition(name: str, checker_class: Type[BaseConditionChecker]) -> None:
    """
    Register a checker in the global registry.

    Example:
        >>> class AlwaysHolds(BaseConditionChecker):
        >>>     name = "always"
        >>>     def check(self, ctx):
        >>>         return self.ok()
        >>>
        >>> register_condition("always", AlwaysHolds)
    """
    _global_registry.register(name, checker_class)


def get_condition(name: str) -> Optional[BaseConditionChecker]:
    return _global_registry.get(name)


def get_registry() -> ConditionRegistry:
    """
    Get the global condition registry instance.

    Returns:
        The global ConditionRegistry instance
    """
    return _global_registry
