"""Data models module."""
from .dual import DualBuilder, DualData, TwistPerm
from .errors import ConditionError, InputError, NccwError, PathError, PreconditionError, SearchBudgetError
from .nccw import ClassifyInput, LayoutEntry, MultEntry, NccwData
from .paths import DyadicPath, StepKind, Token
from .tower import BlockKind, ConnectorSpec, Flavor, Toggle, Tower, TowerFamilySpec, TowerInput, TowerStage

__all__ = [
    'DualBuilder',
    'DualData',
    'TwistPerm',
    'ConditionError',
    'InputError',
    'NccwError',
    'PathError',
    'PreconditionError',
    'SearchBudgetError',
    'ClassifyInput',
    'LayoutEntry',
    'MultEntry',
    'NccwData',
    'DyadicPath',
    'StepKind',
    'Token',
    'BlockKind',
    'ConnectorSpec',
    'Flavor',
    'Toggle',
    'Tower',
    'TowerFamilySpec',
    'TowerInput',
    'TowerStage',
]
