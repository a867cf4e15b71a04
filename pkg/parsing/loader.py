"""Loader for NCCW and tower input documents (YAML or JSON)."""
import json
import re
from pathlib import Path
from typing import Any, Dict, List, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, ValidationError

from models.dual import DualData, TwistPerm
from models.errors import InputError
from models.nccw import ClassifyInput
from models.tower import TowerInput
from utils.logger import get_logger

logger = get_logger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

_CYCLE = re.compile(r"\(([^()]*)\)")


class InputLoader:
    """Parser for input documents."""

    @staticmethod
    def parse_text(text: str, suffix: str = "") -> Dict[str, Any]:
        """Parse a document, by suffix when it names a format, else JSON then YAML.

        Raises:
            InputError: the text is neither JSON nor YAML, or is not a mapping
        """
        suffix = suffix.lower()
        try:
            if suffix == ".json":
                data = json.loads(text)
            elif suffix in (".yaml", ".yml"):
                data = yaml.safe_load(text)
            else:
                try:
                    data = json.loads(text)
                except json.JSONDecodeError:
                    data = yaml.safe_load(text)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise InputError(f"Failed to parse input document: {e}") from e
        if not isinstance(data, dict):
            raise InputError(f"Input document must be a mapping, got {type(data).__name__}")
        return data

    @staticmethod
    def read(path: Union[str, Path]) -> Dict[str, Any]:
        """Read and parse a document from disk.

        Raises:
            InputError: missing file or unparseable content
        """
        path = Path(path)
        if not path.exists():
            raise InputError(f"Input file not found: {path}")
        logger.debug(f"Reading input document {path}")
        return InputLoader.parse_text(path.read_text(encoding="utf-8"), path.suffix)

    @staticmethod
    def validate(data: Dict[str, Any], model: Type[ModelT]) -> ModelT:
        """Validate a parsed document against a schema, reporting schema errors as InputError."""
        try:
            return model.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise InputError(f"Invalid {model.__name__} at '{location}': {first['msg']}") from e


def load_classify_input(path: Union[str, Path]) -> ClassifyInput:
    """Load a classification document; a bare NCCW data mapping is accepted too."""
    data = InputLoader.read(path)
    if "data" not in data:
        data = {"data": data}
    return InputLoader.validate(data, ClassifyInput)


def load_tower_input(path: Union[str, Path]) -> TowerInput:
    return InputLoader.validate(InputLoader.read(path), TowerInput)


def parse_cycles(text: str) -> List[List[int]]:
    """Parse cycle notation such as ``"(0 1)(2 3 4)"`` into index lists.

    Raises:
        InputError: characters outside parenthesised integer lists
    """
    text = text.strip()
    if not text or text in ("id", "()"):
        return []
    if _CYCLE.sub("", text).strip():
        raise InputError(f"Malformed cycle notation: '{text}'")
    cycles = []
    for body in _CYCLE.findall(text):
        try:
            cycle = [int(token) for token in body.replace(",", " ").split()]
        except ValueError as e:
            raise InputError(f"Malformed cycle '({body})': indices must be integers") from e
        if cycle:
            cycles.append(cycle)
    return cycles


def twist_from_cycles(dual: DualData, spec: Dict[str, str]) -> TwistPerm:
    """TwistPerm from ``{p: "(0 1)..."}`` with indices local to each Y^p."""
    return TwistPerm.from_cycles(dual, {p: parse_cycles(text) for p, text in spec.items()})
