"""Input document loading."""
from .loader import InputLoader, load_classify_input, load_tower_input, parse_cycles, twist_from_cycles

__all__ = [
    "InputLoader",
    "load_classify_input",
    "load_tower_input",
    "parse_cycles",
    "twist_from_cycles",
]
