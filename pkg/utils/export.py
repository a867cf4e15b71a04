"""Serialization of results, graphs and stages for the command-line outputs."""
import dataclasses
import json
import os
import tempfile
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
from pydantic import BaseModel

from models.paths import DyadicPath
from models.topgraph import TopGraph
from models.tower import TowerStage


def _key(value: Any) -> str:
    return value if isinstance(value, str) else repr(value)


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types for dataclasses, models, enums, fractions, tuples and numpy values."""
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(mode="json"))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted((to_jsonable(v) for v in obj), key=repr)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (str, int, float, bool)):
        return obj
    return repr(obj)


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path: Union[str, Path], text: str) -> Path:
    """Write text next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _dot_id(value: Any) -> str:
    return json.dumps(_key(value))


def topgraph_to_dot(graph: TopGraph, name: str = "spectrum") -> str:
    """Graphviz text; free ends are drawn as point-shaped ray nodes."""
    lines = [f"graph {json.dumps(name)} {{"]
    for vid, vertex in graph.vertices.items():
        shape = "box" if vertex.kind.value == "zcell" else "ellipse"
        lines.append(f"  {_dot_id(vid)} [shape={shape}];")
    for index, edge in enumerate(graph.edges):
        ends = []
        for side, end in enumerate((edge.tail, edge.head)):
            if end is None:
                ray = f"ray{index}_{side}"
                lines.append(f"  {json.dumps(ray)} [shape=point];")
                ends.append(json.dumps(ray))
            else:
                ends.append(_dot_id(end))
        lines.append(f"  {ends[0]} -- {ends[1]} [label={_dot_id(edge.label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def topgraph_to_json(graph: TopGraph) -> Dict[str, Any]:
    return {
        "vertices": [{"id": _key(v.vid), "kind": v.kind.value, "block": v.block} for v in graph.vertices.values()],
        "edges": [{"label": _key(e.label), "tail": None if e.tail is None else _key(e.tail),
                   "head": None if e.head is None else _key(e.head), "block": e.block} for e in graph.edges],
    }


def stage_snapshot(stage: TowerStage) -> Dict[str, Any]:
    """Counts and dual maps of one stage."""
    dual = stage.dual
    return {
        "level": stage.level,
        "counts": dual.counts(),
        "x_counts": {i: len(block) for i, block in dual.x_blocks.items()},
        "b0": {_key(y): _key(x) for y, x in dual.b0.items()},
        "b1": {_key(y): _key(x) for y, x in dual.b1.items()},
    }


def path_tokens(path: DyadicPath) -> List[Dict[str, str]]:
    return [{"edge": _key(t.edge), "start": str(t.start), "end": str(t.end)} for t in path.tokens]
