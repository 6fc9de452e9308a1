import json
from typing import Any, Dict, List, Sequence

import numpy as np


class VilenkinError(Exception):
    """Domain error carrying a stable kind tag and a human readable detail"""

    exit_code = 1

    def __init__(self, kind: str, detail: str):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


def require(condition: bool, kind: str, detail: str):
    """Raise VilenkinError(kind, detail) unless condition holds"""
    if not condition:
        raise VilenkinError(kind, detail)


def serialize_complex(values: np.ndarray) -> List[List[float]]:
    """Convert a complex array into [[re, im], ...] pairs for JSON"""
    arr = np.asarray(values, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in arr]


def deserialize_complex(pairs: Sequence[Any]) -> np.ndarray:
    """Convert [[re, im], ...] pairs (or plain reals) back into a complex array"""
    out = np.empty(len(pairs), dtype=complex)
    for i, item in enumerate(pairs):
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise VilenkinError("parse-error", f"value {i} must be a [re, im] pair")
            out[i] = complex(float(item[0]), float(item[1]))
        else:
            out[i] = complex(float(item))
    return out


def load_json_text(text: str, source: str = "<input>") -> Dict[str, Any]:
    """Parse JSON and turn decoder errors into parse-error with line context"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        lines = text.splitlines()
        context = lines[e.lineno - 1] if 0 < e.lineno <= len(lines) else ""
        raise VilenkinError(
            "parse-error",
            f"{source}:{e.lineno}:{e.colno}: {e.msg} near {context.strip()[:60]!r}",
        )
    if not isinstance(data, dict):
        raise VilenkinError("parse-error", f"{source}: top-level JSON value must be an object")
    return data
