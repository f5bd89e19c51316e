"""Base class module"""

from __future__ import annotations

import math
from dataclasses import fields, is_dataclass
from typing import Any, ClassVar, Dict, List

import numpy as np


class BaseModel:
    """
    Lightweight base for the frozen value objects.
    - `to_dict` gives plain Python values: arrays become lists, infinite
      floats become the tokens "inf" / "-inf"
    - UNIT_SUFFIX_MAP: optional per-field suffix used by `describe`
    """

    UNIT_SUFFIX_MAP: ClassVar[Dict[str, str]] = {}

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for f in fields(self):  # type: ignore[arg-type]
            out[f.name] = self._serialize_value(getattr(self, f.name))
        return out

    def describe(self, prefix: str = "") -> List[str]:
        """
        Flat `name = value` lines, used for output metadata headers.

        Nested models are flattened as `prefix` + `field.` + their own names;
        list and array fields are left out.
        """
        lines: List[str] = []
        for name, value in self.to_dict().items():
            nested = getattr(self, name)
            if isinstance(nested, BaseModel):
                lines += nested.describe(f"{prefix}{name}.")
                continue
            if isinstance(value, (dict, list)):
                continue
            suffix = self.UNIT_SUFFIX_MAP.get(name, "")
            lines.append(f"{prefix}{name}{suffix} = {value}")
        return lines

    # --- internals ---
    def _serialize_value(self, value: Any) -> Any:
        if value is None:
            return None
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isinf(value):
                return "inf" if value > 0 else "-inf"
            return value
        if isinstance(value, np.integer):
            return int(value)
        if isinstance(value, np.ndarray):
            return [self._serialize_value(v) for v in value.tolist()]
        if isinstance(value, BaseModel):
            return value.to_dict()
        if is_dataclass(value):
            return {f.name: self._serialize_value(getattr(value, f.name)) for f in fields(value)}
        if isinstance(value, (list, tuple)):
            return [self._serialize_value(v) for v in value]
        if isinstance(value, dict):
            return {k: self._serialize_value(v) for k, v in value.items()}
        return value
