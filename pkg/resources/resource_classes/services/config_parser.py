"""Parser for `section.key = value` run configurations."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from resource_classes import ConfigParseError
from ..data_models.config import PRESETS, SECTIONS, RunConfig

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = ("energy_kev",)


class ConfigParser:
    """
    Turns configuration text into a validated `RunConfig`.

    Resolution order: model defaults, then the preset, then keys from the
    text. A preset passed to `parse_config` (the command-line flag) wins over
    the text for the keys a preset controls.
    """

    def __init__(self) -> None:
        self._lines: Dict[Tuple[str, ...], int] = {}

    def parse_file(self, path: str | Path, preset: Optional[str] = None) -> RunConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigParseError(f"cannot read {path}: {e.strerror}") from e
        return self.parse_config(text, preset)

    def parse_config(self, text: str, preset: Optional[str] = None) -> RunConfig:
        """
        Parse and validate configuration text.

        :param text:
            Line oriented `section.key = value` pairs, `#` starts a comment.
        :param preset:
            Optional preset name (`paper` or `test`) overriding the file.
        :returns:
            The fully resolved configuration.
        :rtype: RunConfig
        """
        values = self._read_pairs(text)
        if "energy_kev" not in values:
            raise ConfigParseError("energy_kev is required")

        name = preset or values.get("grid", {}).get("preset")
        if name is not None:
            if name not in PRESETS:
                raise ConfigParseError(
                    f"unknown preset '{name}' (expected one of {', '.join(PRESETS)})",
                    self._lines.get(("grid", "preset")),
                )
            values = self._apply_preset(values, name, forced=preset is not None)

        try:
            config = RunConfig.model_validate(values)
        except ValidationError as e:
            error = e.errors()[0]
            location = tuple(str(part) for part in error["loc"])
            raise ConfigParseError(
                f"{'.'.join(location)}: {error['msg']}", self._line_for(location)
            ) from None
        logger.debug("Parsed configuration %s", config.digest())
        return config

    def _read_pairs(self, text: str) -> Dict[str, Any]:
        self._lines = {}
        values: Dict[str, Any] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigParseError(f"expected 'key = value', got '{line}'", number)
            key, value = (part.strip() for part in line.split("=", 1))
            if not key or not value:
                raise ConfigParseError(f"expected 'key = value', got '{line}'", number)
            path = tuple(key.split("."))
            if path in self._lines:
                raise ConfigParseError(
                    f"'{key}' already set on line {self._lines[path]}", number
                )
            if len(path) == 1 and key in TOP_LEVEL_KEYS:
                values[key] = value
            elif len(path) == 2 and path[0] in SECTIONS:
                values.setdefault(path[0], {})[path[1]] = value
            else:
                raise ConfigParseError(f"unknown key '{key}'", number)
            self._lines[path] = number
        return values

    @staticmethod
    def _apply_preset(values: Dict[str, Any], name: str, forced: bool) -> Dict[str, Any]:
        resolved: Dict[str, Any] = {key: value for key, value in values.items()}
        for section, preset_keys in PRESETS[name].items():
            block = dict(values.get(section, {}))
            for key, value in preset_keys.items():
                if forced or key not in block:
                    block[key] = value
            resolved[section] = block
        grid = dict(resolved.get("grid", {}))
        grid["preset"] = name
        resolved["grid"] = grid
        return resolved

    def _line_for(self, location: Tuple[str, ...]) -> Optional[int]:
        for end in range(len(location), 0, -1):
            if location[:end] in self._lines:
                return self._lines[location[:end]]
        section = location[:1]
        in_section = [n for path, n in self._lines.items() if path[:1] == section]
        return max(in_section) if in_section else None
