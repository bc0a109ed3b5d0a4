"""TOML configuration files loaded into the pydantic config models."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from spillcheck.models.profiles import PropensityDesign

ModelT = TypeVar("ModelT", bound=BaseModel)

_DESIGN_PRESETS = {
    "simulation": PropensityDesign.simulation,
    "application": PropensityDesign.application,
}


def _read_toml(path: str | Path) -> dict:
    filepath = Path(path)
    if not filepath.exists():
        raise FileNotFoundError(f"Config file not found: {filepath}")
    try:
        with filepath.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ValueError(f"{filepath}: invalid TOML: {e}") from e


def load_config(path: str | Path, model: type[ModelT]) -> ModelT:
    """Parse a TOML file and validate it as `model`.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the file is not TOML or fails validation; the
            message names the file and every field error.
    """
    data = _read_toml(path)
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"{path}: invalid {model.__name__}:\n{e}") from e


def load_design(source: str | Path) -> PropensityDesign:
    """A preset name ("simulation", "application") or a TOML design file.

    A file holds either `preset = "<name>"` (optionally with `indirect`) or
    an explicit `[[terms]]` list.
    """
    key = str(source).lower()
    if key in _DESIGN_PRESETS:
        return _DESIGN_PRESETS[key]()
    if not Path(source).suffix:
        raise KeyError(
            f"Unknown propensity design '{source}'. "
            f"Available: {', '.join(_DESIGN_PRESETS)} or a .toml file"
        )

    data = _read_toml(source)
    preset = data.pop("preset", None)
    if preset is not None:
        if preset not in _DESIGN_PRESETS:
            raise ValueError(
                f"{source}: unknown preset '{preset}'. Available: {', '.join(_DESIGN_PRESETS)}"
            )
        if "terms" in data:
            raise ValueError(f"{source}: give either a preset or terms, not both")
        base = _DESIGN_PRESETS[preset]()
        data = {**base.model_dump(), **data}
    try:
        return PropensityDesign.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"{source}: invalid PropensityDesign:\n{e}") from e
