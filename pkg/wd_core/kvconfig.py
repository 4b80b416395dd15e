"""
Key=value configuration files
Flat one-pair-per-line files used for run configs, model specs and manifests.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Sequence, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_key_value_file(path: PathLike) -> Dict[str, str]:
    """
    Parse a key=value file.

    Blank lines and lines starting with ``#`` are skipped. Keys are stripped and
    dashes are normalised to underscores so files may use flag spelling.

    Raises:
        ValueError: If a line has no ``=`` or repeats a key
    """
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if not key:
                raise ValueError(f"{path}:{line_no}: empty key")
            if key in values:
                raise ValueError(f"{path}:{line_no}: duplicate key {key!r}")
            values[key] = value.strip()
    logger.debug(f"Read {len(values)} keys from {path}")
    return values


def write_key_value_file(path: PathLike, values: Mapping[str, Any], header: Sequence[str] = ()) -> None:
    """Write ``values`` sorted by key, preceded by optional ``#`` header lines."""
    lines = [f"# {h}" for h in header]
    for key in sorted(values):
        lines.append(f"{key}={format_value(values[key])}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def parse_bool(text: str, key: str = "value") -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"{key} must be a boolean, got {text!r}")


def parse_float_list(text: str, key: str = "value") -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"{key} must be a comma separated list of numbers, got {text!r}") from exc


def parse_int_list(text: str, key: str = "value") -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"{key} must be a comma separated list of integers, got {text!r}") from exc
