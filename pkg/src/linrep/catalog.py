"""Named substitution definitions shipped with the package.

Every entry is a full definition mapping in the on-disk JSON shape, so the
catalog doubles as format documentation and as export source.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .substitution import Substitution, validate

CATALOG: dict[str, dict] = {
    "fibonacci": {
        "name": "fibonacci",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "ab", "b": "a"},
    },
    "thue-morse": {
        "name": "thue-morse",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "ab", "b": "ba"},
    },
    "period-doubling": {
        "name": "period-doubling",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "ab", "b": "aa"},
    },
    "remark1b": {
        "name": "remark1b",
        "alphabet": [
            {"symbol": "0", "value": 1.0},
            {"symbol": "1", "value": -1.0},
        ],
        "rules": {"0": "10", "1": "1"},
    },
    "remarkc": {
        "name": "remarkc",
        "alphabet": [
            {"symbol": "0", "value": 1.0},
            {"symbol": "1", "value": -1.0},
        ],
        "rules": {"0": "101", "1": "1"},
    },
    "minimal-nonprimitive": {
        "name": "minimal-nonprimitive",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "abaa", "b": "b"},
    },
    "minimal-nonprimitive-noaa": {
        "name": "minimal-nonprimitive-noaa",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "ababba", "b": "b"},
    },
    "stutter-separated": {
        "name": "stutter-separated",
        "alphabet": [
            {"symbol": "0", "value": 0.0},
            {"symbol": "1", "value": 1.0},
        ],
        "rules": {"0": "0100", "1": "1"},
    },
    "stutter-doubled": {
        "name": "stutter-doubled",
        "alphabet": [
            {"symbol": "0", "value": 0.0},
            {"symbol": "1", "value": 1.0},
        ],
        "rules": {"0": "00110", "1": "1"},
    },
    "free": {
        "name": "free",
        "alphabet": [
            {"symbol": "a", "value": 0.0},
        ],
        "rules": {"a": "aa"},
    },
    "periodic-ab": {
        "name": "periodic-ab",
        "alphabet": [
            {"symbol": "a", "value": 1.0},
            {"symbol": "b", "value": -1.0},
        ],
        "rules": {"a": "aba", "b": "b"},
    },
}


def names() -> list[str]:
    return sorted(CATALOG)


def definition(name: str) -> dict:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r} (have: {', '.join(names())})")
    return copy.deepcopy(CATALOG[name])


def load(name: str) -> Substitution:
    return validate(definition(name)).substitution


def export(directory: str | Path) -> list[Path]:
    """Write every catalog entry as a definition file; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name in names():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(definition(name), indent=2, sort_keys=True) + "\n")
        out.append(path)
    return out
