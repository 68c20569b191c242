"""Instance and strategy files (JSON)."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import InputError
from .instance import Instance, MixedStrategy, Placement

_INSTANCE_KEYS = {"locations", "components", "monitoring_sets", "budget"}


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    return {
        "locations": list(instance.locations),
        "components": [
            {"id": u, "security_level": instance.security_levels[u]}
            for u in instance.components
        ],
        "monitoring_sets": {
            x: sorted(instance.monitoring_sets[x]) for x in instance.locations
        },
        "budget": instance.budget,
    }


def instance_from_dict(data: dict[str, Any]) -> Instance:
    if not isinstance(data, dict):
        raise InputError("instance document must be a JSON object")
    unknown = set(data) - _INSTANCE_KEYS
    if unknown:
        raise InputError(f"unknown instance key {sorted(unknown)[0]!r}")
    for key in ("locations", "components", "monitoring_sets"):
        if key not in data:
            raise InputError(f"missing instance key {key!r}")
    locations = data["locations"]
    if not isinstance(locations, list) or \
            not all(isinstance(x, str) for x in locations):
        raise InputError("key 'locations' must list location id strings")
    components, levels = [], {}
    for entry in data["components"]:
        if not isinstance(entry, dict) or set(entry) != {"id", "security_level"}:
            raise InputError(
                "key 'components' entries need exactly 'id' and 'security_level'")
        cid = entry["id"]
        if not isinstance(cid, str):
            raise InputError("component 'id' must be a string")
        if cid in levels:
            raise InputError(f"duplicate component id {cid!r}")
        level = entry["security_level"]
        if not isinstance(level, (int, float)) or isinstance(level, bool):
            raise InputError(f"security_level of {cid!r} must be a number")
        components.append(cid)
        levels[cid] = float(level)
    sets = data["monitoring_sets"]
    if not isinstance(sets, dict):
        raise InputError("key 'monitoring_sets' must map location id to list")
    for x, members in sets.items():
        if not isinstance(members, list) or \
                not all(isinstance(u, str) for u in members):
            raise InputError(f"monitoring set of {x!r} must list component ids")
    budget = data.get("budget", 1)
    if not isinstance(budget, int) or isinstance(budget, bool):
        raise InputError("key 'budget' must be an integer")
    return Instance(locations, components, sets, levels, budget)


def bundled_example() -> Instance:
    """The seven-component demonstration instance shipped with the package."""
    return load_instance(Path(__file__).parent / "data" / "ex1.json")


def load_instance(path: str | Path) -> Instance:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    try:
        return instance_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(instance_to_dict(instance), indent=2, sort_keys=True) + "\n")


def strategy_to_dict(strategy: MixedStrategy) -> dict[str, Any]:
    return {
        "atoms": [
            {"locations": list(p.locations), "probability": w}
            for p, w in strategy.atoms
        ]
    }


def strategy_from_dict(data: dict[str, Any]) -> MixedStrategy:
    if not isinstance(data, dict) or "atoms" not in data:
        raise InputError("strategy document needs an 'atoms' list")
    atoms = []
    for entry in data["atoms"]:
        if not isinstance(entry, dict) or \
                set(entry) != {"locations", "probability"}:
            raise InputError(
                "strategy atoms need exactly 'locations' and 'probability'")
        atoms.append((Placement.of(entry["locations"]),
                      float(entry["probability"])))
    return MixedStrategy.of(atoms)


def load_strategy(path: str | Path) -> MixedStrategy:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if isinstance(data, dict) and "strategy" in data:
        data = data["strategy"]  # accept full solve reports
    try:
        return strategy_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc
