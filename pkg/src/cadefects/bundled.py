"""Access to the bundled example cases (subshift, rule, configuration)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .ca import rule_from_json
from .subshift import spec_from_json
from .symbolic import config_from_json

KINDS = ("subshifts", "rules", "configs")


def data_path(kind: str, name: str):
    if kind not in KINDS:
        raise ValueError(f"unknown data kind {kind!r}")
    return resources.files("cadefects") / "data" / kind / f"{name}.json"


@lru_cache(maxsize=None)
def _read(kind: str, name: str) -> str:
    return data_path(kind, name).read_text(encoding="utf-8")


def load_json(kind: str, name: str) -> dict:
    return json.loads(_read(kind, name))


def names(kind: str) -> list[str]:
    root = resources.files("cadefects") / "data" / kind
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def subshift(name: str):
    return spec_from_json(load_json("subshifts", name))


def rule(name: str | None):
    return None if name is None else rule_from_json(load_json("rules", name))


def config(name: str):
    return config_from_json(load_json("configs", name))


@dataclass(frozen=True)
class Case:
    name: str
    subshift: str
    rule: str | None
    config: str
    expected: dict

    def load(self):
        """Return ``(spec, ca, config)``."""
        return subshift(self.subshift), rule(self.rule), config(self.config)


def _index() -> dict:
    return json.loads((resources.files("cadefects") / "data" / "cases.json").read_text("utf-8"))


def cases() -> list[Case]:
    """Classified defects with their expected reports."""
    return [Case(c["name"], c["subshift"], c["rule"], c["config"], c["expected"])
            for c in _index()["cases"]]


def tori() -> list[Case]:
    """Seeded cyclic configurations that produce collisions."""
    return [Case(c["name"], c["subshift"], c["rule"], c["config"], {}) for c in _index()["tori"]]
