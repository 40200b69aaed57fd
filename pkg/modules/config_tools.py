from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, overload

if TYPE_CHECKING:
    from typing import Self

CONFIG_JSON_POSSIBLE = ["config.json", "config.jsonc"]
CONFIG_JSON = None

for filename in CONFIG_JSON_POSSIBLE:
    path = Path(__file__).parent.parent / filename
    if path.exists():
        CONFIG_JSON = path
        break


def get_config_path() -> Path:
    if CONFIG_JSON is None:
        msg = "No config file found. Please create a config.json file."
        raise FileNotFoundError(msg)
    return CONFIG_JSON


def get_raw_config() -> str:
    with get_config_path().open(encoding="utf-8") as f:
        return f.read()


def _strip_jsonc_comments(raw: str) -> str:
    """Drop `//` comments that sit outside string literals, whole-line or trailing."""

    lines = []
    for line in raw.splitlines():
        in_string = escaped = False
        cut = len(line)
        for i, char in enumerate(line):
            if in_string:
                if escaped:
                    escaped = False
                elif char == "\\":
                    escaped = True
                elif char == '"':
                    in_string = False
            elif char == '"':
                in_string = True
            elif line.startswith("//", i):
                cut = i
                break
        if cut == len(line):
            lines.append(line)
        elif kept := line[:cut].rstrip():
            lines.append(kept)
    return "\n".join(lines)


def get_parsed_config() -> dict:
    raw = _strip_jsonc_comments(get_raw_config())
    data = json.loads(raw)
    if not isinstance(data, dict):
        msg = "Config root must be a JSON object."
        raise TypeError(msg)
    return data


@dataclass
class BudgetConfig:
    enumeration_nodes: int = 2_000_000
    weyl_group_cap: int = 1_000_000
    point_count_cells: int = 60_000_000

    def to_dict(self) -> dict[str, int]:
        return {
            "enumeration_nodes": self.enumeration_nodes,
            "weyl_group_cap": self.weyl_group_cap,
            "point_count_cells": self.point_count_cells,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        budgets = cls(
            enumeration_nodes=Config.to_int(data.get("enumeration_nodes", 2_000_000)),
            weyl_group_cap=Config.to_int(data.get("weyl_group_cap", 1_000_000)),
            point_count_cells=Config.to_int(data.get("point_count_cells", 60_000_000)),
        )

        for key, value in budgets.to_dict().items():
            if value <= 0:
                msg = f"Budget '{key}' must be a positive integer."
                raise ValueError(msg)

        return budgets


@dataclass
class LabConfig:
    mp_dps: int = 80
    cone_constant: float = 0.5
    flag_threshold: float = 3.0
    gap_constant: float = 0.5
    set_search_radius: float = 4.0
    max_flow_time: float = 60.0

    def to_dict(self) -> dict[str, int | float]:
        return {
            "mp_dps": self.mp_dps,
            "cone_constant": self.cone_constant,
            "flag_threshold": self.flag_threshold,
            "gap_constant": self.gap_constant,
            "set_search_radius": self.set_search_radius,
            "max_flow_time": self.max_flow_time,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        lab = cls(
            mp_dps=Config.to_int(data.get("mp_dps", 80)),
            cone_constant=float(data.get("cone_constant", 0.5)),
            flag_threshold=float(data.get("flag_threshold", 3.0)),
            gap_constant=float(data.get("gap_constant", 0.5)),
            set_search_radius=float(data.get("set_search_radius", 4.0)),
            max_flow_time=float(data.get("max_flow_time", 60.0)),
        )

        min_dps = 20
        if lab.mp_dps < min_dps:
            msg = f"'mp_dps' must be at least {min_dps} digits."
            raise ValueError(msg)
        if not 0 < lab.cone_constant <= 1:
            msg = "'cone_constant' must lie in (0, 1]."
            raise ValueError(msg)

        return lab


@dataclass
class Config:
    debug_mode: bool = False
    file_logging: bool = False

    seed: int = 0
    threads: int = 1

    budgets: BudgetConfig = field(default_factory=BudgetConfig)
    lab: LabConfig = field(default_factory=LabConfig)

    config_version: str = "1.0.0"

    @overload
    @staticmethod
    def to_int(val: str | int) -> int: ...

    @overload
    @staticmethod
    def to_int(val: str | int | None) -> int | None: ...

    @staticmethod
    def to_int(val):
        if val is None or str(val).lower().strip() == "none":
            return None
        if isinstance(val, str):
            return int(val.replace("_", ""))
        if isinstance(val, int):
            return val

        try:
            return int(val)
        except ValueError:
            return None

    def to_dict(self) -> dict:
        return {
            "debug_mode": self.debug_mode,
            "file_logging": self.file_logging,
            "seed": self.seed,
            "threads": self.threads,
            "budgets": self.budgets.to_dict(),
            "lab": self.lab.to_dict(),
            "config_version": self.config_version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Self:
        data = data.copy()
        data.pop("$schema", None)

        budgets_data = data.pop("budgets", {}) or {}
        lab_data = data.pop("lab", {}) or {}
        config_version = str(data.pop("config_version", "1.0.0")).strip() or "1.0.0"

        for key in ["seed", "threads"]:
            if key in data:
                data[key] = Config.to_int(data[key])

        config = cls(
            budgets=BudgetConfig.from_dict(budgets_data),
            lab=LabConfig.from_dict(lab_data),
            config_version=config_version,
            **data,
        )

        if config.threads < 1:
            msg = "'threads' must be at least 1."
            raise ValueError(msg)

        return config

    @staticmethod
    def from_json(json_str: str) -> "Config":
        data = json.loads(json_str)
        return Config.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=4)

    def save(self, path: Path | None = None) -> None:
        if path is None:
            path = get_config_path()

        with path.open("w", encoding="utf-8") as f:
            f.write(self.to_json())

    @staticmethod
    def load() -> "Config":
        # every setting has a default, so a missing config file is fine
        if CONFIG_JSON is None:
            return Config()

        return Config.from_dict(get_parsed_config())
