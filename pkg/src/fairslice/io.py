"""JSON instance and assignment files.

Instance::

    {"players": [{"kind": "two_piece", "breakpoints": [0, 0.4, 1], "labels": ["R", "L"]},
                 {"kind": "additive_pwc", "mode": "hungry",
                  "blocks": [{"start": 0, "end": 1, "density": 1}]}],
     "group_sizes": [1, 1]}

Assignment::

    {"partition": [0.4, 0.6], "groups": [[0], [1]]}

Numbers are written with ``repr`` precision (17 significant digits).  A
two-piece player may also carry ``"breakpoints_exact"``, rational strings
such as ``"3/8"``, which take precedence over ``"breakpoints"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from fairslice.core import (
    AdditivePiecewiseConstant, AdditivePlayer, Assignment, TwoPiecePreference, validate_partition,
)


class InstanceError(ValueError):
    """Malformed instance or assignment file."""


@dataclass
class Instance:
    players: list
    group_sizes: Optional[tuple] = None

    @property
    def n(self) -> int:
        return len(self.players)

    def to_json(self) -> dict:
        out = {"players": [p.to_json() for p in self.players]}
        if self.group_sizes is not None:
            out["group_sizes"] = list(self.group_sizes)
        return out


def parse_player(obj: dict):
    try:
        kind = obj["kind"]
        if kind == "two_piece":
            bps = obj.get("breakpoints_exact")
            bps = [Fraction(b) for b in bps] if bps is not None else obj["breakpoints"]
            return TwoPiecePreference(tuple(bps), tuple(obj["labels"]))
        if kind == "additive_pwc":
            blocks = tuple((b["start"], b["end"], b["density"]) for b in obj["blocks"])
            return AdditivePlayer(AdditivePiecewiseConstant(blocks), obj.get("mode", "hungry"))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"bad player {obj!r}: {exc}") from exc
    raise InstanceError(f"unknown player kind {kind!r}")


def parse_instance(obj: dict) -> Instance:
    if not isinstance(obj, dict) or not isinstance(obj.get("players"), list) or not obj["players"]:
        raise InstanceError("an instance needs a non-empty 'players' list")
    players = [parse_player(p) for p in obj["players"]]
    sizes = obj.get("group_sizes")
    if sizes is not None:
        sizes = tuple(int(k) for k in sizes)
        if sum(sizes) != len(players) or any(k <= 0 for k in sizes):
            raise InstanceError(f"group sizes {sizes} do not add up to {len(players)} players")
    return Instance(players, sizes)


def parse_assignment(obj: dict) -> Assignment:
    try:
        partition = validate_partition(obj["partition"])
        return Assignment(partition, tuple(frozenset(g) for g in obj["groups"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad assignment: {exc}") from exc


def assignment_to_json(a: Assignment) -> dict:
    return {"partition": [float(v) for v in a.partition.lengths], "groups": [sorted(g) for g in a.groups]}


def _read(source: Union[str, Path]) -> dict:
    try:
        return json.loads(Path(source).read_text())
    except OSError as exc:
        raise InstanceError(f"cannot read {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{source} is not valid JSON: {exc}") from exc


def load_instance(source: Union[str, Path]) -> Instance:
    return parse_instance(_read(source))


def load_assignment(source: Union[str, Path]) -> Assignment:
    return parse_assignment(_read(source))


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
