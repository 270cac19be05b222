"""Shared coordinate system, deterministic randomness and the instance envelope.

Conventions used everywhere: row-major grids with the origin at the top-left,
rows increasing downward, columns increasing rightward.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

FAMILIES = ("bridges", "flowfree", "galaxies", "undead", "pattern", "loopy")

TIERS = ("easy", "medium", "hard")

# Generator parameter string per (family, tier).  Dimensions precede the
# difficulty code; for loopy "t0" selects the square grid type.
ENGINE_PARAMS = {
    "bridges": {"easy": "5x5d0", "medium": "7x7d1", "hard": "10x10d2"},
    "galaxies": {"easy": "5x5dn", "medium": "7x7du", "hard": "10x10du"},
    "loopy": {"easy": "5x5t0de", "medium": "7x7t0dt", "hard": "10x10t0dh"},
    "pattern": {"easy": "5x5", "medium": "7x7", "hard": "10x10"},
    "undead": {"easy": "4x4de", "medium": "5x5dn", "hard": "7x7dt"},
    "flowfree": {"easy": "5x5-6x6", "medium": "7x7-8x8", "hard": "9x9-12x12"},
}


class Coord(NamedTuple):
    row: int
    col: int


class ParamsError(ValueError):
    """Engine parameter string does not parse for the family."""


class PayloadError(ValueError):
    """Instance payload violates the family's structural rules."""


class GenerationError(RuntimeError):
    """Generator retry budget exhausted without an acceptable instance."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification: accept, or reject with the first violated
    constraint class (reason) plus a human-readable detail."""

    ok: bool
    reason: str | None = None
    detail: str | None = None

    @staticmethod
    def accept() -> "Verdict":
        return Verdict(True)

    @staticmethod
    def reject(reason: str, detail: str = "") -> "Verdict":
        return Verdict(False, reason, detail)

    def __bool__(self) -> bool:
        return self.ok


def canonical_json(obj: Any) -> str:
    """Stable serialization: sorted keys, compact separators, no NaN."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def canonical_hash(family: str, width: int, height: int, payload: dict) -> str:
    """256-bit content digest of the board itself.

    Depends only on (family, dimensions, payload); generation seed, tier and
    field ordering never affect it, so dedup catches identical boards produced
    from different seeds.
    """
    blob = canonical_json(
        {"family": family, "width": width, "height": height, "payload": payload}
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def solution_hash(family: str, width: int, height: int, solution: dict) -> str:
    """Content digest of a solution, used by dataset dedup."""
    blob = canonical_json(
        {"family": family, "width": width, "height": height, "solution": solution}
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent deterministic random stream for (seed, label).

    Counter-based Philox keyed by SHA-256(seed, label), so the same pair
    yields the same stream in any process and distinct labels never share
    state.
    """
    digest = hashlib.sha256(f"{seed:#x}:{label}".encode("utf-8")).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class PuzzleInstance:
    """Family-tagged immutable problem statement."""

    family: str
    width: int
    height: int
    payload: dict
    tier: str = ""
    engine_params: str = ""
    seed: int = 0
    id: str = field(default="", compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PayloadError(f"unknown family {self.family!r}")
        if self.width < 1 or self.height < 1:
            raise PayloadError("non-positive board dimensions")
        if not self.id:
            object.__setattr__(
                self,
                "id",
                canonical_hash(self.family, self.width, self.height, self.payload),
            )

    def to_json(self) -> str:
        return canonical_json(
            {
                "family": self.family,
                "width": self.width,
                "height": self.height,
                "tier": self.tier,
                "engine_params": self.engine_params,
                "seed": self.seed,
                "payload": self.payload,
                "id": self.id,
            }
        )

    @staticmethod
    def from_json(text: str) -> "PuzzleInstance":
        raw = json.loads(text)
        inst = PuzzleInstance(
            family=raw["family"],
            width=raw["width"],
            height=raw["height"],
            payload=raw["payload"],
            tier=raw.get("tier", ""),
            engine_params=raw.get("engine_params", ""),
            seed=raw.get("seed", 0),
        )
        if raw.get("id") and raw["id"] != inst.id:
            raise PayloadError("instance id does not match payload hash")
        return inst


def parse_dims(params: str) -> tuple[int, int, str]:
    """Split 'WxH<suffix>' into (width, height, suffix)."""
    if "x" not in params:
        raise ParamsError(f"bad engine params {params!r}")
    w_part, rest = params.split("x", 1)
    digits = ""
    for ch in rest:
        if ch.isdigit():
            digits += ch
        else:
            break
    if not w_part.isdigit() or not digits:
        raise ParamsError(f"bad engine params {params!r}")
    return int(w_part), int(digits), rest[len(digits):]


def params_for(family: str, tier: str) -> str:
    try:
        return ENGINE_PARAMS[family][tier]
    except KeyError:
        raise ParamsError(f"no engine params for ({family}, {tier})") from None
