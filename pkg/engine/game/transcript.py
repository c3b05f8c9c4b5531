"""
Match transcripts as JSON lines: one header line, then one line per move.

    {"header": {"seed": ..., "k": ..., "q": ..., "agents": {...}, "structures": {"A": ..., "B": ...}, ...}}
    {"round": 0, "actor": "S", "move": {...}, "state_hash": "..."}
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from engine.errors import TranscriptError


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class BudgetModel(BaseModel):
    max_nodes: int = Field(..., ge=1)
    max_pairs: int = Field(..., ge=1)


class TranscriptHeader(BaseModel):
    """Everything replay needs to rebuild the starting position."""
    model_config = ConfigDict(frozen=True)

    seed: int | None = Field(None, description="Seed of the match generator (absent for hand-played games)")
    k: int = Field(..., ge=0, description="Step budget")
    q: int = Field(..., ge=0, description="Degree budget")
    agents: dict[str, str] = Field(default_factory=dict, description="spoiler / duplicator agent names")
    structures: dict[str, dict[str, Any]] = Field(..., description="Structure JSON for A and B")
    f0: list[tuple[str, str]] = Field(default_factory=list, description="Initial pebbles")
    budget: BudgetModel

    @field_validator("structures")
    @classmethod
    def both_sides(cls, v):
        if set(v) != {"A", "B"}:
            raise ValueError(f"structures must be exactly A and B, got {sorted(v)}")
        return v


class TranscriptLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    round: int = Field(..., ge=0)
    actor: str = Field(..., pattern="^[SD]$")
    move: dict[str, Any]
    state_hash: str = Field(..., min_length=64, max_length=64)


@dataclass
class Transcript:
    """Append-only record of one match."""
    header: TranscriptHeader
    lines: list[TranscriptLine] = field(default_factory=list)

    def append(self, actor: str, move: dict, state_hash: str):
        self.lines.append(TranscriptLine(round=len(self.lines), actor=actor, move=move, state_hash=state_hash))

    def __len__(self) -> int:
        return len(self.lines)

    def to_jsonl(self) -> str:
        rows = [{"header": self.header.model_dump(mode="json")}]
        rows.extend(line.model_dump(mode="json") for line in self.lines)
        return "".join(canonical_json(row) + "\n" for row in rows)

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        """
        Raises:
            TranscriptError: missing header, bad JSON or a malformed line
        """
        rows = [line for line in text.splitlines() if line.strip()]
        if not rows:
            raise TranscriptError("empty transcript")
        try:
            first = json.loads(rows[0])
            if "header" not in first:
                raise TranscriptError("the first line must be the header")
            header = TranscriptHeader.model_validate(first["header"])
            lines = [TranscriptLine.model_validate(json.loads(row)) for row in rows[1:]]
        except json.JSONDecodeError as exc:
            raise TranscriptError(f"invalid JSON: {exc}") from exc
        except ValidationError as exc:
            raise TranscriptError(f"malformed transcript: {exc}") from exc
        for i, line in enumerate(lines):
            if line.round != i:
                raise TranscriptError(f"line {i + 1} has round {line.round}, expected {i}")
        return cls(header, lines)


def write_transcript(transcript: Transcript, path: str | Path):
    Path(path).write_text(transcript.to_jsonl(), encoding="utf-8")


def read_transcript(path: str | Path) -> Transcript:
    return Transcript.from_jsonl(Path(path).read_text(encoding="utf-8"))
