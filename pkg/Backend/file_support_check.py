"""
Loaders and writers for the workbench file formats, each validated by a
pydantic schema before it is turned into an engine object.

    .json    structure, tree spec or semi-graph document
    .jsonl   game transcript
    .txt     formula text (also accepted inline, or as @path on the CLI)
"""
import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError, field_validator

from engine.core.structures import Structure, structure_from_json, structure_to_json
from engine.errors import ConfigError, StructureError, TranscriptError
from engine.eval.semigraphs import LabelledSemiGraph, semigraph_from_json
from engine.game.moves import var_from_json
from engine.game.transcript import Transcript
from engine.logic.formulas import Var
from engine.psp.instances import TreeGroupSpec

# Supported file extensions
SUPPORTED_EXTENSIONS = {".json", ".jsonl", ".txt", ".lrec"}


# ============================================================
# Pydantic Schemas
# ============================================================

class RelationModel(BaseModel):
    arity: int = Field(..., ge=0, description="Number of components per tuple")
    tuples: list[list[Any]] = Field(default_factory=list, description="Member tuples")

    @field_validator("tuples")
    @classmethod
    def validate_components(cls, v):
        for row in v:
            for value in row:
                if isinstance(value, bool) or not isinstance(value, (str, int)):
                    raise ValueError(f"tuple component {value!r} is neither an element nor a number")
        return v


class StructureModel(BaseModel):
    """Structure document: elements are strings, numbers are integers."""
    universe: list[str] = Field(..., min_length=1, description="Elements of the universe")
    relations: dict[str, RelationModel] = Field(default_factory=dict, description="Relation name to tuples")
    constants: dict[str, str] = Field(default_factory=dict, description="Constant name to element")

    model_config = {
        "json_schema_extra": {
            "examples": [{
                "universe": ["a", "b"],
                "relations": {"E": {"arity": 2, "tuples": [["a", "b"]]}},
                "constants": {"c": "a"},
            }]
        }
    }


# ============================================================
# Dispatch
# ============================================================

def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _extension(path: Path, allowed: set[str]) -> str:
    extension = path.suffix.lower()
    if extension not in SUPPORTED_EXTENSIONS or extension not in allowed:
        raise ConfigError(f"unsupported file extension {extension or '(none)'} for {path.name}; "
                          f"expected one of {sorted(allowed)}")
    return extension


def load_document(file_path: str | Path):
    """
    Load any workbench file, dispatching on its extension and, for JSON, on
    its shape.

    Returns:
        Structure, TreeGroupSpec, Transcript or formula text (str)
    """
    path = Path(file_path)
    match _extension(path, SUPPORTED_EXTENSIONS):
        case ".jsonl":
            return load_transcript(path)
        case ".txt" | ".lrec":
            return read_formula_file(path)
        case ".json":
            data = _read_json(path)
            if isinstance(data, dict) and "sigma" in data:
                return load_spec(path)
            return load_structure(path)


# ============================================================
# Structures and semi-graphs
# ============================================================

def structure_from_document(data: Any) -> Structure:
    """
    Raises:
        StructureError: schema violations, or the invariant violations of
            validate_structure
    """
    try:
        model = StructureModel.model_validate(data)
    except ValidationError as exc:
        raise StructureError([f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors()]) from exc
    return structure_from_json(model.model_dump())


def load_structure(file_path: str | Path) -> Structure:
    path = Path(file_path)
    _extension(path, {".json"})
    return structure_from_document(_read_json(path))


def dump_structure(s: Structure, file_path: str | Path) -> None:
    Path(file_path).write_text(json.dumps(structure_to_json(s), indent=2) + "\n", encoding="utf-8")


def load_semigraph(file_path: str | Path) -> LabelledSemiGraph:
    """A semi-graph stored as a structure with relations E, SIM and C (vertex, label)."""
    path = Path(file_path)
    _extension(path, {".json"})
    data = _read_json(path)
    try:
        model = StructureModel.model_validate(data)
    except ValidationError as exc:
        raise StructureError([str(exc)]) from exc
    unknown = set(model.relations) - {"E", "SIM", "C"}
    if unknown:
        raise StructureError([f"semi-graph documents only use E, SIM and C, got {sorted(unknown)}"])
    return semigraph_from_json(model.model_dump())


# ============================================================
# Tree specs
# ============================================================

def load_spec(file_path: str | Path) -> TreeGroupSpec:
    """
    Raises:
        ConfigError: unreadable file, non-prime p, h < 1 or a wrong sigma length
    """
    path = Path(file_path)
    _extension(path, {".json"})
    try:
        return TreeGroupSpec.model_validate(_read_json(path))
    except ValidationError as exc:
        raise ConfigError(f"invalid tree spec in {path.name}: {exc.errors()[0]['msg']}") from exc


def dump_spec(spec: TreeGroupSpec, file_path: str | Path) -> None:
    Path(file_path).write_text(spec.model_dump_json(indent=2) + "\n", encoding="utf-8")


# ============================================================
# Transcripts
# ============================================================

def load_transcript(file_path: str | Path) -> Transcript:
    path = Path(file_path)
    _extension(path, {".jsonl"})
    try:
        return Transcript.from_jsonl(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise TranscriptError(f"cannot read {path}: {exc}") from exc


# ============================================================
# Formulas and bindings
# ============================================================

def read_formula_file(file_path: str | Path) -> str:
    path = Path(file_path)
    try:
        return path.read_text(encoding="utf-8").strip()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def read_formula_text(text: str) -> str:
    """Inline formula text, or the contents of the file named by "@path"."""
    if text.startswith("@"):
        return read_formula_file(text[1:])
    return text


def parse_bindings(items: list[str] | tuple[str, ...]) -> dict[Var, Any]:
    """
    "x=a" binds an element variable, "%n=3" a number variable.

    Raises:
        ConfigError: malformed binding or a non-integer number value
    """
    env = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise ConfigError(f"binding {item!r} is not of the form var=value")
        var = var_from_json(name.strip())
        if var.name in {v.name for v in env}:
            raise ConfigError(f"variable {name.strip()} bound twice")
        if name.strip().startswith("%"):
            try:
                env[var] = int(value)
            except ValueError as exc:
                raise ConfigError(f"number variable {name.strip()} needs an integer, got {value!r}") from exc
        else:
            env[var] = value.strip()
    return env


def get_supported_extensions() -> list[str]:
    return sorted(SUPPORTED_EXTENSIONS)
