"""Dataset records, file I/O and model-input assembly."""

import json
import logging
import os
import tempfile
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

from logictext.config import default_config
from logictext.exceptions import ConfigurationError, FormError, SchemaError
from logictext.logic_form import LogicTree, linearize, parse_form

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("logic_str", "sent", "table_header", "table_cont")
KNOWN_FIELDS = ("logic_str", "sent", "topic", "table_header", "table_cont")
PROMPT_FIELDS = ("prefix", "topic", "logic")


@dataclass(frozen=True)
class Sample:
    """One Logic2Text record."""

    logic_str: str
    sent: str
    topic: str = ""
    table_header: tuple[str, ...] = ()
    table_cont: tuple[tuple[str, ...], ...] = ()
    extras: Mapping[str, Any] = field(default_factory=dict)

    @cached_property
    def tree(self) -> LogicTree:
        """Parsed logical form."""
        return parse_form(self.logic_str)

    def column(self, header: str) -> list[str]:
        """Cells of the column named ``header``."""
        index = self.table_header.index(header)
        return [row[index] for row in self.table_cont if index < len(row)]

    def ragged_rows(self) -> list[int]:
        """Indices of rows whose width differs from the header."""
        width = len(self.table_header)
        return [i for i, row in enumerate(self.table_cont) if len(row) != width]

    @classmethod
    def from_record(cls, record: Mapping[str, Any], line: int | None = None) -> "Sample":
        """
        Build a sample from a decoded record.

        Raises:
            SchemaError: If a required field is missing or has the wrong type
        """
        missing = [name for name in REQUIRED_FIELDS if name not in record]
        if missing:
            raise SchemaError(f"missing required field(s): {', '.join(missing)}", line)

        for name in ("logic_str", "sent"):
            if not isinstance(record[name], str):
                raise SchemaError(f"field {name!r} must be a string", line)
        topic = record.get("topic", "")
        if not isinstance(topic, str):
            raise SchemaError("field 'topic' must be a string", line)

        header = record["table_header"]
        rows = record["table_cont"]
        if not isinstance(header, list) or not all(isinstance(h, str) for h in header):
            raise SchemaError("field 'table_header' must be a list of strings", line)
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise SchemaError("field 'table_cont' must be a list of rows", line)

        return cls(
            logic_str=record["logic_str"],
            sent=record["sent"],
            topic=topic,
            table_header=tuple(header),
            table_cont=tuple(tuple(str(cell) for cell in row) for row in rows),
            extras={k: v for k, v in record.items() if k not in KNOWN_FIELDS},
        )

    def to_record(self) -> dict[str, Any]:
        """Record with known fields first, then preserved extras in their order."""
        record: dict[str, Any] = {
            "logic_str": self.logic_str,
            "sent": self.sent,
            "topic": self.topic,
            "table_header": list(self.table_header),
            "table_cont": [list(row) for row in self.table_cont],
        }
        record.update(self.extras)
        return record


@dataclass(frozen=True)
class RecordError:
    """A record rejected while loading."""

    line: int
    message: str


@dataclass(frozen=True)
class DatasetFile:
    """Loaded dataset with per-record line provenance."""

    path: Path
    records: tuple[Sample, ...]
    lines: tuple[int, ...]
    errors: tuple[RecordError, ...] = ()

    def __len__(self) -> int:
        return len(self.records)


def _read_raw_records(path: Path) -> list[tuple[int, Any]]:
    """Decode a JSON-lines file or a JSON array file into (line, value) pairs."""
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON array: {e.msg}", e.lineno)
        return list(enumerate(values, 1))

    raw: list[tuple[int, Any]] = []
    for line_number, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw.append((line_number, json.loads(line)))
        except json.JSONDecodeError as e:
            raw.append((line_number, SchemaError(f"invalid JSON: {e.msg}", line_number)))
    return raw


def _check_sample(sample: Sample, line: int) -> None:
    ragged = sample.ragged_rows()
    if ragged:
        raise SchemaError(
            f"table row {ragged[0]} has a different width than table_header", line
        )
    try:
        _ = sample.tree
    except FormError as e:
        raise SchemaError(f"logic_str does not parse: {e}", line)


def load_dataset(path: Path, strict: bool = True) -> DatasetFile:
    """
    Load a dataset file.

    Strict mode validates every logical form and table shape and aborts on
    the first problem. Lenient mode logs and collects problems and returns
    the valid records.

    Args:
        path: JSON-lines (or JSON array) dataset file
        strict: Abort on the first invalid record

    Returns:
        Loaded dataset

    Raises:
        SchemaError: On the first invalid record in strict mode
        FileNotFoundError: If the file does not exist
    """
    logger.debug("Loading dataset from %s", path)

    records: list[Sample] = []
    lines: list[int] = []
    errors: list[RecordError] = []

    for line, value in _read_raw_records(path):
        try:
            if isinstance(value, SchemaError):
                raise value
            if not isinstance(value, dict):
                raise SchemaError("record is not an object", line)
            sample = Sample.from_record(value, line)
            _check_sample(sample, line)
        except SchemaError as e:
            if strict:
                raise
            logger.warning("Skipping %s:%d: %s", path.name, line, e)
            errors.append(RecordError(line=line, message=str(e)))
            continue
        records.append(sample)
        lines.append(line)

    logger.info("Loaded %d record(s) from %s (%d rejected)", len(records), path.name, len(errors))
    return DatasetFile(path=path, records=tuple(records), lines=tuple(lines), errors=tuple(errors))


def atomic_write_text(path: Path, text: str) -> None:
    """Write a file through a temporary sibling and an atomic rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def write_jsonl(path: Path, records: Iterable[Mapping[str, Any]]) -> None:
    """Atomically write one JSON object per line."""
    lines = [json.dumps(record, ensure_ascii=False) for record in records]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def write_dataset(path: Path, samples: Iterable[Sample]) -> None:
    """Atomically write samples as JSON lines, preserving unknown fields."""
    write_jsonl(path, (sample.to_record() for sample in samples))


def read_predictions(path: Path) -> list[str]:
    """Read one predicted sentence per line.

    Only newlines separate predictions; form feeds and other Unicode line
    breaks stay inside the sentence.
    """
    text = path.read_text(encoding="utf-8")
    if not text:
        return []
    return text.removesuffix("\n").split("\n")


@dataclass(frozen=True)
class PromptConfig:
    """Prefix prompt P and the concatenation order of X = [P; T; L]."""

    prefix: str = field(default_factory=lambda: default_config.prompt_prefix)
    field_order: tuple[str, ...] = PROMPT_FIELDS

    def __post_init__(self) -> None:
        if sorted(self.field_order) != sorted(PROMPT_FIELDS):
            raise ConfigurationError(
                f"field_order must be a permutation of {PROMPT_FIELDS}, got {self.field_order}"
            )


def assemble_model_input(sample: Sample, prompt: PromptConfig | None = None) -> str:
    """
    Build the model input string for a sample.

    Args:
        sample: Dataset record
        prompt: Prompt configuration (default prefix "Describe the logical form: ")

    Returns:
        Prefix, table caption and canonical logical form, single-space separated
    """
    prompt = prompt or PromptConfig()
    parts = {
        "prefix": prompt.prefix.strip(),
        "topic": " ".join(sample.topic.split()),
        "logic": linearize(sample.tree),
    }
    return " ".join(parts[name] for name in prompt.field_order if parts[name])


def model_input_records(
    samples: Sequence[Sample], prompt: PromptConfig | None = None
) -> list[dict[str, str]]:
    """Source/target pairs for sequence-to-sequence training."""
    return [
        {"source": assemble_model_input(sample, prompt), "target": sample.sent}
        for sample in samples
    ]
