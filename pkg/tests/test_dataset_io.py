"""Tests for dataset loading, writing and model-input assembly."""

import json
from pathlib import Path

import pytest

from logictext.dataset_io import (
    PromptConfig,
    Sample,
    assemble_model_input,
    load_dataset,
    model_input_records,
    read_predictions,
    write_dataset,
)
from logictext.exceptions import ConfigurationError, SchemaError
from tests.factories import EXAMPLE1_FORM, GAMES_FORM, write_records


@pytest.fixture
def record(games: Sample) -> dict:
    """Decoded record of the running example."""
    return games.to_record()


def test_load_dataset(dataset_file: Path) -> None:
    """Test loading a valid JSON-lines file."""
    dataset = load_dataset(dataset_file)
    assert len(dataset) == 20
    assert dataset.lines == tuple(range(1, 21))
    assert dataset.errors == ()
    assert dataset.records[0].logic_str == GAMES_FORM


def test_load_skips_blank_lines(tmp_path: Path, record: dict) -> None:
    """Test that blank lines are ignored but line numbers are kept."""
    path = tmp_path / "data.jsonl"
    path.write_text(json.dumps(record) + "\n\n" + json.dumps(record) + "\n", encoding="utf-8")
    assert load_dataset(path).lines == (1, 3)


def test_load_json_array(tmp_path: Path, record: dict) -> None:
    """Test that a JSON array file is accepted."""
    path = tmp_path / "data.json"
    path.write_text(json.dumps([record, record], indent=2), encoding="utf-8")
    assert len(load_dataset(path)) == 2


def test_extra_fields_preserved(tmp_path: Path, record: dict) -> None:
    """Test that unknown fields survive a load and write."""
    record["interpret"] = "select the row with the highest attendance"
    record["action"] = "hop"
    source = write_records(tmp_path / "in.jsonl", [record])
    target = tmp_path / "out" / "copy.jsonl"

    write_dataset(target, load_dataset(source).records)
    copied = json.loads(target.read_text(encoding="utf-8"))
    assert copied == record
    assert list(copied)[-2:] == ["interpret", "action"], "Extras should follow the known fields"


def test_missing_topic_defaults_empty(tmp_path: Path, record: dict) -> None:
    """Test that topic is optional."""
    del record["topic"]
    path = write_records(tmp_path / "data.jsonl", [record])
    assert load_dataset(path).records[0].topic == ""


@pytest.mark.parametrize(
    ("change", "message"),
    [
        ({"logic_str": None}, "missing required field"),
        ({"sent": 3}, "'sent' must be a string"),
        ({"table_header": "date"}, "table_header"),
        ({"table_cont": [["a", "b", "c"], "row"]}, "table_cont"),
        ({"table_cont": [["october 6", "miami"]]}, "different width"),
        ({"logic_str": "hop { all_rows ; date"}, "does not parse"),
    ],
)
def test_strict_schema_errors(tmp_path: Path, record: dict, change: dict, message: str) -> None:
    """Test that strict loading aborts with the line of the bad record."""
    bad = dict(record)
    for key, value in change.items():
        if value is None:
            del bad[key]
        else:
            bad[key] = value
    path = write_records(tmp_path / "data.jsonl", [record, bad])

    with pytest.raises(SchemaError) as excinfo:
        load_dataset(path)
    assert excinfo.value.line == 2
    assert "line 2" in str(excinfo.value)
    assert message in str(excinfo.value)


def test_invalid_json_line(tmp_path: Path, record: dict) -> None:
    """Test that undecodable lines are schema errors."""
    path = tmp_path / "data.jsonl"
    path.write_text(json.dumps(record) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_dataset(path)


def test_non_object_record(tmp_path: Path) -> None:
    """Test that non-object lines are rejected."""
    path = tmp_path / "data.jsonl"
    path.write_text("[1, 2]\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="not an object"):
        load_dataset(path)


def test_lenient_collects_errors(tmp_path: Path, record: dict) -> None:
    """Test that lenient loading keeps the valid records."""
    bad = dict(record, logic_str="{ all_rows }")
    path = tmp_path / "data.jsonl"
    lines = [json.dumps(record), json.dumps(bad), "oops", json.dumps(record)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    dataset = load_dataset(path, strict=False)
    assert dataset.lines == (1, 4)
    assert [e.line for e in dataset.errors] == [2, 3]


def test_missing_file(tmp_path: Path) -> None:
    """Test that a missing file raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "absent.jsonl")


def test_cells_are_strings(tmp_path: Path, record: dict) -> None:
    """Test that numeric cells are read as text."""
    record["table_cont"] = [["october 6", "miami", 5032]]
    path = write_records(tmp_path / "data.jsonl", [record])
    assert load_dataset(path).records[0].table_cont == (("october 6", "miami", "5032"),)


def test_read_predictions(tmp_path: Path) -> None:
    """Test that predictions are one per line, blanks included."""
    path = tmp_path / "pred.txt"
    path.write_text("first sentence\n\nthird sentence\n", encoding="utf-8")
    assert read_predictions(path) == ["first sentence", "", "third sentence"]


def test_read_predictions_keeps_unicode_breaks(tmp_path: Path) -> None:
    """Test that only newlines split predictions, keeping later lines aligned."""
    path = tmp_path / "pred.txt"
    path.write_text("page\x0cbreak\nline\u2028sep\x1cgroup\nlast", encoding="utf-8")
    assert read_predictions(path) == ["page\x0cbreak", "line\u2028sep\x1cgroup", "last"]
    path.write_text("", encoding="utf-8")
    assert read_predictions(path) == []


def test_assemble_model_input(games: Sample) -> None:
    """Test the default prefix, caption and form concatenation."""
    assert assemble_model_input(games) == (
        "Describe the logical form: 1928 minnesota golden gophers football team " + GAMES_FORM
    )


def test_assemble_model_input_linearizes() -> None:
    """Test that the form is canonicalized and empty topics are skipped."""
    sample = Sample(logic_str="hop{argmax {all_rows;attendance} ;date}", sent="")
    prompt = PromptConfig(prefix="Summarize:")
    assert assemble_model_input(sample, prompt) == "Summarize: " + GAMES_FORM


def test_assemble_model_input_keeps_assertion() -> None:
    """Test that the '= true' suffix is part of the input."""
    sample = Sample(logic_str=EXAMPLE1_FORM, sent="", topic="hans - joachim stuck")
    assert assemble_model_input(sample).endswith("; 5 } = true")


def test_prompt_field_order(games: Sample) -> None:
    """Test a custom concatenation order."""
    prompt = PromptConfig(prefix="P:", field_order=("logic", "prefix", "topic"))
    assert assemble_model_input(games, prompt).startswith(GAMES_FORM + " P: 1928")


def test_prompt_config_validation() -> None:
    """Test that the field order must name each field once."""
    with pytest.raises(ConfigurationError):
        PromptConfig(field_order=("logic", "logic", "topic"))


def test_prompt_from_environment(monkeypatch: pytest.MonkeyPatch, games: Sample) -> None:
    """Test the environment override of the prefix."""
    monkeypatch.setenv("LOGICTEXT_PROMPT", "Explain:")
    assert assemble_model_input(games).startswith("Explain: 1928")


def test_model_input_records(games: Sample) -> None:
    """Test source and target pairs."""
    (pair,) = model_input_records([games])
    assert pair["target"] == games.sent
    assert pair["source"].endswith(GAMES_FORM)
