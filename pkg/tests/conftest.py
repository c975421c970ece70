"""Shared pytest fixtures."""

from pathlib import Path

import pytest

from logictext.counterfactual import HeaderPool, build_header_pool
from logictext.dataset_io import Sample
from logictext.logic_form import LogicTree, parse_form
from tests.factories import (
    GAMES_FORM,
    games_sample,
    sample_dataset,
    template_samples,
    write_records,
)


@pytest.fixture
def games_tree() -> LogicTree:
    """Parsed form of the argmax/attendance running example."""
    return parse_form(GAMES_FORM)


@pytest.fixture
def games() -> Sample:
    """Sample built around the argmax/attendance running example."""
    return games_sample()


@pytest.fixture
def templates() -> list[Sample]:
    """Eligible templates plus one ineligible sample."""
    return template_samples()


@pytest.fixture
def pool(templates: list[Sample]) -> HeaderPool:
    """Header pool of the templates."""
    return build_header_pool(templates)


@pytest.fixture
def dataset_file(tmp_path: Path) -> Path:
    """JSON-lines file with 20 valid samples."""
    records = [sample.to_record() for sample in sample_dataset(20)]
    return write_records(tmp_path / "dev.jsonl", records)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """Remove configuration overrides from the environment."""
    for name in ("LOGICTEXT_LEXICON", "LOGICTEXT_SEED", "LOGICTEXT_TYPE_THRESHOLD", "LOGICTEXT_PROMPT"):
        monkeypatch.delenv(name, raising=False)
