"""Fixture forms, samples and random form generation shared by the tests."""

import json
import random
from pathlib import Path
from typing import Any

from logictext.dataset_io import Sample

GAMES_FORM = "hop { argmax { all_rows ; attendance } ; date }"
GAMES_SENT = "the game with the highest attendance was on october 6 ."

CASE_STUDY_FORM = "eq { hop { argmax { all_rows ; score } ; attendance } ; 5032 }"
CASE_STUDY_SENT = "the game with the highest score had 5032 spectators"

EXAMPLE1_FORM = (
    "eq { count { filter_less { filter_greater { all_rows ; year ; 1975 } ; points ; 1 } } ; 5 }"
    " = true"
)
EXAMPLE1_SENT = "there were 5 times that hans - joachim stuck won less than 1 point in the after 1975 ."

EXAMPLE2_FORM = (
    "eq { max { filter_less { all_rows ; area km square ; 10 } ; population } ; 5845 } = true"
)
EXAMPLE2_SENT = (
    "the largest population for the populated places in guam whose area is less than 10 km"
    " square is 5845 ."
)

SAMPLE1_FORM = "eq { hop { argmax { all_rows ; televote } ; song } ; dj , take me away } = true"
SAMPLE1_SENT = "the song dj , take me away recevied the largest percentage of televotes ."
SAMPLE1_CF_FORM = "eq { hop { argmin { all_rows ; televote } ; song } ; tazi vecher } = true"
SAMPLE1_CF_SENT = (
    "the song ' tazi vecher ' got the least televote in bulgaria in the eurovision song contest"
    " 2008 ."
)

SAMPLE2_FORM = (
    "eq { hop { nth_argmin { all_rows ; react ; 2 } ; athlete } ; jaysuma saidy ndure } = true"
)
SAMPLE2_SENT = (
    "jaysuma saidy ndure had the second shortest react time among the 2008 summer olympics"
    " men 's 200 metres athletes ."
)
SAMPLE2_CF_FORM = "eq { hop { nth_argmax { all_rows ; react ; 2 } ; athlete } ; paul hession } = true"
SAMPLE2_CF_SENT = "paul hession ' react time was the second longest in all athletes ."

SAMPLE3_FORM = (
    "most_greater { filter_eq { all_rows ; site ; memorial stadium minneapolis , mn } ;"
    " attendance ; 24999 } = true"
)
SAMPLE3_SENT = (
    "in the 1928 minnesota golden gophers football under clarence spears , most of the games at"
    " memorial stadium minneapolis , mn drew more than 24,999 people ."
)
SAMPLE3_CF_FORM = (
    "eq { max { filter_less { all_rows ; attendance ; 30000 } ; date } ; 11 / 24 / 1928 } = true"
)
SAMPLE3_CF_SENT = (
    "the most recent game of minnesota golden gophers football under clarence spears which drew"
    " less than 30000 attendance was held on 11 / 24 / 1928 ."
)


def make_sample(
    logic_str: str,
    sent: str = "",
    header: list[str] | None = None,
    rows: list[list[str]] | None = None,
    topic: str = "",
) -> Sample:
    """Build a sample from plain lists."""
    return Sample(
        logic_str=logic_str,
        sent=sent,
        topic=topic,
        table_header=tuple(header or []),
        table_cont=tuple(tuple(row) for row in rows or []),
    )


def games_sample() -> Sample:
    """Game table whose form applies argmax to attendance."""
    return make_sample(
        GAMES_FORM,
        GAMES_SENT,
        ["date", "opponent", "attendance"],
        [
            ["october 6", "miami", "5032"],
            ["october 13", "dallas", "4021"],
            ["october 20", "denver", "3300"],
        ],
        topic="1928 minnesota golden gophers football team",
    )


def assist_sample() -> Sample:
    """Player table with a numeric assist column."""
    return make_sample(
        "eq { hop { argmax { all_rows ; assist } ; player } ; john smith } = true",
        "john smith had the most assist .",
        ["player", "assist", "points"],
        [["john smith", "12", "30"], ["bob jones", "9", "21"]],
        topic="2008 season",
    )


def song_sample() -> Sample:
    """Song contest table."""
    return make_sample(
        SAMPLE1_FORM,
        SAMPLE1_SENT,
        ["song", "televote", "place"],
        [["dj , take me away", "22.5", "1"], ["tazi vecher", "3.1", "11"]],
        topic="bulgaria in the eurovision song contest 2008",
    )


def season_sample() -> Sample:
    """Driver season table whose sentence mentions the year and points headers."""
    return make_sample(
        EXAMPLE1_FORM,
        "there were 5 times that the driver scored less than 1 points in a year after 1975 .",
        ["year", "points", "team"],
        [["1975", "1", "brabham"], ["1976", "0", "lotus"], ["1977", "3", "lotus"]],
        topic="hans - joachim stuck",
    )


def ineligible_sample() -> Sample:
    """Sample with no header shared by its form and sentence."""
    return make_sample(
        EXAMPLE1_FORM,
        EXAMPLE1_SENT,
        ["year", "points", "team"],
        [["1975", "1", "brabham"], ["1976", "0", "lotus"], ["1977", "3", "lotus"]],
        topic="hans - joachim stuck",
    )


def template_samples() -> list[Sample]:
    """Four eligible templates followed by one ineligible sample."""
    return [games_sample(), assist_sample(), song_sample(), season_sample(), ineligible_sample()]


def sample_dataset(size: int) -> list[Sample]:
    """Dataset of ``size`` samples cycling over the templates."""
    templates = template_samples()
    return [templates[i % len(templates)] for i in range(size)]


def write_records(path: Path, records: list[dict[str, Any]]) -> Path:
    """Write records as JSON lines."""
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


_OPERATORS = ["eq", "hop", "argmax", "count", "filter_eq", "max", "and"]
_TERMINALS = ["all_rows", "attendance", "date", "score", "home team", "5032", "1975", "dj , take me"]


def _random_node(rng: random.Random, depth: int) -> str:
    if depth >= 3 or rng.random() < 0.35 + 0.2 * depth:
        return rng.choice(_TERMINALS)
    arguments = [_random_node(rng, depth + 1) for _ in range(rng.randint(1, 3))]
    return f"{rng.choice(_OPERATORS)} {{ {' ; '.join(arguments)} }}"


def random_form(rng: random.Random, max_tokens: int = 12) -> str:
    """Random well-formed logical form with at most ``max_tokens`` tokens."""
    while True:
        form = _random_node(rng, 0)
        if len(form.split()) <= max_tokens:
            return form


def random_forms(count: int, seed: int = 1234, max_tokens: int = 12) -> list[str]:
    """Deterministic batch of random forms."""
    rng = random.Random(seed)
    return [random_form(rng, max_tokens) for _ in range(count)]
