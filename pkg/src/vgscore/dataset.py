"""Game records, score aggregation, quantization, genre grouping, manifest I/O.

The score of a game is the average of its 0-100 user and critic ratings,
quantized into ten classes ("0-10", "11-20", ..., "91-100") that the models
predict.  Manifests are line-delimited JSON, one record per line.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DuplicateId,
    EmptyDataset,
    InvalidScore,
    InvalidWeights,
    MalformedManifest,
    MissingRatings,
)
from .text import clean_summary

NUM_CLASSES = 10


class GenreClass(str, Enum):
    ROLE_PLAYING = "Role-Playing"
    STRATEGY = "Strategy"
    ACTION = "Action"
    SPORTS = "Sports"
    MISCELLANEOUS = "Miscellaneous"


class AgeRating(str, Enum):
    MATURE = "Mature"
    ADULTS_ONLY = "AdultsOnly"
    EVERYONE_10_PLUS = "Everyone10Plus"
    TEEN = "Teen"
    EVERYONE = "Everyone"
    OTHER = "Other"


# Genre grouping into the five classes. Unlisted genres fall back to
# Miscellaneous, which the grouping already uses as a catch-all.
GENRE_GROUPS: dict[GenreClass, tuple[str, ...]] = {
    GenreClass.ROLE_PLAYING: ("Adventure", "First-Person", "Third-Person", "Role-Playing"),
    GenreClass.STRATEGY: ("Turn-Based", "Strategy", "War-Game", "Puzzle", "Platformer"),
    GenreClass.ACTION: ("Action",),
    GenreClass.SPORTS: ("Fighting", "Sports", "Racing", "Wrestling"),
    GenreClass.MISCELLANEOUS: ("Simulation", "Flight", "Party", "Real-Time"),
}

_GENRE_LOOKUP = {
    name.lower(): cls for cls, names in GENRE_GROUPS.items() for name in names
}

_AGE_RATING_LOOKUP = {
    "mature": AgeRating.MATURE,
    "m": AgeRating.MATURE,
    "adults only": AgeRating.ADULTS_ONLY,
    "adultsonly": AgeRating.ADULTS_ONLY,
    "ao": AgeRating.ADULTS_ONLY,
    "everyone 10+": AgeRating.EVERYONE_10_PLUS,
    "everyone10plus": AgeRating.EVERYONE_10_PLUS,
    "e10+": AgeRating.EVERYONE_10_PLUS,
    "teen": AgeRating.TEEN,
    "t": AgeRating.TEEN,
    "everyone": AgeRating.EVERYONE,
    "e": AgeRating.EVERYONE,
}


def map_genre(genre_raw: str) -> GenreClass:
    """Map a raw genre name onto one of the five genre classes.

    Matching is case-insensitive and exact; anything unlisted is
    Miscellaneous.  Total function, never raises.
    """
    return _GENRE_LOOKUP.get(genre_raw.strip().lower(), GenreClass.MISCELLANEOUS)


def parse_age_rating(label: str) -> AgeRating:
    """Unknown labels pass through as Other."""
    return _AGE_RATING_LOOKUP.get(label.strip().lower(), AgeRating.OTHER)


def _check_score_range(value: float, what: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 100.0) or math.isnan(value):
        raise InvalidScore(f"{what} must be in [0, 100], got {value}")
    return value


@dataclass(frozen=True)
class GameRecord:
    """One game: metadata, ratings, ASCII summary, and input references."""

    id: str
    title: str
    developer: str
    age_rating: AgeRating
    genre_raw: str
    genre_class: GenreClass
    user_score: float
    critic_score: float
    summary: str
    trailer_ref: str | None = None
    feature_ref: str | None = None

    def gscore(self) -> "GScore":
        return compute_gscore(self.user_score, self.critic_score)


@dataclass(frozen=True)
class ScoreInputs:
    """Raw per-critic / per-user ratings before aggregation."""

    critic_ratings: tuple[float, ...] = ()
    critic_weights: tuple[float, ...] = ()
    user_ratings: tuple[float, ...] = ()


@dataclass(frozen=True)
class GScore:
    value: float
    class_index: int


@dataclass(frozen=True)
class Dataset:
    records: tuple[GameRecord, ...]
    vocab_ref: str | None = None

    def __len__(self) -> int:
        return len(self.records)


def aggregate_critic_score(inputs: ScoreInputs) -> float:
    """Weighted average of critic ratings.

    Weights must arrive normalized (sum 1 within 1e-9); they are validated,
    never silently renormalized.
    """
    ratings, weights = inputs.critic_ratings, inputs.critic_weights
    if len(ratings) == 0:
        raise MissingRatings("no critic ratings")
    if len(weights) != len(ratings):
        raise InvalidWeights(
            f"{len(weights)} weights for {len(ratings)} ratings"
        )
    if any(w < 0 for w in weights):
        raise InvalidWeights("negative critic weight")
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-9:
        raise InvalidWeights(f"weights sum to {total!r}, expected 1")
    for r in ratings:
        _check_score_range(r, "critic rating")
    return math.fsum(w * r for w, r in zip(weights, ratings))


def aggregate_user_score(inputs: ScoreInputs) -> float:
    """Arithmetic mean of user ratings."""
    ratings = inputs.user_ratings
    if len(ratings) == 0:
        raise MissingRatings("no user ratings")
    for r in ratings:
        _check_score_range(r, "user rating")
    return math.fsum(ratings) / len(ratings)


def quantize_gscore(value: float) -> int:
    """Class index in [0, 9]: class k covers (10k, 10(k+1)], with 0 in class 0."""
    value = _check_score_range(value, "G-Score")
    return min(9, max(0, math.ceil(value / 10.0) - 1))


def compute_gscore(user_score: float, critic_score: float) -> GScore:
    """Average the two 0-100 ratings and attach the quantized class."""
    user_score = _check_score_range(user_score, "user score")
    critic_score = _check_score_range(critic_score, "critic score")
    value = (user_score + critic_score) / 2.0
    return GScore(value=value, class_index=quantize_gscore(value))


def gscore_bin_label(class_index: int) -> str:
    if not 0 <= class_index <= 9:
        raise InvalidScore(f"class index {class_index} not in [0, 9]")
    if class_index == 0:
        return "0-10"
    return f"{10 * class_index + 1}-{10 * (class_index + 1)}"


_REQUIRED_FIELDS = (
    "id", "title", "developer", "age_rating", "genre",
    "user_score", "critic_score", "summary",
)


def _record_from_row(row: dict, line_no: int) -> GameRecord:
    for key in _REQUIRED_FIELDS:
        if key not in row:
            raise MalformedManifest(line_no, f"missing field {key!r}")
    game_id = row["id"]
    if not isinstance(game_id, str) or not game_id:
        raise MalformedManifest(line_no, "id must be a non-empty string")
    for key in ("user_score", "critic_score"):
        if not isinstance(row[key], (int, float)) or isinstance(row[key], bool):
            raise MalformedManifest(line_no, f"{key} must be a number")
    for key in ("title", "developer", "age_rating", "genre", "summary"):
        if not isinstance(row[key], str):
            raise MalformedManifest(line_no, f"{key} must be a string")
    for key in ("trailer_ref", "feature_ref"):
        if row.get(key) is not None and not isinstance(row[key], str):
            raise MalformedManifest(line_no, f"{key} must be a string or null")
    genre_raw = row["genre"]
    return GameRecord(
        id=game_id,
        title=row["title"],
        developer=row["developer"],
        age_rating=parse_age_rating(row["age_rating"]),
        genre_raw=genre_raw,
        genre_class=map_genre(genre_raw),
        user_score=_check_score_range(row["user_score"], "user_score"),
        critic_score=_check_score_range(row["critic_score"], "critic_score"),
        summary=clean_summary(row["summary"]),
        trailer_ref=row.get("trailer_ref"),
        feature_ref=row.get("feature_ref"),
    )


def load_manifest(path) -> Dataset:
    """Load a line-delimited JSON manifest, validating every record.

    Summaries are reduced to ASCII on load; scores are validated against
    the 0-100 scale, never rescaled.
    """
    records: list[GameRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedManifest(line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(row, dict):
                raise MalformedManifest(line_no, "record must be a JSON object")
            record = _record_from_row(row, line_no)
            if record.id in seen:
                raise DuplicateId(record.id)
            seen.add(record.id)
            records.append(record)
    return Dataset(records=tuple(records))


@dataclass(frozen=True)
class StatsReport:
    """Per-class counts over a dataset; each table sums to the record count."""

    total: int
    genre_counts: dict[str, int] = field(default_factory=dict)
    gscore_class_counts: dict[str, int] = field(default_factory=dict)
    age_rating_counts: dict[str, int] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "total": self.total,
            "genre_counts": self.genre_counts,
            "gscore_class_counts": self.gscore_class_counts,
            "age_rating_counts": self.age_rating_counts,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        def table(title: str, counts: dict[str, int]) -> list[str]:
            width = max(len(k) for k in counts)
            lines = [title, "-" * len(title)]
            lines += [f"{k:<{width}}  {v:>6d}" for k, v in counts.items()]
            lines.append(f"{'total':<{width}}  {self.total:>6d}")
            return lines

        parts = (
            table("Genre class", self.genre_counts)
            + [""]
            + table("G-Score class", self.gscore_class_counts)
            + [""]
            + table("Age rating", self.age_rating_counts)
        )
        return "\n".join(parts) + "\n"


def dataset_stats(ds: Dataset) -> StatsReport:
    """Count records per genre class, per score class, and per age rating."""
    if len(ds.records) == 0:
        raise EmptyDataset("cannot compute statistics of an empty dataset")
    genre = {cls.value: 0 for cls in GenreClass}
    gscore = {gscore_bin_label(k): 0 for k in range(NUM_CLASSES)}
    age = {rating.value: 0 for rating in AgeRating}
    for rec in ds.records:
        genre[rec.genre_class.value] += 1
        gscore[gscore_bin_label(rec.gscore().class_index)] += 1
        age[rec.age_rating.value] += 1
    return StatsReport(
        total=len(ds.records),
        genre_counts=genre,
        gscore_class_counts=gscore,
        age_rating_counts=age,
    )
