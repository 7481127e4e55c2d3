"""Character n-gram language identification (rank-profile method).

A profile is the top-K character 1..3-grams of a corpus, computed over
boundary-padded tokens and ranked by frequency. Detection ranks the text's
own n-grams and sums out-of-place distances against each profile; short
texts and low-margin calls return ``unknown``, which is the escape hatch
for code-mixed content. Bundled profiles for id/en/jv/su are built from the
train split of the seed corpora shipped under ``data/`` (the held-out tail
of each seed file is reserved for evaluation and never enters a profile).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import NotFoundError, ValidationError
from .model import normalize_text, tokenize

NGRAM_MIN = 1
NGRAM_MAX = 3
PROFILE_SIZE = 300
MIN_TEXT_CHARS = 20
DEFAULT_MARGIN = 0.05
UNKNOWN = "unknown"

# Token boundary marker used when padding tokens for n-gram extraction.
PAD = "_"

DATA_DIR = Path(__file__).parent / "data"
PROFILE_DIR = DATA_DIR / "profiles"
BUNDLED_LANGUAGES = ("en", "id", "jv", "su")
# Tail lines of each seed file reserved for held-out evaluation.
HELDOUT_LINES = {"id": 250, "en": 250, "jv": 200, "su": 200}


def ngram_counts(text: str) -> Counter:
    """Count 1..3-grams over ``PAD``-padded tokens of the canonical text."""
    counts: Counter = Counter()
    for token in tokenize(text):
        padded = f"{PAD}{token}{PAD}"
        for n in range(NGRAM_MIN, NGRAM_MAX + 1):
            for i in range(len(padded) - n + 1):
                gram = padded[i : i + n]
                if gram != PAD:  # the bare boundary marker carries no signal
                    counts[gram] += 1
    return counts


def _ranked(counts: Counter, k: int) -> tuple[str, ...]:
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(gram for gram, _ in ordered[:k])


@dataclass(frozen=True)
class LanguageProfile:
    language: str
    ngrams: tuple[str, ...]
    built_from: str = ""
    ranks: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranks", {g: i for i, g in enumerate(self.ngrams)})


def build_profile(corpus: Iterable[str], language: str, built_from: str = "") -> LanguageProfile:
    counts: Counter = Counter()
    n_texts = 0
    for text in corpus:
        counts.update(ngram_counts(text))
        n_texts += 1
    if n_texts == 0:
        raise ValidationError("cannot build a language profile from an empty corpus")
    return LanguageProfile(
        language=language, ngrams=_ranked(counts, PROFILE_SIZE), built_from=built_from
    )


def save_profile(profile: LanguageProfile, path: str | Path) -> None:
    Path(path).write_text("\n".join(profile.ngrams) + "\n", encoding="utf-8")


def load_profile(path: str | Path, language: Optional[str] = None) -> LanguageProfile:
    path = Path(path)
    grams = tuple(line for line in path.read_text(encoding="utf-8").splitlines() if line)
    return LanguageProfile(
        language=language or path.stem, ngrams=grams, built_from=str(path.name)
    )


_BUNDLED_CACHE: dict[str, LanguageProfile] = {}


def load_bundled_profiles() -> dict[str, LanguageProfile]:
    if not _BUNDLED_CACHE:
        for lang in BUNDLED_LANGUAGES:
            path = PROFILE_DIR / f"{lang}.txt"
            if path.exists():
                _BUNDLED_CACHE[lang] = load_profile(path, lang)
    return dict(_BUNDLED_CACHE)


def seed_path(lang: str) -> Path:
    return DATA_DIR / f"seed_{lang}.txt"


def load_seed(lang: str) -> list[str]:
    path = seed_path(lang)
    if not path.exists():
        raise NotFoundError(f"no seed corpus for language {lang!r}")
    return [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def seed_split(lang: str) -> tuple[list[str], list[str]]:
    """(train, held_out) split of a bundled seed corpus."""
    lines = load_seed(lang)
    holdout = HELDOUT_LINES.get(lang, 200)
    return lines[:-holdout], lines[-holdout:]


def detect(
    text: str,
    profiles: dict[str, LanguageProfile],
    margin: float = DEFAULT_MARGIN,
) -> tuple[str, float]:
    """Best-profile language of ``text``, or ``unknown``.

    Returns ``(language, score)`` where score is the relative distance margin
    between the best and second-best profile. ``unknown`` when the normalized
    text is shorter than MIN_TEXT_CHARS or the margin falls below ``margin``.
    With a positive margin an exact distance tie lands on unknown; with
    margin=0 ties break by language code ascending. Either way the outcome
    never depends on profile load order.
    """
    if not profiles:
        raise ValidationError("detect needs at least one language profile")
    if len(normalize_text(text)) < MIN_TEXT_CHARS:
        return UNKNOWN, 0.0
    text_ranks = {g: i for i, g in enumerate(_ranked(ngram_counts(text), PROFILE_SIZE))}
    scored: list[tuple[float, str]] = []
    for lang in sorted(profiles):
        profile = profiles[lang]
        distance = 0
        for gram, rank in text_ranks.items():
            profile_rank = profile.ranks.get(gram, PROFILE_SIZE)
            distance += abs(rank - profile_rank)
        scored.append((distance, lang))
    scored.sort()
    if len(scored) == 1:
        return scored[0][1], 1.0
    best, second = scored[0], scored[1]
    rel_margin = (second[0] - best[0]) / second[0] if second[0] > 0 else 0.0
    if rel_margin < margin:
        return UNKNOWN, rel_margin
    return best[1], rel_margin


def filter_language(
    records,
    targets: set[str],
    unknown_policy: str = "drop",
    profiles: Optional[dict[str, LanguageProfile]] = None,
    margin: float = DEFAULT_MARGIN,
):
    """Annotate each record with its detected language and keep the targets.

    Kept records carry the detected code in ``language``; ``unknown`` records
    follow ``unknown_policy`` (default drop, the conservative choice for
    single-language studies; code-mixed text typically lands here).
    """
    if unknown_policy not in ("drop", "keep"):
        raise ValidationError(f"unknown_policy must be drop or keep, got {unknown_policy!r}")
    profiles = profiles if profiles is not None else load_bundled_profiles()
    missing = set(targets) - set(profiles)
    if missing:
        raise NotFoundError(f"no language profile for: {sorted(missing)}")
    kept = []
    for record in records:
        lang, _score = detect(record.text, profiles, margin)
        if lang in targets or (lang == UNKNOWN and unknown_policy == "keep"):
            kept.append(record.with_language(lang))
    return kept
