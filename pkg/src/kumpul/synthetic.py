"""Deterministic synthetic corpus generator with per-record ground truth.

Generation is a pure function of (manifest, seed): the corpus interleaves
on-topic Indonesian posts with planted noise, and every record is labeled
with the pipeline stage that should remove it (or ``keep``). Running the
pipeline with :func:`matching_pipeline_config` over such a corpus must
remove exactly the labeled records at each stage, which is what makes
desk-scale, Table-2-style accounting checkable down to the record.

Noise construction:
  duplicate  exact copies of earlier records under a fresh, later-sorting id
  language   sentences drawn from the bundled English seed corpus
  keyword    Indonesian posts containing the poison phrase
  irrelevant Indonesian posts token-disjoint from the research context
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Any

from . import langid
from .errors import ValidationError
from .model import Record, tokenize
from .preprocessing import (
    DedupConfig,
    KeywordConfig,
    LanguageConfig,
    PipelineConfig,
    RelevancyStageConfig,
)

LABELS = ("keep", "duplicate", "language", "keyword", "irrelevant")

# The research context of the fuel-price walkthrough; relevant templates
# share tokens with it, irrelevant templates share none.
CONTEXT = "Kebijakan harga BBM dan dampaknya terhadap kehidupan sehari-hari"
POISON_PHRASE = "BlackBerry Messenger"
TARGET_LANGUAGE = "id"
RELEVANCY_THRESHOLD = 0.1

_WINDOW_START = datetime(2022, 9, 1, tzinfo=timezone.utc)
_WINDOW_SECONDS = 21 * 24 * 3600
_COLLECTED_AT = datetime(2022, 10, 1, tzinfo=timezone.utc)

RELEVANT_TEMPLATES = (
    "Harga BBM naik lagi dan warga mulai mengeluh soal kebijakan pemerintah",
    "Kebijakan harga BBM baru sangat terasa dampaknya terhadap kehidupan warga kecil",
    "Kenaikan harga BBM berdampak besar terhadap biaya hidup sehari hari masyarakat",
    "Dampak kebijakan BBM terhadap kehidupan nelayan dan petani semakin berat",
    "Pemerintah menjelaskan kebijakan harga BBM dan subsidi untuk masyarakat miskin",
    "Harga BBM di daerah terpencil lebih mahal dan memberatkan kehidupan warga",
    "Antrean panjang di SPBU sejak kebijakan harga BBM diumumkan pemerintah",
    "Sopir angkot protes karena harga BBM naik dan penghasilan menurun setiap hari",
    "Kebijakan subsidi BBM memengaruhi harga bahan pokok dan ongkos transportasi umum",
    "Diskusi publik membahas dampak kenaikan harga BBM terhadap ekonomi keluarga",
    "Harga BBM dan tarif listrik naik bersamaan sehingga kehidupan makin sulit",
    "Mahasiswa menggelar aksi damai menolak kebijakan kenaikan harga BBM kemarin",
    "Ibu rumah tangga mengatur ulang belanja karena dampak harga BBM terhadap dapur",
    "Pengamat menilai kebijakan harga BBM perlu dikaji ulang demi kehidupan rakyat",
)

OFFTOPIC_TEMPLATES = (
    "Resep masakan rendang enak untuk keluarga besar di rumah",
    "Tim sepak bola nasional menang besar pada pertandingan semalam",
    "Film baru itu mendapat pujian karena cerita serta gambar indah",
    "Cuaca di pegunungan sangat dingin ketika musim hujan tiba",
    "Konser musik keroncong yang digelar menghibur pengunjung taman kota",
    "Pameran lukisan karya seniman muda mengundang pengunjung sangat banyak",
    "Pantai selatan menjadi tujuan wisata favorit keluarga untuk berlibur bersama",
    "Pelajaran matematika menjadi favorit murid kelas enam sekolah itu",
    "Kebun binatang menambahkan koleksi burung langka yang didatangkan pengelola",
    "Teknologi telepon pintar berkembang cepat dengan kamera semakin bagus",
    "Festival makanan tradisional menghadirkan berbagai menu untuk pengunjung setia",
    "Perpustakaan kota memperpanjang jam buka selama liburan sekolah",
)

POISON_TEMPLATES = (
    "Promo BlackBerry Messenger terbaru untuk pengguna setia di Indonesia",
    "Aplikasi BlackBerry Messenger kabarnya kembali digemari kalangan pengguna telepon lama",
    "Grup BlackBerry Messenger angkatan sekolah kami masih sangat ramai dengan pesan",
    "Fitur stiker BlackBerry Messenger dulu sangat digemari anak muda",
    "Nomor pin BBM lama masih tersimpan dalam ponsel BlackBerry Messenger kesayangan",
)

AUTHORS = ("budi", "sari", "agus", "dewi", "rina", "joko", "tono", "lina", "andi", "maya")
MENTIONS = ("@pertamina", "@kemenkeu", "@bphmigas", "@infobbm")

# Unique per-record suffixes spell the counter in the record's own language
# (digits would add n-grams unknown to every profile); suffix words are
# disjoint from the context tokens so they cannot flip a relevancy verdict.
_ID_DIGITS = ("nol", "satu", "dua", "tiga", "empat", "lima", "enam", "tujuh", "delapan", "sembilan")
_EN_DIGITS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine")


def _spell(n: int, digits: tuple[str, ...]) -> str:
    return " ".join(digits[int(c)] for c in str(n))


def _suffix(label: str, n: int) -> str:
    if label == "language":
        return f"note number {_spell(n, _EN_DIGITS)}"
    word = {"keep": "laporan", "irrelevant": "catatan", "keyword": "arsip"}[label]
    return f"{word} nomor {_spell(n, _ID_DIGITS)}"


@dataclass(frozen=True)
class SyntheticManifest:
    total: int
    duplicate_fraction: float = 0.0
    non_target_language_fraction: float = 0.0
    keyword_excluded_fraction: float = 0.0
    irrelevant_fraction: float = 0.0
    seed: int = 0
    source_name: str = "synthetic"
    source_category: str = "social_media"

    def __post_init__(self) -> None:
        if self.total < 0:
            raise ValidationError("total must be >= 0")
        fractions = (
            self.duplicate_fraction,
            self.non_target_language_fraction,
            self.keyword_excluded_fraction,
            self.irrelevant_fraction,
        )
        for f in fractions:
            if not 0.0 <= f <= 1.0:
                raise ValidationError("noise fractions must be in [0, 1]")
        if sum(fractions) > 1.0 + 1e-9:
            raise ValidationError("noise fractions must sum to at most 1")

    @classmethod
    def from_params(cls, params: dict[str, str]) -> "SyntheticManifest":
        try:
            return cls(
                total=int(params["total"]),
                duplicate_fraction=float(params.get("duplicate_fraction", 0)),
                non_target_language_fraction=float(
                    params.get("non_target_language_fraction", 0)
                ),
                keyword_excluded_fraction=float(params.get("keyword_excluded_fraction", 0)),
                irrelevant_fraction=float(params.get("irrelevant_fraction", 0)),
                seed=int(params.get("seed", 0)),
                source_name=params.get("source_name", "synthetic"),
                source_category=params.get("source_category", "social_media"),
            )
        except KeyError as exc:
            raise ValidationError(f"synthetic manifest missing {exc.args[0]!r}")
        except ValueError as exc:
            raise ValidationError(f"bad synthetic manifest value: {exc}")

    def label_counts(self) -> dict[str, int]:
        n_dup = round(self.total * self.duplicate_fraction)
        n_lang = round(self.total * self.non_target_language_fraction)
        n_kw = round(self.total * self.keyword_excluded_fraction)
        n_irr = round(self.total * self.irrelevant_fraction)
        n_keep = self.total - n_dup - n_lang - n_kw - n_irr
        if n_keep < 0:
            raise ValidationError("rounded noise counts exceed total")
        if n_dup > 0 and self.total - n_dup == 0:
            raise ValidationError("duplicates need at least one base record to copy")
        return {
            "keep": n_keep,
            "duplicate": n_dup,
            "language": n_lang,
            "keyword": n_kw,
            "irrelevant": n_irr,
        }


def generate_synthetic(
    manifest: SyntheticManifest,
) -> tuple[list[Record], dict[str, str]]:
    """Build the corpus; returns (records, record_id -> ground-truth label).

    Each record also carries its label in ``extras["ground_truth"]`` so the
    label survives collection into a store.
    """
    counts = manifest.label_counts()
    rng = random.Random(manifest.seed)
    english_pool = langid.load_seed("en") if counts["language"] else []

    bases: list[tuple[Record, str]] = []
    serial = 0

    def next_id() -> str:
        nonlocal serial
        serial += 1
        return f"syn-{serial:06d}"

    def base_record(text: str, label: str) -> Record:
        record_id = next_id()
        published = _WINDOW_START + timedelta(seconds=rng.randrange(_WINDOW_SECONDS))
        url = None
        if rng.random() < 0.5:
            url = f"https://contoh.id/p/{record_id}"
        return Record(
            record_id=record_id,
            source=manifest.source_name,
            source_category=manifest.source_category,
            text=text,
            collected_at=_COLLECTED_AT,
            author=rng.choice(AUTHORS),
            published_at=published,
            url=url,
            extras={"ground_truth": label},
        )

    for i in range(counts["keep"]):
        text = rng.choice(RELEVANT_TEMPLATES)
        if rng.random() < 0.3:
            text = f"{text} {rng.choice(MENTIONS)}"
        bases.append((base_record(f"{text} {_suffix('keep', i + 1)}", "keep"), "keep"))
    for i in range(counts["irrelevant"]):
        text = f"{rng.choice(OFFTOPIC_TEMPLATES)} {_suffix('irrelevant', i + 1)}"
        bases.append((base_record(text, "irrelevant"), "irrelevant"))
    for i in range(counts["keyword"]):
        text = f"{rng.choice(POISON_TEMPLATES)} {_suffix('keyword', i + 1)}"
        bases.append((base_record(text, "keyword"), "keyword"))
    for i in range(counts["language"]):
        text = f"{rng.choice(english_pool)} {_suffix('language', i + 1)}"
        bases.append((base_record(text, "language"), "language"))

    records = [record for record, _ in bases]
    # Exact copies of earlier records: same content and timestamp, fresh id.
    # Serial ids sort after every base id, so the dedup keep-rule (earliest
    # timestamp, then id) always keeps the original and removes the copy.
    for _ in range(counts["duplicate"]):
        source_record, _label = rng.choice(bases)
        copy = Record(
            record_id=next_id(),
            source=source_record.source,
            source_category=source_record.source_category,
            text=source_record.text,
            collected_at=source_record.collected_at,
            author=source_record.author,
            published_at=source_record.published_at,
            url=source_record.url,
            extras={"ground_truth": "duplicate"},
        )
        records.append(copy)

    rng.shuffle(records)
    ground_truth = {r.record_id: r.extras["ground_truth"] for r in records}
    return records, ground_truth


def matching_pipeline_config(endpoint: str | None = None) -> PipelineConfig:
    """The pipeline configuration whose stages mirror the planted noise.

    Language margin is 0 here: every synthetic record is single-language by
    construction, so the code-mixing escape hatch would only misfile noise.
    """
    return PipelineConfig(
        dedup=DedupConfig(mode="exact"),
        language=LanguageConfig(targets=frozenset({TARGET_LANGUAGE}), margin=0.0),
        keyword=KeywordConfig(exclude=(POISON_PHRASE,), match="substring"),
        relevancy=RelevancyStageConfig(
            context=CONTEXT,
            classifier="remote" if endpoint else "baseline",
            threshold=RELEVANCY_THRESHOLD,
            endpoint=endpoint,
        ),
    )


def context_tokens() -> set[str]:
    return set(tokenize(CONTEXT))
