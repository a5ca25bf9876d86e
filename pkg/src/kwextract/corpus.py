"""Ingest WOS-style corpus tables and split them into train/test sets.

The table is a comma-delimited, double-quote-quoted UTF-8 file whose header
carries at least the columns ``Y1, Y2, Y, Domain, area, keywords, Abstract``.
The ``keywords`` field holds the author keyword list joined by ``;``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterator, Sequence, Union

import numpy as np

REQUIRED_COLUMNS = ("Y1", "Y2", "Y", "Domain", "area", "keywords", "Abstract")
KEYWORD_SEPARATOR = ";"

Source = Union[str, os.PathLike, IO[str]]


class CorpusError(ValueError):
    """Base class for corpus ingest failures."""


class SchemaError(CorpusError):
    def __init__(self, column: str):
        super().__init__(f"missing required column: {column}")
        self.column = column


class RowError(CorpusError):
    def __init__(self, row: int, message: str):
        super().__init__(f"data row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: int
    y1: int
    y2: int
    y: int
    domain: str
    area: str
    raw_keywords: str
    abstract: str

    @property
    def keywords(self) -> list[str]:
        return parse_keyword_list(self.raw_keywords)


@dataclass(frozen=True)
class Corpus:
    records: tuple[DocumentRecord, ...]
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.records)

    def __getitem__(self, doc_id: int) -> DocumentRecord:
        # ids are 0..N-1 in ingest order
        return self.records[doc_id]

    @property
    def ids(self) -> list[int]:
        return [r.doc_id for r in self.records]

    def subset(self, ids: Sequence[int]) -> list[DocumentRecord]:
        return [self.records[i] for i in sorted(ids)]


@dataclass(frozen=True)
class SplitResult:
    train_ids: list[int]
    test_ids: list[int]
    seed: int
    ratio: Fraction


def parse_keyword_list(raw: str) -> list[str]:
    """Split a ``;``-joined keyword string, trimming and dropping empty items."""
    if not raw:
        return []
    parts = (p.strip() for p in raw.split(KEYWORD_SEPARATOR))
    return [p for p in parts if p]


def _open_text(source: Source) -> tuple[IO[str], str, bool]:
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        return open(path, encoding="utf-8", newline=""), path, True
    return source, getattr(source, "name", "") or "", False


def _int_field(value: str, column: str, row: int) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise RowError(row, f"column {column} is not an integer: {value!r}") from None


def parse_corpus(
    source: Source,
    *,
    delimiter: str = ",",
    max_domain: int | None = 6,
) -> Corpus:
    """Read a WOS-format table into a :class:`Corpus`.

    ``source`` is a path or an open text stream. Records keep file order and
    get ``doc_id`` 0..N-1. ``max_domain`` bounds ``Y1`` (inclusive); pass
    ``None`` for corpora with a different domain count.

    Raises :class:`SchemaError` when a required column is absent and
    :class:`RowError` (1-based data row number) on bad integers, an
    out-of-range domain index or an empty abstract.
    """
    fh, path, owned = _open_text(source)
    try:
        reader = csv.DictReader(fh, delimiter=delimiter, quotechar='"')
        header = reader.fieldnames or []
        present = {name.strip() for name in header}
        for column in REQUIRED_COLUMNS:
            if column not in present:
                raise SchemaError(column)
        # tolerate stray whitespace around header names
        keymap = {name.strip(): name for name in header}

        records = []
        for row_no, row in enumerate(reader, start=1):
            def get(col: str) -> str:
                value = row.get(keymap[col])
                return "" if value is None else value.strip()

            y1 = _int_field(get("Y1"), "Y1", row_no)
            y2 = _int_field(get("Y2"), "Y2", row_no)
            y = _int_field(get("Y"), "Y", row_no)
            if y1 < 0 or (max_domain is not None and y1 > max_domain):
                raise RowError(row_no, f"Y1={y1} outside [0, {max_domain}]")
            abstract = get("Abstract")
            if not abstract:
                raise RowError(row_no, "empty abstract")
            records.append(
                DocumentRecord(
                    doc_id=len(records),
                    y1=y1,
                    y2=y2,
                    y=y,
                    domain=get("Domain"),
                    area=get("area"),
                    raw_keywords=get("keywords"),
                    abstract=abstract,
                )
            )
    finally:
        if owned:
            fh.close()
    return Corpus(records=tuple(records), source_path=path)


def parse_corpus_text(text: str, **kwargs) -> Corpus:
    return parse_corpus(io.StringIO(text, newline=""), **kwargs)


def write_corpus(records: Sequence[DocumentRecord], dest: Source) -> None:
    """Write records back out in the same table layout (used by fixtures)."""
    fh, _, owned = (
        (open(os.fspath(dest), "w", encoding="utf-8", newline=""), "", True)
        if isinstance(dest, (str, os.PathLike))
        else (dest, "", False)
    )
    try:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(REQUIRED_COLUMNS)
        for r in records:
            writer.writerow([r.y1, r.y2, r.y, r.domain, r.area, r.raw_keywords, r.abstract])
    finally:
        if owned:
            fh.close()


def _as_fraction(ratio) -> Fraction:
    if isinstance(ratio, float):
        # 0.7 -> 7/10 rather than the binary expansion
        return Fraction(repr(ratio))
    return Fraction(ratio)


def held_out_size(n: int, ratio) -> int:
    """Number of held-out records: ``ceil((1 - ratio) * n)`` in exact arithmetic."""
    frac = _as_fraction(ratio)
    return math.ceil((1 - frac) * n)


def split_corpus(corpus: Corpus, ratio=0.7, seed: int = 0, *, stratify: bool = False) -> SplitResult:
    """Seeded shuffle split; ``ratio`` is the train fraction.

    The held-out size is always ``ceil((1 - ratio) * N)``. With
    ``stratify=True`` that total is apportioned over ``Y1`` groups by
    largest remainder, so each domain keeps roughly the same share.
    """
    frac = _as_fraction(ratio)
    if not 0 < frac < 1:
        raise ValueError(f"ratio must lie strictly between 0 and 1, got {ratio}")
    n = len(corpus)
    if n == 0:
        raise ValueError("cannot split an empty corpus")
    n_test = held_out_size(n, frac)
    rng = np.random.default_rng(seed)

    if not stratify:
        order = rng.permutation(n)
        test = sorted(int(i) for i in order[:n_test])
    else:
        groups: dict[int, list[int]] = {}
        for r in corpus:
            groups.setdefault(r.y1, []).append(r.doc_id)
        keys = sorted(groups)
        quotas = {k: Fraction(len(groups[k]) * n_test, n) for k in keys}
        alloc = {k: math.floor(q) for k, q in quotas.items()}
        leftover = n_test - sum(alloc.values())
        by_remainder = sorted(keys, key=lambda k: (-(quotas[k] - alloc[k]), k))
        for k in by_remainder[:leftover]:
            alloc[k] += 1
        test = []
        for k in keys:
            members = np.asarray(groups[k])
            picked = rng.permutation(len(members))[: alloc[k]]
            test.extend(int(members[i]) for i in picked)
        test.sort()

    held = set(test)
    train = [i for i in range(n) if i not in held]
    return SplitResult(train_ids=train, test_ids=test, seed=seed, ratio=frac)
