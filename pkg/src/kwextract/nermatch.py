"""Use precomputed NER annotations as keyword candidates.

Annotation tables are TSV rows ``doc_id, surface, label, model_id``; every
model is described by a manifest listing its label set. Two products come
out of them: a keyword presence table (is each reference keyword in the
abstract, and did each model find it?) and a regular evaluation report that
treats one model's entity surfaces as that document's extracted keywords.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence, Union

from .corpus import Corpus, parse_keyword_list
from .evaluation import EvalReport, MatchConfig, evaluate_instances, similarity

Source = Union[str, os.PathLike, IO[str]]

FOUR_CLASS_LABELS = frozenset({"LOC", "PER", "ORG", "MISC"})
BIOMEDICAL_LABELS = frozenset({"Chemical", "Disease", "Species", "Gene", "CellLine"})


class AnnotationFormatError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"annotation row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class ModelManifest:
    model_id: str
    labels: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))
        if not self.labels:
            raise ValueError(f"manifest for {self.model_id!r} has no labels")


@dataclass(frozen=True)
class NerAnnotation:
    doc_id: int
    surface: str
    label: str
    model_id: str


@dataclass(frozen=True)
class PresenceRow:
    doc_id: int
    keyword: str
    in_abstract: bool
    best_abstract_similarity: float
    found_by: dict[str, bool]


def load_manifests(source: Source) -> dict[str, ModelManifest]:
    """Read ``{"model_id": ..., "labels": [...]}`` or a list of such objects."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_manifests(fh)
    data = json.load(source)
    if isinstance(data, dict):
        data = [data]
    out = {}
    for entry in data:
        manifest = ModelManifest(model_id=str(entry["model_id"]), labels=frozenset(entry["labels"]))
        out[manifest.model_id] = manifest
    return out


def _manifest_map(manifests) -> dict[str, ModelManifest]:
    if isinstance(manifests, ModelManifest):
        return {manifests.model_id: manifests}
    if isinstance(manifests, Mapping):
        return dict(manifests)
    return {m.model_id: m for m in manifests}


def load_annotations(source: Source, manifests) -> list[NerAnnotation]:
    """Parse an annotation TSV, checking models and labels against ``manifests``.

    A first line starting with ``doc_id`` is treated as a header. Row numbers
    in errors count physical lines from 1.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_annotations(fh, manifests)
    known = _manifest_map(manifests)
    out = []
    for row_no, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if row_no == 1 and fields[0].strip() == "doc_id":
            continue
        if len(fields) != 4:
            raise AnnotationFormatError(row_no, f"expected 4 fields, got {len(fields)}")
        doc_field, surface, label, model_id = (f.strip() for f in fields)
        try:
            doc_id = int(doc_field)
        except ValueError:
            raise AnnotationFormatError(row_no, f"bad doc_id {doc_field!r}") from None
        if model_id not in known:
            raise AnnotationFormatError(row_no, f"unknown model {model_id!r}")
        if label not in known[model_id].labels:
            raise AnnotationFormatError(row_no, f"label {label!r} not declared for {model_id!r}")
        out.append(NerAnnotation(doc_id, surface, label, model_id))
    return out


_WORD = re.compile(r"\w+")
_EDGE = re.compile(r"^\W+|\W+$")
_SPACE = re.compile(r"\s+")


def _clean(text: str) -> str:
    return _SPACE.sub(" ", text).strip()


def best_window_similarity(keyword: str, text: str, case_fold: bool = True) -> float:
    """Best similarity between ``keyword`` and any word-aligned span of ``text``.

    Spans run from the start of one word to the end of another and hold one
    word fewer to one word more than the keyword. Leading and trailing
    punctuation of the keyword is ignored and whitespace runs count as a
    single space on both sides.
    """
    key = _clean(_EDGE.sub("", keyword))
    n = len(_WORD.findall(key))
    if n == 0:
        return 0.0
    words = [m.span() for m in _WORD.finditer(text)]
    target = key.casefold() if case_fold else key
    best = 0.0
    for size in range(max(1, n - 1), n + 2):
        for i in range(len(words) - size + 1):
            window = _clean(text[words[i][0] : words[i + size - 1][1]])
            probe = window.casefold() if case_fold else window
            if probe == target:
                return 1.0
            # similarity cannot beat 1 - |len diff| / longest
            longest = max(len(probe), len(target))
            if 1.0 - abs(len(probe) - len(target)) / longest <= best:
                continue
            best = max(best, similarity(key, window, case_fold))
    return best


def _by_doc(annotations: Iterable[NerAnnotation]) -> dict[int, dict[str, list[str]]]:
    out: dict[int, dict[str, list[str]]] = {}
    for a in annotations:
        out.setdefault(a.doc_id, {}).setdefault(a.model_id, []).append(a.surface)
    return out


def keyword_presence(
    corpus: Corpus,
    annotations: Sequence[NerAnnotation],
    config: MatchConfig | None = None,
    model_ids: Sequence[str] | None = None,
) -> list[PresenceRow]:
    """One row per (document, reference keyword), in corpus order.

    ``threshold=1.0`` gives the exact-match table; lower thresholds also
    accept inflected or partial forms.
    """
    config = config or MatchConfig()
    if model_ids is None:
        model_ids = sorted({a.model_id for a in annotations})
    grouped = _by_doc(annotations)
    rows = []
    for record in corpus:
        found = grouped.get(record.doc_id, {})
        for kw in parse_keyword_list(record.raw_keywords):
            best = best_window_similarity(kw, record.abstract, config.case_fold)
            flags = {
                m: any(similarity(kw, s, config.case_fold) >= config.threshold for s in found.get(m, ()))
                for m in model_ids
            }
            rows.append(PresenceRow(record.doc_id, kw, best >= config.threshold, best, flags))
    return rows


def write_presence(rows: Sequence[PresenceRow], model_ids: Sequence[str], dest: IO[str]) -> None:
    dest.write("\t".join(["doc_id", "keyword", "in_abstract", "best_sim", *model_ids]) + "\n")
    for r in rows:
        cells = [str(r.doc_id), r.keyword, str(int(r.in_abstract)), f"{r.best_abstract_similarity:.6f}"]
        cells.extend(str(int(r.found_by.get(m, False))) for m in model_ids)
        dest.write("\t".join(cells) + "\n")


def dedupe(surfaces: Iterable[str]) -> list[str]:
    seen: dict[str, str] = {}
    for s in surfaces:
        seen.setdefault(s.casefold(), s)
    return list(seen.values())


def evaluate_ner_as_keywords(
    corpus: Corpus,
    annotations: Sequence[NerAnnotation],
    model_id: str,
    config: MatchConfig | None = None,
) -> EvalReport:
    """Score one model's entity surfaces against every document's keywords."""
    if not any(a.model_id == model_id for a in annotations):
        raise ValueError(f"no annotations for model {model_id!r}")
    grouped = _by_doc(annotations)
    candidates = {}
    references = {}
    for record in corpus:
        candidates[record.doc_id] = dedupe(grouped.get(record.doc_id, {}).get(model_id, []))
        references[record.doc_id] = parse_keyword_list(record.raw_keywords)
    return evaluate_instances(candidates, references, config)
