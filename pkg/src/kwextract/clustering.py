"""K-Means over precomputed document embeddings and per-cluster keyphrases.

Embeddings are read from a TSV file (``doc_id`` followed by the vector
components); nothing here computes semantic embeddings. :func:`hash_embed`
is a non-semantic bag-of-words projection meant only for tests and demos.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .corpus import Corpus, parse_keyword_list
from .textproc import PipelineConfig
from .textrank import Keyphrase, RankConfig, extract_keywords

Source = Union[str, os.PathLike, IO[str]]

# rows per block when computing point-to-centroid distances
_CHUNK = 4096


class EmbeddingFormatError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"embedding row {row}: {message}")
        self.row = row


@dataclass
class EmbeddingTable:
    ids: list[int]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def vectors(self) -> dict[int, np.ndarray]:
        return {doc_id: self.matrix[i] for i, doc_id in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_arrays(cls, ids: Sequence[int], matrix) -> "EmbeddingTable":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != len(ids):
            raise ValueError("matrix must be 2-D with one row per id")
        if not np.isfinite(matrix).all():
            raise ValueError("embedding values must be finite")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate doc ids")
        return cls(ids=[int(i) for i in ids], matrix=matrix)


def load_embeddings(source: Source) -> EmbeddingTable:
    """Parse ``doc_id<TAB>v1<TAB>...<TAB>vD`` rows; blank lines are skipped."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_embeddings(fh)

    ids: list[int] = []
    rows: list[list[float]] = []
    seen: set[int] = set()
    dim = None
    for row_no, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        try:
            doc_id = int(fields[0])
        except ValueError:
            raise EmbeddingFormatError(row_no, f"bad doc_id {fields[0]!r}") from None
        try:
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise EmbeddingFormatError(row_no, str(exc)) from None
        if not values:
            raise EmbeddingFormatError(row_no, "no vector components")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise EmbeddingFormatError(row_no, f"expected {dim} components, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise EmbeddingFormatError(row_no, "non-finite value")
        if doc_id in seen:
            raise EmbeddingFormatError(row_no, f"duplicate doc_id {doc_id}")
        seen.add(doc_id)
        ids.append(doc_id)
        rows.append(values)
    matrix = np.asarray(rows, dtype=float).reshape(len(rows), dim or 0)
    return EmbeddingTable(ids=ids, matrix=matrix)


def write_embeddings(table: EmbeddingTable, dest: Source) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            return write_embeddings(table, fh)
    for doc_id, row in zip(table.ids, table.matrix):
        dest.write(str(doc_id) + "\t" + "\t".join(repr(float(v)) for v in row) + "\n")


_WORD = re.compile(r"\w+")


def hash_embed(texts: Sequence[str], dim: int = 384, ids: Sequence[int] | None = None) -> EmbeddingTable:
    """Signed feature hashing of lowercase words, L2-normalized.

    Documents with overlapping vocabulary land close together, but the
    vectors carry no semantics beyond shared surface words.
    """
    matrix = np.zeros((len(texts), dim))
    for row, text in enumerate(texts):
        for word in _WORD.findall(text.lower()):
            digest = hashlib.blake2b(word.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "little")
            matrix[row, h % dim] += 1.0 if (h >> 63) & 1 else -1.0
        norm = np.linalg.norm(matrix[row])
        if norm > 0:
            matrix[row] /= norm
    return EmbeddingTable.from_arrays(list(ids) if ids is not None else list(range(len(texts))), matrix)


# --- K-Means ---------------------------------------------------------------


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    ids: list[int]
    inertia: float
    iterations: int
    seed: int
    converged: bool
    inertia_history: list[float] = field(default_factory=list)

    @property
    def assignments(self) -> dict[int, int]:
        return {doc_id: int(c) for doc_id, c in zip(self.ids, self.labels)}

    def members(self, cluster: int) -> list[int]:
        return sorted(doc_id for doc_id, c in zip(self.ids, self.labels) if c == cluster)

    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.k).tolist()


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """``(n, k)`` squared Euclidean distances, computed blockwise."""
    out = np.empty((points.shape[0], centroids.shape[0]))
    for lo in range(0, points.shape[0], _CHUNK):
        block = points[lo : lo + _CHUNK]
        diff = block[:, None, :] - centroids[None, :, :]
        out[lo : lo + _CHUNK] = np.einsum("nkd,nkd->nk", diff, diff)
    return out


def assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    d2 = squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)  # ties go to the lowest index
    inertia = float(d2[np.arange(len(points)), labels].sum())
    return labels, inertia


def _init_random(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # draw among distinct rows so duplicated points cannot start two clusters
    _, first = np.unique(points, axis=0, return_index=True)
    pool = np.sort(first) if len(first) >= k else np.arange(len(points))
    idx = rng.choice(pool, size=k, replace=False)
    return points[np.sort(idx)].copy()


def _init_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = squared_distances(points, points[chosen]).min(axis=1)
    while len(chosen) < k:
        total = d2.sum()
        if total <= 0:
            remaining = [i for i in range(n) if i not in set(chosen)]
            chosen.append(int(rng.choice(remaining)))
        else:
            chosen.append(int(rng.choice(n, p=d2 / total)))
        d2 = np.minimum(d2, squared_distances(points, points[chosen[-1:]])[:, 0])
    return points[chosen].copy()


def _update(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    k = centroids.shape[0]
    new = centroids.copy()
    empty = []
    for c in range(k):
        mask = labels == c
        if mask.any():
            new[c] = points[mask].mean(axis=0)
        else:
            empty.append(c)
    if empty:
        # reseed each empty centroid on the point farthest from its own centroid
        d2 = ((points - new[labels]) ** 2).sum(axis=1)
        taken: set[int] = set()
        for c in empty:
            order = np.argsort(-d2, kind="stable")
            for i in order:
                if int(i) not in taken:
                    break
            if d2[i] > 0:
                new[c] = points[i]
                taken.add(int(i))
    return new


def _lloyd(points, centroids, max_iterations):
    labels, inertia = assign(points, centroids)
    history = [inertia]
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        centroids = _update(points, labels, centroids)
        new_labels, inertia = assign(points, centroids)
        history.append(inertia)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    return centroids, labels, inertia, it, converged, history


def kmeans(
    table: EmbeddingTable,
    k: int,
    seed: int = 0,
    max_iterations: int = 300,
    *,
    n_init: int = 10,
    init: str = "k-means++",
) -> ClusterModel:
    """Lloyd's algorithm with seeded restarts.

    Each restart starts from ``k`` distinct data points, drawn either with
    D^2 weighting (``init="k-means++"``, the default) or uniformly
    (``init="random"``), then alternates nearest-centroid assignment
    and mean updates until the assignment stops changing or
    ``max_iterations`` is hit. The restart with the lowest inertia wins;
    ties keep the earliest. Restart seeds derive from ``seed``, so a fixed
    seed always reproduces the same model.
    """
    points = np.asarray(table.matrix, dtype=float)
    n = len(points)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    if init not in ("random", "k-means++"):
        raise ValueError(f"unknown init {init!r}")

    best = None
    for child in np.random.SeedSequence(seed).spawn(n_init):
        rng = np.random.default_rng(child)
        start = _init_random(points, k, rng) if init == "random" else _init_plusplus(points, k, rng)
        run = _lloyd(points, start, max_iterations)
        if best is None or run[2] < best[2]:
            best = run
    centroids, labels, inertia, iterations, converged, history = best
    return ClusterModel(
        k=k,
        centroids=centroids,
        labels=np.asarray(labels),
        ids=list(table.ids),
        inertia=inertia,
        iterations=iterations,
        seed=seed,
        converged=converged,
        inertia_history=history,
    )


# --- per-cluster keyphrases and references ---------------------------------


def cluster_text(abstracts: Iterable[str]) -> str:
    parts = []
    for text in abstracts:
        text = text.strip()
        if text and text[-1] not in ".!?":
            text += "."
        parts.append(text)
    return "\n\n".join(parts)


def extract_cluster_keyphrases(
    corpus: Corpus,
    model: ClusterModel,
    pipeline: PipelineConfig | None = None,
    rank: RankConfig | None = None,
) -> dict[int, list[Keyphrase]]:
    """Run TextRank on each cluster's abstracts joined in ``doc_id`` order."""
    out = {}
    for c in range(model.k):
        members = model.members(c)
        if not members:
            out[c] = []
            continue
        text = cluster_text(corpus[i].abstract for i in members)
        out[c] = extract_keywords(text, pipeline, rank)
    return out


@dataclass
class ClusterReference:
    keywords: list[str]
    frequency: dict[str, int]

    def by_frequency(self) -> list[str]:
        """Keywords sorted by how many member lists mention them."""
        order = {kw: i for i, kw in enumerate(self.keywords)}
        return sorted(self.keywords, key=lambda kw: (-self.frequency[kw], order[kw]))


def build_cluster_reference(corpus: Corpus, model: ClusterModel) -> dict[int, ClusterReference]:
    """Union of member keyword lists per cluster, deduplicated ignoring case.

    The first casing seen (in ``doc_id`` order) is kept and every keyword is
    counted once per occurrence across the members.
    """
    out = {}
    for c in range(model.k):
        first: dict[str, str] = {}
        counts: Counter = Counter()
        for doc_id in model.members(c):
            for kw in parse_keyword_list(corpus[doc_id].raw_keywords):
                key = kw.casefold()
                first.setdefault(key, kw)
                counts[key] += 1
        keywords = list(first.values())
        out[c] = ClusterReference(keywords=keywords, frequency={first[k]: counts[k] for k in first})
    return out


def cluster_report(
    model: ClusterModel,
    phrases: dict[int, list[Keyphrase]],
    references: dict[int, ClusterReference],
) -> dict:
    """Plain structure written by the ``cluster`` command."""
    sizes = model.sizes()
    return {
        "k": model.k,
        "seed": model.seed,
        "inertia": round(model.inertia, 6),
        "iterations": model.iterations,
        "converged": model.converged,
        "clusters": {
            str(c): {
                "size": sizes[c],
                "members": model.members(c),
                "top_phrases": [{"text": p.text, "score": round(p.score, 6)} for p in phrases.get(c, [])],
                "reference_keywords": references[c].keywords if c in references else [],
                "reference_frequency": references[c].frequency if c in references else {},
            }
            for c in range(model.k)
        },
    }


def dump_cluster_report(report: dict, dest: IO[str]) -> None:
    json.dump(report, dest, indent=2, ensure_ascii=False, sort_keys=False)
    dest.write("\n")
