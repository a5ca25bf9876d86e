"""Fuzzy keyphrase matching and precision/recall/F1 reports.

Two phrases match when their edit-distance similarity
``1 - lev(a, b) / max(len(a), len(b))`` reaches the threshold. Candidate
and reference lists are paired one-to-one by a greedy pass over all pairs
in order of decreasing similarity.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class MatchConfig:
    threshold: float = 0.8
    case_fold: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute distance, two-row table."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        previous = current
    return previous[-1]


def similarity(a: str, b: str, case_fold: bool = True) -> float:
    if case_fold:
        a, b = a.casefold(), b.casefold()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class MatchResult:
    pairs: list[tuple[str, str, float]]
    unmatched_candidates: list[str]
    unmatched_references: list[str]
    n_candidates: int
    n_references: int

    @property
    def n_matched(self) -> int:
        return len(self.pairs)


def match_lists(
    candidates: Sequence[str],
    references: Sequence[str],
    config: MatchConfig | None = None,
) -> MatchResult:
    config = config or MatchConfig()
    scored = []
    for i, cand in enumerate(candidates):
        for j, ref in enumerate(references):
            sim = similarity(cand, ref, config.case_fold)
            if sim >= config.threshold:
                scored.append((-sim, i, j))
    scored.sort()
    used_c: set[int] = set()
    used_r: set[int] = set()
    pairs = []
    for neg_sim, i, j in scored:
        if i in used_c or j in used_r:
            continue
        used_c.add(i)
        used_r.add(j)
        pairs.append((i, j, -neg_sim))
    pairs.sort()
    return MatchResult(
        pairs=[(candidates[i], references[j], sim) for i, j, sim in pairs],
        unmatched_candidates=[c for i, c in enumerate(candidates) if i not in used_c],
        unmatched_references=[r for j, r in enumerate(references) if j not in used_r],
        n_candidates=len(candidates),
        n_references=len(references),
    )


@dataclass(frozen=True)
class InstanceScore:
    precision: float
    recall: float
    f1: float
    n_candidates: int
    n_references: int
    n_matched: int

    @classmethod
    def from_counts(cls, n_matched: int, n_candidates: int, n_references: int) -> "InstanceScore":
        # both lists empty is a perfect answer; one empty side scores 0
        if n_candidates == 0 and n_references == 0:
            p = r = 1.0
        else:
            p = n_matched / n_candidates if n_candidates else 0.0
            r = n_matched / n_references if n_references else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f1, n_candidates, n_references, n_matched)

    def as_dict(self) -> dict:
        return asdict(self)


def score_instance(m: MatchResult) -> InstanceScore:
    return InstanceScore.from_counts(m.n_matched, m.n_candidates, m.n_references)


@dataclass(frozen=True)
class EvalReport:
    per_instance: list[InstanceScore]
    micro: InstanceScore
    macro: InstanceScore
    keys: list | None = None

    def as_dict(self) -> dict:
        rows = []
        for i, s in enumerate(self.per_instance):
            row = {"id": self.keys[i] if self.keys is not None else i}
            row.update(s.as_dict())
            rows.append(row)
        return {"per_instance": rows, "micro": self.micro.as_dict(), "macro": self.macro.as_dict()}

    def summary_table(self) -> str:
        lines = [f"{'':<8}{'precision':>11}{'recall':>11}{'f1':>11}"]
        for name, s in (("micro", self.micro), ("macro", self.macro)):
            lines.append(f"{name:<8}{s.precision:>11.4f}{s.recall:>11.4f}{s.f1:>11.4f}")
        lines.append(f"instances: {len(self.per_instance)}")
        return "\n".join(lines)


def aggregate(scores: Sequence[InstanceScore], keys: Sequence | None = None) -> EvalReport:
    """Micro scores pool the counts; macro scores average per-instance metrics."""
    if not scores:
        raise ValueError("cannot aggregate an empty score list")
    micro = InstanceScore.from_counts(
        sum(s.n_matched for s in scores),
        sum(s.n_candidates for s in scores),
        sum(s.n_references for s in scores),
    )
    n = len(scores)
    macro = InstanceScore(
        precision=sum(s.precision for s in scores) / n,
        recall=sum(s.recall for s in scores) / n,
        f1=sum(s.f1 for s in scores) / n,
        n_candidates=micro.n_candidates,
        n_references=micro.n_references,
        n_matched=micro.n_matched,
    )
    return EvalReport(per_instance=list(scores), micro=micro, macro=macro, keys=list(keys) if keys is not None else None)


def evaluate_instances(
    candidates: Mapping,
    references: Mapping,
    config: MatchConfig | None = None,
) -> EvalReport:
    """Score each key of ``candidates`` against the same key in ``references``."""
    config = config or MatchConfig()
    missing = [k for k in candidates if k not in references]
    if missing:
        raise ValueError(f"no reference list for instance {missing[0]!r}")
    keys = list(candidates)
    scores = [score_instance(match_lists(candidates[k], references[k], config)) for k in keys]
    return aggregate(scores, keys)


def evaluate_cluster(
    candidates_by_cluster: Mapping,
    references_by_cluster: Mapping,
    config: MatchConfig | None = None,
) -> EvalReport:
    """One instance per cluster, scored against its expanded reference list.

    Expanded lists are long, so recall here is naturally lower than in the
    per-document setting.
    """
    for key in candidates_by_cluster:
        if key not in references_by_cluster:
            raise ValueError(f"cluster {key!r} has candidates but no reference list")
    for key in references_by_cluster:
        if key not in candidates_by_cluster:
            raise ValueError(f"cluster {key!r} has a reference list but no candidates")
    keys = sorted(candidates_by_cluster)
    return evaluate_instances(
        {k: candidates_by_cluster[k] for k in keys},
        {k: references_by_cluster[k] for k in keys},
        config,
    )
