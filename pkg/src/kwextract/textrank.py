"""TextRank keyword extraction over a windowed co-occurrence graph.

Terms are nodes; two terms are linked with weight equal to the number of
token-position pairs, inside one sentence and less than ``window`` candidate
positions apart, at which they co-occur. Term scores are the stationary
distribution of the random walk on that weighted undirected graph.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .textproc import PipelineConfig, TokenizedText, filter_tokens, tokenize


class RankMode(enum.Enum):
    PURE = "pure"
    DAMPED = "damped"


@dataclass(frozen=True)
class RankConfig:
    window: int = 5
    mode: RankMode = RankMode.PURE
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iterations: int = 100
    top_k: int = 10

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", RankMode(self.mode))
        if self.window < 2:
            raise ValueError("window must be >= 2")
        if not 0.0 <= self.damping <= 1.0:
            raise ValueError("damping must lie in [0, 1]")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass
class CooccurrenceGraph:
    terms: list[str]
    weights: np.ndarray
    first_occurrence: dict[str, int]

    @property
    def vocab(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def strength(self) -> np.ndarray:
        """Weighted degree of every node."""
        return self.weights.sum(axis=1)


@dataclass(frozen=True)
class ScoredTerm:
    term: str
    score: float
    first_occurrence: int


@dataclass(frozen=True)
class StationaryResult:
    terms: list[ScoredTerm]
    converged: bool
    iterations: int

    def as_dict(self) -> dict[str, float]:
        return {t.term: t.score for t in self.terms}


@dataclass(frozen=True)
class Keyphrase:
    text: str
    score: float
    member_terms: tuple[str, ...]
    first_occurrence: int = 0


def build_graph(candidates: TokenizedText, window: int = 5) -> CooccurrenceGraph:
    if window < 2:
        raise ValueError("window must be >= 2")
    terms: list[str] = []
    index: dict[str, int] = {}
    first: dict[str, int] = {}
    for tok in candidates.tokens:
        if tok.normalized not in index:
            index[tok.normalized] = len(terms)
            terms.append(tok.normalized)
            first[tok.normalized] = tok.token_index

    weights = np.zeros((len(terms), len(terms)), dtype=np.int64)
    run: list[int] = []
    current = None
    for tok in candidates.tokens:
        if tok.sentence_index != current:
            current = tok.sentence_index
            run = []
        node = index[tok.normalized]
        # each earlier position closer than `window` pairs with this one once
        for other in run[-(window - 1):]:
            if other != node:
                weights[node, other] += 1
                weights[other, node] += 1
        run.append(node)
    return CooccurrenceGraph(terms=terms, weights=weights, first_occurrence=first)


def _transition(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(weights, dtype=float)
    strength = w.sum(axis=1)
    live = strength > 0
    trans = np.zeros_like(w)
    trans[live] = w[live] / strength[live, None]
    return trans, live


def stationary_scores(graph: CooccurrenceGraph, config: RankConfig | None = None) -> StationaryResult:
    """Power-iterate the term random walk to its stationary distribution.

    Pure mode walks the row-normalized weight matrix with no restart. It
    takes the lazy step ``p <- (p + P^T p) / 2``, which has the same fixed
    point but also converges on bipartite graphs (paths, stars), where the
    plain step oscillates. Isolated terms score 0; if every term is
    isolated the scores are uniform.

    Damped mode iterates ``p <- (1 - d)/N + d P^T p`` with the mass of
    isolated terms spread uniformly.

    Iteration stops once the largest per-term change falls below
    ``tolerance``; a run that hits ``max_iterations`` first is returned
    with ``converged=False``.
    """
    config = config or RankConfig()
    n = len(graph)
    if n == 0:
        raise ValueError("graph has no nodes")
    trans, live = _transition(graph.weights)
    trans_t = trans.T.copy()

    if config.mode is RankMode.PURE:
        if not live.any():
            p = np.full(n, 1.0 / n)
            return _result(graph, p, True, 0)
        p = np.where(live, 1.0, 0.0)
        p /= p.sum()

        def step(p):
            return 0.5 * (p + trans_t @ p)
    else:
        d = config.damping
        dead = ~live

        def step(p):
            dangling = p[dead].sum() / n
            return (1.0 - d) / n + d * (trans_t @ p + dangling)

        p = np.full(n, 1.0 / n)

    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        nxt = step(p)
        nxt /= nxt.sum()
        delta = np.abs(nxt - p).max()
        p = nxt
        if delta < config.tolerance:
            converged = True
            break
    return _result(graph, p, converged, it)


def _result(graph: CooccurrenceGraph, p: np.ndarray, converged: bool, iterations: int) -> StationaryResult:
    terms = [
        ScoredTerm(term=t, score=float(p[i]), first_occurrence=graph.first_occurrence.get(t, i))
        for i, t in enumerate(graph.terms)
    ]
    return StationaryResult(terms=terms, converged=converged, iterations=iterations)


def _order_key(score: float, first: int, text: str):
    # scores equal up to float noise count as ties
    return (-round(score, 12), first, text)


def rank_terms(scores, top_k: int = 10) -> list[ScoredTerm]:
    """Sort by score, then earliest occurrence, then term; keep ``top_k``."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if isinstance(scores, StationaryResult):
        scores = scores.terms
    ordered = sorted(scores, key=lambda s: _order_key(s.score, s.first_occurrence, s.term))
    return ordered[:top_k]


def agglomerate_phrases(
    ranked: list[ScoredTerm],
    tt: TokenizedText,
    config: PipelineConfig | None = None,
) -> list[Keyphrase]:
    """Turn ranked terms into keyphrases found in the unfiltered tokens ``tt``.

    With ``config.agglomerate`` off every ranked term becomes a one-word
    phrase whose text is its earliest surface form. With it on, maximal
    in-sentence runs of ranked tokens are merged, where up to
    ``bridge_stopwords_max`` consecutive stopwords may sit between two
    ranked tokens; runs start and end on ranked tokens. A phrase scores the
    mean of its distinct member terms. Case-insensitive duplicate texts keep
    the best-scoring copy.
    """
    config = config or PipelineConfig()
    score_of = {s.term: s.score for s in ranked}
    if not score_of:
        return []

    def ranked_tok(tok) -> bool:
        return tok.normalized in score_of and not tok.is_punct and tok.surface.lower() not in config.stopwords

    if not config.agglomerate:
        phrases: dict[str, Keyphrase] = {}
        for tok in tt.tokens:
            if ranked_tok(tok) and tok.normalized not in phrases:
                phrases[tok.normalized] = Keyphrase(
                    text=tok.surface,
                    score=score_of[tok.normalized],
                    member_terms=(tok.normalized,),
                    first_occurrence=tok.token_index,
                )
        return _sorted_phrases(phrases.values())

    runs: list[list] = []
    current: list = []
    gap = 0
    sentence = None
    for tok in tt.tokens:
        if tok.sentence_index != sentence:
            if current:
                runs.append(current)
            current, gap, sentence = [], 0, tok.sentence_index
        if ranked_tok(tok):
            current.append(tok)
            gap = 0
        elif current and not tok.is_punct and tok.surface.lower() in config.stopwords and gap < config.bridge_stopwords_max:
            current.append(tok)
            gap += 1
        else:
            if current:
                runs.append(current)
            current, gap = [], 0
    if current:
        runs.append(current)

    best: dict[str, Keyphrase] = {}
    for run in runs:
        while run and not ranked_tok(run[-1]):
            run.pop()
        members = tuple(dict.fromkeys(t.normalized for t in run if ranked_tok(t)))
        start, end = run[0].char_span[0], run[-1].char_span[1]
        phrase = Keyphrase(
            text=tt.text[start:end],
            score=float(np.mean([score_of[m] for m in members])),
            member_terms=members,
            first_occurrence=run[0].token_index,
        )
        key = phrase.text.casefold()
        if key not in best or phrase.score > best[key].score:
            best[key] = phrase
    return _sorted_phrases(best.values())


def _sorted_phrases(phrases) -> list[Keyphrase]:
    return sorted(phrases, key=lambda k: _order_key(k.score, k.first_occurrence, k.text))


def extract_keywords(
    text: str,
    pipeline: PipelineConfig | None = None,
    rank: RankConfig | None = None,
) -> list[Keyphrase]:
    """Tokenize, filter, rank and phrase ``text``; at most ``rank.top_k`` phrases."""
    pipeline = pipeline or PipelineConfig()
    rank = rank or RankConfig()
    tt = tokenize(text, pipeline)
    candidates = filter_tokens(tt, pipeline)
    if not candidates.tokens:
        return []
    graph = build_graph(candidates, rank.window)
    scores = stationary_scores(graph, rank)
    ranked = rank_terms(scores, rank.top_k)
    return agglomerate_phrases(ranked, tt, pipeline)[: rank.top_k]
