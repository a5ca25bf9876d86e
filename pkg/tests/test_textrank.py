import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kwextract.textproc import PipelineConfig, TokenizedText, filter_tokens, tokenize
from kwextract.textrank import (
    CooccurrenceGraph,
    Keyphrase,
    RankConfig,
    RankMode,
    ScoredTerm,
    agglomerate_phrases,
    build_graph,
    extract_keywords,
    rank_terms,
    stationary_scores,
)

from conftest import SANITY_TEXT
from oracles import (
    degree_law,
    eigenvector_oracle,
    power_iteration_oracle,
    random_connected_weights,
    window_pair_counts,
)

TIGHT = RankConfig(tolerance=1e-12, max_iterations=200_000)


def candidates_for(text, config=None):
    return filter_tokens(tokenize(text, config), config)


def weight(graph, a, b):
    v = graph.vocab
    return int(graph.weights[v[a], v[b]])


def graph_from(weights, terms=None):
    weights = np.asarray(weights)
    terms = terms or [f"t{i}" for i in range(len(weights))]
    return CooccurrenceGraph(terms=terms, weights=weights, first_occurrence={t: i for i, t in enumerate(terms)})


# --- build_graph -----------------------------------------------------------


def test_sanity_text_graph_weights():
    g = build_graph(candidates_for(SANITY_TEXT), window=5)
    assert g.terms == ["cute", "dog", "cat"]
    # per-sentence candidates: [cute, dog], [cute, cat], [dog, cat, cute]
    oracle = window_pair_counts([["cute", "dog"], ["cute", "cat"], ["dog", "cat", "cute"]], 5)
    assert weight(g, "cute", "dog") == oracle[frozenset({"cute", "dog"})] == 2
    assert weight(g, "cute", "cat") == oracle[frozenset({"cute", "cat"})] == 2
    assert weight(g, "dog", "cat") == oracle[frozenset({"dog", "cat"})] == 1
    assert g.first_occurrence == {"cute": 4, "dog": 5, "cat": 11}


def test_single_candidate_has_no_edges():
    g = build_graph(candidates_for("Tension."), window=5)
    assert g.terms == ["tension"]
    assert g.weights.tolist() == [[0]]


def test_window_two_links_neighbours_only():
    g = build_graph(candidates_for("alpha beta gamma"), window=2)
    assert weight(g, "alpha", "beta") == 1
    assert weight(g, "beta", "gamma") == 1
    assert weight(g, "alpha", "gamma") == 0


def test_no_edges_across_sentences():
    g = build_graph(candidates_for("alpha beta. gamma delta."), window=5)
    assert weight(g, "beta", "gamma") == 0
    assert weight(g, "alpha", "beta") == 1


def test_window_below_two_rejected():
    with pytest.raises(ValueError):
        build_graph(candidates_for("a b"), window=1)


def test_empty_candidates_give_empty_graph():
    g = build_graph(TokenizedText(tokens=(), sentence_count=0), window=5)
    assert len(g) == 0 and g.weights.shape == (0, 0)


WORDS = st.sampled_from(["alpha", "beta", "gamma", "delta", "omega", "sigma"])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(WORDS, max_size=12), max_size=5), st.integers(2, 8))
def test_graph_matches_window_enumeration(sentences, window):
    text = " ".join(" ".join(s) + "." for s in sentences if s)
    g = build_graph(candidates_for(text), window)
    w = g.weights
    assert (w == w.T).all()
    assert (np.diag(w) == 0).all()
    assert len(g.vocab) == w.shape[0]
    oracle = window_pair_counts([s for s in sentences if s], window)
    for a in g.terms:
        for b in g.terms:
            if a != b:
                assert weight(g, a, b) == oracle.get(frozenset({a, b}), 0)


# --- stationary_scores -----------------------------------------------------


def test_sanity_graph_scores_follow_degree():
    g = build_graph(candidates_for(SANITY_TEXT), window=5)
    res = stationary_scores(g, TIGHT)
    scores = res.as_dict()
    assert res.converged
    assert scores["cute"] == pytest.approx(0.4, abs=1e-9)
    assert scores["dog"] == pytest.approx(0.3, abs=1e-9)
    assert scores["cat"] == pytest.approx(0.3, abs=1e-9)
    assert np.allclose(list(scores.values()), eigenvector_oracle(g.weights), atol=1e-9)


def test_single_node_scores_one():
    res = stationary_scores(graph_from([[0]]))
    assert res.terms[0].score == 1.0


def test_damped_with_zero_damping_is_uniform():
    w = random_connected_weights(np.random.default_rng(0), 7, 0.3)
    res = stationary_scores(graph_from(w), RankConfig(mode=RankMode.DAMPED, damping=0.0))
    assert np.allclose([t.score for t in res.terms], 1 / 7, atol=1e-15)


def test_damped_matches_pagerank_fixed_point():
    w = random_connected_weights(np.random.default_rng(1), 9, 0.2).astype(float)
    d = 0.85
    p = w / w.sum(axis=1, keepdims=True)
    # direct solve of (I - d P^T) x = (1 - d)/N
    expected = np.linalg.solve(np.eye(9) - d * p.T, np.full(9, (1 - d) / 9))
    res = stationary_scores(graph_from(w), RankConfig(mode=RankMode.DAMPED, damping=d, tolerance=1e-13, max_iterations=10_000))
    assert np.allclose([t.score for t in res.terms], expected, atol=1e-10)


def test_isolated_nodes_score_zero_in_pure_mode():
    w = np.zeros((4, 4), dtype=int)
    w[0, 1] = w[1, 0] = 3
    w[1, 2] = w[2, 1] = 1
    res = stationary_scores(graph_from(w), TIGHT)
    scores = [t.score for t in res.terms]
    assert scores[3] == 0.0
    assert np.allclose(scores[:3], [3 / 8, 4 / 8, 1 / 8], atol=1e-9)
    assert sum(scores) == pytest.approx(1.0, abs=1e-12)


def test_all_isolated_nodes_are_uniform():
    res = stationary_scores(graph_from(np.zeros((3, 3), dtype=int)))
    assert [t.score for t in res.terms] == pytest.approx([1 / 3] * 3)


def test_bipartite_path_converges():
    w = np.zeros((5, 5), dtype=int)
    for i in range(4):
        w[i, i + 1] = w[i + 1, i] = 1
    res = stationary_scores(graph_from(w), TIGHT)
    assert res.converged
    assert np.allclose([t.score for t in res.terms], degree_law(w), atol=1e-9)


def test_non_convergence_is_flagged():
    w = random_connected_weights(np.random.default_rng(3), 30, 0.02)
    res = stationary_scores(graph_from(w), RankConfig(max_iterations=2, tolerance=1e-15))
    assert not res.converged
    assert res.iterations == 2
    assert sum(t.score for t in res.terms) == pytest.approx(1.0)


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        stationary_scores(graph_from(np.zeros((0, 0))))


@pytest.mark.parametrize("seed", range(20))
def test_degree_law_and_oracles_small_graphs(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 21))
    w = random_connected_weights(rng, n, float(rng.uniform(0.0, 0.5)))
    scores = np.array([t.score for t in stationary_scores(graph_from(w), TIGHT).terms])
    assert np.abs(scores - degree_law(w)).max() < 1e-6
    assert np.abs(scores - power_iteration_oracle(w)).max() < 1e-6
    assert np.abs(scores - eigenvector_oracle(w)).max() < 1e-6


@pytest.mark.parametrize("mode", list(RankMode))
def test_scores_sum_to_one(mode):
    rng = np.random.default_rng(11)
    for _ in range(10):
        w = random_connected_weights(rng, int(rng.integers(2, 30)), 0.1)
        res = stationary_scores(graph_from(w), RankConfig(mode=mode))
        assert abs(sum(t.score for t in res.terms) - 1.0) < 1e-6


# --- rank_terms ------------------------------------------------------------


def test_rank_ties_broken_by_first_occurrence():
    scores = [ScoredTerm("cat", 0.3, 10), ScoredTerm("dog", 0.3, 5), ScoredTerm("cute", 0.4, 4)]
    assert [s.term for s in rank_terms(scores, 10)] == ["cute", "dog", "cat"]


def test_rank_lexicographic_last_resort_and_truncation():
    scores = [ScoredTerm("b", 0.5, 1), ScoredTerm("a", 0.5, 1), ScoredTerm("c", 0.1, 0)]
    assert [s.term for s in rank_terms(scores, 2)] == ["a", "b"]
    assert len(rank_terms(scores, 100)) == 3


def test_rank_rejects_bad_top_k():
    with pytest.raises(ValueError):
        rank_terms([], 0)


@pytest.mark.parametrize("factor", [0.001, 0.37, 3.0, 1e6])
def test_ranking_invariant_under_weight_scaling(factor):
    rng = np.random.default_rng(5)
    for _ in range(10):
        w = random_connected_weights(rng, int(rng.integers(2, 25)), 0.2)
        base = rank_terms(stationary_scores(graph_from(w), TIGHT), 100)
        scaled = rank_terms(stationary_scores(graph_from(w * factor), TIGHT), 100)
        assert [s.term for s in base] == [s.term for s in scaled]


def test_sanity_text_ranking_with_tied_dog_and_cat():
    g = build_graph(candidates_for(SANITY_TEXT), 5)
    ranked = rank_terms(stationary_scores(g), 10)
    assert [s.term for s in ranked] == ["cute", "dog", "cat"]


# --- agglomerate_phrases ---------------------------------------------------


AGG = PipelineConfig(agglomerate=True)


def test_department_of_health_bridged():
    text = "Funding came from the Department of Health last year."
    tt = tokenize(text, AGG)
    ranked = [ScoredTerm("department", 0.2, 4), ScoredTerm("health", 0.1, 6)]
    config = PipelineConfig(agglomerate=True, bridge_stopwords_max=2)
    phrases = agglomerate_phrases(ranked, tt, config)
    assert [p.text for p in phrases] == ["Department of Health"]
    assert phrases[0].member_terms == ("department", "health")
    assert phrases[0].score == pytest.approx(0.15)


def test_bridge_limit_respected():
    tt = tokenize("the Department of Health", AGG)
    ranked = [ScoredTerm("department", 0.2, 1), ScoredTerm("health", 0.1, 3)]
    phrases = agglomerate_phrases(ranked, tt, PipelineConfig(agglomerate=True, bridge_stopwords_max=0))
    assert [p.text for p in phrases] == ["Department", "Health"]


def test_adjacent_ranked_terms_merge_with_mean_score():
    tt = tokenize("a very cute dog", AGG)
    ranked = [ScoredTerm("cute", 0.4, 2), ScoredTerm("dog", 0.3, 3)]
    phrases = agglomerate_phrases(ranked, tt, AGG)
    assert [p.text for p in phrases] == ["cute dog"]
    assert phrases[0].score == pytest.approx(0.35)


def test_non_adjacent_terms_stay_single_words():
    tt = tokenize("cute and small dog", AGG)
    ranked = [ScoredTerm("cute", 0.4, 0), ScoredTerm("dog", 0.3, 3)]
    phrases = agglomerate_phrases(ranked, tt, AGG)
    assert [p.text for p in phrases] == ["cute", "dog"]


def test_phrases_do_not_cross_sentences_or_punctuation():
    tt = tokenize("cute. dog, cat", AGG)
    ranked = [ScoredTerm("cute", 0.4, 0), ScoredTerm("dog", 0.3, 2), ScoredTerm("cat", 0.2, 4)]
    assert [p.text for p in agglomerate_phrases(ranked, tt, AGG)] == ["cute", "dog", "cat"]


def test_duplicate_phrases_case_folded():
    tt = tokenize("Heat flux. heat flux again.", AGG)
    ranked = [ScoredTerm("heat", 0.5, 0), ScoredTerm("flux", 0.3, 1)]
    phrases = agglomerate_phrases(ranked, tt, AGG)
    assert [p.text for p in phrases] == ["Heat flux"]


def test_single_word_mode_uses_first_surface():
    tt = tokenize("Solitons appear. A soliton forms.", PipelineConfig(normalizer="light_stem"))
    ranked = [ScoredTerm("soliton", 1.0, 0)]
    phrases = agglomerate_phrases(ranked, tt, PipelineConfig(normalizer="light_stem"))
    assert phrases == [Keyphrase("Solitons", 1.0, ("soliton",), 0)]


# --- extract_keywords ------------------------------------------------------


def test_extract_sanity_check():
    assert [p.text for p in extract_keywords(SANITY_TEXT)] == ["cute", "dog", "cat"]


@pytest.mark.parametrize("text", ["", "   ", "It is what it is, and this is that."])
def test_extract_empty_or_stopword_text(text):
    assert extract_keywords(text) == []


def test_extract_is_deterministic():
    text = (
        "Elastic therapeutic tape was applied to athletes. The tape tension and material "
        "properties were measured in a tension test, and the tape stiffness changed with tension."
    )
    first = extract_keywords(text, AGG)
    assert first == extract_keywords(text, AGG)
    assert first


def test_extract_respects_top_k():
    text = " ".join(f"word{i} term{i}" for i in range(30))
    assert len(extract_keywords(text, rank=RankConfig(top_k=4))) == 4


def test_extract_stemming_merges_plural():
    text = "Solitons travel. The soliton keeps shape. Solitons collide."
    out = extract_keywords(text, PipelineConfig(normalizer="light_stem"))
    assert [p.member_terms for p in out].count(("soliton",)) == 1


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.lists(st.sampled_from(["heat", "flux", "the", "of", "tape", "cute", "and", "dog", "7"]), min_size=1, max_size=10), max_size=4),
    st.integers(0, 3),
)
def test_phrase_text_is_verbatim_source_substring(sentences, bridge):
    text = " ".join(" ".join(s) + "." for s in sentences)
    config = PipelineConfig(agglomerate=True, bridge_stopwords_max=bridge)
    for phrase in extract_keywords(text, config):
        assert phrase.text in text
        assert phrase.text == phrase.text.strip()


def test_rank_config_validation():
    with pytest.raises(ValueError):
        RankConfig(window=1)
    with pytest.raises(ValueError):
        RankConfig(damping=1.5)
    with pytest.raises(ValueError):
        RankConfig(tolerance=0)
    assert RankConfig(mode="damped").mode is RankMode.DAMPED
