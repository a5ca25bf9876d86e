import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kwextract.evaluation import (
    InstanceScore,
    MatchConfig,
    aggregate,
    evaluate_cluster,
    levenshtein,
    match_lists,
    score_instance,
    similarity,
)

from oracles import best_matching_size, edit_distance_oracle, oracle_similarity


def test_radio_frequencies_similarity():
    assert edit_distance_oracle("radio frequency", "radio frequencies") == 3
    assert similarity("radio frequency", "radio frequencies") == pytest.approx(14 / 17, abs=1e-12)


def test_radio_frequency_scanner_similarity():
    assert edit_distance_oracle("radio frequency", "radio frequency scanner") == 8
    assert similarity("radio frequency", "radio frequency scanner") == pytest.approx(15 / 23, abs=1e-12)


@pytest.mark.parametrize(
    "a, b, expected",
    [("abc", "abc", 1.0), ("", "", 1.0), ("", "abc", 0.0), ("ABC", "abc", 1.0), ("kitten", "sitting", 4 / 7)],
)
def test_similarity_examples(a, b, expected):
    assert similarity(a, b) == pytest.approx(expected, abs=1e-12)


def test_case_fold_switch():
    assert similarity("ABC", "abc", case_fold=False) == 0.0


text = st.text(alphabet="abcde XY", max_size=10)


@settings(max_examples=300)
@given(text, text)
def test_levenshtein_matches_oracle(a, b):
    assert levenshtein(a, b) == edit_distance_oracle(a, b)


@given(text, text)
def test_similarity_symmetric_bounded(a, b):
    s = similarity(a, b)
    assert 0.0 <= s <= 1.0
    assert s == similarity(b, a)
    assert similarity(a, a) == 1.0


def test_match_sample_keywords():
    m = match_lists(["sports injury", "athletes"], ["Sports injury", "Athletes", "Postural stability"])
    assert m.n_matched == 2
    assert m.unmatched_references == ["Postural stability"]
    assert m.unmatched_candidates == []
    assert all(sim == 1.0 for _, _, sim in m.pairs)


def test_match_identical_lists():
    items = ["heat flux", "tape", "tension test"]
    m = match_lists(items, list(items))
    assert m.n_matched == 3
    assert not m.unmatched_candidates and not m.unmatched_references


def test_match_inflected_form():
    m = match_lists(["radio frequencies"], ["radio frequency"], MatchConfig(0.8))
    assert m.n_matched == 1
    assert m.pairs[0][2] == pytest.approx(14 / 17)


def test_match_is_one_to_one_and_prefers_best():
    m = match_lists(["tensions", "tension"], ["tension"], MatchConfig(0.8))
    assert m.pairs == [("tension", "tension", 1.0)]
    assert m.unmatched_candidates == ["tensions"]


def test_match_threshold_validation():
    with pytest.raises(ValueError):
        MatchConfig(threshold=1.2)


def test_score_instance_examples():
    m = match_lists(["sports injury", "athletes"], ["Sports injury", "Athletes", "Postural stability"])
    s = score_instance(m)
    assert (s.precision, s.recall) == (1.0, pytest.approx(2 / 3))
    assert s.f1 == pytest.approx(0.8)
    empty = score_instance(match_lists([], []))
    assert (empty.precision, empty.recall, empty.f1) == (1.0, 1.0, 1.0)
    miss = score_instance(match_lists(["x"], ["y"]))
    assert (miss.precision, miss.recall, miss.f1) == (0.0, 0.0, 0.0)


def test_zero_candidate_and_zero_reference_conventions():
    s = InstanceScore.from_counts(0, 0, 3)
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)
    s = InstanceScore.from_counts(0, 4, 0)
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


def test_aggregate_micro_vs_macro():
    a = InstanceScore.from_counts(1, 1, 2)
    b = InstanceScore.from_counts(1, 2, 1)
    report = aggregate([a, b])
    # oracle: pooled counts 2 matched / 3 candidates; mean of 1 and 1/2
    assert report.micro.precision == pytest.approx(2 / 3)
    assert report.macro.precision == pytest.approx((1.0 + 0.5) / 2)
    assert report.micro.recall == pytest.approx(2 / 3)
    assert report.macro.f1 == pytest.approx((a.f1 + b.f1) / 2)


def test_aggregate_single_and_perfect():
    s = InstanceScore.from_counts(2, 3, 4)
    r = aggregate([s])
    assert (r.micro.precision, r.micro.recall, r.micro.f1) == (s.precision, s.recall, s.f1)
    assert (r.macro.precision, r.macro.recall, r.macro.f1) == (s.precision, s.recall, s.f1)
    perfect = aggregate([InstanceScore.from_counts(3, 3, 3)] * 4)
    assert perfect.micro.f1 == perfect.macro.f1 == 1.0


def test_aggregate_empty_rejected():
    with pytest.raises(ValueError):
        aggregate([])


def test_micro_equals_macro_for_uniform_instances():
    scores = [InstanceScore.from_counts(2, 4, 5), InstanceScore.from_counts(2, 4, 7), InstanceScore.from_counts(2, 4, 3)]
    r = aggregate(scores)
    assert r.micro.precision == pytest.approx(r.macro.precision)


def test_cluster_candidates_subset_of_references():
    r = evaluate_cluster({0: ["tape", "athletes"]}, {0: ["Tape", "Athletes", "Tension test"]})
    assert r.micro.precision == 1.0


def test_cluster_union_recall():
    refs = {
        0: [
            "Elastic therapeutic tape",
            "Material properties",
            "Tension test",
            "Sports injury",
            "Athletes",
            "Postural stability",
        ]
    }
    r = evaluate_cluster({0: ["tension test", "athletes", "sports injuries"]}, refs)
    assert r.per_instance[0].n_matched == 3
    assert r.micro.recall == pytest.approx(0.5)


def test_cluster_empty_candidates():
    r = evaluate_cluster({0: []}, {0: ["a", "b"]})
    assert r.micro.precision == 0.0 and r.micro.recall == 0.0


def test_cluster_key_mismatch_names_cluster():
    with pytest.raises(ValueError, match="3"):
        evaluate_cluster({0: [], 3: []}, {0: []})
    with pytest.raises(ValueError, match="5"):
        evaluate_cluster({0: []}, {0: [], 5: []})


def test_report_dict_and_table():
    r = evaluate_cluster({1: ["a"], 0: ["b"]}, {0: ["b"], 1: ["c"]})
    d = r.as_dict()
    assert [row["id"] for row in d["per_instance"]] == [0, 1]
    assert set(d) == {"per_instance", "micro", "macro"}
    assert "micro" in r.summary_table() and "macro" in r.summary_table()


phrase = st.text(alphabet="abc ", min_size=1, max_size=6)


@settings(max_examples=150, deadline=None)
@given(st.lists(phrase, max_size=6), st.lists(phrase, max_size=6))
def test_raising_threshold_never_adds_matches(cands, refs):
    counts = [match_lists(cands, refs, MatchConfig(t)).n_matched for t in (0.0, 0.3, 0.6, 0.8, 1.0)]
    assert counts == sorted(counts, reverse=True)


@settings(max_examples=150, deadline=None)
@given(st.lists(phrase, max_size=5), st.lists(phrase, max_size=5), st.sampled_from([0.6, 0.8, 1.0]))
def test_greedy_against_exhaustive_matching(cands, refs, threshold):
    greedy = match_lists(cands, refs, MatchConfig(threshold)).n_matched
    best = best_matching_size(cands, refs, threshold)
    if threshold == 1.0:
        assert greedy == best
    else:
        assert greedy <= best


def test_pairs_respect_threshold_and_one_to_one():
    rng = random.Random(0)
    for _ in range(100):
        cands = ["".join(rng.choice("ab ") for _ in range(rng.randint(1, 5))) for _ in range(rng.randint(0, 6))]
        refs = ["".join(rng.choice("ab ") for _ in range(rng.randint(1, 5))) for _ in range(rng.randint(0, 6))]
        m = match_lists(cands, refs, MatchConfig(0.6))
        assert all(sim >= 0.6 for _, _, sim in m.pairs)
        assert m.n_matched + len(m.unmatched_candidates) == len(cands)
        assert m.n_matched + len(m.unmatched_references) == len(refs)
        for c, r, sim in m.pairs:
            assert sim == pytest.approx(oracle_similarity(c, r))
