# %% Rank words in a three-sentence text
import numpy as np

from kwextract import PipelineConfig, RankConfig, extract_keywords
from kwextract.textproc import filter_tokens, tokenize
from kwextract.textrank import build_graph, rank_terms, stationary_scores

text = "This is a very cute dog. This is another cute cat. This dog and this cat are cute."

for phrase in extract_keywords(text):
    print(f"{phrase.text:>6}  {phrase.score:.6f}")

# %% The graph behind it
candidates = filter_tokens(tokenize(text), PipelineConfig())
graph = build_graph(candidates, window=5)
print(graph.terms)
print(graph.weights)

# %% On a connected graph the walk settles on weighted degree
result = stationary_scores(graph, RankConfig(tolerance=1e-12, max_iterations=10_000))
strength = graph.strength()
print(np.round([t.score for t in result.terms], 6))
print(np.round(strength / strength.sum(), 6))
print("iterations:", result.iterations)

# %% Damped mode pulls scores toward uniform
damped = stationary_scores(graph, RankConfig(mode="damped", damping=0.5))
for t in rank_terms(damped, 3):
    print(t.term, round(t.score, 6))

# %% Multi-word phrases from adjacent ranked words
abstract = (
    "The Department of Health funded the study. Heat flux sensors measured heat flux "
    "at the tape surface, and the heat flux data were compared."
)
config = PipelineConfig(agglomerate=True, bridge_stopwords_max=1)
for phrase in extract_keywords(abstract, config, RankConfig(top_k=5)):
    print(phrase.text, phrase.member_terms, round(phrase.score, 4))
