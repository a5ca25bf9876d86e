# %% Build a small corpus with three planted topics
import random

import numpy as np

from kwextract import Corpus, DocumentRecord, build_cluster_reference, extract_cluster_keyphrases, kmeans
from kwextract.clustering import hash_embed

topics = {
    "Medical": ["patient", "treatment", "therapy", "tumor", "diagnosis", "surgery"],
    "Civil": ["concrete", "bridge", "asphalt", "pavement", "foundation", "steel"],
    "CS": ["algorithm", "network", "compiler", "database", "encryption", "cache"],
}
glue = ["the", "of", "and", "we", "this", "was", "with", "for", "study", "results", "method"]

rng = random.Random(0)
records = []
for i in range(45):
    y1, domain = i % 3, list(topics)[i % 3]
    words = [rng.choice(topics[domain]) if rng.random() < 0.5 else rng.choice(glue) for _ in range(30)]
    abstract = ". ".join(" ".join(words[j:j + 10]) for j in range(0, 30, 10)) + "."
    keywords = "; ".join(rng.sample(topics[domain], 3))
    records.append(DocumentRecord(i, y1, y1, y1, domain, domain, keywords, abstract))
corpus = Corpus(tuple(records))

# %% Embed and cluster
table = hash_embed([r.abstract for r in records], dim=384)
model = kmeans(table, 3, seed=1)
print("inertia", round(model.inertia, 4), "iterations", model.iterations)
print("sizes", model.sizes())
print("history", np.round(model.inertia_history, 4))

# %% Which domains ended up together
for c in range(model.k):
    print(c, sorted({records[i].domain for i in model.members(c)}))

# %% Keyphrases per cluster next to the pooled author keywords
phrases = extract_cluster_keyphrases(corpus, model)
refs = build_cluster_reference(corpus, model)
for c in range(model.k):
    print(c, [p.text for p in phrases[c][:6]])
    print("  ", refs[c].by_frequency())
