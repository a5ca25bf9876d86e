# %% Edit-distance similarity
from kwextract import MatchConfig, evaluate_instances, match_lists, similarity

print(similarity("radio frequency", "radio frequencies"))        # 14/17
print(similarity("radio frequency", "radio frequency scanner"))  # 15/23

# %% Matching one document's phrases against its keywords
candidates = ["tension tests", "athletes", "ankle joint"]
references = ["Tension test", "Athletes", "Postural stability"]
m = match_lists(candidates, references, MatchConfig(threshold=0.8))
print(m.pairs)
print("unmatched:", m.unmatched_candidates, m.unmatched_references)

# %% Micro and macro averages over several documents
candidates = {0: ["tension tests", "athletes"], 1: ["bridge"], 2: []}
references = {0: ["Tension test", "Athletes", "Tape"], 1: ["Bridge deck", "Concrete"], 2: ["Autism"]}
for theta in (1.0, 0.8, 0.6):
    report = evaluate_instances(candidates, references, MatchConfig(theta))
    print(f"threshold {theta}")
    print(report.summary_table())
