# %% A two-document corpus and some entity annotations
import io

from kwextract import parse_corpus_text
from kwextract.evaluation import MatchConfig
from kwextract.nermatch import (
    BIOMEDICAL_LABELS,
    ModelManifest,
    evaluate_ner_as_keywords,
    keyword_presence,
    load_annotations,
    write_presence,
)

corpus = parse_corpus_text(
    "Y1,Y2,Y,Domain,area,keywords,Abstract\n"
    '6,60,130,Biochemistry,Enzymes,"ATP; kinase activity; Escherichia coli",'
    '"ATP binding alters kinase activities in Escherichia coli strains."\n'
    '5,50,122,Medical,Autism,"autism; serotonin","Serotonin levels were measured in autistic children."\n'
)
manifests = [ModelManifest("hunflair", BIOMEDICAL_LABELS)]
annotations = load_annotations(
    io.StringIO("0\tATP\tChemical\thunflair\n0\tEscherichia coli\tSpecies\thunflair\n1\tSerotonin\tChemical\thunflair\n"),
    manifests,
)

# %% Which keywords occur in their abstract, and which the model found
rows = keyword_presence(corpus, annotations, MatchConfig(0.8), ["hunflair"])
buf = io.StringIO()
write_presence(rows, ["hunflair"], buf)
print(buf.getvalue())

# %% Entities scored as if they were extracted keywords
print(evaluate_ner_as_keywords(corpus, annotations, "hunflair").summary_table())
