import io
import random

import pytest

from kwextract.corpus import DocumentRecord, parse_corpus_text, write_corpus

SAMPLE_CSV = (
    "Y1,Y2,Y,Domain,area,keywords,Abstract\n"
    '5,50,122,Medical,Sports Injuries,"Elastic therapeutic tape; Material properties; Tension test",'
    '"The aim of this study was to analyze stabilometry in athletes. Elastic therapeutic tape was applied '
    'and its material properties were measured with a tension test."\n'
    '5,48,120,Medical,Senior Health,"Sports injury; Athletes; Postural stability",'
    "\"This study examined the influence of range of motion of the ankle joints on elderly people's balance "
    'ability. Postural stability of athletes after a sports injury was also compared."\n'
)

SANITY_TEXT = "This is a very cute dog. This is another cute cat. This dog and this cat are cute."

DOMAINS = ["CS", "ECE", "Psychology", "MAE", "Civil", "Medical", "Biochemistry"]

TOPIC_TERMS = {
    "CS": ["algorithm", "network", "compiler", "database", "encryption", "software", "graph", "cache"],
    "ECE": ["antenna", "voltage", "circuit", "transistor", "frequency", "signal", "amplifier", "radar"],
    "Psychology": ["anxiety", "memory", "cognition", "attention", "emotion", "personality", "stress", "perception"],
    "MAE": ["turbine", "airfoil", "propulsion", "combustion", "vibration", "torque", "nozzle", "fatigue"],
    "Civil": ["concrete", "bridge", "asphalt", "masonry", "pavement", "foundation", "steel", "drainage"],
    "Medical": ["patient", "treatment", "therapy", "tumor", "diagnosis", "surgery", "injury", "autism"],
    "Biochemistry": ["enzyme", "protein", "kinase", "peptide", "receptor", "ligand", "membrane", "genome"],
}

FILLER = ["study", "results", "approach", "analysis", "method", "data", "effect", "model", "paper", "work"]
GLUE = ["the", "of", "and", "in", "we", "this", "was", "with", "for", "to", "a", "is", "by", "on"]


def synthetic_abstract(rng: random.Random, domain: str, n_sentences: int = 4) -> str:
    terms = TOPIC_TERMS[domain]
    sentences = []
    for _ in range(n_sentences):
        words = []
        for _ in range(rng.randint(8, 14)):
            r = rng.random()
            if r < 0.45:
                words.append(rng.choice(terms))
            elif r < 0.65:
                words.append(rng.choice(FILLER))
            else:
                words.append(rng.choice(GLUE))
        if rng.random() < 0.2:
            words.insert(rng.randrange(len(words)), str(rng.randint(1, 2000)))
        s = " ".join(words)
        sentences.append(s[0].upper() + s[1:] + ".")
    return " ".join(sentences)


def synthetic_records(n: int, seed: int = 0) -> list[DocumentRecord]:
    rng = random.Random(seed)
    out = []
    for i in range(n):
        y1 = i % len(DOMAINS)
        domain = DOMAINS[y1]
        terms = TOPIC_TERMS[domain]
        kws = rng.sample(terms, 3) + [f"{rng.choice(terms)} {rng.choice(FILLER)}"]
        out.append(
            DocumentRecord(
                doc_id=i,
                y1=y1,
                y2=10 * y1 + rng.randint(0, 3),
                y=100 + i % 17,
                domain=domain,
                area=f"{domain} area {rng.randint(0, 3)}",
                raw_keywords="; ".join(kws),
                abstract=synthetic_abstract(rng, domain),
            )
        )
    return out


def synthetic_csv(n: int, seed: int = 0) -> str:
    buf = io.StringIO()
    write_corpus(synthetic_records(n, seed), buf)
    return buf.getvalue()


@pytest.fixture
def sample_corpus():
    return parse_corpus_text(SAMPLE_CSV)


@pytest.fixture
def sample_path(tmp_path):
    path = tmp_path / "sample.csv"
    path.write_text(SAMPLE_CSV, encoding="utf-8")
    return path


@pytest.fixture
def wos100_path(tmp_path):
    path = tmp_path / "wos100.csv"
    path.write_text(synthetic_csv(100, seed=7), encoding="utf-8")
    return path


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
