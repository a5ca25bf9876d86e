"""Tokenization and candidate filtering for keyword extraction.

Text is split into whitespace runs; each run contributes leading and trailing
punctuation characters as separate tokens and keeps its inner part intact, so
that names such as ``C4H*Cl`` survive as one token. ``split_internal=True``
switches to splitting every run at word/punctuation boundaries instead.

Sentences end after a run whose trailing punctuation contains ``.``, ``!`` or
``?``, unless the run is a known abbreviation or a single capital initial.
"""

from __future__ import annotations

import enum
import os
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator


class Category(enum.Enum):
    NOUN_LIKE = "NounLike"
    OTHER = "Other"
    UNKNOWN = "Unknown"


class Normalizer(enum.Enum):
    IDENTITY = "identity"
    LIGHT_STEM = "light_stem"


def read_stopwords(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def load_stopwords(path: str | os.PathLike) -> frozenset[str]:
    """Load a stopword file: one word per line, ``#`` starts a comment line."""
    with open(path, encoding="utf-8") as fh:
        return read_stopwords(fh)


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("kwextract").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return read_stopwords(text.splitlines())


@dataclass(frozen=True)
class PipelineConfig:
    """Pre-processing switches for candidate selection and normalization.

    ``agglomerate`` turns on merging of adjacent ranked terms into
    multi-word keyphrases; ``bridge_stopwords_max`` is how many stopwords
    such a phrase may span between two ranked terms.
    """

    lowercase: bool = True
    remove_numbers: bool = True
    min_token_len: int = 3
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    nouns_only: bool = False
    normalizer: Normalizer = Normalizer.IDENTITY
    agglomerate: bool = False
    bridge_stopwords_max: int = 0
    split_internal: bool = False

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        if self.bridge_stopwords_max < 0:
            raise ValueError("bridge_stopwords_max must be >= 0")
        if isinstance(self.normalizer, str):
            object.__setattr__(self, "normalizer", Normalizer(self.normalizer))
        if not isinstance(self.stopwords, frozenset):
            object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    sentence_index: int
    token_index: int
    char_span: tuple[int, int]
    is_stopword: bool
    is_punct: bool
    is_numeric: bool
    category: Category


@dataclass(frozen=True)
class TokenizedText:
    tokens: tuple[Token, ...]
    sentence_count: int
    text: str = ""

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def sentences(self) -> list[list[Token]]:
        """Tokens grouped by sentence index (empty sentences included)."""
        groups: list[list[Token]] = [[] for _ in range(self.sentence_count)]
        for tok in self.tokens:
            groups[tok.sentence_index].append(tok)
        return groups


# --- normalization ---------------------------------------------------------

_ES_ENDINGS = ("sses", "shes", "ches", "xes", "zes")
_S_GUARDS = ("ss", "us", "is")


def light_stem(word: str) -> str:
    """Strip a plural ``s``/``es`` from words of four or more characters.

    Words ending in ``ss``, ``us`` or ``is`` are left alone; ``es`` is only
    removed after sibilants (``classes`` -> ``class``, ``boxes`` -> ``box``).
    """
    if len(word) < 4:
        return word
    low = word.lower()
    if not low.endswith("s") or low.endswith(_S_GUARDS):
        return word
    if low.endswith(_ES_ENDINGS):
        return word[:-2]
    return word[:-1]


def normalize_token(surface: str, config: PipelineConfig | None = None) -> str:
    config = config or PipelineConfig()
    out = surface.lower() if config.lowercase else surface
    if config.normalizer is Normalizer.LIGHT_STEM:
        out = light_stem(out)
    return out


# --- lexical category heuristic --------------------------------------------

# Closed-class words plus very common verbs; independent of the stopword file.
_FUNCTION_WORDS = frozenset(
    """
    a about above across after again against all almost along also although always am among an and another any
    are around as at be because been before behind being below beneath beside besides between beyond both but by
    can cannot could did do does doing done down during each either else enough even ever every few for from
    further had has have having he her here hers herself him himself his how however i if in inside into is it its
    itself just less many may me might more most much must my myself near neither never no nor not now of off
    often on once only onto or other others our ours ourselves out outside over own per rather same shall she
    should since so some such than that the their theirs them themselves then there therefore these they this
    those though through throughout thus to too toward towards under unless until up upon us very via was we
    were what whatever when whenever where whereas whether which while who whom whose why will with within
    without would yet you your yours yourself yourselves
    show shows showed shown use used uses using make makes made find found give given get got take taken
    """.split()
)

# Checked longest first; the first suffix that fits decides.
_SUFFIXES: tuple[tuple[str, Category], ...] = tuple(
    sorted(
        [
            ("tion", Category.NOUN_LIKE),
            ("sion", Category.NOUN_LIKE),
            ("ment", Category.NOUN_LIKE),
            ("ness", Category.NOUN_LIKE),
            ("ity", Category.NOUN_LIKE),
            ("ance", Category.NOUN_LIKE),
            ("ence", Category.NOUN_LIKE),
            ("ancy", Category.NOUN_LIKE),
            ("ency", Category.NOUN_LIKE),
            ("ism", Category.NOUN_LIKE),
            ("ist", Category.NOUN_LIKE),
            ("ogy", Category.NOUN_LIKE),
            ("graphy", Category.NOUN_LIKE),
            ("metry", Category.NOUN_LIKE),
            ("meter", Category.NOUN_LIKE),
            ("ship", Category.NOUN_LIKE),
            ("hood", Category.NOUN_LIKE),
            ("dom", Category.NOUN_LIKE),
            ("ics", Category.NOUN_LIKE),
            ("itis", Category.NOUN_LIKE),
            ("osis", Category.NOUN_LIKE),
            ("emia", Category.NOUN_LIKE),
            ("ase", Category.NOUN_LIKE),
            ("cyte", Category.NOUN_LIKE),
            ("ome", Category.NOUN_LIKE),
            ("ly", Category.OTHER),
            ("ous", Category.OTHER),
            ("ful", Category.OTHER),
            ("less", Category.OTHER),
            ("ive", Category.OTHER),
            ("able", Category.OTHER),
            ("ible", Category.OTHER),
            ("ize", Category.OTHER),
            ("ise", Category.OTHER),
            ("ized", Category.OTHER),
            ("ised", Category.OTHER),
            ("ated", Category.OTHER),
            ("ed", Category.OTHER),
        ],
        key=lambda item: (-len(item[0]), item[0]),
    )
)

# shortest stem left after removing a suffix
_MIN_STEM = 3

_ACRONYM = re.compile(r"^[A-Z][A-Z0-9]+s?$")


def _singular(low: str) -> str:
    if low.endswith("ies") and len(low) > 4:
        return low[:-3] + "y"
    if low.endswith("s") and not low.endswith(_S_GUARDS) and len(low) > 3:
        return low[:-1]
    return low


def categorize_token(surface: str) -> Category:
    """Guess whether ``surface`` is noun-like from a word list and suffix table.

    Function words, numbers and punctuation are ``OTHER``; all-caps acronyms
    are ``NOUN_LIKE``. Anything the tables do not cover is ``UNKNOWN``.
    """
    if not surface or not any(ch.isalpha() for ch in surface):
        return Category.OTHER
    low = surface.lower()
    if low in _FUNCTION_WORDS:
        return Category.OTHER
    if _ACRONYM.match(surface):
        return Category.NOUN_LIKE
    if low.endswith("eed"):
        # need, speed, seed: "-ed" rule would misfire
        return Category.UNKNOWN
    for word in dict.fromkeys((low, _singular(low))):
        for suffix, category in _SUFFIXES:
            if word.endswith(suffix) and len(word) - len(suffix) >= _MIN_STEM:
                return category
    return Category.UNKNOWN


# --- tokenization ----------------------------------------------------------

_RUN = re.compile(r"\S+")
_PIECE = re.compile(r"\w+|[^\w\s]")
_TERMINAL = frozenset(".!?")
ABBREVIATIONS = frozenset(
    ["e.g", "i.e", "al", "fig", "figs", "eq", "eqs", "vs", "cf", "dr", "mr", "mrs", "ms", "prof", "approx", "resp", "ca"]
)


def is_punct(surface: str) -> bool:
    return not any(ch.isalnum() for ch in surface)


def is_numeric(surface: str) -> bool:
    return any(ch.isdigit() for ch in surface) and not any(ch.isalpha() for ch in surface)


def _split_run(run: str, start: int, split_internal: bool) -> list[tuple[str, int]]:
    if split_internal:
        return [(m.group(), start + m.start()) for m in _PIECE.finditer(run)]
    i, j = 0, len(run)
    while i < j and not run[i].isalnum():
        i += 1
    while j > i and not run[j - 1].isalnum():
        j -= 1
    pieces = [(run[k], start + k) for k in range(i)]
    if i < j:
        pieces.append((run[i:j], start + i))
    pieces.extend((run[k], start + k) for k in range(j, len(run)))
    return pieces


def _ends_sentence(run: str) -> bool:
    j = len(run)
    while j > 0 and not run[j - 1].isalnum():
        j -= 1
    trailing = run[j:]
    if not _TERMINAL.intersection(trailing):
        return False
    i = 0
    while i < j and not run[i].isalnum():
        i += 1
    core = run[i:j]
    if core.lower() in ABBREVIATIONS:
        return False
    # single capital initial as in "J. Smith"
    if len(core) == 1 and core.isupper():
        return False
    return True


def tokenize(text: str, config: PipelineConfig | None = None) -> TokenizedText:
    config = config or PipelineConfig()
    tokens = []
    sentence = 0
    for m in _RUN.finditer(text):
        run = m.group()
        for surface, begin in _split_run(run, m.start(), config.split_internal):
            tokens.append(
                Token(
                    surface=surface,
                    normalized=normalize_token(surface, config),
                    sentence_index=sentence,
                    token_index=len(tokens),
                    char_span=(begin, begin + len(surface)),
                    is_stopword=surface.lower() in config.stopwords,
                    is_punct=is_punct(surface),
                    is_numeric=is_numeric(surface),
                    category=categorize_token(surface),
                )
            )
        if _ends_sentence(run):
            sentence += 1
    count = tokens[-1].sentence_index + 1 if tokens else 0
    return TokenizedText(tokens=tuple(tokens), sentence_count=count, text=text)


def is_candidate(tok: Token, config: PipelineConfig) -> bool:
    if tok.is_punct:
        return False
    if tok.surface.lower() in config.stopwords:
        return False
    if config.remove_numbers and tok.is_numeric:
        return False
    if len(tok.surface) < config.min_token_len:
        return False
    if config.nouns_only and tok.category is Category.OTHER:
        return False
    return True


def filter_tokens(tt: TokenizedText, config: PipelineConfig | None = None) -> TokenizedText:
    """Keep candidate tokens only; indices and spans are left untouched."""
    config = config or PipelineConfig()
    kept = tuple(tok for tok in tt.tokens if is_candidate(tok, config))
    return replace(tt, tokens=kept)
