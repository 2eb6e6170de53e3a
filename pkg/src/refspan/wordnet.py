"""WordNet-backed synonym expansion.

Reads the WordNet 3.0 on-disk database (index.pos / data.pos pairs),
disambiguates word senses with the Lesk gloss-overlap heuristic, and
appends synset lemmas to token sequences. Expansion is asymmetric by
design: it can target citing sentences, reference sentences, both, or
neither, and can optionally repeat the original token to give it extra
weight in the bag-of-words vectors built downstream.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import RefspanError, ConfigError
from .preprocess import TokenSequence, tokenize, stopword_set

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}

EXPANSION_MODES = ("none", "ref_only", "cit_only", "both")

# Config-string spellings; the published abbreviation table uses both orders.
_MODE_TOKENS = {
    "ref_wn": "ref_only", "wn_ref": "ref_only",
    "cit_wn": "cit_only", "wn_cit": "cit_only",
    "both_wn": "both", "wn_both": "both",
}
_MODE_NAMES = {"ref_only": "ref_wn", "cit_only": "cit_wn", "both": "both_wn"}


class MalformedLexicon(RefspanError):
    """An index entry points at an offset with no data record."""


@dataclass(frozen=True)
class Synset:
    synset_id: str              # zero-padded offset + "-" + pos letter
    lemmas: tuple[str, ...]     # lowercase, underscores preserved
    gloss: str


@dataclass
class Lexicon:
    """Synset store plus a (lemma, pos) -> synset_id index."""

    synsets: dict[str, Synset] = field(default_factory=dict)
    index: dict[tuple[str, str], list[str]] = field(default_factory=dict)
    _gloss_tokens: dict[str, Counter] = field(default_factory=dict, repr=False)

    def add(self, synset: Synset, pos: str) -> None:
        self.synsets[synset.synset_id] = synset
        for lemma in synset.lemmas:
            self.index.setdefault((lemma, pos), []).append(synset.synset_id)

    def lookup(self, lemma: str, pos: str | None = None) -> list[Synset]:
        """All synsets for a lemma; case-insensitive, spaces match underscores."""
        key = lemma.lower().replace(" ", "_")
        poses = [pos] if pos is not None else list(POS_FILES)
        out = []
        for p in poses:
            for sid in self.index.get((key, p), ()):
                out.append(self.synsets[sid])
        return out

    def gloss_counts(self, synset_id: str, stopwords: str = "list_a") -> Counter:
        """Tokenized, stopword-filtered gloss as a multiset (cached)."""
        cached = self._gloss_tokens.get(synset_id)
        if cached is None:
            sw = stopword_set(stopwords)
            toks = [t for t in tokenize(self.synsets[synset_id].gloss) if t not in sw]
            cached = Counter(toks)
            self._gloss_tokens[synset_id] = cached
        return cached


def _data_line_synset(line: str, pos: str) -> Synset:
    head, _, gloss = line.partition("|")
    fields = head.split()
    offset = int(fields[0])
    w_cnt = int(fields[3], 16)  # word count is hexadecimal in this format
    lemmas = tuple(fields[4 + 2 * i].lower() for i in range(w_cnt))
    return Synset(f"{offset:08d}-{pos}", lemmas, gloss.strip())


def load_lexicon(path: str | Path) -> Lexicon:
    """Parse a WordNet 3.0 database directory (index.pos / data.pos files).

    Only the pos files present are loaded; at least one pair must exist.
    Raises MalformedLexicon when an index offset has no data record.
    """
    path = Path(path)
    lexicon = Lexicon()
    loaded_any = False
    for pos, fname in POS_FILES.items():
        data_file = path / f"data.{fname}"
        index_file = path / f"index.{fname}"
        if not data_file.exists() or not index_file.exists():
            continue
        loaded_any = True
        by_offset: dict[int, Synset] = {}
        for line in data_file.read_text(encoding="utf-8", errors="replace").splitlines():
            if not line or line.startswith(" "):
                continue  # license header lines begin with spaces
            syn = _data_line_synset(line, pos)
            by_offset[int(syn.synset_id.split("-")[0])] = syn
            lexicon.synsets[syn.synset_id] = syn
        for line in index_file.read_text(encoding="utf-8", errors="replace").splitlines():
            if not line or line.startswith(" "):
                continue
            fields = line.split()
            lemma = fields[0].lower()
            p_cnt = int(fields[3])
            synset_cnt = int(fields[2])
            offsets = fields[6 + p_cnt: 6 + p_cnt + synset_cnt]
            ids = []
            for off in offsets:
                syn = by_offset.get(int(off))
                if syn is None:
                    raise MalformedLexicon(
                        f"index.{fname}: {lemma!r} points at offset {off} with no data record"
                    )
                ids.append(syn.synset_id)
            lexicon.index[(lemma, pos)] = ids
    if not loaded_any:
        raise MalformedLexicon(f"no index/data file pairs found under {path}")
    return lexicon


def lesk_disambiguate(
    token: str, context: TokenSequence, lexicon: Lexicon, stopwords: str = "list_a"
) -> str | None:
    """Pick the synset whose gloss overlaps the context most.

    Overlap is multiset intersection size between the stopword-filtered
    gloss and the context tokens. Candidates span all parts of speech.
    Ties break toward the lowest synset_id; None when the token has no
    synsets at all.
    """
    candidates = lexicon.lookup(token)
    if not candidates:
        return None
    sw = stopword_set(stopwords)
    ctx = Counter(t for t in context if t not in sw)
    best_id = None
    best_overlap = -1
    for syn in sorted(candidates, key=lambda s: s.synset_id):
        gloss = lexicon.gloss_counts(syn.synset_id, stopwords)
        overlap = sum(min(n, ctx[t]) for t, n in gloss.items())
        if overlap > best_overlap:
            best_overlap = overlap
            best_id = syn.synset_id
    return best_id


def expand_tokens(
    tokens: TokenSequence,
    lexicon: Lexicon,
    duplicate_original: bool = True,
    stopwords: str = "list_a",
) -> TokenSequence:
    """Append the lemmas of each token's Lesk-chosen synset.

    A lemma is appended only if it is not already in the output sequence,
    no matter how many tokens' synsets contain it. Multiword lemmas are
    split on underscores and each part goes through the same uniqueness
    check. With duplicate_original, a token that found a synset is
    appended once more, weighting the original form.
    """
    out = list(tokens)
    present = set(out)
    for token in tokens:
        sid = lesk_disambiguate(token, tokens, lexicon, stopwords)
        if sid is None:
            continue
        for lemma in lexicon.synsets[sid].lemmas:
            for part in lemma.split("_"):
                if part and part not in present:
                    out.append(part)
                    present.add(part)
        if duplicate_original:
            out.append(token)
    return out


@dataclass(frozen=True)
class ExpansionMode:
    """Which side of the citance/reference pair gets synonym expansion."""

    mode: str = "none"
    duplicate_original: bool = True

    def __post_init__(self):
        if self.mode not in EXPANSION_MODES:
            raise ConfigError(f"unknown expansion mode {self.mode!r}")

    @property
    def expands_citances(self) -> bool:
        return self.mode in ("cit_only", "both")

    @property
    def expands_references(self) -> bool:
        return self.mode in ("ref_only", "both")

    def config_token(self) -> str | None:
        """The config-string spelling of this mode, or None for 'none'."""
        return _MODE_NAMES.get(self.mode)


def mode_from_token(token: str) -> str | None:
    """Map a config-string token like ``cit_wn`` to a mode name, else None."""
    return _MODE_TOKENS.get(token)
