"""Corpus ingestion and dataset analytics.

Reference documents arrive as sentence-segmented XML (a TITLE node, an
ABSTRACT, and SECTION wrappers holding S elements with sid attributes),
annotations as pipe-delimited records naming a citance and the gold
reference sentence ids it points at. Real files of this kind are noisy,
so the XML path has a regex recovery mode for input that a strict
parser rejects, and all sentence and citance text is reduced to ASCII.

Analytics: a section-title frequency report over gold-cited sentences,
a vocabulary sparsity curve, and K-means clustering of per-document
character frequency vectors (the corpus-cleaning aid).
"""

from __future__ import annotations

import hashlib
import json
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import RefspanError, ConfigError
from .preprocess import tokenize

SECTION_KINDS = ("title", "abstract", "section")
SPLITS = ("train", "dev", "test", "custom")


class MalformedXml(RefspanError):
    """Document XML is broken beyond the recovery parser."""


class EmptyDocument(RefspanError):
    """A document yielded zero sentences."""


class MalformedRecord(RefspanError):
    """An annotation record is missing a required field."""


class UnknownDocument(RefspanError):
    """An annotation names a reference document that is not loaded."""


class NoAnnotations(RefspanError):
    """The dataset carries no gold annotations."""


class BadK(ConfigError):
    """Cluster count outside 1..#docs."""


class MissingFile(RefspanError):
    """Expected dataset file or directory does not exist."""


@dataclass(frozen=True)
class Sentence:
    sid: int
    text: str
    section_title: str
    section_kind: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]

    def sentence_by_sid(self) -> dict[int, Sentence]:
        return {s.sid: s for s in self.sentences}

    @property
    def title_sid(self) -> int | None:
        for s in self.sentences:
            if s.section_kind == "title":
                return s.sid
        return None


@dataclass(frozen=True)
class Citance:
    citance_id: str
    citing_doc_id: str
    reference_doc_id: str
    text: str
    gold_sids: frozenset[int]


@dataclass(frozen=True)
class Dataset:
    documents: dict[str, Document]
    citances: tuple[Citance, ...]
    split: str = "custom"

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ConfigError(f"unknown split {self.split!r}")


@dataclass(frozen=True)
class CharFreqVector:
    doc_id: str
    freqs: tuple[float, ...]


def _ascii_only(text: str) -> str:
    return text.encode("ascii", errors="ignore").decode("ascii")


def _clean_text(text: str) -> str:
    return re.sub(r"\s+", " ", _ascii_only(text)).strip()


# ---------------------------------------------------------------- XML


_S_TAG_RE = re.compile(r"<S\b[^>]*?sid\s*=\s*[\"']?(\d+)[\"']?[^>]*>(.*?)</S>",
                       re.IGNORECASE | re.DOTALL)
_SECTION_OPEN_RE = re.compile(
    r"<(TITLE|ABSTRACT|SECTION)\b([^>]*)>", re.IGNORECASE)
_TITLE_ATTR_RE = re.compile(r"title\s*=\s*\"([^\"]*)\"|title\s*=\s*'([^']*)'",
                            re.IGNORECASE)


def _strip_tags(text: str) -> str:
    return re.sub(r"<[^>]+>", " ", text)


def _wrapper_info(tag: str, title_attr: str | None) -> tuple[str, str]:
    """(section_kind, section_title) for an enclosing element."""
    t = tag.lower()
    if t == "title":
        return "title", "title"
    if t == "abstract":
        return "abstract", "abstract"
    if t == "section":
        return "section", _clean_text(title_attr) if title_attr else "unknown"
    # unrecognized wrappers are ordinary sections with no usable name
    return "section", "unknown"


def _sentences_from_etree(root: ET.Element) -> list[tuple[str, str, int | None, str]]:
    """(kind, title, sid_attr, text) per S element, in document order."""
    out = []

    def walk(node, kind, title):
        tag = node.tag if isinstance(node.tag, str) else ""
        if tag.upper() in ("TITLE", "ABSTRACT", "SECTION"):
            kind, title = _wrapper_info(tag, node.get("title"))
            if tag.upper() == "TITLE" and not list(node) and (node.text or "").strip():
                # a TITLE holding bare text is itself the title sentence
                out.append((kind, title, None, node.text))
                return
        if tag.upper() == "S":
            sid_attr = node.get("sid")
            sid = int(sid_attr) if sid_attr and sid_attr.isdigit() else None
            text = "".join(node.itertext())
            out.append((kind, title, sid, text))
            return
        for child in node:
            walk(child, kind, title)

    walk(root, "section", "unknown")
    return out


def _sentences_by_recovery(text: str) -> list[tuple[str, str, int | None, str]]:
    """Regex fallback for files a strict XML parser rejects."""
    out = []
    # map each S match to the innermost wrapper opened before it
    events: list[tuple[int, str, str]] = []
    for m in _SECTION_OPEN_RE.finditer(text):
        attr = _TITLE_ATTR_RE.search(m.group(2) or "")
        title_val = attr.group(1) or attr.group(2) if attr else None
        kind, title = _wrapper_info(m.group(1), title_val)
        events.append((m.start(), kind, title))
    for m in _S_TAG_RE.finditer(text):
        kind, title = "section", "unknown"
        for pos, k, t in events:
            if pos < m.start():
                kind, title = k, t
            else:
                break
        out.append((kind, title, int(m.group(1)), m.group(2)))
    return out


def parse_document_xml(data: bytes | str, doc_id: str = "doc") -> Document:
    """Parse one reference document, leniently.

    Strict XML is tried first; on failure a regex pass recovers S
    elements and their enclosing wrappers. Sentence text is stripped of
    markup and non-ASCII characters. sid attributes are honored when
    they keep the sequence strictly increasing; otherwise sentences are
    renumbered from the previous sid up.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    if not text.strip():
        raise EmptyDocument(f"{doc_id}: empty document body")
    try:
        raw = _sentences_from_etree(ET.fromstring(text))
    except ET.ParseError:
        raw = _sentences_by_recovery(text)
        if not raw:
            raise MalformedXml(f"{doc_id}: no sentence elements recoverable") from None

    sentences = []
    prev_sid = 0
    seen_title = False
    for kind, title, sid, body in raw:
        body = _clean_text(_strip_tags(body))
        if not body:
            continue
        if kind == "title" and seen_title:
            kind, title = "section", "unknown"
        if sid is None or sid <= prev_sid:
            sid = prev_sid + 1
        sentences.append(Sentence(sid=sid, text=body, section_title=title,
                                  section_kind=kind))
        prev_sid = sid
        seen_title = seen_title or kind == "title"
    if not sentences:
        raise EmptyDocument(f"{doc_id}: zero usable sentences")
    return Document(doc_id=doc_id, sentences=tuple(sentences))


# ------------------------------------------------------- annotations


_REQUIRED_FIELDS = ("citance number", "reference article", "citing article",
                    "citation text", "reference offset")

_OFFSET_ITEM_RE = re.compile(r"(\d+)(?:\s*-\s*(\d+))?")


def _parse_offsets(raw: str) -> frozenset[int]:
    """Gold sid list; bare ints, quoted ints, and ranges like 5-7."""
    sids: set[int] = set()
    for m in _OFFSET_ITEM_RE.finditer(raw):
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        sids.update(range(min(lo, hi), max(lo, hi) + 1))
    return frozenset(sids)


def _record_fields(line: str) -> dict[str, str]:
    fields = {}
    for part in line.split("|"):
        key, sep, value = part.partition(":")
        if sep:
            fields[key.strip().lower()] = value.strip()
    return fields


def parse_annotations(data: bytes | str, dataset: Dataset) -> list[Citance]:
    """Parse pipe-delimited annotation records into citances.

    Every record must carry the citance number, citing and reference
    article names, citation text, and reference offsets. The reference
    article must be a loaded document and the offsets must name its
    sentences; violations raise rather than silently dropping records.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    citances = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = _record_fields(line)
        missing = [f for f in _REQUIRED_FIELDS if f not in fields]
        if missing:
            raise MalformedRecord(f"line {lineno}: missing field(s) {missing}")
        ref_doc = re.sub(r"\.xml$", "", fields["reference article"], flags=re.IGNORECASE)
        citing = re.sub(r"\.xml$", "", fields["citing article"], flags=re.IGNORECASE)
        if ref_doc not in dataset.documents:
            raise UnknownDocument(f"line {lineno}: reference document {ref_doc!r} not loaded")
        gold = _parse_offsets(fields["reference offset"])
        known = set(dataset.documents[ref_doc].sentence_by_sid())
        stray = gold - known
        if stray:
            raise MalformedRecord(
                f"line {lineno}: gold sids {sorted(stray)} not in document {ref_doc!r}")
        citance_text = _clean_text(_strip_tags(fields["citation text"]))
        if not citance_text:
            raise MalformedRecord(f"line {lineno}: empty citation text")
        citances.append(Citance(
            citance_id=f"{ref_doc}:{fields['citance number']}",
            citing_doc_id=citing,
            reference_doc_id=ref_doc,
            text=citance_text,
            gold_sids=gold,
        ))
    return citances


# ----------------------------------------------------------- loading


def load_dataset(root: str | Path, split: str) -> Dataset:
    """Load every document and annotation file of one split.

    Layout: <root>/<split>/<doc_id>/Reference_XML/<doc_id>.xml and, when
    annotated, <root>/<split>/<doc_id>/annotation/<doc_id>.ann.txt.
    """
    split_dir = Path(root) / split
    if not split_dir.is_dir():
        raise MissingFile(f"split directory {split_dir} does not exist")
    documents: dict[str, Document] = {}
    ann_paths: list[tuple[str, Path]] = []
    for doc_dir in sorted(p for p in split_dir.iterdir() if p.is_dir()):
        doc_id = doc_dir.name
        xml_path = doc_dir / "Reference_XML" / f"{doc_id}.xml"
        if not xml_path.is_file():
            raise MissingFile(f"{xml_path} missing for document {doc_id}")
        documents[doc_id] = parse_document_xml(xml_path.read_bytes(), doc_id=doc_id)
        ann = doc_dir / "annotation" / f"{doc_id}.ann.txt"
        if ann.is_file():
            ann_paths.append((doc_id, ann))
    if not documents:
        raise MissingFile(f"no documents under {split_dir}")
    dataset = Dataset(documents=documents, citances=(), split=split)
    citances: list[Citance] = []
    for doc_id, ann in ann_paths:
        try:
            citances.extend(parse_annotations(ann.read_bytes(), dataset))
        except RefspanError as err:
            raise type(err)(f"{ann}: {err}") from None
    return Dataset(documents=documents, citances=tuple(citances), split=split)


# ------------------------------------------------------------- jsonl


def jsonl_dumps(dataset: Dataset) -> str:
    """Canonical line-delimited JSON text, byte-stable for fixed input."""
    rows = [{"kind": "meta", "split": dataset.split}]
    for doc_id in sorted(dataset.documents):
        for s in dataset.documents[doc_id].sentences:
            rows.append({"kind": "sentence", "doc_id": doc_id, "sid": s.sid,
                         "text": s.text, "section_title": s.section_title,
                         "section_kind": s.section_kind})
    for c in dataset.citances:
        rows.append({"kind": "citance", "citance_id": c.citance_id,
                     "citing_doc_id": c.citing_doc_id,
                     "reference_doc_id": c.reference_doc_id, "text": c.text,
                     "gold_sids": sorted(c.gold_sids)})
    text = "\n".join(json.dumps(r, sort_keys=True, separators=(",", ":")) for r in rows)
    return text + "\n"


def dump_jsonl(dataset: Dataset, path: str | Path) -> None:
    Path(path).write_text(jsonl_dumps(dataset), encoding="utf-8")


def dataset_checksum(dataset: Dataset) -> str:
    """sha256 over the canonical dump, prefixed with the algorithm name."""
    digest = hashlib.sha256(jsonl_dumps(dataset).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


def load_jsonl(path: str | Path) -> Dataset:
    """Rebuild a Dataset from its canonical dump."""
    split = "custom"
    sentences: dict[str, list[Sentence]] = {}
    citances: list[Citance] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        row = json.loads(line)
        kind = row.get("kind")
        if kind == "meta":
            split = row.get("split", "custom")
        elif kind == "sentence":
            sentences.setdefault(row["doc_id"], []).append(Sentence(
                sid=row["sid"], text=row["text"],
                section_title=row["section_title"],
                section_kind=row["section_kind"]))
        elif kind == "citance":
            citances.append(Citance(
                citance_id=row["citance_id"], citing_doc_id=row["citing_doc_id"],
                reference_doc_id=row["reference_doc_id"], text=row["text"],
                gold_sids=frozenset(row["gold_sids"])))
        else:
            raise MalformedRecord(f"{path}:{lineno}: unknown row kind {kind!r}")
    documents = {doc_id: Document(doc_id=doc_id, sentences=tuple(sents))
                 for doc_id, sents in sentences.items()}
    return Dataset(documents=documents, citances=tuple(citances), split=split)


# ----------------------------------------------------------- reports


def normalize_section_title(title: str) -> str:
    """Lowercase and drop one trailing 's' so plural forms merge."""
    t = title.strip().lower()
    return t[:-1] if t.endswith("s") and len(t) > 1 else t


def section_frequency_report(
    dataset: Dataset, count: str = "pairs"
) -> list[tuple[str, float]]:
    """Where do gold-cited sentences live? Percent per normalized title.

    count="pairs" tallies every (citance, gold sid) pair; "sentences"
    tallies each distinct cited sentence once. Output is sorted by
    percentage descending (title as tie-break) and sums to 100.
    """
    if count not in ("pairs", "sentences"):
        raise ConfigError(f"count must be 'pairs' or 'sentences', not {count!r}")
    tally: Counter[str] = Counter()
    seen: set[tuple[str, int]] = set()
    for c in dataset.citances:
        doc = dataset.documents.get(c.reference_doc_id)
        if doc is None:
            continue
        by_sid = doc.sentence_by_sid()
        for sid in c.gold_sids:
            if count == "sentences":
                if (c.reference_doc_id, sid) in seen:
                    continue
                seen.add((c.reference_doc_id, sid))
            sent = by_sid.get(sid)
            if sent is not None:
                tally[normalize_section_title(sent.section_title)] += 1
    total = sum(tally.values())
    if total == 0:
        raise NoAnnotations("no gold-annotated citances in dataset")
    report = [(title, 100.0 * n / total) for title, n in tally.items()]
    report.sort(key=lambda item: (-item[1], item[0]))
    return report


def sparsity_report(sentences: list[Sentence]) -> list[tuple[float, float]]:
    """Vocabulary coverage curve: x% of sentences contain >= y% of vocab.

    For each sentence the fraction of the whole vocabulary it contains
    is computed; fractions are sorted descending and emitted as
    (100*k/n, 100*k_th largest fraction). The curve is therefore
    monotone non-increasing. Words are word_punct tokens containing at
    least one word character.
    """
    if not sentences:
        raise ConfigError("sparsity_report needs at least one sentence")
    word_re = re.compile(r"\w")
    sent_words = [
        {t for t in tokenize(s.text) if word_re.search(t)} for s in sentences
    ]
    vocab = set().union(*sent_words)
    if not vocab:
        return [(100.0, 0.0)]
    fracs = sorted((len(w) / len(vocab) for w in sent_words), reverse=True)
    n = len(fracs)
    return [(100.0 * k / n, 100.0 * fracs[k - 1]) for k in range(1, n + 1)]


# ------------------------------------------- character-frequency clustering


_PRINTABLE = [chr(c) for c in range(0x21, 0x7F)]  # 94 chars; space is "other"
_CHAR_INDEX = {ch: i for i, ch in enumerate(_PRINTABLE)}
CHAR_ALPHABET_SIZE = len(_PRINTABLE) + 1


def char_freq_vector(doc_id: str, text: str) -> CharFreqVector:
    """Relative frequency of each printable ASCII char plus an other-bucket."""
    counts = np.zeros(CHAR_ALPHABET_SIZE)
    for ch in text:
        counts[_CHAR_INDEX.get(ch, CHAR_ALPHABET_SIZE - 1)] += 1
    total = counts.sum()
    if total > 0:
        counts /= total
    return CharFreqVector(doc_id=doc_id, freqs=tuple(float(x) for x in counts))


def document_char_freq(doc: Document) -> CharFreqVector:
    return char_freq_vector(doc.doc_id, " ".join(s.text for s in doc.sentences))


def char_freq_cluster(
    docs: list[CharFreqVector], k: int, seed: int = 0,
    trace: list[float] | None = None,
) -> dict[str, int]:
    """Plain K-means (Lloyd's) over character-frequency vectors.

    Initial centroids are k distinct documents drawn with the seeded
    generator; iteration stops when assignments repeat or after 300
    rounds. Empty clusters are reseeded with the point farthest from
    its centroid, keeping exactly k clusters alive. When a trace list
    is supplied, the per-iteration objective (sum of squared distances
    to the current centroids) is appended to it.
    """
    if k < 1 or k > len(docs):
        raise BadK(f"k={k} outside 1..{len(docs)}")
    points = np.array([d.freqs for d in docs])
    rng = np.random.default_rng(seed)
    centroids = points[rng.choice(len(docs), size=k, replace=False)].copy()
    assign = np.full(len(docs), -1)
    for _ in range(300):
        dists = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = dists.argmin(axis=1)
        if trace is not None:
            trace.append(float(dists[np.arange(len(docs)), new_assign].sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = points[assign == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
            else:
                farthest = dists[np.arange(len(docs)), assign].argmax()
                centroids[j] = points[farthest]
    return {d.doc_id: int(assign[i]) for i, d in enumerate(docs)}


def kmeans_objective(
    docs: list[CharFreqVector], assignment: dict[str, int]
) -> float:
    """Sum of squared distances to the assigned cluster means."""
    points = np.array([d.freqs for d in docs])
    labels = np.array([assignment[d.doc_id] for d in docs])
    total = 0.0
    for j in set(assignment.values()):
        members = points[labels == j]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total
