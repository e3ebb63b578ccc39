"""Immutable inverted index: build from a corpus, persist, load.

Deduplication drops exact duplicates by content hash of the normalized
text, keeping the first occurrence. Documents that are empty after
normalization or tokenization are dropped. The text processing config is
embedded in the index so queries can be checked against it.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    CorpusFormatError,
    DuplicateDocIdError,
    EmptyCorpusError,
    IndexChecksumError,
    IndexFormatError,
)
from .textproc import TextprocConfig, content_hash, fnv1a64, normalize

MAGIC = b"CRSIDX1\x00"
FORMAT_VERSION = 1


@dataclass
class Document:
    doc_id: str
    text: str


@dataclass
class IndexStats:
    doc_count: int
    term_count: int
    collection_length: int
    mean_doc_length: float


class InvertedIndex:
    """Term dictionary plus the collection statistics QL and BM25 need.

    Postings are (doc_ordinal, term_frequency) pairs sorted by ordinal.
    Raw document text is kept for snippets and answer-type cue matching.
    """

    def __init__(self, config: TextprocConfig):
        self.config = config
        self.dictionary: dict[str, list[tuple[int, int]]] = {}
        self.doc_ids: list[str] = []
        self.doc_lengths: list[int] = []
        self.doc_texts: list[str] = []
        self.collection_length = 0
        self.collection_tf: dict[str, int] = {}
        self._ordinal_by_id: dict[str, int] = {}

    def ordinal_of(self, doc_id: str) -> int:
        if len(self._ordinal_by_id) != len(self.doc_ids):
            self._ordinal_by_id = {d: i for i, d in enumerate(self.doc_ids)}
        return self._ordinal_by_id[doc_id]

    def text_of(self, doc_id: str) -> str:
        return self.doc_texts[self.ordinal_of(doc_id)]

    @property
    def doc_count(self) -> int:
        return len(self.doc_ids)

    @property
    def term_count(self) -> int:
        return len(self.dictionary)

    @property
    def mean_doc_length(self) -> float:
        return self.collection_length / self.doc_count if self.doc_count else 0.0

    def stats(self) -> IndexStats:
        return IndexStats(
            doc_count=self.doc_count,
            term_count=self.term_count,
            collection_length=self.collection_length,
            mean_doc_length=self.mean_doc_length,
        )

    def _add_document(self, doc_id: str, text: str, terms: list[str]) -> None:
        ordinal = len(self.doc_ids)
        self.doc_ids.append(doc_id)
        self.doc_texts.append(text)
        self.doc_lengths.append(len(terms))
        self.collection_length += len(terms)
        counts: dict[str, int] = {}
        for term in terms:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            self.dictionary.setdefault(term, []).append((ordinal, tf))
            self.collection_tf[term] = self.collection_tf.get(term, 0) + tf

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        assert sum(self.doc_lengths) == self.collection_length
        assert len(self.doc_ids) == len(self.doc_lengths) == len(self.doc_texts)
        for term, postings in self.dictionary.items():
            ordinals = [o for o, _ in postings]
            assert ordinals == sorted(set(ordinals)), f"postings unsorted for {term!r}"
            assert all(tf >= 1 for _, tf in postings)
            assert sum(tf for _, tf in postings) == self.collection_tf[term]


def build_index(
    corpus: Iterable[Document],
    config: TextprocConfig,
    allow_empty_corpus: bool = False,
) -> InvertedIndex:
    """Index a document stream; deterministic given input order."""
    index = InvertedIndex(config)
    seen_ids: dict[str, int] = {}
    seen_hashes: set[int] = set()
    for doc in corpus:
        digest = content_hash(doc.text)
        if doc.doc_id in seen_ids:
            if seen_ids[doc.doc_id] != digest:
                raise DuplicateDocIdError(
                    f"doc_id {doc.doc_id!r} appears twice with differing text"
                )
            continue
        seen_ids[doc.doc_id] = digest
        if digest in seen_hashes:
            continue
        seen_hashes.add(digest)
        if not normalize(doc.text):
            continue
        terms = config.terms(doc.text)
        if not terms:
            continue
        index._add_document(doc.doc_id, doc.text, terms)
    if index.doc_count == 0 and not allow_empty_corpus:
        raise EmptyCorpusError(
            "no documents survived indexing (use allow_empty_corpus to permit this)"
        )
    return index


def read_jsonl(path) -> Iterator[Document]:
    """Corpus reader: one JSON object per line with 'id' and 'text' fields."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc}", line=lineno) from exc
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise CorpusFormatError("expected object with 'id' and 'text'", line=lineno)
            yield Document(doc_id=str(record["id"]), text=str(record["text"]))


def read_tsv(path) -> Iterator[Document]:
    """Corpus reader: 'id<TAB>text' per line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise CorpusFormatError("expected 'id<TAB>text'", line=lineno)
            doc_id, text = line.split("\t", 1)
            yield Document(doc_id=doc_id, text=text)


def _pack_str(out: bytearray, value: str) -> None:
    data = value.encode("utf-8")
    out += struct.pack("<I", len(data))
    out += data


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise IndexChecksumError("index payload ends unexpectedly")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        return self.take(self.u32()).decode("utf-8")


def save_index(index: InvertedIndex, path) -> None:
    """Write the single-file binary image: magic, version, payload, checksum."""
    payload = bytearray()
    _pack_str(payload, index.config.to_json())
    payload += struct.pack("<I", index.doc_count)
    for doc_id, length, text in zip(index.doc_ids, index.doc_lengths, index.doc_texts):
        _pack_str(payload, doc_id)
        payload += struct.pack("<I", length)
        _pack_str(payload, text)
    payload += struct.pack("<Q", index.collection_length)
    payload += struct.pack("<I", index.term_count)
    for term in sorted(index.dictionary):
        postings = index.dictionary[term]
        _pack_str(payload, term)
        payload += struct.pack("<I", len(postings))
        for ordinal, tf in postings:
            payload += struct.pack("<II", ordinal, tf)
    checksum = fnv1a64(bytes(payload))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([FORMAT_VERSION]))
        fh.write(payload)
        fh.write(struct.pack("<Q", checksum))


def load_index(path) -> InvertedIndex:
    """Load an index written by save_index; verifies magic, version, checksum."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 1 + 8 or data[: len(MAGIC)] != MAGIC:
        raise IndexFormatError("not an index file (bad magic bytes)")
    version = data[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise IndexFormatError(
            f"unsupported index format version {version} (expected {FORMAT_VERSION})"
        )
    payload = data[len(MAGIC) + 1 : -8]
    (expected,) = struct.unpack("<Q", data[-8:])
    if fnv1a64(payload) != expected:
        raise IndexChecksumError("index file checksum mismatch (truncated or corrupt)")
    cur = _Cursor(payload)
    config = TextprocConfig.from_json(cur.string())
    index = InvertedIndex(config)
    doc_count = cur.u32()
    for _ in range(doc_count):
        index.doc_ids.append(cur.string())
        index.doc_lengths.append(cur.u32())
        index.doc_texts.append(cur.string())
    index.collection_length = cur.u64()
    term_count = cur.u32()
    for _ in range(term_count):
        term = cur.string()
        df = cur.u32()
        postings = []
        total = 0
        for _ in range(df):
            ordinal = cur.u32()
            tf = cur.u32()
            postings.append((ordinal, tf))
            total += tf
        index.dictionary[term] = postings
        index.collection_tf[term] = total
    return index
