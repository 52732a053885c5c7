"""Corpus ingestion: split documents into sentences and tokenize with exact offsets.

Sentence splitting and tokenization are rule-based and deterministic.  Every
token records the character span it was cut from, so downstream consumers can
always recover the original surface text.  Offsets are counted in Unicode
scalar values, not bytes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

# Abbreviations that must not end a sentence even when followed by
# whitespace + capital/digit.  Single capitals ("T.", "J.") are guarded
# separately.
_ABBREVIATIONS = ("Fig.", "et al.", "e.g.", "i.e.", "vs.")

_CHUNK = re.compile(r"\S+")


@dataclass
class Token:
    text: str
    start: int  # character offset into the sentence text, inclusive
    end: int  # exclusive


@dataclass
class Sentence:
    doc_id: str
    sent_index: int
    text: str
    tokens: list[Token] = field(default_factory=list)


@dataclass
class Document:
    doc_id: str
    text: str


def tokenize(text: str) -> list[Token]:
    """Whitespace segmentation with leading/trailing punctuation peeled off.

    Internal punctuation stays inside the token, which keeps compounds such
    as "RNAi-mediated", "TRPV5/V6" or "3.5" intact.  Each peeled character
    becomes its own token ("cells)." -> "cells", ")", ".").
    """
    tokens: list[Token] = []
    for m in _CHUNK.finditer(text):
        chunk = m.group()
        base = m.start()
        lo, hi = 0, len(chunk)
        head: list[Token] = []
        while lo < hi and not chunk[lo].isalnum():
            head.append(Token(chunk[lo], base + lo, base + lo + 1))
            lo += 1
        tail: list[Token] = []
        while hi > lo and not chunk[hi - 1].isalnum():
            tail.append(Token(chunk[hi - 1], base + hi - 1, base + hi))
            hi -= 1
        tokens.extend(head)
        if lo < hi:
            tokens.append(Token(chunk[lo:hi], base + lo, base + hi))
        tokens.extend(reversed(tail))
    return tokens


def _guarded(text: str, dot: int) -> bool:
    """True when the period at `dot` belongs to an abbreviation."""
    prefix = text[: dot + 1]
    if any(prefix.endswith(abbr) for abbr in _ABBREVIATIONS):
        return True
    # Single capital initial: start-of-text or whitespace, one capital, ".".
    if dot >= 1 and text[dot - 1].isupper():
        if dot == 1 or text[dot - 2].isspace():
            return True
    return False


def split_sentences(doc: Document) -> list[Sentence]:
    """Split at [.?!] followed by whitespace and an uppercase letter or digit.

    Abbreviation guards suppress splits after "Fig.", "et al.", "e.g.",
    "i.e.", "vs." and single-capital initials.  Empty text yields no
    sentences.
    """
    text = doc.text
    n = len(text)
    sentences: list[Sentence] = []
    start = 0
    i = 0

    def flush(end: int) -> None:
        piece = text[start:end].strip()
        if piece:
            sentences.append(Sentence(doc.doc_id, len(sentences), piece, tokenize(piece)))

    while i < n:
        ch = text[i]
        if ch in ".?!":
            j = i + 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            follows = k > j and k < n and (text[k].isupper() or text[k].isdigit())
            if follows and not (ch == "." and _guarded(text, i)):
                flush(j)
                start = k
                i = k
                continue
        i += 1
    flush(n)
    return sentences


def sentence_to_record(sentence: Sentence) -> dict:
    return {
        "doc_id": sentence.doc_id,
        "sent_index": sentence.sent_index,
        "text": sentence.text,
        "tokens": [{"text": t.text, "start": t.start, "end": t.end} for t in sentence.tokens],
    }


def sentence_from_record(rec: dict) -> Sentence:
    tokens = [Token(t["text"], t["start"], t["end"]) for t in rec["tokens"]]
    return Sentence(rec["doc_id"], rec["sent_index"], rec["text"], tokens)


def read_documents(path: str | Path) -> list[Document]:
    """Read a JSONL corpus of {"doc_id", "text"} records.

    Raises ValueError naming the offending line for malformed JSON, missing
    fields, or duplicate doc ids.
    """
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
            if not isinstance(rec, dict) or "doc_id" not in rec or "text" not in rec:
                raise ValueError(f"{path}: line {lineno}: expected object with doc_id and text")
            doc_id = rec["doc_id"]
            if not isinstance(doc_id, str) or not doc_id:
                raise ValueError(f"{path}: line {lineno}: doc_id must be a non-empty string")
            if doc_id in seen:
                raise ValueError(f"{path}: line {lineno}: duplicate doc_id {doc_id!r}")
            seen.add(doc_id)
            if not isinstance(rec["text"], str):
                raise ValueError(f"{path}: line {lineno}: text must be a string")
            docs.append(Document(doc_id, rec["text"]))
    return docs


def read_sentences(path: str | Path) -> list[Sentence]:
    sentences: list[Sentence] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                sentences.append(sentence_from_record(rec))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: line {lineno}: bad sentence record: {exc}") from None
    return sentences


def write_sentences(path: str | Path, sentences: list[Sentence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(json.dumps(sentence_to_record(s), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


def ingest(corpus_path: str | Path, out_path: str | Path) -> int:
    """Split every document of a JSONL corpus into sentence records.

    Output order is (document order, sentence order).  Returns the number of
    sentences written.
    """
    sentences: list[Sentence] = []
    for doc in read_documents(corpus_path):
        sentences.extend(split_sentences(doc))
    write_sentences(out_path, sentences)
    return len(sentences)
