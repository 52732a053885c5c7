"""Per-token sparse feature extraction for the sequence tagger.

Parallel template families: word identity, word shape, affixes, boolean
flags, a +-2 context window, optional POS tags and optional lexicon
membership.  All templates are pure string functions of the sentence, so
extraction is deterministic and parallel-safe.
"""

from __future__ import annotations

from pathlib import Path

from .ingest import Sentence

TEMPLATE_SET_ID = "wsafwl-v1"

BOS = "<BOS>"
EOS = "<EOS>"


class Lexicon:
    """Case-insensitive set of (possibly multi-word) concept surfaces."""

    def __init__(self, surfaces: list[str] | set[str] = ()):  # type: ignore[assignment]
        self.entries: set[tuple[str, ...]] = set()
        for s in surfaces:
            words = tuple(s.lower().split())
            if words:
                self.entries.add(words)
        self.max_words = max((len(e) for e in self.entries), default=0)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, surface: str) -> bool:
        return tuple(surface.lower().split()) in self.entries

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        surfaces = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    surfaces.append(line)
        return cls(surfaces)

    def member_mask(self, words: list[str]) -> list[bool]:
        """Mark every token taking part in some lexicon surface match."""
        mask = [False] * len(words)
        lowered = [w.lower() for w in words]
        for n in range(1, self.max_words + 1):
            for i in range(len(words) - n + 1):
                if tuple(lowered[i : i + n]) in self.entries:
                    for j in range(i, i + n):
                        mask[j] = True
        return mask


def word_shape(text: str) -> str:
    """Character-class sketch: upper->A, lower->a, digit->0, rest kept.

    Runs longer than two are compressed to two ("TRPV5/V6" -> "AA0/A0").
    """
    mapped = []
    for ch in text:
        if ch.isupper():
            mapped.append("A")
        elif ch.islower():
            mapped.append("a")
        elif ch.isdigit():
            mapped.append("0")
        else:
            mapped.append(ch)
    out: list[str] = []
    run = 0
    for ch in mapped:
        if out and out[-1] == ch:
            run += 1
        else:
            run = 1
        if run <= 2:
            out.append(ch)
    return "".join(out)


def extract(
    sentence: Sentence,
    lexicon: Lexicon | None = None,
    pos: list[str] | None = None,
) -> list[list[str]]:
    """Feature strings for every token, in template order, deduplicated."""
    words = [t.text for t in sentence.tokens]
    lowered = [w.lower() for w in words]
    mask = lexicon.member_mask(words) if lexicon is not None and len(lexicon) else None

    vectors: list[list[str]] = []
    for i, raw in enumerate(words):
        w = lowered[i]
        feats = [f"w0={w}", f"raw={raw}", f"shape={word_shape(raw)}"]
        for k in (1, 2, 3):
            if len(w) >= k:
                feats.append(f"pre{k}={w[:k]}")
        for k in (1, 2, 3):
            if len(w) >= k:
                feats.append(f"suf{k}={w[-k:]}")
        if raw[:1].isupper():
            feats.append("init-cap=1")
        if raw.isupper():
            feats.append("all-caps=1")
        if any(c.isdigit() for c in raw):
            feats.append("has-digit=1")
        if "/" in raw:
            feats.append("has-slash=1")
        if "-" in raw:
            feats.append("has-hyphen=1")
        for off in (-2, -1, 1, 2):
            j = i + off
            if 0 <= j < len(words):
                ctx = lowered[j]
            else:
                ctx = BOS if off < 0 else EOS
            sign = f"+{off}" if off > 0 else str(off)
            feats.append(f"w{sign}={ctx}")
        if pos is not None:
            feats.append(f"pos={pos[i]}")
        if mask is not None and mask[i]:
            feats.append("lex=1")
        seen: set[str] = set()
        unique = [f for f in feats if not (f in seen or seen.add(f))]
        vectors.append(unique)
    return vectors
