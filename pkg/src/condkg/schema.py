"""Two-layer tag schema for conditional statements.

A sentence carries two parallel BIO tag sequences: one for fact tuples and
one for condition tuples.  Each layer uses five roles (subject concept,
subject attribute, predicate, object concept, object attribute), so a token
can simultaneously serve a fact and a condition, e.g. an object of a fact
acting as the subject of its condition.

`encode` turns tuples into tag sequences, `decode` turns tag sequences back
into tuples via predicate-anchored nearest-span grouping, and
`attach_conditions` links the two layers by concept-surface overlap.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .ingest import Sentence, Token

LAYER_FACT = "fact"
LAYER_COND = "cond"
LAYERS = (LAYER_FACT, LAYER_COND)

# Role codes: subject concept/attribute, predicate, object concept/attribute.
ROLES = ("SC", "SA", "P", "OC", "OA")

# Canonical label order; index 0 wins Viterbi tie-breaks.
LABELS = ("O", "B-SC", "I-SC", "B-SA", "I-SA", "B-P", "I-P", "B-OC", "I-OC", "B-OA", "I-OA")
LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}


@dataclass(frozen=True)
class Span:
    """Token span [start, end) plus its surface text (space-joined tokens)."""

    start: int
    end: int
    text: str


@dataclass
class EntityMention:
    concept: Span
    attribute: Span | None = None


@dataclass
class FactTuple:
    subject: EntityMention
    predicate: Span
    object: EntityMention
    confidence: float = 1.0


@dataclass
class ConditionTuple:
    subject: EntityMention
    predicate: Span
    object: EntityMention


@dataclass
class Statement:
    """Decoded facts and conditions of one sentence.

    `attachment` maps fact index -> condition indices; facts without
    conditions are omitted from the map.  `warnings` records tuples that had
    to be dropped during decoding (predicate without a usable concept span).
    """

    doc_id: str
    sent_index: int
    facts: list[FactTuple] = field(default_factory=list)
    conditions: list[ConditionTuple] = field(default_factory=list)
    attachment: dict[int, list[int]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass
class LabeledSentence:
    sentence: Sentence
    fact_tags: list[str]
    cond_tags: list[str]
    pos: list[str] | None = None


def span_text(tokens: list[Token], start: int, end: int) -> str:
    return " ".join(t.text for t in tokens[start:end])


def validate_tags(tags: list[str]) -> None:
    for t in tags:
        if t not in LABEL_INDEX:
            raise ValueError(f"unknown tag {t!r}")


def bio_valid(tags: list[str]) -> bool:
    prev = "O"
    for t in tags:
        if t.startswith("I-") and prev not in (f"B-{t[2:]}", f"I-{t[2:]}"):
            return False
        prev = t
    return True


def repair_bio(tags: list[str]) -> list[str]:
    """Rewrite any I-x that does not continue a B-x/I-x run into B-x.

    Idempotent; the output is always BIO-valid.
    """
    out: list[str] = []
    prev = "O"
    for t in tags:
        if t.startswith("I-") and prev not in (f"B-{t[2:]}", f"I-{t[2:]}"):
            t = "B-" + t[2:]
        out.append(t)
        prev = t
    return out


def _tuple_spans(tup: FactTuple | ConditionTuple) -> list[tuple[Span, str]]:
    spans = [(tup.subject.concept, "SC"), (tup.predicate, "P"), (tup.object.concept, "OC")]
    if tup.subject.attribute is not None:
        spans.append((tup.subject.attribute, "SA"))
    if tup.object.attribute is not None:
        spans.append((tup.object.attribute, "OA"))
    return spans


def _layer_tags(spans: list[tuple[Span, str]], n_tokens: int, layer: str) -> list[str]:
    # Identical (span, role) pairs may be shared between tuples; anything
    # else that overlaps is a conflict.
    unique: dict[tuple[int, int, str], Span] = {}
    for span, role in spans:
        if not (0 <= span.start < span.end <= n_tokens):
            raise ValueError(
                f"{layer} layer: span {span.start}..{span.end} outside token range 0..{n_tokens}"
            )
        unique.setdefault((span.start, span.end, role), span)
    claimed: dict[int, tuple[int, int, str]] = {}
    for key in sorted(unique):
        start, end, role = key
        for pos in range(start, end):
            other = claimed.get(pos)
            if other is not None and other != key:
                raise ValueError(
                    f"{layer} layer: conflicting spans at token {pos}: "
                    f"{other[2]} {other[0]}..{other[1]} vs {role} {start}..{end}"
                )
            claimed[pos] = key
    tags = ["O"] * n_tokens
    for start, end, role in unique:
        tags[start] = f"B-{role}"
        for pos in range(start + 1, end):
            tags[pos] = f"I-{role}"
    return tags


def encode(
    sentence: Sentence,
    facts: list[FactTuple],
    conditions: list[ConditionTuple],
) -> tuple[list[str], list[str]]:
    """Project tuples onto the two tag layers.

    Raises ValueError when spans of different roles overlap within a layer
    or fall outside the token range.
    """
    n = len(sentence.tokens)
    fact_spans = [sp for f in facts for sp in _tuple_spans(f)]
    cond_spans = [sp for c in conditions for sp in _tuple_spans(c)]
    return _layer_tags(fact_spans, n, LAYER_FACT), _layer_tags(cond_spans, n, LAYER_COND)


def _extract_spans(tags: list[str], tokens: list[Token]) -> dict[str, list[Span]]:
    """Pull BIO runs out of a (repaired) tag sequence, grouped by role."""
    by_role: dict[str, list[Span]] = {r: [] for r in ROLES}
    start = None
    role = None
    for i, tag in enumerate(tags + ["O"]):
        if start is not None and (tag == "O" or tag.startswith("B-") or tag[2:] != role):
            by_role[role].append(Span(start, i, span_text(tokens, start, i)))
            start, role = None, None
        if tag.startswith("B-"):
            start, role = i, tag[2:]
    return by_role


def _gap(a: Span, b: Span) -> int:
    if a.end <= b.start:
        return b.start - a.end
    if b.end <= a.start:
        return a.start - b.end
    return 0


def _nearest(cands: list[Span], anchor: Span) -> Span | None:
    # Ties by distance prefer the earlier span.
    return min(cands, key=lambda c: (_gap(c, anchor), c.start), default=None)


def _nearest_left(cands: list[Span], anchor: Span) -> Span | None:
    left = [c for c in cands if c.end <= anchor.start]
    return max(left, key=lambda c: c.end, default=None)


def _nearest_right(cands: list[Span], anchor: Span) -> Span | None:
    right = [c for c in cands if c.start >= anchor.end]
    return min(right, key=lambda c: c.start, default=None)


def _layer_tuples(
    tags: list[str], tokens: list[Token], layer: str
) -> tuple[list[tuple[EntityMention, Span, EntityMention]], list[str]]:
    spans = _extract_spans(tags, tokens)
    # Each attribute span belongs to its nearest same-side concept span; a
    # concept keeps only its nearest attribute.
    attr_of: dict[str, dict[Span, Span]] = {"SC": {}, "OC": {}}
    for attr_role, conc_role in (("SA", "SC"), ("OA", "OC")):
        for attr in spans[attr_role]:
            conc = _nearest(spans[conc_role], attr)
            if conc is None:
                continue
            cur = attr_of[conc_role].get(conc)
            if cur is None or (_gap(attr, conc), attr.start) < (_gap(cur, conc), cur.start):
                attr_of[conc_role][conc] = attr

    tuples: list[tuple[EntityMention, Span, EntityMention]] = []
    warnings: list[str] = []
    for pred in sorted(spans["P"], key=lambda s: s.start):
        subj = _nearest_left(spans["SC"], pred) or _nearest(spans["SC"], pred)
        obj = _nearest_right(spans["OC"], pred) or _nearest(spans["OC"], pred)
        if subj is None or obj is None:
            missing = "subject" if subj is None else "object"
            warnings.append(
                f"{layer} layer: predicate {pred.text!r} at {pred.start} dropped: no {missing} concept span"
            )
            continue
        tuples.append(
            (
                EntityMention(subj, attr_of["SC"].get(subj)),
                pred,
                EntityMention(obj, attr_of["OC"].get(obj)),
            )
        )
    return tuples, warnings


def attach_conditions(
    facts: list[FactTuple], conditions: list[ConditionTuple], sentence: Sentence
) -> dict[int, list[int]]:
    """Link conditions to facts by case-insensitive concept-surface overlap.

    A condition whose subject or object concept matches no fact concept is
    attached to every fact of the sentence.  With zero facts the map is
    empty and conditions stay unattached.
    """
    attachment: dict[int, list[int]] = {}
    if not facts:
        return attachment
    for ci, cond in enumerate(conditions):
        cond_surfaces = {cond.subject.concept.text.lower(), cond.object.concept.text.lower()}
        matched = [
            fi
            for fi, fact in enumerate(facts)
            if fact.subject.concept.text.lower() in cond_surfaces
            or fact.object.concept.text.lower() in cond_surfaces
        ]
        for fi in matched or range(len(facts)):
            attachment.setdefault(fi, []).append(ci)
    return attachment


def decode(labeled: LabeledSentence) -> Statement:
    """Recover fact and condition tuples from the two tag layers.

    BIO violations are repaired first.  Within a layer every predicate span
    seeds one tuple: the subject group is the nearest subject-concept span
    left of the predicate (falling back to the nearest anywhere), the object
    group the nearest object-concept span to its right (same fallback), so
    several predicates may share one span.  A predicate that cannot be
    paired with concept spans is dropped and recorded in `warnings`.
    """
    tokens = labeled.sentence.tokens
    for name, tags in (("fact", labeled.fact_tags), ("cond", labeled.cond_tags)):
        if len(tags) != len(tokens):
            raise ValueError(
                f"{name} tags length {len(tags)} != token count {len(tokens)} "
                f"({labeled.sentence.doc_id}/{labeled.sentence.sent_index})"
            )
    fact_raw, fact_warn = _layer_tuples(repair_bio(labeled.fact_tags), tokens, LAYER_FACT)
    cond_raw, cond_warn = _layer_tuples(repair_bio(labeled.cond_tags), tokens, LAYER_COND)
    facts = [FactTuple(s, p, o) for s, p, o in fact_raw]
    conditions = [ConditionTuple(s, p, o) for s, p, o in cond_raw]
    return Statement(
        doc_id=labeled.sentence.doc_id,
        sent_index=labeled.sentence.sent_index,
        facts=facts,
        conditions=conditions,
        attachment=attach_conditions(facts, conditions, labeled.sentence),
        warnings=fact_warn + cond_warn,
    )


# ---------------------------------------------------------------------------
# Labeled-data TSV: token<TAB>fact_tag<TAB>cond_tag (optional 4th column with
# a POS tag), blank line between sentences, optional header comment
# "# doc_id=<id> sent_index=<n>".

_HEADER = re.compile(r"#\s*doc_id=(\S+)\s+sent_index=(\d+)\s*$")


def _sentence_from_tokens(doc_id: str, sent_index: int, words: list[str]) -> Sentence:
    tokens: list[Token] = []
    pos = 0
    for w in words:
        tokens.append(Token(w, pos, pos + len(w)))
        pos += len(w) + 1
    return Sentence(doc_id, sent_index, " ".join(words), tokens)


def read_labeled_tsv(path: str | Path) -> list[LabeledSentence]:
    out: list[LabeledSentence] = []
    words: list[str] = []
    fact_tags: list[str] = []
    cond_tags: list[str] = []
    pos_tags: list[str] = []
    doc_id: str | None = None
    sent_index: int | None = None

    def flush(lineno: int) -> None:
        nonlocal words, fact_tags, cond_tags, pos_tags, doc_id, sent_index
        if not words:
            doc_id, sent_index = None, None
            return
        did = doc_id if doc_id is not None else str(Path(path).name)
        idx = sent_index if sent_index is not None else len(out)
        sent = _sentence_from_tokens(did, idx, words)
        out.append(
            LabeledSentence(sent, fact_tags, cond_tags, pos_tags if pos_tags else None)
        )
        words, fact_tags, cond_tags, pos_tags = [], [], [], []
        doc_id, sent_index = None, None

    with open(path, encoding="utf-8") as fh:
        lineno = 0
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(lineno)
                continue
            if line.startswith("#"):
                m = _HEADER.match(line)
                if m:
                    doc_id, sent_index = m.group(1), int(m.group(2))
                continue
            cols = line.split("\t")
            if len(cols) not in (3, 4):
                raise ValueError(f"{path}: line {lineno}: expected 3 or 4 columns, got {len(cols)}")
            for tag in cols[1:3]:
                if tag not in LABEL_INDEX:
                    raise ValueError(f"{path}: line {lineno}: unknown tag {tag!r}")
            words.append(cols[0])
            fact_tags.append(cols[1])
            cond_tags.append(cols[2])
            if len(cols) == 4:
                pos_tags.append(cols[3])
        flush(lineno + 1)
    return out


def write_labeled_tsv(path: str | Path, labeled: list[LabeledSentence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ls in labeled:
            fh.write(f"# doc_id={ls.sentence.doc_id} sent_index={ls.sentence.sent_index}\n")
            for i, tok in enumerate(ls.sentence.tokens):
                cols = [tok.text, ls.fact_tags[i], ls.cond_tags[i]]
                if ls.pos is not None:
                    cols.append(ls.pos[i])
                fh.write("\t".join(cols) + "\n")
            fh.write("\n")


# ---------------------------------------------------------------------------
# Statement JSONL records: the interchange between extraction and KG build.
# Conditions are nested under the facts they attach to; a sentence with
# conditions but no facts keeps them under "unattached_conditions".


def _mention_to_rec(m: EntityMention) -> dict:
    rec: dict = {"concept": m.concept.text, "concept_span": [m.concept.start, m.concept.end]}
    if m.attribute is not None:
        rec["attribute"] = m.attribute.text
        rec["attribute_span"] = [m.attribute.start, m.attribute.end]
    return rec


def _mention_from_rec(rec: dict) -> EntityMention:
    cs = rec["concept_span"]
    concept = Span(cs[0], cs[1], rec["concept"])
    attribute = None
    if "attribute" in rec:
        as_ = rec["attribute_span"]
        attribute = Span(as_[0], as_[1], rec["attribute"])
    return EntityMention(concept, attribute)


def _cond_to_rec(c: ConditionTuple) -> dict:
    return {
        "subject": _mention_to_rec(c.subject),
        "predicate": c.predicate.text,
        "predicate_span": [c.predicate.start, c.predicate.end],
        "object": _mention_to_rec(c.object),
    }


def _cond_from_rec(rec: dict) -> ConditionTuple:
    ps = rec["predicate_span"]
    return ConditionTuple(
        _mention_from_rec(rec["subject"]),
        Span(ps[0], ps[1], rec["predicate"]),
        _mention_from_rec(rec["object"]),
    )


def statement_to_record(st: Statement) -> dict:
    facts = []
    for fi, f in enumerate(st.facts):
        ps = [f.predicate.start, f.predicate.end]
        facts.append(
            {
                "subject": _mention_to_rec(f.subject),
                "predicate": f.predicate.text,
                "predicate_span": ps,
                "object": _mention_to_rec(f.object),
                "confidence": f.confidence,
                "conditions": [_cond_to_rec(st.conditions[ci]) for ci in st.attachment.get(fi, [])],
            }
        )
    rec: dict = {"doc_id": st.doc_id, "sent_index": st.sent_index, "facts": facts}
    if not st.facts and st.conditions:
        rec["unattached_conditions"] = [_cond_to_rec(c) for c in st.conditions]
    if st.warnings:
        rec["warnings"] = list(st.warnings)
    return rec


def statement_from_record(rec: dict) -> Statement:
    facts: list[FactTuple] = []
    conditions: list[ConditionTuple] = []
    attachment: dict[int, list[int]] = {}
    seen: dict[str, int] = {}

    def cond_index(crec: dict) -> int:
        key = json.dumps(crec, sort_keys=True)
        if key not in seen:
            seen[key] = len(conditions)
            conditions.append(_cond_from_rec(crec))
        return seen[key]

    for fi, frec in enumerate(rec["facts"]):
        ps = frec["predicate_span"]
        facts.append(
            FactTuple(
                _mention_from_rec(frec["subject"]),
                Span(ps[0], ps[1], frec["predicate"]),
                _mention_from_rec(frec["object"]),
                frec.get("confidence", 1.0),
            )
        )
        for crec in frec.get("conditions", []):
            attachment.setdefault(fi, []).append(cond_index(crec))
    for crec in rec.get("unattached_conditions", []):
        cond_index(crec)
    return Statement(
        doc_id=rec["doc_id"],
        sent_index=rec["sent_index"],
        facts=facts,
        conditions=conditions,
        attachment=attachment,
        warnings=list(rec.get("warnings", [])),
    )


def read_statements(path: str | Path) -> list[Statement]:
    out: list[Statement] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(statement_from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
                raise ValueError(f"{path}: line {lineno}: bad statement record: {exc}") from None
    return out


def write_statements(path: str | Path, statements: list[Statement]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for st in statements:
            fh.write(json.dumps(statement_to_record(st), sort_keys=True, ensure_ascii=False))
            fh.write("\n")
