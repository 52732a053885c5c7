"""Conditional knowledge graph: concept nodes, fact edges with attached
condition records, provenance back to sentences, persistence and ego queries.

Concept identity is the case-insensitive, underscore-joined surface form;
predicates are grouped under a rule-based lemma while every raw surface is
retained with its count, so aggregation loses no information.  Attributes
are stored as edge qualifiers rather than nodes, which keeps the graph dense
on concepts.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .ingest import Sentence
from .schema import Statement

_WS = re.compile(r"\s+")

_VOWELS = "aeiou"

# Prepositions that merely look inflected; suffix rules must not touch them.
_NOT_INFLECTED = frozenset({"during"})


def normalize_concept(surface: str) -> str:
    """Canonical node key: trim, join internal whitespace with "_", lowercase."""
    trimmed = surface.strip()
    if not trimmed:
        raise ValueError("empty concept surface")
    return _WS.sub("_", trimmed).lower()


def _restore_stem(stem: str) -> str:
    """Heuristic repair after stripping -ed/-ing."""
    if (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and stem[-1] not in _VOWELS
        and stem[-1] not in "lszf"
    ):
        return stem[:-1]  # stopped -> stop
    if stem.endswith("at") and len(stem) >= 3 and stem[-3] not in _VOWELS:
        return stem + "e"  # activat -> activate, but treat stays
    if stem[-1] in "cvu":
        return stem + "e"  # reduc -> reduce, observ -> observe
    if stem[-1] in "sz" and len(stem) >= 2 and stem[-2] in _VOWELS:
        return stem + "e"  # increas -> increase
    if stem[-1] == "l" and len(stem) >= 2 and stem[-2] not in _VOWELS:
        return stem + "e"  # enabl -> enable
    return stem


def lemmatize_predicate(surface: str) -> str:
    """Rule-based, lowercase lemma; groups tense/number variants of a verb.

    Deliberately small: raw surfaces are kept on the edge, so an imperfect
    lemma only affects grouping, never loses data.  Never returns "".
    """
    w = surface.strip().lower()
    if w in _NOT_INFLECTED:
        return w
    if len(w) >= 5 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) >= 5 and w.endswith(("sses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if len(w) >= 4 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    if len(w) >= 5 and w.endswith("ied"):
        return w[:-3] + "y"
    if len(w) >= 5 and w.endswith("ed"):
        return _restore_stem(w[:-2])
    if len(w) >= 5 and w.endswith("ing"):
        stem = w[:-3]
        if len(stem) >= 2 and any(c in _VOWELS for c in stem):
            return _restore_stem(stem)
    return w


@dataclass
class ConceptNode:
    key: str
    surfaces: dict[str, int] = field(default_factory=dict)

    @property
    def freq(self) -> int:
        return sum(self.surfaces.values())

    @property
    def display(self) -> str:
        """Most frequent raw surface; ties go to the smallest string."""
        best = max(sorted(self.surfaces), key=lambda s: self.surfaces[s])
        return best

    def add_surface(self, surface: str, count: int = 1) -> None:
        self.surfaces[surface] = self.surfaces.get(surface, 0) + count


@dataclass
class ConditionRecord:
    subj_key: str
    pred: str
    obj_key: str
    subj_attr: str | None = None
    obj_attr: str | None = None
    count: int = 1

    def identity(self) -> tuple:
        return (self.subj_key, self.subj_attr, self.pred, self.obj_key, self.obj_attr)


def _edge_id(identity: tuple) -> str:
    raw = "".join("" if part is None else part for part in identity)
    return hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]


@dataclass
class FactEdge:
    subj_key: str
    pred_lemma: str
    obj_key: str
    subj_attr: str | None = None
    obj_attr: str | None = None
    pred_surfaces: dict[str, int] = field(default_factory=dict)
    conditions: list[ConditionRecord] = field(default_factory=list)
    provenance: list[tuple[str, int]] = field(default_factory=list)
    max_confidence: float = 0.0

    def identity(self) -> tuple:
        return (self.subj_key, self.subj_attr, self.pred_lemma, self.obj_key, self.obj_attr)

    @property
    def id(self) -> str:
        return _edge_id(self.identity())

    @property
    def support(self) -> int:
        return len(self.provenance)

    def merge_condition(self, rec: ConditionRecord) -> None:
        for existing in self.conditions:
            if existing.identity() == rec.identity():
                existing.count += rec.count
                return
        self.conditions.append(rec)


@dataclass
class KnowledgeGraph:
    nodes: dict[str, ConceptNode] = field(default_factory=dict)
    edges: dict[str, FactEdge] = field(default_factory=dict)
    sentences: dict[tuple[str, int], str] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return _canonical(self) == _canonical(other)


def _node_record(node: ConceptNode) -> dict:
    return {
        "key": node.key,
        "display": node.display,
        "freq": node.freq,
        "surfaces": dict(sorted(node.surfaces.items())),
    }


def _condition_record(rec: ConditionRecord) -> dict:
    out: dict = {"subj_key": rec.subj_key, "pred": rec.pred, "obj_key": rec.obj_key}
    if rec.subj_attr is not None:
        out["subj_attr"] = rec.subj_attr
    if rec.obj_attr is not None:
        out["obj_attr"] = rec.obj_attr
    out["count"] = rec.count
    return out


def _cond_sort_key(rec: ConditionRecord) -> tuple:
    return (rec.subj_key, rec.subj_attr or "", rec.pred, rec.obj_key, rec.obj_attr or "")


def _edge_record(edge: FactEdge) -> dict:
    out: dict = {
        "id": edge.id,
        "subj_key": edge.subj_key,
        "pred_lemma": edge.pred_lemma,
        "obj_key": edge.obj_key,
        "pred_surfaces": dict(sorted(edge.pred_surfaces.items())),
        "support": edge.support,
        "max_confidence": edge.max_confidence,
        "conditions": [
            _condition_record(c) for c in sorted(edge.conditions, key=_cond_sort_key)
        ],
        "provenance": [
            {"doc_id": d, "sent_index": i} for d, i in sorted(edge.provenance)
        ],
    }
    if edge.subj_attr is not None:
        out["subj_attr"] = edge.subj_attr
    if edge.obj_attr is not None:
        out["obj_attr"] = edge.obj_attr
    return out


def _canonical(kg: KnowledgeGraph) -> dict:
    return {
        "nodes": [_node_record(kg.nodes[k]) for k in sorted(kg.nodes)],
        "edges": [_edge_record(kg.edges[i]) for i in sorted(kg.edges)],
        "sentences": [
            {"doc_id": d, "sent_index": i, "text": kg.sentences[(d, i)]}
            for d, i in sorted(kg.sentences)
        ],
    }


def _upsert_node(kg: KnowledgeGraph, surface: str) -> str:
    key = normalize_concept(surface)
    node = kg.nodes.get(key)
    if node is None:
        node = kg.nodes[key] = ConceptNode(key)
    node.add_surface(surface.strip())
    return key


def add_statement(kg: KnowledgeGraph, statement: Statement, sentence: Sentence) -> KnowledgeGraph:
    """Fold one decoded statement into the graph.

    Fact edges are keyed by (subject key/attr, predicate lemma, object
    key/attr); repeats increment support and provenance.  Conditions attached
    to a fact merge into its edge's condition records by identity.  The
    sentence text is always stored for provenance lookups.
    """
    kg.sentences[(statement.doc_id, statement.sent_index)] = sentence.text
    prov = (statement.doc_id, statement.sent_index)

    cond_keys: list[tuple] = []
    for cond in statement.conditions:
        subj_key = _upsert_node(kg, cond.subject.concept.text)
        obj_key = _upsert_node(kg, cond.object.concept.text)
        cond_keys.append(
            (
                subj_key,
                normalize_concept(cond.subject.attribute.text) if cond.subject.attribute else None,
                lemmatize_predicate(cond.predicate.text),
                obj_key,
                normalize_concept(cond.object.attribute.text) if cond.object.attribute else None,
            )
        )

    for fi, fact in enumerate(statement.facts):
        subj_key = _upsert_node(kg, fact.subject.concept.text)
        obj_key = _upsert_node(kg, fact.object.concept.text)
        identity = (
            subj_key,
            normalize_concept(fact.subject.attribute.text) if fact.subject.attribute else None,
            lemmatize_predicate(fact.predicate.text),
            obj_key,
            normalize_concept(fact.object.attribute.text) if fact.object.attribute else None,
        )
        edge_id = _edge_id(identity)
        edge = kg.edges.get(edge_id)
        if edge is None:
            edge = kg.edges[edge_id] = FactEdge(
                subj_key=identity[0],
                subj_attr=identity[1],
                pred_lemma=identity[2],
                obj_key=identity[3],
                obj_attr=identity[4],
            )
        raw_pred = fact.predicate.text
        edge.pred_surfaces[raw_pred] = edge.pred_surfaces.get(raw_pred, 0) + 1
        edge.provenance.append(prov)
        edge.max_confidence = max(edge.max_confidence, fact.confidence)
        for ci in statement.attachment.get(fi, []):
            sk, sa, pl, ok, oa = cond_keys[ci]
            edge.merge_condition(ConditionRecord(sk, pl, ok, sa, oa))
    return kg


def query_ego(
    kg: KnowledgeGraph,
    concept: str,
    predicates: set[str] | list[str] | tuple[str, ...] = (),
    direction: str = "both",
    limit: int = 50,
) -> dict:
    """Edges incident to a concept, with conditions and provenance texts.

    `predicates` filters by predicate lemma (empty = all); `direction` is
    "in", "out" or "both".  Edges are ordered by (support desc, id asc) and
    truncated to `limit`.  An unknown concept yields an empty result.
    """
    if direction not in ("in", "out", "both"):
        raise ValueError(f"direction must be in/out/both, got {direction!r}")
    key = normalize_concept(concept)
    wanted = set(predicates)
    node = kg.nodes.get(key)

    hits = []
    for edge in kg.edges.values():
        incident = (direction in ("out", "both") and edge.subj_key == key) or (
            direction in ("in", "both") and edge.obj_key == key
        )
        if not incident:
            continue
        if wanted and edge.pred_lemma not in wanted:
            continue
        hits.append(edge)
    hits.sort(key=lambda e: (-e.support, e.id))
    hits = hits[:limit]

    out_edges = []
    for edge in hits:
        rec = _edge_record(edge)
        rec["sentences"] = [
            {"doc_id": d, "sent_index": i, "text": kg.sentences[(d, i)]}
            for d, i in sorted(set(edge.provenance))
        ]
        out_edges.append(rec)
    return {
        "center": None if node is None else {"key": node.key, "display": node.display, "freq": node.freq},
        "edges": out_edges,
    }


# ---------------------------------------------------------------------------
# Persistence: three key-sorted JSONL files.  Saving twice, or saving graphs
# built from the same statements in any insertion order, produces identical
# bytes.

_FILES = ("nodes.jsonl", "edges.jsonl", "sentences.jsonl")


def save(kg: KnowledgeGraph, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    canon = _canonical(kg)
    for name, records in (
        ("nodes.jsonl", canon["nodes"]),
        ("edges.jsonl", canon["edges"]),
        ("sentences.jsonl", canon["sentences"]),
    ):
        with open(directory / name, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False))
                fh.write("\n")


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    if not path.exists():
        raise ValueError(f"{path}: missing knowledge-graph file")
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
    return out


def load(directory: str | Path) -> KnowledgeGraph:
    """Load and validate a saved graph.

    Checks referential integrity (edge endpoints resolve to nodes, provenance
    resolves to sentences) and that support equals the provenance length.
    """
    directory = Path(directory)
    kg = KnowledgeGraph()

    path = directory / "nodes.jsonl"
    for lineno, rec in _read_jsonl(path):
        try:
            kg.nodes[rec["key"]] = ConceptNode(rec["key"], dict(rec["surfaces"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: line {lineno}: bad node record: {exc}") from None

    path = directory / "sentences.jsonl"
    for lineno, rec in _read_jsonl(path):
        try:
            kg.sentences[(rec["doc_id"], rec["sent_index"])] = rec["text"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: line {lineno}: bad sentence record: {exc}") from None

    path = directory / "edges.jsonl"
    for lineno, rec in _read_jsonl(path):
        try:
            edge = FactEdge(
                subj_key=rec["subj_key"],
                pred_lemma=rec["pred_lemma"],
                obj_key=rec["obj_key"],
                subj_attr=rec.get("subj_attr"),
                obj_attr=rec.get("obj_attr"),
                pred_surfaces=dict(rec["pred_surfaces"]),
                conditions=[
                    ConditionRecord(
                        c["subj_key"],
                        c["pred"],
                        c["obj_key"],
                        c.get("subj_attr"),
                        c.get("obj_attr"),
                        c["count"],
                    )
                    for c in rec["conditions"]
                ],
                provenance=[(p["doc_id"], p["sent_index"]) for p in rec["provenance"]],
                max_confidence=rec["max_confidence"],
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{path}: line {lineno}: bad edge record: {exc}") from None
        if rec["id"] != edge.id:
            raise ValueError(f"{path}: line {lineno}: edge id {rec['id']} does not match identity")
        if rec["support"] != edge.support:
            raise ValueError(
                f"{path}: line {lineno}: support {rec['support']} != provenance length {edge.support}"
            )
        for endpoint in (edge.subj_key, edge.obj_key):
            if endpoint not in kg.nodes:
                raise ValueError(f"{path}: line {lineno}: unknown endpoint {endpoint!r}")
        for p in edge.provenance:
            if p not in kg.sentences:
                raise ValueError(f"{path}: line {lineno}: provenance {p} has no stored sentence")
        kg.edges[edge.id] = edge
    return kg
