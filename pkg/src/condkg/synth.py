"""Templated synthetic corpus generator.

Builds sentences from concept/attribute/predicate/condition slots together
with their gold two-layer tags and the gold statement those tags decode to.
Used to exercise training, extraction and the knowledge-graph build at desk
scale; the templates cover multi-fact sentences, shared spans, optional
attributes, condition-only sentences and the attach-to-all fallback.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .ingest import Sentence, tokenize
from .schema import (
    ConditionTuple,
    EntityMention,
    FactTuple,
    Span,
    Statement,
    attach_conditions,
    encode,
)

SUBJECTS = [
    "hypoxia",
    "oxidative stress",
    "heat shock",
    "glucose deprivation",
    "insulin",
    "TNF-alpha",
    "cisplatin",
    "UV irradiation",
    "mechanical stretch",
    "acidic pH",
    "alkaline pH",
    "caloric restriction",
    "ATP depletion",
    "serum starvation",
    "osmotic shock",
    "chronic inflammation",
]

PREDICATES = [
    "increases",
    "reduces",
    "decreases",
    "enhances",
    "inhibits",
    "suppresses",
    "elevates",
    "promotes",
    "induces",
    "attenuates",
]

OBJECTS = [
    "apoptosis",
    "autophagy",
    "NF-kB",
    "TRPV5/V6 channels",
    "caspase-3",
    "AMPK",
    "mitochondrial respiration",
    "calcium influx",
    "cell proliferation",
    "p53",
]

ATTRIBUTES = [
    "activity",
    "expression",
    "phosphorylation",
    "secretion",
    "stability",
    "abundance",
]

PLACES = [
    "Jurkat T cells",
    "cortical neurons",
    "HEK293 cells",
    "hippocampal slices",
    "HeLa cells",
    "primary astrocytes",
    "skeletal muscle",
    "pancreatic islets",
]

EVENTS = [
    "ischemia",
    "reperfusion",
    "differentiation",
    "starvation",
    "mitosis",
    "heat exposure",
]

CONTEXT_SUBJECTS = ["culture medium", "assay buffer", "growth medium"]
CONTEXT_OBJECTS = ["high glucose", "low oxygen", "elevated calcium", "reduced serum"]


@dataclass
class SynthExample:
    sentence: Sentence
    fact_tags: list[str]
    cond_tags: list[str]
    statement: Statement


class _Builder:
    """Accumulates template words and hands back token spans."""

    def __init__(self) -> None:
        self.words: list[str] = []

    def lit(self, word: str) -> None:
        self.words.append(word)

    def slot(self, surface: str) -> Span:
        parts = surface.split()
        start = len(self.words)
        self.words.extend(parts)
        return Span(start, start + len(parts), " ".join(parts))

    def finish(self, doc_id: str, sent_index: int) -> Sentence:
        text = " ".join(self.words) + "."
        tokens = tokenize(text)
        assert [t.text for t in tokens] == self.words + ["."], text
        return Sentence(doc_id, sent_index, text, tokens)


def _mention(concept: Span, attribute: Span | None = None) -> EntityMention:
    return EntityMention(concept, attribute)


def _example(
    rng: random.Random, doc_id: str, template: int
) -> tuple[Sentence, list[FactTuple], list[ConditionTuple]]:
    b = _Builder()
    facts: list[FactTuple] = []
    conditions: list[ConditionTuple] = []

    if template == 0:
        # subj pred the attr of obj in place
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        b.lit("the")
        attr = b.slot(rng.choice(ATTRIBUTES))
        b.lit("of")
        obj = b.slot(rng.choice(OBJECTS))
        link = b.slot("in")
        place = b.slot(rng.choice(PLACES))
        facts.append(FactTuple(_mention(subj), pred, _mention(obj, attr)))
        conditions.append(ConditionTuple(_mention(obj), link, _mention(place)))
    elif template == 1:
        # subj pred obj in place
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        obj = b.slot(rng.choice(OBJECTS))
        link = b.slot("in")
        place = b.slot(rng.choice(PLACES))
        facts.append(FactTuple(_mention(subj), pred, _mention(obj)))
        conditions.append(ConditionTuple(_mention(obj), link, _mention(place)))
    elif template == 2:
        # subj pred the attr of obj          (no condition)
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        b.lit("the")
        attr = b.slot(rng.choice(ATTRIBUTES))
        b.lit("of")
        obj = b.slot(rng.choice(OBJECTS))
        facts.append(FactTuple(_mention(subj), pred, _mention(obj, attr)))
    elif template == 3:
        # subj pred obj during event
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        obj = b.slot(rng.choice(OBJECTS))
        link = b.slot("during")
        event = b.slot(rng.choice(EVENTS))
        facts.append(FactTuple(_mention(subj), pred, _mention(obj)))
        conditions.append(ConditionTuple(_mention(obj), link, _mention(event)))
    elif template == 4:
        # subjA predA and subjB predB the attr of obj in place
        # Two facts sharing the object group; condition attaches to both.
        subj_a, subj_b = rng.sample(SUBJECTS, 2)
        pred_a, pred_b = rng.sample(PREDICATES, 2)
        sa = b.slot(subj_a)
        pa = b.slot(pred_a)
        b.lit("and")
        sb = b.slot(subj_b)
        pb = b.slot(pred_b)
        b.lit("the")
        attr = b.slot(rng.choice(ATTRIBUTES))
        b.lit("of")
        obj = b.slot(rng.choice(OBJECTS))
        link = b.slot("in")
        place = b.slot(rng.choice(PLACES))
        facts.append(FactTuple(_mention(sa), pa, _mention(obj, attr)))
        facts.append(FactTuple(_mention(sb), pb, _mention(obj, attr)))
        conditions.append(ConditionTuple(_mention(obj), link, _mention(place)))
    elif template == 5:
        # attr of subj pred obj              (subject-side attribute)
        attr = b.slot(rng.choice(ATTRIBUTES))
        b.lit("of")
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        obj = b.slot(rng.choice(OBJECTS))
        facts.append(FactTuple(_mention(subj, attr), pred, _mention(obj)))
    elif template == 6:
        # cells were maintained in place during event   (conditions only)
        cells = b.slot("cells")
        b.lit("were")
        b.lit("maintained")
        link1 = b.slot("in")
        place = b.slot(rng.choice(PLACES))
        link2 = b.slot("during")
        event = b.slot(rng.choice(EVENTS))
        conditions.append(ConditionTuple(_mention(cells), link1, _mention(place)))
        conditions.append(ConditionTuple(_mention(cells), link2, _mention(event)))
    else:
        # subj pred obj when ctx contains ctx_obj   (condition shares no
        # concept with the fact -> attach-to-all fallback)
        subj = b.slot(rng.choice(SUBJECTS))
        pred = b.slot(rng.choice(PREDICATES))
        obj = b.slot(rng.choice(OBJECTS))
        b.lit("when")
        ctx = b.slot(rng.choice(CONTEXT_SUBJECTS))
        contains = b.slot("contains")
        ctx_obj = b.slot(rng.choice(CONTEXT_OBJECTS))
        facts.append(FactTuple(_mention(subj), pred, _mention(obj)))
        conditions.append(ConditionTuple(_mention(ctx), contains, _mention(ctx_obj)))

    sentence = b.finish(doc_id, 0)
    return sentence, facts, conditions


def generate(n: int, seed: int, doc_prefix: str = "synth") -> list[SynthExample]:
    """Generate `n` examples with gold tags and gold statements."""
    rng = random.Random(seed)
    out: list[SynthExample] = []
    for i in range(n):
        template = rng.randrange(8)
        sentence, facts, conditions = _example(rng, f"{doc_prefix}{i:04d}", template)
        fact_tags, cond_tags = encode(sentence, facts, conditions)
        statement = Statement(
            doc_id=sentence.doc_id,
            sent_index=sentence.sent_index,
            facts=facts,
            conditions=conditions,
            attachment=attach_conditions(facts, conditions, sentence),
        )
        out.append(SynthExample(sentence, fact_tags, cond_tags, statement))
    return out
