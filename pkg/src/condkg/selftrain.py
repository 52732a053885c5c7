"""Iterative self-training over an unlabeled sentence pool.

Each iteration trains both layer models on the current training set, labels
every pool sentence, and permanently promotes the most confident ones (min
of the two layer confidences, threshold tau, at most `cap` per iteration)
into the training set with their predicted tags.  The loop stops after
`max_iters` iterations or as soon as an iteration promotes fewer than
`min_new` sentences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import tagger
from .features import Lexicon
from .ingest import Sentence
from .schema import LabeledSentence, repair_bio


@dataclass
class SelfTrainParams:
    tau: float = 0.6
    cap: int = 500
    max_iters: int = 5
    min_new: int = 10
    epochs: int = 10
    seed: int = 13

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must be in (0, 1), got {self.tau}")
        for name in ("cap", "max_iters", "min_new", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class IterationRecord:
    iteration: int
    promoted_count: int
    pool_remaining: int
    mean_confidence: float
    # (doc_id, sent_index, confidence) of every promoted sentence, so the
    # threshold contract can be audited from the report alone.
    promotions: list[tuple[str, int, float]] = field(default_factory=list)


@dataclass
class SelfTrainReport:
    iterations: list[IterationRecord] = field(default_factory=list)
    final_train_size: int = 0

    def to_dict(self) -> dict:
        return {
            "iterations": [
                {
                    "iteration": r.iteration,
                    "promoted_count": r.promoted_count,
                    "pool_remaining": r.pool_remaining,
                    "mean_confidence": r.mean_confidence,
                    "promotions": [
                        {"doc_id": d, "sent_index": i, "confidence": c}
                        for d, i, c in r.promotions
                    ],
                }
                for r in self.iterations
            ],
            "final_train_size": self.final_train_size,
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def run(
    seed_labeled: list[LabeledSentence],
    pool: list[Sentence],
    params: SelfTrainParams,
    lexicon: Lexicon | None = None,
) -> tuple[tagger.Model, tagger.Model, list[LabeledSentence], SelfTrainReport]:
    """Returns (fact model, condition model, augmented training set, report)."""
    if not seed_labeled:
        raise ValueError("empty seed training set")
    train_set = list(seed_labeled)
    pool_left = list(pool)
    report = SelfTrainReport()
    fact_model = cond_model = None
    promoted_last = 0

    for iteration in range(1, params.max_iters + 1):
        fact_model = tagger.train(train_set, "fact", params.epochs, params.seed, lexicon)
        cond_model = tagger.train(train_set, "cond", params.epochs, params.seed, lexicon)

        scored = []
        for sent in pool_left:
            pf = tagger.predict(fact_model, sent, lexicon)
            pc = tagger.predict(cond_model, sent, lexicon)
            scored.append((sent, pf, pc, min(pf.confidence, pc.confidence)))
        mean_conf = (
            sum(conf for _, _, _, conf in scored) / len(scored) if scored else 0.0
        )

        eligible = [x for x in scored if x[3] >= params.tau]
        eligible.sort(key=lambda x: (-x[3], x[0].doc_id, x[0].sent_index))
        promoted = eligible[: params.cap]
        promoted_ids = {id(sent) for sent, _, _, _ in promoted}
        for sent, pf, pc, _ in promoted:
            train_set.append(
                LabeledSentence(sent, repair_bio(pf.tags), repair_bio(pc.tags))
            )
        pool_left = [s for s in pool_left if id(s) not in promoted_ids]

        promoted_last = len(promoted)
        report.iterations.append(
            IterationRecord(
                iteration=iteration,
                promoted_count=promoted_last,
                pool_remaining=len(pool_left),
                mean_confidence=mean_conf,
                promotions=[
                    (sent.doc_id, sent.sent_index, conf) for sent, _, _, conf in promoted
                ],
            )
        )
        if promoted_last < params.min_new:
            break

    if promoted_last > 0:
        # The last iteration grew the training set after its models were
        # trained; refresh so the returned models cover the final set.
        fact_model = tagger.train(train_set, "fact", params.epochs, params.seed, lexicon)
        cond_model = tagger.train(train_set, "cond", params.epochs, params.seed, lexicon)

    report.final_train_size = len(train_set)
    return fact_model, cond_model, train_set, report
