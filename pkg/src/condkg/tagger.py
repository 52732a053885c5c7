"""Linear-chain sequence tagger: scoring, exact 1/2-best Viterbi decoding and
averaged structured-perceptron training.

One model is trained per layer (fact, condition) over the shared feature
extractor.  Scores are sums of sparse emission weights plus transition and
start/stop weights; decoding maximizes the sequence score exactly, with ties
broken towards the lexicographically smallest label-index sequence, so an
all-zero model deterministically yields the first label everywhere.

Confidence is the length-normalized margin between the best and second-best
sequence, mapped to [0, 1) by m / (1 + m); it feeds self-training.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import features
from .ingest import Sentence
from .schema import LABELS, LabeledSentence, bio_valid, validate_tags

MODEL_VERSION = "1"

_SEP = ""


@dataclass
class Model:
    layer: str
    emissions: dict[str, dict[str, float]] = field(default_factory=dict)
    transitions: dict[str, dict[str, float]] = field(default_factory=dict)
    start: dict[str, float] = field(default_factory=dict)
    stop: dict[str, float] = field(default_factory=dict)
    labels: tuple[str, ...] = LABELS
    version: str = MODEL_VERSION
    config: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        L = len(self.labels)
        self._trans = [
            [self.transitions.get(a, {}).get(b, 0.0) for b in self.labels] for a in self.labels
        ]
        self._start = [self.start.get(lab, 0.0) for lab in self.labels]
        self._stop = [self.stop.get(lab, 0.0) for lab in self.labels]
        assert L == len(set(self.labels))


@dataclass
class Prediction:
    tags: list[str]
    score_best: float
    score_second: float
    confidence: float


def confidence_from_margin(score_best: float, score_second: float, n_tokens: int) -> float:
    m = max(0.0, (score_best - score_second) / n_tokens)
    return m / (1.0 + m)


def _emission_score(emissions: dict, feats: list[str], label: str) -> float:
    s = 0.0
    for f in feats:
        row = emissions.get(f)
        if row:
            w = row.get(label)
            if w is not None:
                s += w
    return s


def _emission_rows(emissions: dict, feature_vectors: list[list[str]], index: dict) -> list[list]:
    L = len(index)
    rows = []
    for feats in feature_vectors:
        row = [0.0] * L
        for f in feats:
            d = emissions.get(f)
            if d:
                for lab, w in d.items():
                    row[index[lab]] += w
        rows.append(row)
    return rows


def score_sequence(model: Model, feature_vectors: list[list[str]], tags: list[str]) -> float:
    """Chain score: start + per-token emissions + transitions + stop.

    Missing weights contribute zero.
    """
    if len(feature_vectors) != len(tags):
        raise ValueError(f"{len(feature_vectors)} feature vectors vs {len(tags)} tags")
    if not tags:
        return 0.0
    s = model.start.get(tags[0], 0.0)
    prev: str | None = None
    for feats, tag in zip(feature_vectors, tags):
        if prev is not None:
            s += model.transitions.get(prev, {}).get(tag, 0.0)
        s += _emission_score(model.emissions, feats, tag)
        prev = tag
    s += model.stop.get(tags[-1], 0.0)
    return s


def _viterbi_1best(E: list[list], start: list, stop: list, trans: list[list]) -> tuple[float, tuple[int, ...]]:
    L = len(start)
    cur: list[tuple[float, tuple[int, ...]]] = [(start[j] + E[0][j], (j,)) for j in range(L)]
    for t in range(1, len(E)):
        row = E[t]
        nxt = []
        for j in range(L):
            ej = row[j]
            bs = None
            bp: tuple[int, ...] = ()
            for i in range(L):
                ps, pp = cur[i]
                s = (ps + trans[i][j]) + ej
                if bs is None or s > bs or (s == bs and pp < bp):
                    bs, bp = s, pp
            nxt.append((bs, bp + (j,)))
        cur = nxt
    best_s = None
    best_p: tuple[int, ...] = ()
    for j in range(L):
        s = cur[j][0] + stop[j]
        if best_s is None or s > best_s or (s == best_s and cur[j][1] < best_p):
            best_s, best_p = s, cur[j][1]
    return best_s, best_p


def _viterbi_2best_core(
    E: list[list], start: list, stop: list, trans: list[list]
) -> tuple[tuple[float, tuple[int, ...]], tuple[float, tuple[int, ...]]]:
    """Exact top-2 distinct sequences; both tie-broken lexicographically."""
    L = len(start)
    cur: list[list[tuple[float, tuple[int, ...]]]] = [
        [(start[j] + E[0][j], (j,))] for j in range(L)
    ]
    for t in range(1, len(E)):
        row = E[t]
        nxt = []
        for j in range(L):
            ej = row[j]
            b1 = b2 = None  # (score, predecessor path)
            for i in range(L):
                tij = trans[i][j]
                for ps, pp in cur[i]:
                    s = (ps + tij) + ej
                    if b1 is None or s > b1[0] or (s == b1[0] and pp < b1[1]):
                        b2 = b1
                        b1 = (s, pp)
                    elif b2 is None or s > b2[0] or (s == b2[0] and pp < b2[1]):
                        b2 = (s, pp)
            entries = [(b1[0], b1[1] + (j,))]
            if b2 is not None:
                entries.append((b2[0], b2[1] + (j,)))
            nxt.append(entries)
        cur = nxt
    g1 = g2 = None
    for j in range(L):
        for s, p in cur[j]:
            fs = s + stop[j]
            if g1 is None or fs > g1[0] or (fs == g1[0] and p < g1[1]):
                g2 = g1
                g1 = (fs, p)
            elif g2 is None or fs > g2[0] or (fs == g2[0] and p < g2[1]):
                g2 = (fs, p)
    return g1, g2


def viterbi_2best(model: Model, feature_vectors: list[list[str]]) -> Prediction:
    """Best tag sequence plus the score of the best sequence differing from
    it in at least one position."""
    if not feature_vectors:
        raise ValueError("cannot decode an empty token sequence")
    E = _emission_rows(model.emissions, feature_vectors, model._index)
    (s1, p1), (s2, _) = _viterbi_2best_core(E, model._start, model._stop, model._trans)
    return Prediction(
        tags=[model.labels[i] for i in p1],
        score_best=s1,
        score_second=s2,
        confidence=confidence_from_margin(s1, s2, len(feature_vectors)),
    )


def predict(model: Model, sentence: Sentence, lexicon: features.Lexicon | None = None) -> Prediction:
    return viterbi_2best(model, features.extract(sentence, lexicon))


# ---------------------------------------------------------------------------
# Averaged structured perceptron.  Weights stay integers during training; the
# final model holds their running average over every sentence visit, which
# makes identical (data, epochs, seed) runs bit-for-bit reproducible.


class _Averaged:
    """One weight with deferred averaging (settle-on-touch)."""

    __slots__ = ("w", "u", "last")

    def __init__(self) -> None:
        self.w = 0
        self.u = 0
        self.last = 0

    def add(self, delta: int, q: int) -> None:
        self.u += (q - 1 - self.last) * self.w
        self.w += delta
        self.last = q - 1

    def average(self, q_total: int) -> float:
        return (self.u + (q_total - self.last) * self.w) / q_total


def train(
    labeled: list[LabeledSentence],
    layer: str,
    epochs: int,
    seed: int,
    lexicon: features.Lexicon | None = None,
) -> Model:
    """Train one layer model.

    Per sentence: decode with current weights; on mismatch add +1 along the
    gold path and -1 along the predicted path (emissions, transitions,
    start/stop).  Example order is reshuffled every epoch by a generator
    seeded once with `seed`.
    """
    if not labeled:
        raise ValueError("empty training set")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if layer not in ("fact", "cond"):
        raise ValueError(f"unknown layer {layer!r}")

    L = len(LABELS)
    feats_all: list[list[list[str]]] = []
    gold_all: list[tuple[int, ...]] = []
    for ls in labeled:
        tags = ls.fact_tags if layer == "fact" else ls.cond_tags
        where = f"{ls.sentence.doc_id}/{ls.sentence.sent_index}"
        if len(tags) != len(ls.sentence.tokens):
            raise ValueError(
                f"sentence {where}: {len(tags)} tags for {len(ls.sentence.tokens)} tokens"
            )
        if not tags:
            raise ValueError(f"sentence {where}: empty token sequence")
        validate_tags(tags)
        if not bio_valid(tags):
            raise ValueError(f"sentence {where}: tags are not BIO-valid")
        feats_all.append(features.extract(ls.sentence, lexicon, ls.pos))
        gold_all.append(tuple(LABELS.index(t) for t in tags))

    emit: dict[str, dict[int, _Averaged]] = {}
    trans = [[_Averaged() for _ in range(L)] for _ in range(L)]
    start = [_Averaged() for _ in range(L)]
    stop = [_Averaged() for _ in range(L)]

    def apply(feats: list[list[str]], path: tuple[int, ...], delta: int, q: int) -> None:
        start[path[0]].add(delta, q)
        stop[path[-1]].add(delta, q)
        prev = None
        for t, j in enumerate(path):
            if prev is not None:
                trans[prev][j].add(delta, q)
            for f in feats[t]:
                row = emit.setdefault(f, {})
                cell = row.get(j)
                if cell is None:
                    cell = row[j] = _Averaged()
                cell.add(delta, q)
            prev = j

    rng = random.Random(seed)
    order = list(range(len(labeled)))
    q = 0
    start_w = [a.w for a in start]
    stop_w = [a.w for a in stop]
    for _ in range(epochs):
        rng.shuffle(order)
        for si in order:
            q += 1
            feats = feats_all[si]
            E = []
            for fv in feats:
                row = [0] * L
                for f in fv:
                    d = emit.get(f)
                    if d:
                        for j, cell in d.items():
                            row[j] += cell.w
                E.append(row)
            trans_w = [[trans[i][j].w for j in range(L)] for i in range(L)]
            _, pred = _viterbi_1best(E, start_w, stop_w, trans_w)
            gold = gold_all[si]
            if pred != gold:
                apply(feats, gold, +1, q)
                apply(feats, pred, -1, q)
                start_w = [a.w for a in start]
                stop_w = [a.w for a in stop]

    emissions: dict[str, dict[str, float]] = {}
    for f, row in emit.items():
        out = {LABELS[j]: w for j, cell in row.items() if (w := cell.average(q)) != 0.0}
        if out:
            emissions[f] = out
    transitions: dict[str, dict[str, float]] = {}
    for i in range(L):
        out = {LABELS[j]: w for j in range(L) if (w := trans[i][j].average(q)) != 0.0}
        if out:
            transitions[LABELS[i]] = out
    return Model(
        layer=layer,
        emissions=emissions,
        transitions=transitions,
        start={LABELS[j]: w for j in range(L) if (w := start[j].average(q)) != 0.0},
        stop={LABELS[j]: w for j in range(L) if (w := stop[j].average(q)) != 0.0},
        config={"templates": features.TEMPLATE_SET_ID, "seed": seed, "epochs": epochs},
    )


# ---------------------------------------------------------------------------
# Serialization: JSON with sorted keys; nested weight maps are flattened with
# a  separator so the files are byte-deterministic.


def model_to_dict(model: Model) -> dict:
    return {
        "version": model.version,
        "layer": model.layer,
        "labels": list(model.labels),
        "emissions": {
            f"{f}{_SEP}{lab}": w for f, row in model.emissions.items() for lab, w in row.items()
        },
        "transitions": {
            f"{a}{_SEP}{b}": w for a, row in model.transitions.items() for b, w in row.items()
        },
        "start": dict(model.start),
        "stop": dict(model.stop),
        "config": dict(model.config),
    }


def model_from_dict(data: dict) -> Model:
    emissions: dict[str, dict[str, float]] = {}
    for key, w in data["emissions"].items():
        f, lab = key.rsplit(_SEP, 1)
        emissions.setdefault(f, {})[lab] = w
    transitions: dict[str, dict[str, float]] = {}
    for key, w in data["transitions"].items():
        a, b = key.split(_SEP)
        transitions.setdefault(a, {})[b] = w
    return Model(
        layer=data["layer"],
        emissions=emissions,
        transitions=transitions,
        start=dict(data["start"]),
        stop=dict(data["stop"]),
        labels=tuple(data["labels"]),
        version=data["version"],
        config=dict(data.get("config", {})),
    )


def save_model(model: Model, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return model_from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: bad model file: {exc}") from None
