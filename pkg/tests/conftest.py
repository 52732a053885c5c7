import pytest

from condkg.ingest import Sentence, tokenize
from condkg.schema import ConditionTuple, EntityMention, FactTuple, Span

FIXTURE_SENTENCE = "alkaline pH increases the activity of TRPV5/V6 channels in Jurkat T cells"

GOLD_FACT_TAGS = ["B-SC", "I-SC", "B-P", "O", "B-OA", "O", "B-OC", "I-OC", "O", "O", "O", "O"]
GOLD_COND_TAGS = ["O", "O", "O", "O", "O", "O", "B-SC", "I-SC", "B-P", "B-OC", "I-OC", "I-OC"]


@pytest.fixture
def canonical_sentence() -> Sentence:
    return Sentence("fix", 0, FIXTURE_SENTENCE, tokenize(FIXTURE_SENTENCE))


@pytest.fixture
def canonical_tuples():
    fact = FactTuple(
        subject=EntityMention(Span(0, 2, "alkaline pH")),
        predicate=Span(2, 3, "increases"),
        object=EntityMention(Span(6, 8, "TRPV5/V6 channels"), Span(4, 5, "activity")),
    )
    cond = ConditionTuple(
        subject=EntityMention(Span(6, 8, "TRPV5/V6 channels")),
        predicate=Span(8, 9, "in"),
        object=EntityMention(Span(9, 12, "Jurkat T cells")),
    )
    return [fact], [cond]


@pytest.fixture
def fixtures_dir(request):
    return request.path.parent / "fixtures"
