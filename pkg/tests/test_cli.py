import json

import pytest

from condkg.cli import cli_main
from condkg.schema import read_labeled_tsv
from condkg.synth import generate


@pytest.fixture
def pipeline_paths(tmp_path, fixtures_dir):
    corpus = fixtures_dir / "corpus.jsonl"
    gold = fixtures_dir / "gold.tsv"
    paths = {
        "corpus": str(corpus),
        "gold": str(gold),
        "sentences": str(tmp_path / "sentences.jsonl"),
        "statements": str(tmp_path / "statements.jsonl"),
        "kg": str(tmp_path / "kg"),
    }
    assert cli_main(["ingest", "--corpus", paths["corpus"], "--out", paths["sentences"]]) == 0
    return paths


def test_ingest_prints_count(capsys, tmp_path, fixtures_dir):
    out = tmp_path / "s.jsonl"
    rc = cli_main(["ingest", "--corpus", str(fixtures_dir / "corpus.jsonl"), "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "9"


def test_unknown_flag_exits_1(capsys):
    rc = cli_main(["ingest", "--corpus", "x", "--out", "y", "--bogus"])
    assert rc == 1
    assert "usage" in capsys.readouterr().err


def test_no_subcommand_exits_1(capsys):
    assert cli_main([]) == 1


def test_missing_input_exits_2(tmp_path, capsys):
    rc = cli_main(["ingest", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_train_deterministic_bytes(tmp_path, fixtures_dir):
    m1 = tmp_path / "m1.json"
    m2 = tmp_path / "m2.json"
    base = ["train", "--labeled", str(fixtures_dir / "gold.tsv"), "--epochs", "20", "--seed", "42"]
    assert cli_main(base + ["--model", str(m1)]) == 0
    assert cli_main(base + ["--model", str(m2)]) == 0
    assert m1.read_bytes() == m2.read_bytes()


def test_extract_gold_one_record_per_sentence_in_order(pipeline_paths):
    rc = cli_main(
        [
            "extract",
            "--sentences",
            pipeline_paths["sentences"],
            "--gold",
            pipeline_paths["gold"],
            "--out",
            pipeline_paths["statements"],
        ]
    )
    assert rc == 0
    records = [
        json.loads(line)
        for line in open(pipeline_paths["statements"], encoding="utf-8")
        if line.strip()
    ]
    sentences = [
        json.loads(line)
        for line in open(pipeline_paths["sentences"], encoding="utf-8")
        if line.strip()
    ]
    assert [(r["doc_id"], r["sent_index"]) for r in records] == [
        (s["doc_id"], s["sent_index"]) for s in sentences
    ]


def test_extract_requires_models_or_gold(pipeline_paths, capsys):
    rc = cli_main(
        ["extract", "--sentences", pipeline_paths["sentences"], "--out", pipeline_paths["statements"]]
    )
    assert rc == 1


def test_full_pipeline_query_json(pipeline_paths, capsys):
    assert (
        cli_main(
            [
                "extract",
                "--sentences",
                pipeline_paths["sentences"],
                "--gold",
                pipeline_paths["gold"],
                "--out",
                pipeline_paths["statements"],
            ]
        )
        == 0
    )
    assert (
        cli_main(
            [
                "build-kg",
                "--statements",
                pipeline_paths["statements"],
                "--sentences",
                pipeline_paths["sentences"],
                "--out",
                pipeline_paths["kg"],
            ]
        )
        == 0
    )
    capsys.readouterr()
    rc = cli_main(
        [
            "query",
            "--kg",
            pipeline_paths["kg"],
            "--concept",
            "apoptosis",
            "--predicates",
            "increase,reduce",
            "--json",
        ]
    )
    assert rc == 0
    result = json.loads(capsys.readouterr().out)
    assert len(result["edges"]) == 4
    assert {e["subj_key"] for e in result["edges"]} == {
        "ogd_exposure",
        "rnai-mediated_knockdown",
        "inhibition",
        "pre-ischemic_exercise",
    }


def test_query_table_output(pipeline_paths, capsys):
    cli_main(
        [
            "extract",
            "--sentences",
            pipeline_paths["sentences"],
            "--gold",
            pipeline_paths["gold"],
            "--out",
            pipeline_paths["statements"],
        ]
    )
    cli_main(
        [
            "build-kg",
            "--statements",
            pipeline_paths["statements"],
            "--sentences",
            pipeline_paths["sentences"],
            "--out",
            pipeline_paths["kg"],
        ]
    )
    capsys.readouterr()
    rc = cli_main(["query", "--kg", pipeline_paths["kg"], "--concept", "apoptosis"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "center: apoptosis" in out
    assert "ogd_exposure --increase--> apoptosis" in out
    assert "under:" in out


def test_extract_with_trained_models(tmp_path, capsys):
    # Train on synthetic data through the CLI, then extract from the same
    # sentences with the learned models.
    from condkg.ingest import write_sentences
    from condkg.schema import LabeledSentence, write_labeled_tsv

    exs = generate(40, seed=19)
    labeled = [LabeledSentence(e.sentence, e.fact_tags, e.cond_tags) for e in exs]
    tsv = tmp_path / "train.tsv"
    write_labeled_tsv(tsv, labeled)
    sents = tmp_path / "sents.jsonl"
    write_sentences(sents, [e.sentence for e in exs[:10]])

    fact_model = tmp_path / "fact.json"
    cond_model = tmp_path / "cond.json"
    for layer, model in (("fact", fact_model), ("cond", cond_model)):
        rc = cli_main(
            [
                "train",
                "--labeled",
                str(tsv),
                "--layer",
                layer,
                "--epochs",
                "12",
                "--seed",
                "4",
                "--model",
                str(model),
            ]
        )
        assert rc == 0
    out = tmp_path / "statements.jsonl"
    rc = cli_main(
        [
            "extract",
            "--sentences",
            str(sents),
            "--fact-model",
            str(fact_model),
            "--cond-model",
            str(cond_model),
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    records = [json.loads(line) for line in open(out, encoding="utf-8") if line.strip()]
    assert len(records) == 10
    assert any(r["facts"] for r in records)
    for rec in records:
        for fact in rec["facts"]:
            assert 0.0 <= fact["confidence"] < 1.0


def test_selftrain_cli_writes_models_report_and_augmented(tmp_path):
    from condkg.ingest import write_sentences
    from condkg.schema import LabeledSentence, write_labeled_tsv

    exs = generate(24, seed=29)
    write_labeled_tsv(
        tmp_path / "seed.tsv",
        [LabeledSentence(e.sentence, e.fact_tags, e.cond_tags) for e in exs[:12]],
    )
    write_sentences(tmp_path / "pool.jsonl", [e.sentence for e in exs[12:]])
    rc = cli_main(
        [
            "selftrain",
            "--labeled",
            str(tmp_path / "seed.tsv"),
            "--pool",
            str(tmp_path / "pool.jsonl"),
            "--tau",
            "0.15",
            "--cap",
            "8",
            "--max-iters",
            "2",
            "--min-new",
            "1",
            "--epochs",
            "8",
            "--seed",
            "6",
            "--fact-model",
            str(tmp_path / "f.json"),
            "--cond-model",
            str(tmp_path / "c.json"),
            "--report",
            str(tmp_path / "report.json"),
            "--augmented",
            str(tmp_path / "aug.tsv"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["iterations"]
    assert report["final_train_size"] >= 12
    assert len(read_labeled_tsv(tmp_path / "aug.tsv")) == report["final_train_size"]


def test_config_file_supplies_defaults(tmp_path, fixtures_dir, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"epochs": 3, "seed": 9}))
    m1 = tmp_path / "m1.json"
    rc = cli_main(
        [
            "--config",
            str(config),
            "train",
            "--labeled",
            str(fixtures_dir / "gold.tsv"),
            "--model",
            str(m1),
        ]
    )
    assert rc == 0
    model = json.loads(m1.read_text())
    assert model["config"]["epochs"] == 3
    assert model["config"]["seed"] == 9
    # explicit flag wins over the config file
    m2 = tmp_path / "m2.json"
    rc = cli_main(
        [
            "--config",
            str(config),
            "train",
            "--labeled",
            str(fixtures_dir / "gold.tsv"),
            "--epochs",
            "5",
            "--model",
            str(m2),
        ]
    )
    assert rc == 0
    assert json.loads(m2.read_text())["config"]["epochs"] == 5
