"""Command-line entry points for the whole pipeline.

Subcommands: ingest, train, selftrain, extract, build-kg, query, serve.
Exit codes: 0 success, 1 usage error, 2 data/IO error; diagnostics go to
stderr.  An optional JSON config file supplies flag defaults; explicit flags
win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ingest as ingest_mod
from . import kg as kg_mod
from . import selftrain, server, tagger
from .features import Lexicon
from .schema import (
    LabeledSentence,
    Statement,
    decode,
    read_labeled_tsv,
    read_statements,
    repair_bio,
    write_labeled_tsv,
    write_statements,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="condkg", description=__doc__)
    p.add_argument("--config", help="JSON file with default values for flags")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="split a JSONL corpus into sentence records")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("train", help="train one layer model from labeled TSV")
    sp.add_argument("--labeled", required=True)
    sp.add_argument("--layer", choices=["fact", "cond"], default="fact")
    sp.add_argument("--epochs", type=int, default=20)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--lexicon")
    sp.add_argument("--model", required=True)

    sp = sub.add_parser("selftrain", help="iterative self-training over a sentence pool")
    sp.add_argument("--labeled", required=True)
    sp.add_argument("--pool", required=True)
    sp.add_argument("--tau", type=float, default=0.6)
    sp.add_argument("--cap", type=int, default=500)
    sp.add_argument("--max-iters", type=int, default=5)
    sp.add_argument("--min-new", type=int, default=10)
    sp.add_argument("--epochs", type=int, default=10)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--lexicon")
    sp.add_argument("--fact-model", required=True)
    sp.add_argument("--cond-model", required=True)
    sp.add_argument("--report", required=True)
    sp.add_argument("--augmented", help="write the augmented training set as TSV")

    sp = sub.add_parser("extract", help="decode statements from sentences")
    sp.add_argument("--sentences", required=True)
    sp.add_argument("--fact-model")
    sp.add_argument("--cond-model")
    sp.add_argument("--gold", help="labeled TSV with gold tags, bypassing the models")
    sp.add_argument("--lexicon")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("build-kg", help="fold statements into a knowledge graph")
    sp.add_argument("--statements", required=True)
    sp.add_argument("--sentences", required=True)
    sp.add_argument("--out", required=True, help="output directory")

    sp = sub.add_parser("query", help="ego query against a saved graph")
    sp.add_argument("--kg", required=True)
    sp.add_argument("--concept", required=True)
    sp.add_argument("--predicates", default="", help="comma-separated predicate lemmas")
    sp.add_argument("--direction", choices=["in", "out", "both"], default="both")
    sp.add_argument("--limit", type=int, default=50)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("serve", help="serve the read API and static explorer")
    sp.add_argument("--kg", required=True)
    sp.add_argument("--addr", default="127.0.0.1:8571")
    sp.add_argument("--static", help="directory with the explorer bundle")
    return p


def _apply_config(parser: _Parser, argv: list[str]) -> None:
    if "--config" not in argv:
        return
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise _UsageError("--config requires a path")
    with open(argv[idx + 1], encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"{argv[idx + 1]}: config must be a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in config.items()}
    for action in parser._subparsers._group_actions:  # type: ignore[union-attr]
        for sp in action.choices.values():
            sp.set_defaults(**{k: v for k, v in defaults.items() if _has_dest(sp, k)})


def _has_dest(parser: argparse.ArgumentParser, dest: str) -> bool:
    return any(a.dest == dest for a in parser._actions)


def _load_lexicon(path: str | None) -> Lexicon | None:
    return Lexicon.from_file(path) if path else None


def cmd_ingest(args) -> int:
    count = ingest_mod.ingest(args.corpus, args.out)
    print(count)
    return 0


def cmd_train(args) -> int:
    labeled = read_labeled_tsv(args.labeled)
    model = tagger.train(labeled, args.layer, args.epochs, args.seed, _load_lexicon(args.lexicon))
    tagger.save_model(model, args.model)
    print(f"trained {args.layer} model on {len(labeled)} sentences -> {args.model}", file=sys.stderr)
    return 0


def cmd_selftrain(args) -> int:
    seed_labeled = read_labeled_tsv(args.labeled)
    pool = ingest_mod.read_sentences(args.pool)
    params = selftrain.SelfTrainParams(
        tau=args.tau,
        cap=args.cap,
        max_iters=args.max_iters,
        min_new=args.min_new,
        epochs=args.epochs,
        seed=args.seed,
    )
    fact_model, cond_model, augmented, report = selftrain.run(
        seed_labeled, pool, params, _load_lexicon(args.lexicon)
    )
    tagger.save_model(fact_model, args.fact_model)
    tagger.save_model(cond_model, args.cond_model)
    report.save(args.report)
    if args.augmented:
        write_labeled_tsv(args.augmented, augmented)
    for rec in report.iterations:
        print(
            f"iteration {rec.iteration}: promoted {rec.promoted_count}, "
            f"pool left {rec.pool_remaining}, mean confidence {rec.mean_confidence:.3f}",
            file=sys.stderr,
        )
    return 0


def _extract_gold(sentences, gold_path) -> list[Statement]:
    gold = {(ls.sentence.doc_id, ls.sentence.sent_index): ls for ls in read_labeled_tsv(gold_path)}
    statements = []
    for sent in sentences:
        ls = gold.get((sent.doc_id, sent.sent_index))
        if ls is None:
            statements.append(Statement(sent.doc_id, sent.sent_index))
            continue
        if len(ls.fact_tags) != len(sent.tokens):
            raise ValueError(
                f"gold tags for {sent.doc_id}/{sent.sent_index} have {len(ls.fact_tags)} "
                f"tokens, sentence has {len(sent.tokens)}"
            )
        statements.append(decode(LabeledSentence(sent, ls.fact_tags, ls.cond_tags)))
    return statements


def cmd_extract(args) -> int:
    sentences = ingest_mod.read_sentences(args.sentences)
    if args.gold:
        statements = _extract_gold(sentences, args.gold)
    else:
        if not args.fact_model or not args.cond_model:
            raise _UsageError("extract needs --fact-model and --cond-model (or --gold)")
        fact_model = tagger.load_model(args.fact_model)
        cond_model = tagger.load_model(args.cond_model)
        lexicon = _load_lexicon(args.lexicon)
        statements = []
        for sent in sentences:
            pf = tagger.predict(fact_model, sent, lexicon)
            pc = tagger.predict(cond_model, sent, lexicon)
            st = decode(LabeledSentence(sent, repair_bio(pf.tags), repair_bio(pc.tags)))
            for fact in st.facts:
                fact.confidence = pf.confidence
            statements.append(st)
    write_statements(args.out, statements)
    print(f"extracted {len(statements)} statements -> {args.out}", file=sys.stderr)
    return 0


def cmd_build_kg(args) -> int:
    statements = read_statements(args.statements)
    sentences = {(s.doc_id, s.sent_index): s for s in ingest_mod.read_sentences(args.sentences)}
    graph = kg_mod.KnowledgeGraph()
    for st in statements:
        sent = sentences.get((st.doc_id, st.sent_index))
        if sent is None:
            raise ValueError(f"statement {st.doc_id}/{st.sent_index} has no sentence record")
        kg_mod.add_statement(graph, st, sent)
    kg_mod.save(graph, args.out)
    print(
        f"built graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges -> {args.out}",
        file=sys.stderr,
    )
    return 0


def _format_ego_table(result: dict) -> str:
    center = result["center"]
    lines = []
    if center is None:
        lines.append("concept not found")
    else:
        lines.append(f"center: {center['display']} ({center['key']}, freq {center['freq']})")
    for edge in result["edges"]:
        subj = edge["subj_key"] + (f":{edge['subj_attr']}" if "subj_attr" in edge else "")
        obj = edge["obj_key"] + (f":{edge['obj_attr']}" if "obj_attr" in edge else "")
        lines.append(
            f"  {subj} --{edge['pred_lemma']}--> {obj}  [support {edge['support']}]"
        )
        for cond in edge["conditions"]:
            cs = cond["subj_key"] + (f":{cond['subj_attr']}" if "subj_attr" in cond else "")
            co = cond["obj_key"] + (f":{cond['obj_attr']}" if "obj_attr" in cond else "")
            lines.append(f"      under: {cs} --{cond['pred']}--> {co} (x{cond['count']})")
    if not result["edges"]:
        lines.append("  no matching edges")
    return "\n".join(lines)


def cmd_query(args) -> int:
    graph = kg_mod.load(args.kg)
    predicates = {p.strip() for p in args.predicates.split(",") if p.strip()}
    result = kg_mod.query_ego(graph, args.concept, predicates, args.direction, args.limit)
    if args.json:
        print(json.dumps(result, sort_keys=True, ensure_ascii=False))
    else:
        print(_format_ego_table(result))
    return 0


def cmd_serve(args) -> int:
    graph = kg_mod.load(args.kg)
    srv = server.serve(graph, args.addr, args.static)
    host, port = srv.server_address[:2]
    print(f"serving on http://{host}:{port}/ (Ctrl+C to stop)", file=sys.stderr)
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.server_close()
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "selftrain": cmd_selftrain,
    "extract": cmd_extract,
    "build-kg": cmd_build_kg,
    "query": cmd_query,
    "serve": cmd_serve,
}


def cli_main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
