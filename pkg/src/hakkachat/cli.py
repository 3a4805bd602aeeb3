"""Command-line entry points.

  hakkachat ingest --manifest corpus.ini --out corpus.snapshot
  hakkachat serve --config service.ini
  hakkachat query --snapshot corpus.snapshot "擂茶" --k 3
  hakkachat route --snapshot corpus.snapshot "請翻譯成客語：謝謝"
  hakkachat eval sus --responses responses.csv
  hakkachat eval routing --fixture routing.tsv --snapshot corpus.snapshot
  hakkachat eval retrieval --fixture retrieval.tsv --snapshot corpus.snapshot
"""

from __future__ import annotations

import argparse
import json
import sys

from .embedding import DEFAULT_DIMS, ReferenceEmbedder
from .evaluation import (
    dump_report,
    load_retrieval_fixture,
    load_routing_fixture,
    load_sus_responses,
    recall_at_k,
    routing_accuracy,
    sus_aggregate,
)
from .errors import HakkachatError
from .ingest import ingest_corpus
from .routing import DEFAULT_TAU, TranslationPatterns, load_patterns, route_query
from .snapshot import read_snapshot, write_snapshot
from .vector_index import build_index, search_topk


def _cmd_ingest(args: argparse.Namespace) -> int:
    corpus = ingest_corpus(args.manifest)
    index = build_index(corpus, ReferenceEmbedder(), dims=args.dims)
    write_snapshot(args.out, corpus, index)
    stats = corpus.stats()
    print(f"wrote {args.out}: {len(corpus.documents)} documents, {len(corpus.chunks)} chunks")
    for kind in sorted(stats):
        print(f"  {kind}: {stats[kind]}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app
    from .config import build_service, load_service_config

    config = load_service_config(args.config)
    service = build_service(config)
    app = create_app(service)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    corpus, index = read_snapshot(args.snapshot)
    hits = search_topk(index, args.text, k=args.k, embedder=ReferenceEmbedder())
    for hit in hits:
        doc = corpus.document(hit.doc_id)
        first_line = corpus.chunk(hit.doc_id, hit.seq).text.splitlines()[0]
        print(f"{hit.rank}. {hit.score:.6f}  {hit.doc_id}  [{doc.source.value}] {first_line}")
    return 0


def _cmd_route(args: argparse.Namespace) -> int:
    _, index = read_snapshot(args.snapshot)
    patterns = load_patterns(args.patterns) if args.patterns else TranslationPatterns()
    decision = route_query(args.text, index, ReferenceEmbedder(), tau=args.tau, patterns=patterns)
    print(
        json.dumps(
            {
                "route": decision.route.value,
                "confidence": decision.confidence,
                "rationale": decision.rationale.value,
                "top_similarity": decision.top_similarity,
            },
            ensure_ascii=False,
        )
    )
    return 0


def _cmd_eval_sus(args: argparse.Namespace) -> int:
    report = sus_aggregate(load_sus_responses(args.responses), label=args.label)
    print(dump_report(report.to_dict(), args.out))
    return 0


def _cmd_eval_routing(args: argparse.Namespace) -> int:
    _, index = read_snapshot(args.snapshot)
    patterns = load_patterns(args.patterns) if args.patterns else TranslationPatterns()
    cases = load_routing_fixture(args.fixture)
    report = routing_accuracy(cases, index, ReferenceEmbedder(), tau=args.tau, patterns=patterns)
    print(dump_report(report, args.out))
    return 0


def _cmd_eval_retrieval(args: argparse.Namespace) -> int:
    corpus, index = read_snapshot(args.snapshot)
    cases = load_retrieval_fixture(args.fixture)
    report = recall_at_k(cases, corpus, index, ReferenceEmbedder())
    print(dump_report(report, args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hakkachat")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="ingest the corpus manifest and write a snapshot")
    ingest.add_argument("--manifest", required=True)
    ingest.add_argument("--out", required=True)
    ingest.add_argument("--dims", type=int, default=DEFAULT_DIMS)
    ingest.set_defaults(func=_cmd_ingest)

    serve = sub.add_parser("serve", help="run the HTTP chat service")
    serve.add_argument("--config", required=True)
    serve.set_defaults(func=_cmd_serve)

    query = sub.add_parser("query", help="search a snapshot")
    query.add_argument("--snapshot", required=True)
    query.add_argument("text")
    query.add_argument("--k", type=int, default=5)
    query.set_defaults(func=_cmd_query)

    route = sub.add_parser("route", help="show the routing decision for a query")
    route.add_argument("--snapshot", required=True)
    route.add_argument("text")
    route.add_argument("--tau", type=float, default=DEFAULT_TAU)
    route.add_argument("--patterns")
    route.set_defaults(func=_cmd_route)

    evaluate = sub.add_parser("eval", help="run evaluation reports")
    eval_sub = evaluate.add_subparsers(dest="eval_command", required=True)

    sus = eval_sub.add_parser("sus", help="score a SUS responses file")
    sus.add_argument("--responses", required=True)
    sus.add_argument("--label", default="Phase I")
    sus.add_argument("--out")
    sus.set_defaults(func=_cmd_eval_sus)

    routing = eval_sub.add_parser("routing", help="routing accuracy over a labeled fixture")
    routing.add_argument("--fixture", required=True)
    routing.add_argument("--snapshot", required=True)
    routing.add_argument("--tau", type=float, default=DEFAULT_TAU)
    routing.add_argument("--patterns")
    routing.add_argument("--out")
    routing.set_defaults(func=_cmd_eval_routing)

    retrieval = eval_sub.add_parser("retrieval", help="recall@k over a labeled fixture")
    retrieval.add_argument("--fixture", required=True)
    retrieval.add_argument("--snapshot", required=True)
    retrieval.add_argument("--out")
    retrieval.set_defaults(func=_cmd_eval_retrieval)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HakkachatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
