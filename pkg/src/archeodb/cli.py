"""Command line front end: ingest, query, serve."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError
from .extraction import TimeRange
from .pipeline import ingest
from .service import serve
from .store import Query, StoreError, load, query


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archeodb",
        description="Turn digitized inventory volumes into a queryable store.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="run the pipeline over a corpus")
    p_ingest.add_argument("--config", required=True, help="pipeline YAML file")

    p_query = sub.add_parser("query", help="query an existing store")
    p_query.add_argument("--store", required=True, help="snapshot directory")
    p_query.add_argument("--q", help="comma-separated full-text terms (AND)")
    p_query.add_argument("--concept", help="concept id filter")
    p_query.add_argument("--place", help="place id filter")
    p_query.add_argument("--from", dest="from_year", type=int, help="period start")
    p_query.add_argument("--to", dest="to_year", type=int, help="period end")
    p_query.add_argument("--municipality", help="municipality name filter")
    p_query.add_argument("--limit", type=int, default=20)
    p_query.add_argument("--offset", type=int, default=0)

    p_serve = sub.add_parser("serve", help="serve a store over HTTP")
    p_serve.add_argument("--store", required=True, help="snapshot directory")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    return parser


def _cmd_ingest(args) -> int:
    report = ingest(args.config)
    print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    return 0


def _cmd_query(args) -> int:
    if (args.from_year is None) != (args.to_year is None):
        print("error: --from and --to must be given together", file=sys.stderr)
        return 2
    period = None
    if args.from_year is not None:
        period = TimeRange(args.from_year, args.to_year)
    terms = tuple(t.strip() for t in (args.q or "").split(",") if t.strip())
    snapshot = load(args.store)
    page = query(
        snapshot,
        Query(
            text_terms=terms,
            concept_id=args.concept,
            place_id=args.place,
            period=period,
            municipality=args.municipality,
            limit=args.limit,
            offset=args.offset,
        ),
    )
    print(
        json.dumps(
            {
                "total": page.total,
                "hits": [
                    {
                        "notice_id": h.notice_id,
                        "score": h.score,
                        "matched_spans": [[s, e] for s, e in h.matched_spans],
                    }
                    for h in page.hits
                ],
            },
            ensure_ascii=False,
            indent=2,
        )
    )
    return 0


def _cmd_serve(args) -> int:
    serve(args.store, args.port, host=args.host)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "query":
            return _cmd_query(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except (ConfigError, StoreError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
