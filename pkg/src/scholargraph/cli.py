"""Operator command line: serve, dump import/export, batch curation.

Commands run either embedded (direct access to a data directory; refuses
to start while a service holds its lock) or remote against a running
service via ``--url``. Output for ``compare``/``similar`` is byte-equal
to the corresponding API response.

Exit codes: 0 success, 1 usage error, 2 operation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .errors import ScholarGraphError
from .persistence import ApplicationState, initialize_from_dump

USAGE_EXIT = 1
OPERATION_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1, not argparse's default 2
        print(f"error: {message}", file=sys.stderr)
        self.print_usage(sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _json_line(payload) -> str:
    # same serializer the API uses, so outputs compare byte-for-byte
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scholargraph")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", required=True, type=Path)
    serve.add_argument("--fixture-dir", type=Path, default=None,
                       help="offline DOI fixtures (default: packaged)")
    serve.add_argument("--metadata-url", default=None,
                       help="live Crossref-compatible base URL")
    serve.add_argument("--similarity-depth", type=int, default=2)
    serve.add_argument("--cors-origin", default="*")

    export = sub.add_parser("export", help="write the store as a dump file")
    export.add_argument("--data-dir", required=True, type=Path)
    export.add_argument("--out", required=True, type=Path)

    imp = sub.add_parser("import", help="seed a fresh data dir from a dump file")
    imp.add_argument("--data-dir", required=True, type=Path)
    imp.add_argument("--in", dest="infile", required=True, type=Path)

    add = sub.add_parser("add-paper", help="ingest a submission JSON file")
    add.add_argument("--file", required=True, type=Path)
    add.add_argument("--data-dir", type=Path, default=None)
    add.add_argument("--url", default=None)
    add.add_argument("--curator", default="cli")

    cmp_ = sub.add_parser("compare", help="print a comparison table")
    cmp_.add_argument("ids", nargs="+")
    cmp_.add_argument("--csv", action="store_true")
    cmp_.add_argument("--data-dir", type=Path, default=None)
    cmp_.add_argument("--url", default=None)

    sim = sub.add_parser("similar", help="print similar contributions")
    sim.add_argument("id")
    sim.add_argument("--k", type=int, default=5)
    sim.add_argument("--data-dir", type=Path, default=None)
    sim.add_argument("--url", default=None)

    return parser


def _require_target(parser: argparse.ArgumentParser, args) -> None:
    if (args.data_dir is None) == (args.url is None):
        parser.error("exactly one of --data-dir/--url is required")


class _RemoteError(Exception):
    """Remote call failed; the server's error payload was already printed."""


def _remote_get(url: str, params: dict) -> httpx.Response:
    response = httpx.get(url, params=params, timeout=30.0)
    if response.status_code >= 400:
        print(response.text, file=sys.stderr)
        raise _RemoteError
    return response


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve as run_service

    config = ServiceConfig(
        data_dir=args.data_dir,
        port=args.port,
        host=args.host,
        metadata_base_url=args.metadata_url,
        fixture_dir=args.fixture_dir,
        similarity_depth=args.similarity_depth,
        cors_origin=args.cors_origin,
    )
    run_service(config)
    return 0


def _cmd_export(args) -> int:
    with ApplicationState(args.data_dir) as state:
        with open(args.out, "wb") as sink:
            count = state.store.export_dump(sink)
    print(f"exported {count} records to {args.out}")
    return 0


def _cmd_import(args) -> int:
    with open(args.infile, "rb") as source:
        count = initialize_from_dump(args.data_dir, source)
    print(f"imported {count} records into {args.data_dir}")
    return 0


def _cmd_add_paper(parser, args) -> int:
    _require_target(parser, args)
    payload = json.loads(args.file.read_text("utf-8"))
    if args.url:
        response = httpx.post(
            f"{args.url.rstrip('/')}/api/papers",
            json=payload,
            headers={"X-Curator": args.curator},
            timeout=30.0,
        )
        if response.status_code >= 400:
            print(response.text, file=sys.stderr)
            return OPERATION_EXIT
        print(response.json()["id"])
        return 0
    if isinstance(payload, dict):
        payload.setdefault("submitted_by", args.curator)
    with ApplicationState(args.data_dir) as state:
        paper_id = state.write_ingest_paper(payload)
    print(paper_id)
    return 0


def _cmd_compare(parser, args) -> int:
    if len(args.ids) < 2:
        parser.error("compare needs at least two contribution ids")
    _require_target(parser, args)
    if args.url:
        response = _remote_get(
            f"{args.url.rstrip('/')}/api/comparison",
            {
                "contributions": ",".join(args.ids),
                "format": "csv" if args.csv else "json",
            },
        )
        sys.stdout.buffer.write(response.content)
        if not args.csv:
            print()
        return 0
    from .comparison import render_csv

    with ApplicationState(args.data_dir) as state:
        table = state.comparison_table(args.ids)
    if args.csv:
        sys.stdout.buffer.write(render_csv(table))
    else:
        print(_json_line(table.to_dict()))
    return 0


def _cmd_similar(parser, args) -> int:
    _require_target(parser, args)
    if args.url:
        response = _remote_get(
            f"{args.url.rstrip('/')}/api/contributions/{args.id}/similar",
            {"k": args.k},
        )
        print(response.text)
        return 0
    with ApplicationState(args.data_dir) as state:
        items = state.similar_items(args.id, args.k)
    print(_json_line(items))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "export":
            return _cmd_export(args)
        if args.command == "import":
            return _cmd_import(args)
        if args.command == "add-paper":
            return _cmd_add_paper(parser, args)
        if args.command == "compare":
            return _cmd_compare(parser, args)
        if args.command == "similar":
            return _cmd_similar(parser, args)
        parser.error(f"unknown command {args.command!r}")
    except _RemoteError:
        return OPERATION_EXIT
    except ScholarGraphError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return OPERATION_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OPERATION_EXIT
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return OPERATION_EXIT
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return OPERATION_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
