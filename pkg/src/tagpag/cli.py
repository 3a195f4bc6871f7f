"""Command line entry points: serve, export, extract."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .extraction import extract_clean_text
from .htmldoc import parse_document
from .server import build_state, create_app
from .store import AnnotationStore, load_labels, load_tasks

DEFAULT_PORT = 8080
PORT_ENV_VAR = "TAGPAG_PORT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tagpag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the annotation server")
    serve.add_argument("--tasks", required=True, help="tasks CSV (task_id,url,html_path)")
    serve.add_argument("--html-dir", help="directory holding scraped HTML files")
    serve.add_argument("--labels", required=True, help="labels JSON file")
    serve.add_argument("--annotations-dir", required=True, help="directory for annotation logs")
    serve.add_argument("--port", type=int, help=f"listen port (default {DEFAULT_PORT}; "
                                                f"flag beats ${PORT_ENV_VAR})")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--randomize", action="store_true",
                       help="randomize each annotator's task order")
    serve.add_argument("--seed", type=int, default=0, help="global shuffle seed (u64)")
    serve.add_argument("--static-dir", help="override the bundled UI assets directory")

    export = sub.add_parser("export", help="export annotations to CSV")
    export.add_argument("--annotations-dir", required=True)
    export.add_argument("--tasks", required=True)
    export.add_argument("--labels", required=True)
    export.add_argument("--scope", default="all", help="'all' or one annotator id")
    export.add_argument("--out", required=True, help="output CSV path")

    extract = sub.add_parser("extract", help="debug: extract text from one HTML file")
    extract.add_argument("file", help="HTML file to extract")
    extract.add_argument("--format", choices=("text", "json"), default="text")
    extract.add_argument("--view", choices=("clean", "raw", "blocks"), default="clean")
    extract.add_argument("--charset", help="decoding hint; otherwise sniffed from the file")

    return parser


def _resolve_port(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env_value = os.environ.get(PORT_ENV_VAR)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            print(f"warning: ignoring non-numeric {PORT_ENV_VAR}={env_value!r}",
                  file=sys.stderr)
    return DEFAULT_PORT


def _cmd_serve(args) -> int:
    import uvicorn

    state = build_state(
        tasks_path=args.tasks,
        labels_path=args.labels,
        annotations_dir=args.annotations_dir,
        html_dir=args.html_dir,
        randomize=args.randomize,
        global_seed=args.seed & ((1 << 64) - 1),
        static_dir=args.static_dir,
    )
    if state.store.replay_warnings:
        print(f"warning: skipped {state.store.replay_warnings} stale or partial "
              f"log record(s) during replay", file=sys.stderr)
    app = create_app(state)
    port = _resolve_port(args.port)
    print(f"tagpag: {len(state.tasks)} tasks, {len(state.config.labels)} labels "
          f"({state.config.mode} mode) on http://{args.host}:{port}")
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def _cmd_export(args) -> int:
    tasks = load_tasks(args.tasks)
    config = load_labels(args.labels)
    store = AnnotationStore(args.annotations_dir, tasks, config)
    data = store.export_csv(args.scope)
    Path(args.out).write_bytes(data)
    rows = data.decode("utf-8").count("\n") - 1
    print(f"wrote {rows} row(s) to {args.out}")
    return 0


def _cmd_extract(args) -> int:
    data = Path(args.file).read_bytes()
    result = extract_clean_text(parse_document(data, charset_hint=args.charset))

    if args.format == "json":
        payload = {
            "raw_text": result.raw_text,
            "clean_text": result.clean_text,
            "blocks": [
                {
                    "tag": b.tag,
                    "text": b.text,
                    "char_count": b.char_count,
                    "link_char_count": b.link_char_count,
                    "link_density": b.link_density,
                    "penalty": b.penalty,
                    "doc_order": b.doc_order,
                    "kept": b.kept,
                    "reason": b.reason,
                }
                for b in result.blocks
            ],
        }
        print(json.dumps(payload, ensure_ascii=False, indent=2))
        return 0

    if args.view == "clean":
        print(result.clean_text)
    elif args.view == "raw":
        print(result.raw_text)
    else:
        for b in result.blocks:
            snippet = b.text if len(b.text) <= 60 else b.text[:57] + "..."
            print(f"#{b.doc_order:<3} {b.tag:<10} kept={str(b.kept):<5} "
                  f"reason={b.reason:<9} chars={b.char_count:<5} "
                  f"link_density={b.link_density:.2f} penalty={str(b.penalty):<5} "
                  f"{snippet!r}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"serve": _cmd_serve, "export": _cmd_export, "extract": _cmd_extract}
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
