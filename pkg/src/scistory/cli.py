"""Command-line interface.

Exit codes: 0 ok, 2 usage, 3 data error, 4 I/O.
"""

import argparse
import json
import sys
from pathlib import Path

from scistory import comparative
from scistory.config import PipelineConfig
from scistory.errors import (
    ConfigurationError,
    MigrationError,
    NotFoundError,
    ScistoryError,
    StoreError,
)
from scistory.repository import Repository, default_data_dir

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scistory",
        description="Analyze papers into storylines and serve the exploration API.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the comparative-sentence classifier")
    p_train.add_argument("--corpus", required=True, help="labeled TSV: label<TAB>sentence")
    p_train.add_argument("--out", required=True, help="where to write model.json")
    p_train.add_argument("--folds", type=int, default=5)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--lexicon", default=None, help="keyword lexicon TSV")

    p_analyze = sub.add_parser("analyze", help="analyze one document into the store")
    p_analyze.add_argument("file", help="input document (or - for stdin)")
    p_analyze.add_argument("--format", choices=["plain", "structured"], default="plain")
    p_analyze.add_argument("--title", default="")
    p_analyze.add_argument("--date", default="", help="publication date, ISO-8601")
    p_analyze.add_argument("--data", default=None, help="store directory")
    p_analyze.add_argument("--model", default=None)
    p_analyze.add_argument("--gazetteer", default=None)

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--port", type=int, default=8040)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data", default=None)
    p_serve.add_argument("--frontend", default=None, help="built frontend directory")

    p_export = sub.add_parser("export", help="print a stored document's view as JSON")
    p_export.add_argument("doc_id")
    p_export.add_argument("--what", choices=["storyline", "graph"], default="storyline")
    p_export.add_argument("--granularity", choices=["paragraph", "sentence"],
                          default="paragraph")
    p_export.add_argument("--level", choices=["sentence", "paragraph"], default="sentence")
    p_export.add_argument("--data", default=None)
    p_export.add_argument("-o", "--out", default=None)

    return parser


def cmd_train(args) -> int:
    corpus = comparative.load_corpus(args.corpus)
    lexicon = comparative.load_lexicon(args.lexicon) if args.lexicon else None
    result = comparative.cross_validate(corpus, folds=args.folds, seed=args.seed,
                                        lexicon=lexicon)
    print(f"{args.folds}-fold accuracy: {result['mean_accuracy']:.3f} "
          f"± {result['std']:.3f}")
    model = comparative.train(corpus, lexicon)
    comparative.save_model(model, args.out)
    print(f"model written to {args.out} ({len(model.features)} features)")
    return EXIT_OK


def _config_from(args) -> PipelineConfig:
    config = PipelineConfig()
    if getattr(args, "model", None):
        config.model_path = Path(args.model)
    if getattr(args, "gazetteer", None):
        config.gazetteer_path = Path(args.gazetteer)
    return config


def cmd_analyze(args) -> int:
    from scistory.service import Pipeline

    if args.file == "-":
        raw_text = sys.stdin.read()
    else:
        raw_text = Path(args.file).read_text(encoding="utf-8")
    if args.format == "structured":
        raw = json.loads(raw_text)
    else:
        raw = raw_text
    pipeline = Pipeline(_config_from(args))
    repo = Repository(args.data or default_data_dir())
    record = pipeline.analyze_document(raw, args.format,
                                       {"title": args.title, "pub_date": args.date}, repo)
    print(record.doc_id)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from scistory.webapp import create_app

    static = Path(args.frontend) if args.frontend else None
    app = create_app(args.data or default_data_dir(), static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def cmd_export(args) -> int:
    from scistory import service
    from scistory.storyline import layout_to_json

    repo = Repository(args.data or default_data_dir())
    record = repo.load(args.doc_id)
    if args.what == "storyline":
        payload = layout_to_json(service.storyline_layout(record, args.granularity))
    else:
        payload = service.graph_payload(record.graphs[args.level])
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "train": cmd_train,
        "analyze": cmd_analyze,
        "serve": cmd_serve,
        "export": cmd_export,
    }
    try:
        return handlers[args.command](args)
    except (StoreError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"data error: invalid JSON input ({exc})", file=sys.stderr)
        return EXIT_DATA
    except (NotFoundError, MigrationError, ConfigurationError, ScistoryError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
