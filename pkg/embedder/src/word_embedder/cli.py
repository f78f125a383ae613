"""Command line: word list in, .embjsonl out."""

from __future__ import annotations

import argparse
import logging
import sys

from .export import ModelLoadError, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-words",
        description="Embed a word list with a byte-level encoder and write an .embjsonl dump.",
    )
    parser.add_argument("words_file", help="input file, one word per line")
    parser.add_argument("output", help="output .embjsonl path")
    parser.add_argument("--model", required=True, help="model id or local model directory")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--lang", default="und", help="language code for the dump header")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        summary = export_embeddings(
            args.words_file,
            args.model,
            args.output,
            batch_size=args.batch_size,
            device=args.device,
            lang=args.lang,
        )
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input {exc.filename or exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:  # covers torch.cuda.OutOfMemoryError
        if "out of memory" in str(exc).lower():
            print(
                f"error: out of memory at --batch-size {args.batch_size}; "
                "try a smaller batch",
                file=sys.stderr,
            )
            return 1
        raise
    print(f"wrote {summary['count']} vectors (dim {summary['dim']}) to {summary['output']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
