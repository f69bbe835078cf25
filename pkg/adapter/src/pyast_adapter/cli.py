"""Command line wrapper: pyast-export INPUT... -o corpus.jsonl"""

import argparse
import logging
import sys

from .export import export_inputs, write_corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pyast-export",
        description="Export Python sources to a typed-tree corpus (JSONL).",
    )
    parser.add_argument(
        "inputs",
        nargs="+",
        help=".py files, directories of them, or JSONL files of {nl, code} records",
    )
    parser.add_argument("-o", "--out", required=True, help="corpus JSONL to write")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress skip warnings")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        report = export_inputs(args.inputs)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not report.samples:
        print("error: nothing exported", file=sys.stderr)
        return 1
    write_corpus(report, args.out)
    print(f"exported {len(report.samples)} records to {args.out} ({len(report.skipped)} skipped)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
