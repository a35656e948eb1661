"""Command-line entry point: ``monored <subcommand> [options]``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from .experiments import DRIVERS, SCHEMA_VERSION, ExperimentConfig
from .fixtures import FIXTURE_NAMES
from .grid import DomainError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monored", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--out", help="write records here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--fixture", choices=FIXTURE_NAMES + ("all_functions",))
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--m", type=int, help="Centrist resolution (n = m d)")
    common.add_argument("--k", type=int, nargs="+", default=[], help="sample size(s) per dimension")
    common.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("distance", parents=[common], help="exact distance to monotonicity")
    p = sub.add_parser("reduce", parents=[common], help="restricted distance over random sub-grids")
    p.add_argument("--exhaustive", action="store_true", help="use the identity restriction")
    p = sub.add_parser("stacks", parents=[common], help="stack profile and stack bound check")
    p.add_argument("--no-lex", dest="lex", action="store_false", help="skip the lexicographic improvement")
    p = sub.add_parser("linesample", parents=[common], help="per-line sampled matching sizes")
    p.add_argument("--exhaustive", action="store_true", help="average over every k-multiset")
    p.add_argument("--no-lex", dest="lex", action="store_false")
    p = sub.add_parser("test", parents=[common], help="run the domain-reduction tester")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--inner", choices=("pair",), default="pair")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--measure", default="uniform", help="coordinate measure for continuous fixtures")
    sub.add_parser("lowerbound", parents=[common], help="Centrist restriction monotonicity rate")
    p = sub.add_parser("variance", parents=[common], help="variance under two-point restrictions")
    p.add_argument("--mode", choices=("exact", "monte_carlo"), default="exact")
    p = sub.add_parser("accept", help="run the acceptance suite")
    p.add_argument("--filter", help="only criteria whose number, name or tag matches")
    p.add_argument("--out", help="write a JSON report here")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    fields = ExperimentConfig.__dataclass_fields__
    kwargs = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    return ExperimentConfig(**kwargs)


class _Sink:
    """Writes records as they arrive: CSV rows flushed one by one, or a JSON document at the end."""

    def __init__(self, path: str | None, fmt: str, config: dict):
        self.fmt = fmt
        self.config = config
        self.path = path
        self.records: list[dict] = []
        self._fh = None
        self._writer = None

    def _open(self):
        if self.path:
            return open(self.path, "w", newline="")
        return sys.stdout

    def add(self, record: dict) -> None:
        if self.fmt == "json":
            self.records.append(record)
            return
        if self._writer is None:
            self._fh = self._open()
            self._fh.write(f"#schema={SCHEMA_VERSION}\n")
            self._writer = csv.DictWriter(self._fh, fieldnames=list(record), lineterminator="\n")
            self._writer.writeheader()
        self._writer.writerow(record)
        self._fh.flush()

    def finish(self, summary: dict) -> None:
        summary = {"schema_version": SCHEMA_VERSION, **summary}
        if self.fmt == "json":
            doc = {
                "schema_version": SCHEMA_VERSION,
                "config": self.config,
                "records": self.records,
                "summary": summary,
            }
            fh = self._open()
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
            if fh is not sys.stdout:
                fh.close()
            return
        if self._fh is not None and self._fh is not sys.stdout:
            self._fh.close()
        # with CSV records on stdout the summary goes to stderr so the CSV stays parseable
        target = sys.stdout if self.path else sys.stderr
        json.dump(summary, target, sort_keys=True)
        target.write("\n")


def _accept(args) -> int:
    from .acceptance import failing, run_suite

    results = run_suite(args.filter)
    if not results:
        print(f"no criterion matches {args.filter!r}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(
                {"schema_version": SCHEMA_VERSION, "results": [r.as_dict() for r in results]},
                fh, indent=1,
            )
    bad = failing(results)
    if bad:
        print("failing: " + ", ".join(bad), file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "accept":
        return _accept(args)
    try:
        cfg = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    sink = _Sink(args.out, args.format, cfg.as_dict())
    gen = DRIVERS[cfg.command](cfg)
    try:
        while True:
            sink.add(next(gen))
    except StopIteration as stop:
        sink.finish(stop.value)
    except DomainError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stop quietly
        sys.stderr.close()
        return 0
    except ValueError as exc:
        parser.error(str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
