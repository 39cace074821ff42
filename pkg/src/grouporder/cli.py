"""Command-line interface: ``grouporder order | simulate | bench``.

Data files are CSV with a header of variable names and one observation per
line. They are transposed on load into the variables-by-samples layout used
internally. The grouping lives in a sidecar text file, one group per line::

    # label: variables...
    region_a: a1 a2 a3
    region_b: b1 b2

Group ids ``1..G`` follow the order of the lines. Exit codes: 0 success,
2 bad input (files, configs, arguments), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .bench import BenchConfig, run_bench
from .data import GroupedDataMatrix, GroupLayout, Method
from .errors import GroupOrderError, OrderingError
from .ordering import OrderingOptions, estimate_order
from .synthgen import GenConfig, generate_model, sample_data

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("grouporder")


class InputError(Exception):
    """Malformed user input; reported with exit code 2."""


@dataclass(frozen=True)
class GroupSpec:
    labels: tuple[str, ...]
    members: tuple[tuple[str, ...], ...]

    def label_of(self, group_id: int) -> str:
        return self.labels[group_id - 1]


def parse_group_spec(text: str, source: str = "<groups>") -> GroupSpec:
    labels, members, seen = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise InputError(f"{source}:{lineno}: expected 'label: var1 var2 ...'")
        label, rest = (part.strip() for part in line.split(":", 1))
        names = rest.replace(",", " ").split()
        if not label:
            raise InputError(f"{source}:{lineno}: empty group label")
        if label in labels:
            raise InputError(f"{source}:{lineno}: group {label!r} declared twice")
        if not names:
            raise InputError(f"{source}:{lineno}: group {label!r} has no variables")
        for n in names:
            if n in seen:
                raise InputError(f"{source}:{lineno}: variable {n!r} already in group {seen[n]!r}")
            seen[n] = label
        labels.append(label)
        members.append(tuple(names))
    if len(labels) < 2:
        raise InputError(f"{source}: at least two groups are required")
    return GroupSpec(tuple(labels), tuple(members))


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    """Header and an ``m x p`` array (rows are observations)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise InputError(f"{path}:1: missing header row")
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise InputError(f"{path}:1: duplicate column names")
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(
                    f"{path}:{reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise InputError(f"{path}:{reader.line_num}: non-numeric value") from None
            if not all(np.isfinite(values)):
                raise InputError(f"{path}:{reader.line_num}: non-finite value")
            rows.append(values)
    if len(rows) < 2:
        raise InputError(f"{path}: at least two observations are required")
    return header, np.array(rows, dtype=float)


def load_grouped(path: Path, spec: GroupSpec) -> GroupedDataMatrix:
    header, table = read_csv(path)
    column = {name: i for i, name in enumerate(header)}
    named = [n for group in spec.members for n in group]
    missing = [n for n in named if n not in column]
    if missing:
        raise InputError(f"{path}: variables missing from header: {', '.join(missing)}")
    extra = sorted(set(header) - set(named))
    if extra:
        raise InputError(f"{path}: columns not assigned to any group: {', '.join(extra)}")
    values = table[:, [column[n] for n in named]].T
    layout = GroupLayout(tuple(len(g) for g in spec.members))
    return GroupedDataMatrix(values, layout)


def write_csv(path: Path, names: list[str], values: np.ndarray) -> None:
    """Write a variables-by-samples matrix as observations-by-columns CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in values.T:
            w.writerow([f"{v:.17g}" for v in row])


def _options(args) -> OrderingOptions:
    return OrderingOptions(
        method=Method.parse(args.method),
        lam=args.lam,
        cv_lambda=args.cv_lambda,
        subgroup_size=args.subgroup_size,
        n_subsets=args.subsets,
        seed=args.seed,
    )


def cmd_order(args) -> int:
    if len(args.data) > 1 and not args.multiset:
        raise InputError("several data files need --multiset")
    try:
        spec_text = Path(args.groups).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{args.groups}: {exc.strerror}") from exc
    spec = parse_group_spec(spec_text, str(args.groups))
    datasets = [load_grouped(Path(p), spec) for p in args.data]
    try:
        opts = _options(args)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    trace = estimate_order(datasets if args.multiset else datasets[0], opts)
    labels = [spec.label_of(g) for g in trace.order.order]
    print("causal order (most exogenous first): " + " -> ".join(labels))
    for it, s in enumerate(trace.rounds, start=1):
        print(f"round {it}: chose {spec.label_of(s.chosen)}")
        for g, v in sorted(s.scores.items()):
            print(f"  {spec.label_of(g):<20} {v:.6g}")
    if args.json:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "method": opts.method.value,
            "order": labels,
            "order_ids": list(trace.order.order),
            "rounds": [
                {
                    "iteration": it,
                    "chosen": spec.label_of(s.chosen),
                    "scores": {spec.label_of(g): v for g, v in sorted(s.scores.items())},
                }
                for it, s in enumerate(trace.rounds, start=1)
            ],
        }
        _write_text(Path(args.json), json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def cmd_simulate(args) -> int:
    if args.samples < 2:
        raise InputError("--samples must be at least 2")
    doc = _read_json(args.config)
    try:
        if args.seed is not None:
            doc = {**doc, "seed": args.seed}
        cfg = GenConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{args.config}: {exc}") from exc
    model = generate_model(cfg)
    data, truth = sample_data(model, args.samples, seed=[cfg.seed, 1])
    labels = [f"G{g}" for g in data.group_ids]
    names = [f"G{g}_v{k + 1}" for g in data.group_ids for k in range(data.layout.size(g))]
    prefix = Path(args.out)
    try:
        write_csv(prefix.with_name(prefix.name + ".csv"), names, data.values)
    except OSError as exc:
        raise InputError(f"{prefix}: {exc.strerror}") from exc
    groups = "".join(
        f"G{g}: " + " ".join(f"G{g}_v{k + 1}" for k in range(data.layout.size(g))) + "\n"
        for g in data.group_ids
    )
    _write_text(prefix.with_name(prefix.name + ".groups"), groups)
    truth_doc = {
        "schema_version": SCHEMA_VERSION,
        "order": [labels[g - 1] for g in truth.order],
        "order_ids": list(truth.order),
        "samples": args.samples,
        "seed": cfg.seed,
    }
    _write_text(prefix.with_name(prefix.name + ".truth.json"), json.dumps(truth_doc, indent=2) + "\n")
    _write_text(prefix.with_name(prefix.name + ".spec.json"), model.to_json() + "\n")
    print(f"wrote {prefix}.csv, {prefix}.groups, {prefix}.truth.json, {prefix}.spec.json")
    return EXIT_OK


def bundled_config(name: str) -> dict:
    """A config shipped with the package, e.g. ``fig1a-small``."""
    stem = name[:-5] if name.endswith(".json") else name
    ref = resources.files("grouporder") / "configs" / f"{stem}.json"
    if not ref.is_file():
        raise InputError(f"no such config file or bundled config: {name}")
    return json.loads(ref.read_text(encoding="utf-8"))


def cmd_bench(args) -> int:
    doc = _read_json(args.config) if Path(args.config).is_file() else bundled_config(args.config)
    try:
        if args.seed is not None:
            doc = {**doc, "seed": args.seed}
        cfg = BenchConfig.from_dict(doc)
        if args.trials is not None:
            cfg = replace(cfg, trials=args.trials)
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"{args.config}: invalid bench config: {exc}") from exc
    out = Path(args.out)
    try:
        out.open("w").close()
    except OSError as exc:
        raise InputError(f"{out}: {exc.strerror}") from exc
    report = run_bench(cfg, n_jobs=args.jobs)
    _write_text(out, report.to_csv(timing=not args.no_timing))
    if args.json:
        _write_text(Path(args.json), report.to_json() + "\n")
    for c in report.cells:
        print(f"{c.method:<24} m={c.sample_size:<6} error={c.error_rate:.3f}  ({c.trials} trials)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grouporder", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("order", help="estimate a causal order among groups")
    o.add_argument("data", nargs="+", help="CSV file(s), one observation per line")
    o.add_argument("--groups", required=True, help="group specification file")
    o.add_argument("--method", default="pairwise", choices=[m.value for m in Method])
    o.add_argument("--lambda", dest="lam", type=float, default=0.0, help="ridge parameter (0 = OLS)")
    o.add_argument("--cv-lambda", action="store_true", help="choose the ridge parameter by 10-fold CV")
    o.add_argument("--subgroup-size", type=int, help="score random subsets of this many variables per group")
    o.add_argument("--subsets", type=int, help="number of random subsets to pool per round")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--json", help="write the per-round trace to this path")
    o.add_argument("--multiset", action="store_true", help="pool scores over all given data files")
    o.set_defaults(func=cmd_order)

    s = sub.add_parser("simulate", help="sample data from a random model")
    s.add_argument("config", help="generator config JSON")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output prefix")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="run a Monte-Carlo benchmark")
    b.add_argument("config", help="bench config JSON or bundled name (fig1a-small, fig1b-small)")
    b.add_argument("--out", required=True, help="CSV report path")
    b.add_argument("--json", help="also write per-trial detail as JSON")
    b.add_argument("--seed", type=int)
    b.add_argument("--trials", type=int)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="leave the seconds column empty")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OrderingError as exc:
        print(f"numerical failure in iteration {exc.iteration}: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERIC
    except GroupOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
