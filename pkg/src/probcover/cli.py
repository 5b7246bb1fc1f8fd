"""Command-line front end: ``probcover {synth,estimate-delta,select,evaluate,oracle}``.

Exit codes: 0 success, 1 validation error, 2 I/O or file-format error,
3 capacity or oracle-limit error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from probcover.covergraph import build_graph
from probcover.data import (
    Component, MixtureSpec, _atomic_write, generate_mixture, load_embeddings,
    normalize_l2, ring_means, save_embeddings,
)
from probcover.delta_estimation import DEFAULT_ALPHA, default_delta_grid, estimate_delta, purity
from probcover.errors import ProbCoverError, ValidationError
from probcover.evaluation import EvalReport, compute_bound, evaluate
from probcover.oracle import optimal_coverage, optimal_kcenter
from probcover.selection import STRATEGIES, LabeledPool, Selection, run_strategy


@dataclass
class RunConfig:
    dataset: str
    strategy: str = "probcover"
    b: int = 10
    rounds: int = 1
    delta: float | str = "auto"
    alpha: float = DEFAULT_ALPHA
    k: int | None = None
    seed: int | None = None
    normalize: bool = False
    output: str | None = None
    format: str = "binary"
    pool: list[int] = field(default_factory=list)
    grid_size: int = 50

    def __post_init__(self):
        if self.rounds < 1:
            raise ValidationError(f"rounds must be >= 1, got {self.rounds}")
        if self.b < 1:
            raise ValidationError(f"b must be >= 1, got {self.b}")
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}")


def _delta_arg(s: str):
    if s == "auto":
        return s
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"delta must be a number or 'auto', got {s!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"delta must be > 0, got {s}")
    return v


def _index_list(s: str) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()] if s else []


def _require_seed(args, why: str):
    if args.seed is None:
        raise ValidationError(f"--seed is required {why}")


def _load(args, path=None):
    path = path or args.data
    es = load_embeddings(path, args.format, csv_header=args.csv_header)
    return es


def _write_text(path, text: str):
    _atomic_write(path, text.encode())


# ------------------------------------------------------------------ commands


def cmd_synth(args) -> int:
    _require_seed(args, "for synth (reproducibility is mandatory)")
    if args.spec:
        raw = json.loads(Path(args.spec).read_text())
        comps = [Component(tuple(c["mean"]), float(c["stddev"]), float(c.get("weight", 1.0)),
                           int(c.get("label", i))) for i, c in enumerate(raw["components"])]
        spec = MixtureSpec(comps, int(raw.get("samples", args.n)), args.seed)
    else:
        if args.components < 1:
            raise ValidationError("--components must be >= 1")
        if not args.std > 0:
            raise ValidationError(f"--std must be > 0, got {args.std}")
        means = ring_means(args.components, args.sep, args.dim)
        comps = [Component(m, args.std, 1.0, i) for i, m in enumerate(means)]
        if args.outlier_frac > 0:
            if not args.outlier_frac < 1:
                raise ValidationError("--outlier-frac must lie in [0, 1)")
            w = (1 - args.outlier_frac) / args.components
            comps = [Component(c.mean, c.stddev, w, c.label) for c in comps]
            mean = tuple([args.outlier_dist] + [0.0] * (args.dim - 1))
            comps.append(Component(mean, args.outlier_std or args.std, args.outlier_frac,
                                   args.components))
        spec = MixtureSpec(comps, args.n, args.seed)
    es = generate_mixture(spec)
    save_embeddings(es, args.output, args.format)
    print(f"wrote {es.n}x{es.d} points to {args.output}")
    return 0


def _auto_k(args, es) -> int:
    if args.k is not None:
        return args.k
    if es.labels is not None:
        return es.num_classes
    raise ValidationError("--k is required when the data carries no labels")


def _grid(args, es):
    if args.grid:
        return [float(t) for t in args.grid.split(",") if t.strip()]
    return default_delta_grid(es, size=args.grid_size, seed=args.seed)


def _run_estimate(args, es):
    _require_seed(args, "for delta estimation")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        curve = estimate_delta(es, _auto_k(args, es), args.alpha, _grid(args, es), args.seed,
                               restarts=args.restarts, purity_sample=args.purity_sample)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return curve


def cmd_estimate_delta(args) -> int:
    es = _load(args)
    if args.normalize:
        es = normalize_l2(es)
    curve = _run_estimate(args, es)
    if args.output:
        _write_text(args.output, curve.to_csv())
    print(f"delta_star={curve.delta_star!r}")
    return 0


def cmd_select(args) -> int:
    cfg = RunConfig(dataset=args.data, strategy=args.strategy, b=args.b, rounds=args.rounds,
                    delta=args.delta, alpha=args.alpha, k=args.k, seed=args.seed,
                    normalize=args.normalize, output=args.output, format=args.format,
                    pool=_index_list(args.pool))
    es = _load(args)
    if cfg.normalize:
        es = normalize_l2(es)
    delta = cfg.delta
    if delta == "auto":
        if cfg.strategy in ("probcover", "probcover-pairs"):
            delta = _run_estimate(args, es).delta_star
        else:
            delta = None
    if cfg.strategy in ("coreset", "random"):
        _require_seed(args, f"for the {cfg.strategy} strategy")
    graph = build_graph(es, delta) if delta is not None else None

    labeled = list(cfg.pool)
    records = []
    for r in range(1, cfg.rounds + 1):
        avail = es.n - len(labeled)
        if cfg.b > avail:
            raise ValidationError(
                f"round {r}: budget {cfg.b} exceeds the {avail} unlabeled points left"
            )
        seed = None if cfg.seed is None else cfg.seed + r - 1
        sel = run_strategy(cfg.strategy, es, LabeledPool(labeled), cfg.b, delta, seed or 0, graph)
        labeled.extend(sel.queried)
        rec = {"round": r, "labeled_total": len(labeled)}
        rec.update(sel.to_record())
        if seed is None:
            rec.pop("seed", None)
        if graph is not None:
            rec["delta"] = float(delta)
            rec["coverage"] = graph.coverage(labeled)
            if es.labels is not None:
                pur = purity(es, es.labels, delta)
                rec["purity_true"] = pur
                rec["bound"] = compute_bound(rec["coverage"], pur)
        records.append(rec)

    out = {
        "dataset": cfg.dataset,
        "format": cfg.format,
        "strategy": cfg.strategy,
        "b": cfg.b,
        "rounds": cfg.rounds,
        "delta": None if delta is None else float(delta),
        "seed": cfg.seed,
        "normalize": cfg.normalize,
        "initial_pool": cfg.pool,
        "records": records,
    }
    text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    if cfg.output:
        _write_text(cfg.output, text)
    for rec in records:
        cov = rec.get("coverage")
        extra = f" coverage={cov!r}" if cov is not None else ""
        print(f"round={rec['round']} labeled={rec['labeled_total']}{extra}")
    return 0


def cmd_evaluate(args) -> int:
    sel_doc = json.loads(Path(args.selection).read_text())
    es = _load(args)
    test = _load(args, args.test)
    if sel_doc.get("normalize"):
        es, test = normalize_l2(es), normalize_l2(test)
    if test.d != es.d:
        raise ValidationError(f"dimension mismatch: data d={es.d}, test d={test.d}")
    delta = args.delta if args.delta is not None else sel_doc.get("delta")
    if delta is None:
        raise ValidationError("selection carries no delta; pass --delta")
    pool = list(sel_doc.get("initial_pool", []))
    rows = ["round," + EvalReport.csv_header()]
    for rec in sel_doc["records"]:
        sel = Selection.from_record(rec)
        rep = evaluate(es, sel, LabeledPool(pool), float(delta), test)
        pool.extend(sel.queried)
        rows.append(f"{rec['round']},{rep.csv_row()}")
        print(f"round={rec['round']} " + rep.to_kv().strip().replace("\n", " "))
    if args.output:
        _write_text(args.output, "\n".join(rows) + "\n")
    return 0


def cmd_oracle(args) -> int:
    es = _load(args)
    pool = _index_list(args.pool)
    if args.problem == "coverage":
        if args.delta is None:
            raise ValidationError("--delta is required for the coverage oracle")
        val, subset = optimal_coverage(es, pool, args.b, args.delta)
        out = {"problem": "coverage", "coverage": val, "subset": subset}
    else:
        val, subset = optimal_kcenter(es, pool, args.b)
        out = {"problem": "kcenter", "radius": val, "subset": subset}
    print(json.dumps(out, sort_keys=True))
    return 0


# ------------------------------------------------------------------ parser


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subparser copies use SUPPRESS so they never overwrite a value given
    # before the subcommand name
    def dflt(v):
        return argparse.SUPPRESS if suppress else v

    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=dflt(None))
    c.add_argument("--threads", type=int, default=dflt(0),
                   help="worker threads (0 = auto); computations are vectorised "
                        "numpy, so this is currently advisory")
    c.add_argument("--format", choices=("binary", "csv"), default=dflt("binary"))
    c.add_argument("--csv-header", action="store_true", default=dflt(False),
                   help="skip line 1 of CSV input")
    c.add_argument("-v", "--verbose", action="store_true", default=dflt(False))
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=False)
    sub_common = _common_flags(suppress=True)

    p = argparse.ArgumentParser(prog="probcover", parents=[common],
                                description="Low-budget active learning by max probability coverage.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[sub_common], help="sample a Gaussian mixture to a file")
    s.add_argument("--components", type=int, default=3)
    s.add_argument("--sep", type=float, default=10.0, help="distance between adjacent means")
    s.add_argument("--std", type=float, default=1.0)
    s.add_argument("--n", type=int, default=300)
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--outlier-frac", type=float, default=0.0)
    s.add_argument("--outlier-dist", type=float, default=50.0)
    s.add_argument("--outlier-std", type=float, default=None)
    s.add_argument("--spec", help="JSON mixture spec, overrides the shape flags")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    def data_flags(q):
        q.add_argument("--data", required=True, help="embedding file")
        q.add_argument("--normalize", action="store_true", help="L2-normalise rows first")

    def delta_flags(q):
        q.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
        q.add_argument("--k", type=int, default=None, help="clusters (default: number of labels)")
        q.add_argument("--grid", default=None, help="comma-separated candidate deltas")
        q.add_argument("--grid-size", type=int, default=50)
        q.add_argument("--restarts", type=int, default=1)
        q.add_argument("--purity-sample", type=int, default=None)

    e = sub.add_parser("estimate-delta", parents=[sub_common], help="pick delta from purity")
    data_flags(e)
    delta_flags(e)
    e.add_argument("-o", "--output", help="purity curve CSV")
    e.set_defaults(func=cmd_estimate_delta)

    q = sub.add_parser("select", parents=[sub_common], help="run a query strategy")
    data_flags(q)
    delta_flags(q)
    q.add_argument("--strategy", choices=STRATEGIES, default="probcover")
    q.add_argument("--b", type=int, required=True)
    q.add_argument("--rounds", type=int, default=1)
    q.add_argument("--delta", type=_delta_arg, default="auto")
    q.add_argument("--pool", default="", help="comma-separated initially labeled indices")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_select)

    v = sub.add_parser("evaluate", parents=[sub_common], help="score a selection file")
    v.add_argument("--data", required=True)
    v.add_argument("--selection", required=True)
    v.add_argument("--test", required=True)
    v.add_argument("--delta", type=float, default=None)
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_evaluate)

    o = sub.add_parser("oracle", parents=[sub_common], help="exhaustive solvers for tiny instances")
    o.add_argument("problem", choices=("coverage", "kcenter"))
    o.add_argument("--data", required=True)
    o.add_argument("--b", type=int, required=True)
    o.add_argument("--delta", type=float, default=None)
    o.add_argument("--pool", default="")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ProbCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        name = exc.filename if exc.filename is not None else ""
        print(f"error: {name}: {exc.strerror or exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
