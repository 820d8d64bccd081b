"""``sdsmec`` command line: extract, oracle, generate, project."""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

from . import formats
from .core import ConstraintMask, project
from .errors import SDSMError
from .extract import extract_backbone
from .nullmodel import Model, estimate_q
from .oracle import MAX_DIM, MAX_NODES, enumerate_space, q_deviation, representative_member
from .synth import TwoBlockSpec, random_bipartite, two_block


def _alpha(text: str) -> float:
    value = float(text)
    if not (0.0 < value < 1.0):
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {text}")
    return value


def _existing(text: str) -> str:
    if text != "-" and not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return text


def _summary_stream(output):
    # keep stdout clean when the data itself goes there
    return sys.stderr if output == "-" else sys.stdout


def cmd_extract(args) -> int:
    B = formats.read_edgelist(args.input)
    mask = formats.read_constraints(args.constraints, B) if args.constraints else ConstraintMask.free(B.shape)
    model = Model(args.model) if args.model else (Model.SDSM_EC if args.constraints else Model.SDSM)
    bb = extract_backbone(B, mask, args.alpha, model)
    formats.write_backbone(bb, args.output)
    if args.pvalues:
        formats.write_pvalues(bb.agent_labels, bb.pvalues, args.pvalues)
    out = _summary_stream(args.output)
    fit = bb.q.fit
    print(f"agents: {B.n_agents}", file=out)
    print(f"artifacts: {B.n_artifacts}", file=out)
    print(f"model: {bb.model}", file=out)
    print(f"alpha: {bb.alpha:g}", file=out)
    print(f"constrained cells: {int((mask.states != 0).sum())}", file=out)
    print(f"coefficients: {fit.beta0:.6g} {fit.beta1:.6g} {fit.beta2:.6g}", file=out)
    print(f"pairs tested: {bb.n_tested}", file=out)
    print(f"edges retained: {bb.n_edges}", file=out)
    return 0


def _report_paths(report: str) -> tuple[Path, Path, Path]:
    path = Path(report)
    stem = path.with_suffix("")
    return path, Path(f"{stem}_cells.csv"), Path(f"{stem}_histogram.csv")


def cmd_oracle(args) -> int:
    spec = formats.read_space_spec(args.margins)
    summary = enumerate_space(spec, max_dim=args.max_dim, max_nodes=args.max_nodes)
    rows = [("cardinality", summary.cardinality)]
    dev = None
    if summary.cardinality:
        # every member shares the fit's sufficient statistics, so any one will do
        B = representative_member(spec, max_dim=args.max_dim, max_nodes=args.max_nodes)
        est = estimate_q(B, spec.mask)
        dev = q_deviation(est, summary, spec.mask, bins=args.bins)
        rows += [
            ("free_cells", len(dev.cells)),
            ("mean_abs_deviation", repr(dev.mean)),
            ("max_abs_deviation", repr(dev.max)),
        ]

    for key, value in rows:
        print(f"{key}: {value}")
    if not args.report:
        return 0

    summary_path, cells_path, hist_path = _report_paths(args.report)
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerows(rows)
    with open(cells_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "state", "true_q", "estimated_q", "abs_deviation"])
        true_q = summary.true_q
        est_q = est.values if dev is not None else None
        for i in range(spec.shape[0]):
            for k in range(spec.shape[1]):
                state = ["free", "prohibited", "required"][spec.mask.states[i, k]]
                if est_q is None:
                    w.writerow([i, k, state, "", "", ""])
                else:
                    w.writerow(
                        [i, k, state, repr(float(true_q[i, k])), repr(float(est_q[i, k])),
                         repr(abs(float(est_q[i, k] - true_q[i, k])))]
                    )
    with open(hist_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_low", "bin_high", "count"])
        if dev is not None:
            for lo, hi, n in zip(dev.hist_edges[:-1], dev.hist_edges[1:], dev.hist_counts):
                w.writerow([repr(float(lo)), repr(float(hi)), int(n)])
    return 0


def cmd_generate(args) -> int:
    if args.kind == "two-block":
        B, mask = two_block(
            TwoBlockSpec(args.agents_per_group, args.artifacts_per_group, args.density, args.seed)
        )
    else:
        B = random_bipartite(args.rows, args.cols, args.density, args.seed)
        mask = None
    formats.write_edgelist(B, args.output)
    if args.constraints:
        if mask is None:
            mask = ConstraintMask.free(B.shape)
        formats.write_constraints(mask, B, args.constraints)
    return 0


def cmd_project(args) -> int:
    B = formats.read_edgelist(args.input)
    formats.write_projection(project(B), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdsmec",
        description="Backbones of bipartite projections under SDSM / SDSM-EC null models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract a backbone from an agent,artifact edgelist")
    p.add_argument("--input", required=True, type=_existing, help="edgelist CSV (agent,artifact)")
    p.add_argument("--constraints", type=_existing, help="constraints CSV (agent,artifact,constraint)")
    p.add_argument("--output", default="-", help="backbone CSV (default: stdout)")
    p.add_argument("--pvalues", help="also write the dense p-value matrix here")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument(
        "--model",
        choices=[m.value for m in Model],
        help="default: sdsm-ec with --constraints, sdsm without",
    )
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("oracle", help="enumerate a small fixed-margin space and score the Q estimate")
    p.add_argument("--margins", required=True, type=_existing, help="JSON space spec")
    p.add_argument("--report", help="summary CSV; _cells.csv and _histogram.csv are written alongside")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--max-dim", type=int, default=MAX_DIM)
    p.add_argument("--max-nodes", type=int, default=MAX_NODES)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="write a synthetic edgelist (+ constraints)")
    p.add_argument("kind", choices=["two-block", "random"])
    p.add_argument("--output", default="-")
    p.add_argument("--constraints", help="write the constraint mask here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=0.8)
    p.add_argument("--agents-per-group", type=int, default=6)
    p.add_argument("--artifacts-per-group", type=int, default=10)
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=10)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("project", help="write the weighted projection as an edgelist")
    p.add_argument("--input", required=True, type=_existing)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_project)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    previous = warnings.showwarning
    warnings.showwarning = _show_warning
    try:
        return args.func(args)
    except (SDSMError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    finally:
        warnings.showwarning = previous


if __name__ == "__main__":
    sys.exit(main())
