"""Command-line entry point: ``castanet <subcommand> ...``.

Exit status is 0 on success, 1 on validation/data errors (including missing
files) and 2 on usage errors. Diagnostics go to stderr; data goes to the
``--out`` file or, when ``--out`` is omitted, to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import __version__, jsonio
from .cascade import HeadScores, ensemble, fuse_heads
from .errors import CastanetError, ConfigurationError, DataError, ValidationError
from .evaluate import EVAL_MODES, SWEEP_THRESHOLDS, evaluate
from .labeling import MERGE_MODES, NORM_MODES, LabelSequence, make_cascade_labels
from .postprocess import watershed
from .records import CascadeConfig
from .sampling import DEFAULT_CONTEXT, SamplePlan, candidate_positions

log = logging.getLogger("castanet")

BUNDLED = "@synthetic"

ANNOTATIONS_SCHEMA = """annotations JSONL, one object per line:
  {"video_id": str, "fps": number > 0, "num_frames": int >= 1,
   "annotators": [[seconds, ...], ...]}   (each list strictly increasing)
The value @synthetic names the bundled 200-video synthetic dataset."""
SCORES_SCHEMA = """scores JSONL:
  {"video_id": str, "timestamps": [seconds, ...] (strictly increasing),
   "scores": [p in [0, 1], ...]}"""
PLAN_SCHEMA = """plan JSONL:
  {"video_id": str, "stride_frames": int, "candidate_times": [seconds, ...],
   "windows": [[frame, ...] (2n entries), ...]}"""
LABELS_SCHEMA = """labels JSONL:
  {"video_id": str, "candidate_times": [seconds, ...],
   "stage_labels": [[0|1, ...] per cascade stage]}"""
PREDS_SCHEMA = """predictions JSONL:
  {"video_id": str, "boundaries": [seconds, ...]}"""
REPORT_SCHEMA = """report JSON:
  {"<threshold>": {"precision": p, "recall": r, "f1": f}, ...}"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _paths(text):
    return [p for p in text.split(",") if p]


def annotations_path(path):
    if path == BUNDLED:
        return resources.files("castanet").joinpath("data/synthetic_annotations.jsonl")
    return path


def _load_annotations(path):
    return jsonio.load_annotations(annotations_path(path))


def _pmap(fn, items, jobs):
    items = list(items)
    if jobs and jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


def _emit_jsonl(records, out):
    if out:
        jsonio.write_jsonl(out, records)
    else:
        for r in records:
            sys.stdout.write(jsonio.dumps(r) + "\n")


def _emit_text(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_plans(path):
    return {obj["video_id"]: SamplePlan.from_obj(obj) for _, obj in jsonio.iter_jsonl(path)}


# subcommands ---------------------------------------------------------------

def _plan_one(args):
    meta, n = args
    return candidate_positions(meta, n).to_obj()


def cmd_sample_plan(a):
    recs = _load_annotations(a.annotations)
    _emit_jsonl(_pmap(_plan_one, [(m, a.n) for m, _ in recs], a.jobs), a.out)


def _labels_one(args):
    plan, ann, meta, cfg, merge, norm = args
    return make_cascade_labels(plan, ann, meta, cfg, merge, norm).to_obj()


def cmd_make_labels(a):
    recs = _load_annotations(a.annotations)
    plans = _load_plans(a.plan)
    cfg = CascadeConfig(a.u, [0.5] * (len(a.u) - 1), tau_order="any")
    work = []
    for meta, ann in recs:
        if meta.video_id not in plans:
            raise DataError(f"no plan for video {meta.video_id!r} in {a.plan}")
        work.append((plans[meta.video_id], ann, meta, cfg, a.merge, a.norm))
    _emit_jsonl(_pmap(_labels_one, work, a.jobs), a.out)


def _group(seqs_per_file, paths):
    """Align per-video records across files, in the first file's order."""
    by_file = []
    for path, seqs in zip(paths, seqs_per_file):
        d = {}
        for s in seqs:
            if s.video_id in d:
                raise ValidationError(f"duplicate record in {path}", s.video_id, "video_id")
            d[s.video_id] = s
        by_file.append(d)
    order = [s.video_id for s in seqs_per_file[0]]
    for path, d in zip(paths, by_file):
        if set(d) != set(order):
            missing = sorted(set(order) ^ set(d))
            raise DataError(f"{path} does not cover the same videos (differs on {missing[:3]})")
    return [[d[v] for d in by_file] for v in order]


def cmd_fuse(a):
    seqs = [jsonio.load_scores(p) for p in a.heads]
    fused = [fuse_heads(HeadScores(tuple(group))) for group in _group(seqs, a.heads)]
    _emit_jsonl([jsonio.score_to_obj(s) for s in fused], a.out)


def cmd_ensemble(a):
    seqs = [jsonio.load_scores(p) for p in a.models]
    out = [ensemble(group) for group in _group(seqs, a.models)]
    _emit_jsonl([jsonio.score_to_obj(s) for s in out], a.out)


def _watershed_one(args):
    seq, thr, inclusive = args
    return {"video_id": seq.video_id, "boundaries": list(watershed(seq, thr, inclusive))}


def cmd_watershed(a):
    seqs = jsonio.load_scores(a.scores)
    _emit_jsonl(_pmap(_watershed_one, [(s, a.threshold, a.inclusive) for s in seqs], a.jobs), a.out)


def cmd_eval(a):
    recs = {m.video_id: (m, ann) for m, ann in _load_annotations(a.annotations)}
    preds = jsonio.load_predictions(a.preds)
    thresholds = list(SWEEP_THRESHOLDS) if a.sweep else a.thresholds
    report = evaluate(preds, recs, thresholds, a.mode, macro=a.macro, per_video=a.per_video,
                      map_fn=lambda fn, items: _pmap(fn, items, a.jobs))
    _emit_text(jsonio.report_to_json(report, a.per_video), a.out)


def cmd_train_toy(a):
    from .tempnet.toy import labels_from_objs, run_toy
    from .tempnet.train import TrainConfig

    if len(a.heads_u) != len(a.tau) + 1:
        raise ConfigurationError(f"{len(a.heads_u)} heads need {len(a.heads_u) - 1} tau values")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if a.quiet_tau else "default")
        cascade = CascadeConfig(a.heads_u, a.tau)
    cfg = TrainConfig(lr=a.lr, momentum=a.momentum, weight_decay=a.weight_decay, epochs=a.epochs,
                      batch_size=a.batch_size, seed=a.seed, dim=a.dim, num_layers=a.layers,
                      warm_start=not a.cold_start, cascade=cascade)
    recs = _load_annotations(a.annotations)
    plans = _load_plans(a.plan) if a.plan else None
    labels = None
    if a.labels:
        labels = labels_from_objs(obj for _, obj in jsonio.iter_jsonl(a.labels))
        for lab in labels.values():
            if len(lab.stage_labels) != cascade.num_heads:
                raise ConfigurationError(
                    f"{a.labels} has {len(lab.stage_labels)} stages, --heads-u gives {cascade.num_heads}"
                )
        missing = [m.video_id for m, _ in recs if m.video_id not in labels]
        if missing:
            raise DataError(f"no labels for video {missing[0]!r} in {a.labels}")
    heads, train_log, head_scores = run_toy(recs, cfg, n=a.n, plans=plans, labels=labels,
                                            holdout=a.holdout, feature_seed=a.feature_seed,
                                            norm=a.norm, merge_mode=a.merge)
    model = {
        "config": {
            "lr": cfg.lr, "momentum": cfg.momentum, "weight_decay": cfg.weight_decay,
            "epochs": cfg.epochs, "batch_size": cfg.batch_size, "seed": cfg.seed,
            "dim": cfg.dim, "num_layers": cfg.num_layers, "warm_start": cfg.warm_start,
            "heads_u": list(cascade.gt_thresholds), "tau": list(cascade.mask_thresholds),
            "n": a.n, "holdout": a.holdout, "feature_seed": a.feature_seed, "norm": a.norm,
            "merge": a.merge,
        },
        "heads": [h.to_obj() for h in heads],
        "log": train_log,
    }
    _emit_text(json.dumps(model) + "\n", a.out)
    if a.scores_prefix:
        for n, seqs in enumerate(head_scores, 1):
            jsonio.save_scores(seqs, f"{a.scores_prefix}{n}.jsonl")
    for entry in train_log:
        losses = entry["loss"]
        first = float(np.mean(losses[:20])) if losses else float("nan")
        last = float(np.mean(losses[-20:])) if losses else float("nan")
        log.info("head %d (u=%g): %d samples, %d positive, loss %.4f -> %.4f", entry["head"],
                 entry["u"], entry["samples"], entry["positives"], first, last)


def cmd_grad_check(a):
    from .tempnet.gradcheck import random_instance, relative_errors

    params, x, y = random_instance(a.seed, T=a.T, D=a.D, batch=a.batch, num_layers=a.layers)
    errs = relative_errors(params, x, y, eps=a.eps)
    width = max(len(k) for k in errs)
    lines = [f"{name:<{width}}  {err:.3e}" for name, err in errs.items()]
    worst = max(errs.values())
    lines.append(f"{'max':<{width}}  {worst:.3e}  ({'ok' if worst < a.tol else 'FAIL'} at tol {a.tol:g})")
    _emit_text("\n".join(lines) + "\n", None)
    return 0 if worst < a.tol else 1


# parser ---------------------------------------------------------------------

def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    p = _Parser(prog="castanet", description="Generic event boundary detection toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help, epilog):
        sp = sub.add_parser(name, help=help, description=help, epilog=epilog, formatter_class=fmt)
        sp.set_defaults(func=fn)
        return sp

    sp = add("sample-plan", cmd_sample_plan, "FPS-adaptive candidate grid and context windows.",
             f"input:\n{ANNOTATIONS_SCHEMA}\n\noutput:\n{PLAN_SCHEMA}")
    sp.add_argument("--annotations", required=True)
    sp.add_argument("--n", type=int, default=DEFAULT_CONTEXT, help="frames before/after (default 8)")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("make-labels", cmd_make_labels, "Cascaded Rel.Dis. training labels per candidate.",
             f"inputs:\n{ANNOTATIONS_SCHEMA}\n{PLAN_SCHEMA}\n\noutput:\n{LABELS_SCHEMA}")
    sp.add_argument("--annotations", required=True)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--u", type=_floats, required=True, help="non-increasing ladder, e.g. 0.5,0.4,0.3")
    sp.add_argument("--merge", choices=MERGE_MODES, default="union")
    sp.add_argument("--norm", choices=NORM_MODES, default="duration",
                    help="Rel.Dis. normaliser (default: clip duration)")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("fuse", cmd_fuse, "Average cascade head scores per candidate.",
             f"inputs (one file per head, same videos and grids):\n{SCORES_SCHEMA}\n\noutput:\n{SCORES_SCHEMA}")
    sp.add_argument("--heads", type=_paths, required=True, help="h1.jsonl,h2.jsonl,...")
    sp.add_argument("--out")

    sp = add("ensemble", cmd_ensemble, "Average several models on the first model's grid.",
             f"inputs (one file per model):\n{SCORES_SCHEMA}\n\noutput:\n{SCORES_SCHEMA}")
    sp.add_argument("--models", type=_paths, required=True, help="m1.jsonl,m2.jsonl,...")
    sp.add_argument("--out")

    sp = add("watershed", cmd_watershed, "Boundaries at the centres of above-threshold runs.",
             f"input:\n{SCORES_SCHEMA}\n\noutput:\n{PREDS_SCHEMA}")
    sp.add_argument("--scores", required=True)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--inclusive", action="store_true", help="use score >= threshold")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("eval", cmd_eval, "Precision / recall / F1 at Rel.Dis. thresholds.",
             f"inputs:\n{PREDS_SCHEMA}\n{ANNOTATIONS_SCHEMA}\n\noutput:\n{REPORT_SCHEMA}")
    sp.add_argument("--preds", required=True)
    sp.add_argument("--annotations", required=True)
    sp.add_argument("--thresholds", type=_floats, default=[0.05])
    sp.add_argument("--sweep", action="store_true", help="thresholds 0.05, 0.10, ..., 0.50")
    sp.add_argument("--mode", choices=EVAL_MODES, default="max-annotator")
    sp.add_argument("--macro", action="store_true", help="average per-video metrics")
    sp.add_argument("--per-video", action="store_true", help="include per-video counts")
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("train-toy", cmd_train_toy, "Train cascade heads on synthetic features.",
             f"inputs:\n{ANNOTATIONS_SCHEMA}\n{PLAN_SCHEMA} (optional)\n{LABELS_SCHEMA} (optional)\n\n"
             "outputs:\n  model JSON {config, heads: [params...], log}\n"
             f"  with --scores-prefix P: P1.jsonl ... PN.jsonl for the held-out videos\n{SCORES_SCHEMA}")
    sp.add_argument("--annotations", default=BUNDLED)
    sp.add_argument("--plan")
    sp.add_argument("--labels")
    sp.add_argument("--heads-u", type=_floats, default=[0.5, 0.4, 0.3])
    sp.add_argument("--tau", type=_floats, default=[0.4, 0.3])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--feature-seed", type=int, default=0)
    sp.add_argument("--lr", type=float, default=1e-2)
    sp.add_argument("--momentum", type=float, default=0.9)
    sp.add_argument("--weight-decay", type=float, default=5e-4)
    sp.add_argument("--epochs", type=int, default=4)
    sp.add_argument("--batch-size", type=int, default=32)
    sp.add_argument("--dim", type=int, default=8)
    sp.add_argument("--layers", type=int, default=4)
    sp.add_argument("--n", type=int, default=DEFAULT_CONTEXT)
    sp.add_argument("--holdout", type=float, default=0.2, help="fraction of trailing videos scored")
    sp.add_argument("--norm", choices=NORM_MODES, default="window",
                    help="label normaliser when labels are computed here (default: window)")
    sp.add_argument("--merge", choices=MERGE_MODES, default="union")
    sp.add_argument("--cold-start", action="store_true",
                    help="initialise every head randomly instead of from the previous head")
    sp.add_argument("--quiet-tau", action="store_true", help="silence the tau ordering warning")
    sp.add_argument("--scores-prefix")
    sp.add_argument("--out")

    sp = add("grad-check", cmd_grad_check, "Finite-difference check of the network gradients.",
             "prints the max relative error per parameter group")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--T", type=int, default=12)
    sp.add_argument("--D", type=int, default=4)
    sp.add_argument("--batch", type=int, default=2)
    sp.add_argument("--layers", type=int, default=4)
    sp.add_argument("--eps", type=float, default=1e-5)
    sp.add_argument("--tol", type=float, default=1e-4)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        rc = args.func(args)
    except (CastanetError, OSError) as exc:
        print(f"castanet {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return rc or 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
