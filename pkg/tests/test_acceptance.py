"""Acceptance criteria, one test each.

Every check returns ``(ok, detail)``; the pytest wrappers record the result
(printed in the terminal summary) and then assert it. Running this file as a
script prints the same PASS/FAIL lines without pytest.
"""

import atexit
import filecmp
import functools
import os
import shutil
import sys
import tempfile
import time
import warnings

import numpy as np

from castanet import cli, jsonio
from castanet.evaluate import brute_force_tp, match_count
from castanet.labeling import make_cascade_labels, make_labels
from castanet.postprocess import watershed
from castanet.records import PRF, AnnotationSet, CascadeConfig, ScoreSequence, VideoMeta, f1_score
from castanet.sampling import candidate_positions, sampling_stride, window_span
from castanet.tempnet.gradcheck import random_instance, relative_errors
from castanet.tempnet.layers import temporal_stack
from castanet.tempnet.params import init_params
from castanet.tempnet.stft import stft


# --- independent oracles -----------------------------------------------------

def kuhn_matching(preds, gts, u, norm_len):
    """Maximum bipartite matching by augmenting paths."""
    match_of_gt = [-1] * len(gts)

    def augment(i, seen):
        for j, g in enumerate(gts):
            if abs(preds[i] - g) / norm_len <= u and not seen[j]:
                seen[j] = True
                if match_of_gt[j] < 0 or augment(match_of_gt[j], seen):
                    match_of_gt[j] = i
                    return True
        return False

    return sum(augment(i, [False] * len(gts)) for i in range(len(preds)))


def naive_run_centres(times, scores, thr):
    out, first, last = [], None, None
    for t, s in zip(times, scores):
        if s > thr:
            first = t if first is None else first
            last = t
        elif first is not None:
            out.append((first + last) / 2)
            first = None
    if first is not None:
        out.append((first + last) / 2)
    return out


def dft_magnitude_frames(signal, window_len, hop):
    """Periodic-Hann STFT magnitudes through an explicit N x N DFT basis."""
    k = np.arange(window_len // 2 + 1)[:, None]
    m = np.arange(window_len)[None, :]
    basis = np.exp(-2j * np.pi * ((k * m) % window_len) / window_len)
    w = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(window_len) / window_len)
    count = (len(signal) - window_len) // hop + 1
    frames = np.stack([signal[i * hop: i * hop + window_len] * w for i in range(count)])
    return np.abs(frames @ basis.T)


# --- criteria ------------------------------------------------------------------

def check_reported_f1():
    f = f1_score(0.838, 0.828)
    via_report = PRF.from_pr(0.838, 0.828).f1
    ok = abs(f - 0.833) <= 5e-4 and f == via_report
    return ok, f"F1(0.838, 0.828) = {f:.6f}, target 0.833 +/- 0.0005"


def check_matching():
    rng = np.random.default_rng(20240101)
    mismatches = 0
    n = 500
    for _ in range(n):
        L = float(rng.uniform(2, 60))
        p = np.sort(rng.uniform(0, L, rng.integers(0, 9)))
        g = np.sort(rng.uniform(0, L, rng.integers(0, 9)))
        if rng.random() < 0.3:
            # exact coincidences and threshold-distance pairs
            g = np.sort(np.concatenate([g[: len(g) // 2], p[: len(p) // 2]]))[:8]
        u = float(rng.choice([0.01, 0.05, 0.1, 0.2, 0.5]))
        tp = match_count(p, g, u, L).tp
        if tp != kuhn_matching(list(p), list(g), u, L) or tp != brute_force_tp(p, g, u, L):
            mismatches += 1
    return mismatches == 0, f"{n} instances, {mismatches} mismatches vs exhaustive matching"


def check_receptive_field():
    rng = np.random.default_rng(7)
    params = init_params(6, 4, rng)
    T = 96
    x = rng.normal(size=(T, 6))
    base = temporal_stack(x, params)
    worst = 0
    for t in rng.choice(T, size=20, replace=False):
        y = x.copy()
        y[t] += rng.normal(size=6)
        changed = np.flatnonzero(np.any(temporal_stack(y, params) != base, axis=1))
        dist = np.abs(changed - t)
        worst = max(worst, int(dist.max()))
    return worst <= 15, f"20 impulses, max |dt| of a changed output = {worst} (bound 15)"


def check_gradients():
    worst = {}
    for seed in range(3):
        params, x, y = random_instance(seed, T=12, D=4, batch=3, num_layers=4)
        for name, err in relative_errors(params, x, y, eps=1e-5).items():
            worst[name] = max(worst.get(name, 0.0), err)
    top = max(worst, key=worst.get)
    ok = all(e < 1e-4 for e in worst.values())
    return ok, f"{len(worst)} groups x 3 seeds, worst {top} = {worst[top]:.2e} (tol 1e-4)"


@functools.lru_cache(maxsize=None)
def pipeline_run(tag):
    """Full CLI pipeline on the bundled dataset; returns (directory, seconds)."""
    d = tempfile.mkdtemp(prefix=f"castanet-{tag}-")
    atexit.register(shutil.rmtree, d, True)
    p = functools.partial(os.path.join, d)
    steps = [
        ["sample-plan", "--annotations", "@synthetic", "--n", "8", "--out", p("plan.jsonl")],
        ["make-labels", "--annotations", "@synthetic", "--plan", p("plan.jsonl"),
         "--u", "0.5,0.4,0.3", "--norm", "window", "--out", p("labels.jsonl")],
        ["train-toy", "--plan", p("plan.jsonl"), "--labels", p("labels.jsonl"),
         "--heads-u", "0.5,0.4,0.3", "--tau", "0.4,0.3", "--seed", "0", "--quiet-tau",
         "--scores-prefix", p("head"), "--out", p("model.json")],
        ["fuse", "--heads", ",".join(p(f"head{k}.jsonl") for k in (1, 2, 3)), "--out", p("fused.jsonl")],
        ["watershed", "--scores", p("fused.jsonl"), "--out", p("preds.jsonl")],
        ["eval", "--preds", p("preds.jsonl"), "--annotations", "@synthetic",
         "--thresholds", "0.05", "--out", p("report.json")],
        ["watershed", "--scores", p("head1.jsonl"), "--out", p("preds_head1.jsonl")],
        ["eval", "--preds", p("preds_head1.jsonl"), "--annotations", "@synthetic",
         "--thresholds", "0.05", "--out", p("report_head1.json")],
    ]
    start = time.perf_counter()
    for argv in steps:
        rc = cli.run(argv)
        if rc != 0:
            raise RuntimeError(f"castanet {' '.join(argv)} exited {rc}")
    return d, time.perf_counter() - start


def check_toy():
    d, seconds = pipeline_run("a")
    fused = jsonio.load_json(os.path.join(d, "report.json"))["0.05"]["f1"]
    head1 = jsonio.load_json(os.path.join(d, "report_head1.json"))["0.05"]["f1"]
    ok = fused >= 0.9 and fused >= head1 - 0.02 and seconds < 180
    return ok, f"fused F1@0.05 = {fused:.4f} (>= 0.9), head-1 F1 = {head1:.4f}, {seconds:.1f} s"


def check_labels():
    rng = np.random.default_rng(99)
    violations = 0
    for i in range(1000):
        fps = float(rng.choice([8, 12, 23.976, 25, 29.97, 30, 50, 60]))
        meta = VideoMeta(f"v{i}", fps, int(rng.integers(8, 900)))
        dur = meta.duration_sec
        annotators = [sorted(set(np.round(rng.uniform(0, dur, rng.integers(0, 6)), 3).tolist()))
                      for _ in range(rng.integers(1, 4))]
        ann = AnnotationSet(meta.video_id, annotators, dur)
        plan = candidate_positions(meta, int(rng.integers(1, 9)))
        norm = ("duration", "segment", "window")[i % 3]
        merge = ("union", "per-annotator-majority")[i % 2]
        us = np.sort(rng.uniform(0.001, 1.0, 4))
        labs = [make_labels(plan, ann, meta, u, merge, norm) for u in us]
        violations += sum(bool(np.any(a > b)) for a, b in zip(labs, labs[1:]))
        ladder = tuple(sorted(rng.uniform(0.01, 1.0, 3), reverse=True))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cfg = CascadeConfig(ladder, tuple(rng.uniform(0, 1, 2)))
        stages = make_cascade_labels(plan, ann, meta, cfg, merge, norm).as_array()
        violations += int(np.any(np.diff(stages.astype(int), axis=0) > 0))
    return violations == 0, f"1000 videos, {violations} nesting violations"


def check_watershed():
    rng = np.random.default_rng(5)
    bad = 0
    for i in range(1000):
        n = int(rng.integers(0, 60))
        times = np.cumsum(rng.uniform(0.01, 1.0, n))
        scores = rng.random(n)
        if i % 4 == 0:
            scores = np.round(scores * 4) / 4  # plenty of exact ties with the threshold
        thr = float(rng.choice([0.5, 0.25, 0.75, rng.uniform(0.05, 0.95)]))
        got = watershed(ScoreSequence.from_arrays("v", times, scores), thr)
        if list(got) != naive_run_centres(times.tolist(), scores.tolist(), thr):
            bad += 1
    return bad == 0, f"1000 sequences, {bad} disagreements with the run scanner"


def check_stft():
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(50):
        n = int(rng.integers(16, 4097))
        wl = 256 if i % 2 == 0 and n >= 256 else int(rng.integers(2, min(n, 512) + 1))
        hop = wl // 2 if i % 2 == 0 and n >= 256 else int(rng.integers(1, wl + 1))
        s = rng.normal(size=n) * rng.uniform(0.1, 10)
        worst = max(worst, float(np.max(np.abs(stft(s, wl, hop) - dft_magnitude_frames(s, wl, hop)))))
    return worst < 1e-9, f"50 signals, max abs error {worst:.2e} (tol 1e-9)"


def check_sampling():
    expected = {8: 1, 24: 3, 25: 4, 29.97: 4, 30: 4, 60: 8}
    strides_ok = all(sampling_stride(f) == s for f, s in expected.items())
    grid = np.concatenate([np.linspace(8, 240, 200_001), [8, 16, 23.976, 29.97, 59.94, 119.88]])
    bad = 0
    for n, fps_values in ((8, grid), (1, grid[::50]), (4, grid[::50]), (16, grid[::50])):
        spans = np.array([window_span(float(f), n) for f in fps_values])
        bad += int(np.sum((spans < 2 * n / 8) | (spans >= 4 * n / 8)))
    return strides_ok and bad == 0, (f"strides {'ok' if strides_ok else 'WRONG'}; "
                                     f"{len(grid)} fps values, {bad} span violations")


def check_determinism():
    a, _ = pipeline_run("a")
    b, _ = pipeline_run("b")
    names = sorted(os.listdir(a))
    same, diff, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    ok = names == sorted(os.listdir(b)) and not diff and not errors
    return ok, f"{len(same)}/{len(names)} artifacts byte-identical across two runs"


CRITERIA = [
    (1, "reported F1 arithmetic", check_reported_f1),
    (2, "sweep matcher vs exhaustive matching", check_matching),
    (3, "receptive field by impulses", check_receptive_field),
    (4, "gradient check", check_gradients),
    (5, "toy end-to-end", check_toy),
    (6, "label monotonicity and nesting", check_labels),
    (7, "watershed vs run scanner", check_watershed),
    (8, "STFT vs naive DFT", check_stft),
    (9, "dynamic sampling", check_sampling),
    (10, "CLI determinism", check_determinism),
]


def _run(record_criterion, num):
    _, title, fn = CRITERIA[num - 1]
    ok, detail = fn()
    record_criterion(num, title, ok, detail)
    assert ok, detail


def test_criterion_01_reported_f1(record_criterion):
    _run(record_criterion, 1)


def test_criterion_02_matching_oracle(record_criterion):
    _run(record_criterion, 2)


def test_criterion_03_receptive_field(record_criterion):
    _run(record_criterion, 3)


def test_criterion_04_gradient_check(record_criterion):
    _run(record_criterion, 4)


def test_criterion_05_toy_end_to_end(record_criterion):
    _run(record_criterion, 5)


def test_criterion_06_label_monotonicity(record_criterion):
    _run(record_criterion, 6)


def test_criterion_07_watershed_oracle(record_criterion):
    _run(record_criterion, 7)


def test_criterion_08_stft_oracle(record_criterion):
    _run(record_criterion, 8)


def test_criterion_09_dynamic_sampling(record_criterion):
    _run(record_criterion, 9)


def test_criterion_10_determinism(record_criterion):
    _run(record_criterion, 10)


if __name__ == "__main__":
    failed = 0
    for num, title, fn in CRITERIA:
        t0 = time.perf_counter()
        ok, detail = fn()
        failed += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail} ({time.perf_counter() - t0:.2f} s)")
    sys.exit(1 if failed else 0)
