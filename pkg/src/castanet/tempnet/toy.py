"""Glue between the file-level pipeline and the network: windows in, head scores out."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..labeling import LabelSequence, make_cascade_labels
from ..records import ScoreSequence
from ..sampling import SamplePlan, candidate_positions
from .net import boundary_prob
from .synth import gather_windows, render_features
from .train import TrainConfig, train_cascade


def split_videos(video_ids, holdout: float):
    """Last ``round(holdout * len)`` videos are held out for scoring."""
    k = int(round(holdout * len(video_ids)))
    if holdout > 0 and k == 0:
        k = 1
    cut = len(video_ids) - k
    return list(video_ids[:cut]), list(video_ids[cut:])


def video_windows(meta, ann, plan: SamplePlan, dim, feature_seed):
    feats = render_features(meta, ann.annotators[0], dim, feature_seed)
    return gather_windows(feats, plan)


def build_training_set(records, plans, labels, dim, feature_seed):
    xs, ys = [], []
    for meta, ann in records:
        plan = plans[meta.video_id]
        lab = labels[meta.video_id]
        if len(lab.candidate_times) != len(plan):
            raise DataError(f"labels and plan disagree for video {meta.video_id!r}")
        xs.append(video_windows(meta, ann, plan, dim, feature_seed))
        ys.append(lab.as_array())
    return np.concatenate(xs), np.concatenate(ys, axis=1)


def score_videos(heads, records, plans, dim, feature_seed) -> list[list[ScoreSequence]]:
    """Per-head score sequences: ``out[n][v]`` is head ``n`` on video ``v``."""
    out = [[] for _ in heads]
    for meta, ann in records:
        plan = plans[meta.video_id]
        x = video_windows(meta, ann, plan, dim, feature_seed)
        for n, params in enumerate(heads):
            p = np.clip(boundary_prob(params, x), 0.0, 1.0)
            out[n].append(ScoreSequence(meta.video_id, plan.candidate_times, tuple(p.tolist())))
    return out


def run_toy(records, cfg: TrainConfig, n=8, plans=None, labels=None, holdout=0.2,
            feature_seed=0, norm="window", merge_mode="union"):
    """Train on the leading videos and score the held-out ones.

    Returns ``(heads, log, head_scores)`` where ``head_scores[n]`` lists the
    held-out score sequences of head ``n``.
    """
    if plans is None:
        plans = {m.video_id: candidate_positions(m, n) for m, _ in records}
    if labels is None:
        labels = {
            m.video_id: make_cascade_labels(plans[m.video_id], a, m, cfg.cascade, merge_mode, norm)
            for m, a in records
        }
    train_ids, test_ids = split_videos([m.video_id for m, _ in records], holdout)
    by_id = {m.video_id: (m, a) for m, a in records}
    train_recs = [by_id[v] for v in train_ids]
    test_recs = [by_id[v] for v in test_ids] if test_ids else train_recs
    x, y = build_training_set(train_recs, plans, labels, cfg.dim, feature_seed)
    heads, log = train_cascade(x, y, cfg)
    return heads, log, score_videos(heads, test_recs, plans, cfg.dim, feature_seed)


def labels_from_objs(objs) -> dict[str, LabelSequence]:
    return {o["video_id"]: LabelSequence.from_obj(o) for o in objs}
