from importlib import resources

import numpy as np

from castanet import jsonio
from castanet.sampling import candidate_positions, sampling_stride
from castanet.tempnet.synth import FPS_CHOICES, gather_windows, make_dataset, render_features


def test_bundled_file_is_regenerable(tmp_path):
    bundled = resources.files("castanet").joinpath("data/synthetic_annotations.jsonl").read_bytes()
    out = tmp_path / "a.jsonl"
    jsonio.save_annotations(make_dataset(200, seed=0), out)
    assert out.read_bytes() == bundled


def test_dataset_shape():
    recs = make_dataset(200, seed=0)
    assert len(recs) == 200
    assert len({m.video_id for m, _ in recs}) == 200
    for meta, ann in recs:
        assert meta.fps in FPS_CHOICES
        assert 8 <= meta.duration_sec <= 12 + 1 / meta.fps
        truth = ann.annotators[0]
        assert 1 <= len(truth) <= 3
        assert all(1.2 <= t <= meta.duration_sec - 1.2 for t in truth)
        assert all(b - a >= 3 for a, b in zip(truth, truth[1:]))


def test_features_deterministic_and_planted():
    meta, ann = make_dataset(5, seed=0)[2]
    f1 = render_features(meta, ann.annotators[0], dim=8, seed=0)
    f2 = render_features(meta, ann.annotators[0], dim=8, seed=0)
    assert np.array_equal(f1, f2)
    assert f1.shape == (meta.num_frames, 8)
    assert not np.array_equal(f1, render_features(meta, ann.annotators[0], dim=8, seed=1))
    plan = candidate_positions(meta, 8)
    w = gather_windows(f1, plan)
    assert w.shape == (len(plan.candidate_times), 16, 8)
    assert plan.stride_frames == sampling_stride(meta.fps)
