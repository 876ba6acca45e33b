import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from castanet.errors import ConfigurationError, ParseError, ValidationError
from castanet.jsonio import (
    load_annotations,
    load_predictions,
    load_scores,
    save_annotations,
    save_predictions,
    save_scores,
)
from castanet.records import (
    PRF,
    AnnotationSet,
    CascadeConfig,
    ScoreSequence,
    VideoMeta,
    f1_score,
)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


def test_load_annotations_basic(tmp_path):
    p = write_lines(tmp_path / "a.jsonl", [
        '{"video_id":"v1","fps":30.0,"num_frames":300,"annotators":[[2.5,7.0]]}',
        '{"video_id":"v2","fps":25,"num_frames":250,"annotators":[[]]}',
    ])
    recs = load_annotations(p)
    meta, ann = recs[0]
    assert meta == VideoMeta("v1", 30.0, 300)
    assert ann.annotators == ((2.5, 7.0),)
    assert meta.duration_sec == 10.0
    assert [m.video_id for m, _ in recs] == ["v1", "v2"]
    assert recs[1][1].annotators == ((),)


def test_unsorted_boundaries_rejected(tmp_path):
    p = write_lines(tmp_path / "a.jsonl", [
        '{"video_id":"v1","fps":30.0,"num_frames":300,"annotators":[[7.0,2.5]]}',
    ])
    with pytest.raises(ValidationError, match="timestamps not strictly increasing") as exc:
        load_annotations(p)
    assert exc.value.video_id == "v1"
    assert exc.value.field == "annotators[0]"


def test_malformed_json_reports_line(tmp_path):
    p = write_lines(tmp_path / "a.jsonl", [
        '{"video_id":"v1","fps":30.0,"num_frames":300,"annotators":[[1.0]]}',
        '{"video_id": "v2", ',
    ])
    with pytest.raises(ParseError) as exc:
        load_annotations(p)
    assert exc.value.lineno == 2


@pytest.mark.parametrize("line, field", [
    ('{"video_id":"v","fps":0,"num_frames":10,"annotators":[[]]}', "fps"),
    ('{"video_id":"v","fps":30,"num_frames":0,"annotators":[[]]}', "num_frames"),
    ('{"video_id":"v","fps":30,"num_frames":2.5,"annotators":[[]]}', "num_frames"),
    ('{"video_id":"v","fps":30,"num_frames":30,"annotators":[]}', "annotators"),
    ('{"video_id":"v","fps":30,"num_frames":30,"annotators":[[1.5]]}', "annotators[0]"),
    ('{"video_id":"v","fps":30,"num_frames":30,"annotators":[[0.5,0.5]]}', "annotators[0]"),
    ('{"video_id":"v","fps":30,"num_frames":30}', "annotators"),
    ('{"video_id":"v","fps":30,"num_frames":30,"annotators":[[]],"x":1}', "x"),
])
def test_annotation_invariants(tmp_path, line, field):
    p = write_lines(tmp_path / "a.jsonl", [line])
    with pytest.raises(ValidationError) as exc:
        load_annotations(p)
    assert exc.value.field == field


def test_scores_load_and_validate(tmp_path):
    p = write_lines(tmp_path / "s.jsonl", ['{"video_id":"v1","timestamps":[0.5,1.0],"scores":[0.2,0.9]}'])
    (seq,) = load_scores(p)
    assert len(seq) == 2 and seq.scores == (0.2, 0.9)

    bad = write_lines(tmp_path / "b.jsonl", ['{"video_id":"v1","timestamps":[0.5],"scores":[1.2]}'])
    with pytest.raises(ValidationError, match="outside"):
        load_scores(bad)
    bad = write_lines(tmp_path / "c.jsonl", ['{"video_id":"v1","timestamps":[1.0,0.5],"scores":[0,0]}'])
    with pytest.raises(ValidationError, match="strictly increasing"):
        load_scores(bad)
    bad = write_lines(tmp_path / "d.jsonl", ['{"video_id":"v1","timestamps":[1.0],"scores":[0,0]}'])
    with pytest.raises(ValidationError):
        load_scores(bad)


def test_scores_round_trip_three_records(tmp_path):
    lines = [
        '{"video_id":"a","timestamps":[0.1,0.2,0.30000000000000004],"scores":[0.0,0.5,1.0]}',
        '{"video_id":"b","timestamps":[],"scores":[]}',
        '{"video_id":"c","timestamps":[1e-9,3.14159],"scores":[0.123456789012345,0.7]}',
    ]
    src = write_lines(tmp_path / "x.jsonl", lines)
    out = tmp_path / "y.jsonl"
    save_scores(load_scores(src), out)
    assert load_scores(out) == load_scores(src)
    assert [json.loads(l) for l in out.read_text().splitlines()] == [json.loads(l) for l in lines]


finite_times = st.lists(st.floats(0, 1e4, allow_nan=False), unique=True, max_size=20).map(sorted)


@settings(max_examples=100, deadline=None)
@given(data=st.data(), times=finite_times)
def test_scores_round_trip_property(tmp_path_factory, data, times):
    scores = data.draw(st.lists(st.floats(0, 1), min_size=len(times), max_size=len(times)))
    seq = ScoreSequence("v", times, scores)
    path = tmp_path_factory.mktemp("rt") / "s.jsonl"
    save_scores([seq], path)
    assert load_scores(path) == [seq]


def test_annotations_and_predictions_round_trip(tmp_path):
    recs = [(VideoMeta("v1", 29.97, 300), AnnotationSet("v1", [[0.1, 5.000000000000001], []]))]
    save_annotations(recs, tmp_path / "a.jsonl")
    assert load_annotations(tmp_path / "a.jsonl") == recs
    save_predictions([("v1", (1.0, 2.5))], tmp_path / "p.jsonl")
    assert load_predictions(tmp_path / "p.jsonl") == [("v1", (1.0, 2.5))]


def test_cascade_config_validation():
    cfg = CascadeConfig((0.5, 0.4, 0.3), (0.3, 0.4))
    assert cfg.num_heads == 3
    with pytest.raises(ConfigurationError):
        CascadeConfig((0.3, 0.5), (0.4,))
    with pytest.raises(ConfigurationError):
        CascadeConfig((0.5, 0.4), (0.4, 0.3))
    with pytest.raises(ConfigurationError):
        CascadeConfig((0.0,), ())
    with pytest.raises(ConfigurationError):
        CascadeConfig((0.5, 0.4, 0.3), (0.4, 0.3), tau_order="increasing")
    with pytest.warns(UserWarning, match="not strictly increasing"):
        CascadeConfig((0.5, 0.4, 0.3), (0.4, 0.3))


def test_f1_formula():
    assert f1_score(0, 0) == 0
    assert f1_score(1, 1) == 1
    assert f1_score(0.5, 1.0) == pytest.approx(2 / 3)
    assert f1_score(0.3, 0.8) == f1_score(0.8, 0.3)
    with pytest.raises(ValidationError):
        PRF(1.2, 0.5, 0.5)
