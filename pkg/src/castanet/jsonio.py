"""JSON Lines readers and writers for every artifact the toolkit exchanges.

Schemas (one JSON object per line unless noted):

annotations
    ``{"video_id": str, "fps": number, "num_frames": int,
    "annotators": [[seconds, ...], ...]}``
scores
    ``{"video_id": str, "timestamps": [seconds, ...], "scores": [p, ...]}``
plan
    ``{"video_id": str, "stride_frames": int, "candidate_times": [...],
    "windows": [[frame, ...], ...]}``
labels
    ``{"video_id": str, "candidate_times": [...], "stage_labels": [[0|1, ...], ...]}``
predictions
    ``{"video_id": str, "boundaries": [seconds, ...]}``
report
    a single JSON document ``{"0.05": {"precision", "recall", "f1"}, ...}``

Floats are written with :func:`repr` precision, so save-then-load is the
identity for every finite value.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterable, Iterator

from .errors import ParseError, ValidationError
from .records import AnnotationSet, EvalReport, ScoreSequence, VideoMeta, validate_boundaries

ANNOTATION_FIELDS = frozenset({"video_id", "fps", "num_frames", "annotators"})
SCORE_FIELDS = frozenset({"video_id", "timestamps", "scores"})
PRED_FIELDS = frozenset({"video_id", "boundaries"})


def iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, object)`` for each non-blank line of ``path``."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"malformed JSON ({exc.msg})", path, lineno) from None
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", path, lineno)
            yield lineno, obj


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_jsonl(path, records: Iterable[dict]) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps(rec))
            fh.write("\n")
    os.replace(tmp, path)


def _check_fields(obj, expected, lineno, path):
    keys = set(obj)
    missing = expected - keys
    extra = keys - expected
    vid = obj.get("video_id")
    if missing:
        raise ValidationError(f"missing field(s) {sorted(missing)} (line {lineno})", vid,
                              sorted(missing)[0])
    if extra:
        raise ValidationError(f"unexpected field(s) {sorted(extra)} (line {lineno})", vid,
                              sorted(extra)[0])


def annotation_from_obj(obj, lineno=None, path=None) -> tuple[VideoMeta, AnnotationSet]:
    _check_fields(obj, ANNOTATION_FIELDS, lineno, path)
    meta = VideoMeta(obj["video_id"], obj["fps"], obj["num_frames"])
    ann = AnnotationSet(meta.video_id, obj["annotators"], duration_sec=meta.duration_sec)
    return meta, ann


def annotation_to_obj(meta: VideoMeta, ann: AnnotationSet) -> dict:
    return {
        "video_id": meta.video_id,
        "fps": meta.fps,
        "num_frames": meta.num_frames,
        "annotators": [list(a) for a in ann.annotators],
    }


def load_annotations(path) -> list[tuple[VideoMeta, AnnotationSet]]:
    """Read an annotations file, preserving line order."""
    out = []
    seen = set()
    for lineno, obj in iter_jsonl(path):
        meta, ann = annotation_from_obj(obj, lineno, path)
        if meta.video_id in seen:
            raise ValidationError(f"duplicate record (line {lineno})", meta.video_id, "video_id")
        seen.add(meta.video_id)
        out.append((meta, ann))
    return out


def save_annotations(records, path) -> None:
    write_jsonl(path, (annotation_to_obj(m, a) for m, a in records))


def score_from_obj(obj, lineno=None, path=None) -> ScoreSequence:
    _check_fields(obj, SCORE_FIELDS, lineno, path)
    return ScoreSequence(obj["video_id"], obj["timestamps"], obj["scores"])


def score_to_obj(seq: ScoreSequence) -> dict:
    return {"video_id": seq.video_id, "timestamps": list(seq.timestamps), "scores": list(seq.scores)}


def load_scores(path) -> list[ScoreSequence]:
    return [score_from_obj(obj, lineno, path) for lineno, obj in iter_jsonl(path)]


def save_scores(seqs: Iterable[ScoreSequence], path) -> None:
    write_jsonl(path, (score_to_obj(s) for s in seqs))


def load_predictions(path) -> list[tuple[str, tuple[float, ...]]]:
    out = []
    for lineno, obj in iter_jsonl(path):
        _check_fields(obj, PRED_FIELDS, lineno, path)
        vid = obj["video_id"]
        if not isinstance(vid, str) or not vid:
            raise ValidationError("video_id must be a non-empty string", vid, "video_id")
        out.append((vid, validate_boundaries(obj["boundaries"], None, vid, "boundaries")))
    return out


def save_predictions(preds: Iterable[tuple[str, Iterable[float]]], path) -> None:
    write_jsonl(path, ({"video_id": vid, "boundaries": list(b)} for vid, b in preds))


def report_to_json(report: EvalReport, include_videos=False) -> str:
    return json.dumps(report.to_dict(include_videos), indent=2, sort_keys=False) + "\n"


def save_report(report: EvalReport, path, include_videos=False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report, include_videos))


def load_json(path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON ({exc.msg})", path, exc.lineno) from None
