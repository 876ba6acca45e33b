"""Generic event boundary detection toolkit.

Dynamic sampling, cascaded Rel.Dis. labels, cascade score fusion,
ensembling, watershed boundary extraction, multi-annotator F1 evaluation,
and a small numpy temporal attention network with exact gradients.
"""

__version__ = "0.1.0"

from .cascade import HeadScores, cascade_selection, ensemble, fuse_heads
from .evaluate import evaluate, match_count, score_video
from .labeling import make_cascade_labels, make_labels, rel_dis
from .postprocess import watershed
from .records import AnnotationSet, CascadeConfig, EvalReport, ScoreSequence, VideoMeta
from .sampling import SamplePlan, candidate_positions, sampling_stride

__all__ = [
    "AnnotationSet",
    "CascadeConfig",
    "EvalReport",
    "HeadScores",
    "SamplePlan",
    "ScoreSequence",
    "VideoMeta",
    "candidate_positions",
    "cascade_selection",
    "ensemble",
    "evaluate",
    "fuse_heads",
    "make_cascade_labels",
    "make_labels",
    "match_count",
    "rel_dis",
    "sampling_stride",
    "score_video",
    "watershed",
]
