"""Workbench for crafting and analyzing pixel-space adversarial attacks on
skeleton-based action recognition: composed detector/classifier models, the
signed-gradient attack, joint-displacement anomaly metrics, persistence, an
HTTP service and a CLI."""

from .attack import (
    AttackConfig,
    AttackEvaluation,
    AttackRecord,
    clamp_clip,
    evaluate_attack,
    fgm_attack,
)
from .core_types import (
    KEYPOINT_NAMES,
    NUM_JOINTS,
    Frame,
    Joint,
    LabelDistribution,
    Pose,
    SkeletonSequence,
    ValidationIssue,
    ValidationReport,
    VideoClip,
    joint_index,
    validate_sequence,
)
from .demo import build_demo_session
from .metrics import (
    DisplacementSeries,
    SegmentSummary,
    SpikeReport,
    detect_spikes,
    deviation_series,
    displacement_series,
    per_joint_displacement,
    segment_summaries,
)
from .models import (
    EndToEndModel,
    ExternalAdapterConfig,
    ExternalPoseAdapter,
    GradientClip,
    LossSpec,
    ToyLinearActionClassifier,
    ToyLinearPoseDetector,
    ToySoftargmaxPoseDetector,
    end_to_end_forward,
    end_to_end_input_gradient,
    external_detect_sequence,
    finite_difference_gradient,
    toy_classify,
    toy_detect_pose,
)
from .store import (
    AnalysisSession,
    SessionManifest,
    SessionStore,
    ingest_frames,
    load_session,
    render_thumbnail,
    save_session,
)
from .viewmodel import (
    MonitorPayload,
    OverlapPayload,
    TrajectoryPoint,
    monitor_payload,
    overlap_payload,
    trajectory_points,
)

__version__ = "0.1.0"
