// Payload shapes as served by the skelespector HTTP API.

export type Variant = "benign" | "adversarial";

export interface Prediction {
  labels: string[];
  probabilities: number[];
  predicted: number;
  predicted_label: string;
}

export interface SessionDoc {
  clip_id: string;
  created_at: string;
  schema_version: number;
  fps: number;
  frame_count: number;
  height: number;
  width: number;
  channels: number;
  has_adversarial: boolean;
  joint_names: string[];
  labels: string[];
  benign_prediction: Prediction | null;
  adversarial_prediction: Prediction | null;
  attack: { epsilon: number; mode: string; reference_label: number; iterations: number } | null;
}

export interface ManifestEntry {
  clip_id: string;
  frame_count: number;
  height: number;
  width: number;
  channels: number;
  has_adversarial: boolean;
  labels: string[];
}

export interface Series {
  clip_id: string;
  variant: Variant;
  confidence_threshold: number;
  values: (number | null)[];
}

export interface Segment {
  segment_index: number;
  start: number;
  end: number;
  mean_displacement: number | null;
  max_displacement: number | null;
  thumbnail_frame: number;
}

export interface SpikeReport {
  flagged_transitions: number[];
  k: number;
  absolute_floor: number;
}

export interface MonitorPayload {
  clip_id: string;
  frame_count: number;
  window: number;
  benign_series: Series;
  adversarial_series: Series;
  segments: Segment[];
  spikes: SpikeReport;
  benign_prediction: Prediction;
  adversarial_prediction: Prediction;
}

// [x, y, confidence] per joint, 17 entries
export type PoseTriples = number[][];

export interface OverlapPayload {
  frame_index: number;
  benign_pose: PoseTriples;
  adversarial_pose: PoseTriples;
  image_variant: Variant;
}

export interface TrajectoryPoint {
  frame: number;
  x: number;
  y: number;
  alpha: number;
}
