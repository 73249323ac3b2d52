// Single source of truth for the three coordinated views.
//
// Every view derives from this state: the overlap view always shows frame
// `t`, the separate view always shows the selected segment's range, and
// `segment` always equals floor(t / window).

export const DEFAULT_JOINT = 15; // left_ankle, the headline demonstration joint

export interface UiState {
  clipId: string;
  frameCount: number;
  fps: number;
  window: number;
  t: number;
  segment: number;
  selectedJoint: number;
  playing: boolean;
  playbackRate: number;
}

export type TransportAction =
  | { kind: "play" }
  | { kind: "pause" }
  | { kind: "step_fwd" }
  | { kind: "step_back" }
  | { kind: "fast_fwd" }
  | { kind: "fast_back" }
  | { kind: "slider"; t: number }
  | { kind: "tick" };

export function segmentForFrame(t: number, window: number): number {
  return Math.floor(t / window);
}

export function segmentCount(frameCount: number, window: number): number {
  return Math.ceil(frameCount / window);
}

export function initialState(
  clip: { clipId: string; frameCount: number; fps: number },
  window = 8,
): UiState {
  return {
    clipId: clip.clipId,
    frameCount: clip.frameCount,
    fps: clip.fps,
    window,
    t: 0,
    segment: 0,
    selectedJoint: DEFAULT_JOINT,
    playing: false,
    playbackRate: 1,
  };
}

function clampFrame(state: UiState, t: number): number {
  return Math.min(Math.max(t, 0), state.frameCount - 1);
}

function withFrame(state: UiState, t: number): UiState {
  const clamped = clampFrame(state, t);
  return { ...state, t: clamped, segment: segmentForFrame(clamped, state.window) };
}

export function transport(state: UiState, action: TransportAction): UiState {
  switch (action.kind) {
    case "play":
      return { ...state, playing: !state.playing };
    case "pause":
      return { ...state, playing: false };
    case "step_fwd":
      return withFrame(state, state.t + 1);
    case "step_back":
      return withFrame(state, state.t - 1);
    case "fast_fwd":
      return withFrame(state, state.frameCount - 1);
    case "fast_back":
      return withFrame(state, 0);
    case "slider":
      return withFrame(state, action.t);
    case "tick": {
      if (!state.playing) return state;
      if (state.t >= state.frameCount - 1) return { ...state, playing: false };
      return withFrame(state, state.t + 1);
    }
  }
}

// Clicking a segment thumbnail selects it; the frame snaps to the segment
// start only when it is not already inside, keeping segment == floor(t/window).
export function selectSegment(state: UiState, segment: number): UiState {
  const clamped = Math.min(Math.max(segment, 0), segmentCount(state.frameCount, state.window) - 1);
  if (segmentForFrame(state.t, state.window) === clamped) {
    return { ...state, segment: clamped };
  }
  return withFrame(state, clamped * state.window);
}

export function selectJoint(state: UiState, joint: number): UiState {
  if (joint < 0 || joint > 16) return state;
  return { ...state, selectedJoint: joint };
}

// Derived bindings consumed by the views.

export function overlapFrame(state: UiState): number {
  return state.t;
}

export function segmentRange(state: UiState, segment: number): [number, number] {
  const start = segment * state.window;
  return [start, Math.min(start + state.window, state.frameCount)];
}

export function separateRange(state: UiState): [number, number] {
  return segmentRange(state, state.segment);
}
