/**
 * Client-side mirrors of the story types plus the shared numeric rules:
 * quantization to the wire grids and the gesture semantics (including the
 * [0.01, 100] scale clamp), kept bit-compatible with the repository's
 * canonical encoder.
 */

export type Vec3 = [number, number, number];
export type Quaternion = [number, number, number, number]; // (w, x, y, z)

export interface Transform {
  position: Vec3;
  rotation: Quaternion;
  scale: number;
}

export interface DialogBalloon {
  text: string;
  offset: Vec3;
}

export interface PlacedObject {
  objectId: string;
  assetKey: string;
  displayName: string;
  transform: Transform;
  groupId: string | null;
  dialog: DialogBalloon | null;
}

export interface Scene {
  sceneId: string;
  objects: PlacedObject[];
}

export interface PlacementHints {
  surfaceClass: string;
  minExtents: [number, number] | null;
  note: string;
}

export interface StoryMetadata {
  creator: string;
  title: string;
  description: string;
  originalCreator: string;
  createdAt: number;
  parentStory: string | null;
  placementHints: PlacementHints | null;
  formatVersion: [number, number];
}

export interface Story {
  metadata: StoryMetadata;
  scenes: Scene[];
}

export interface StoryListing {
  storyId: string;
  title: string;
  creator: string;
  originalCreator: string;
  description: string;
  sceneCount: number;
  createdAt: number;
  parentStory: string | null;
  viewCount: number;
}

export interface AssetResult {
  assetKey: string;
  displayName: string;
  tags: string[];
  blobSize: number;
  /** local AABB in micrometers: [[min x,y,z], [max x,y,z]] */
  boundsUm: [number[], number[]];
}

export const MIN_SCALE = 0.01;
export const MAX_SCALE = 100.0;

/** Banker's rounding, matching the repository encoder exactly. */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function quantizeLength(x: number): number {
  return roundHalfEven(x * 1e6) / 1e6;
}

export function quantizeVec3(v: Vec3): Vec3 {
  return [quantizeLength(v[0]), quantizeLength(v[1]), quantizeLength(v[2])];
}

export function quantizeQuaternion(q: Quaternion): Quaternion {
  const norm = Math.hypot(q[0], q[1], q[2], q[3]);
  if (norm === 0 || !Number.isFinite(norm)) {
    throw new Error("rotation must have a finite nonzero norm");
  }
  const grid = q.map((c) => roundHalfEven(c * 1e9) / 1e9);
  const onGrid = grid.every((c, i) => c === q[i]);
  // near-unit windows mirror the server: keeps quantization idempotent and
  // decoded packages byte-stable
  if (onGrid && Math.abs(norm - 1) <= 4e-9) return q.slice() as Quaternion;
  const source = Math.abs(norm - 1) > 2e-9 ? (q.map((c) => c / norm) as Quaternion) : q;
  return source.map((c) => roundHalfEven(c * 1e9) / 1e9) as Quaternion;
}

export function clampScale(s: number): number {
  return Math.min(Math.max(s, MIN_SCALE), MAX_SCALE);
}

export function quantizeScale(s: number): number {
  return roundHalfEven(s * 1e6) / 1e6;
}

export function quantizeTransform(t: Transform): Transform {
  return {
    position: quantizeVec3(t.position),
    rotation: quantizeQuaternion(t.rotation),
    scale: quantizeScale(t.scale),
  };
}

export function identityTransform(): Transform {
  return { position: [0, 0, 0], rotation: [1, 0, 0, 0], scale: 1 };
}

export function quaternionFromYaw(angle: number): Quaternion {
  return [Math.cos(angle / 2), 0, Math.sin(angle / 2), 0];
}

function quaternionMultiply(a: Quaternion, b: Quaternion): Quaternion {
  const [aw, ax, ay, az] = a;
  const [bw, bx, by, bz] = b;
  return [
    aw * bw - ax * bx - ay * by - az * bz,
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
  ];
}

export type Gesture =
  | { kind: "translate"; du: number; dv: number }
  | { kind: "elevate"; dy: number }
  | { kind: "rotateYaw"; angle: number }
  | { kind: "scaleBy"; factor: number };

/** One touch gesture applied to a transform; mirrors the server rules. */
export function applyGesture(t: Transform, gesture: Gesture): Transform {
  switch (gesture.kind) {
    case "translate":
      return quantizeTransform({
        ...t,
        position: [t.position[0] + gesture.du, t.position[1], t.position[2] + gesture.dv],
      });
    case "elevate":
      return quantizeTransform({
        ...t,
        position: [t.position[0], t.position[1] + gesture.dy, t.position[2]],
      });
    case "rotateYaw":
      return quantizeTransform({
        ...t,
        rotation: quaternionMultiply(quaternionFromYaw(gesture.angle), t.rotation),
      });
    case "scaleBy": {
      if (!(gesture.factor > 0) || !Number.isFinite(gesture.factor)) {
        throw new Error(`scale factor must be positive and finite, got ${gesture.factor}`);
      }
      return quantizeTransform({ ...t, scale: clampScale(t.scale * gesture.factor) });
    }
  }
}

export function randomId(): string {
  const bytes = new Uint8Array(16);
  crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

export function cloneStory(story: Story): Story {
  return JSON.parse(JSON.stringify(story)) as Story;
}

export function* iterObjects(story: Story): Generator<PlacedObject> {
  for (const scene of story.scenes) {
    yield* scene.objects;
  }
}

export function findObject(story: Story, objectId: string): PlacedObject | null {
  for (const obj of iterObjects(story)) {
    if (obj.objectId === objectId) return obj;
  }
  return null;
}
