/**
 * Canvas scene viewer: objects render as labeled placeholder boxes (from
 * catalog bounds when known, unit cubes otherwise) over a ground grid, with
 * orbit / pan / zoom camera controls. No WebGL — a plain perspective
 * projection keeps the client dependency-free and testable.
 */

import { OrbitCamera } from "./camera.js";
import { Quaternion, Scene, Vec3 } from "./model.js";

export type BoundsLookup = (assetKey: string) => [Vec3, Vec3];

export const UNIT_CUBE: [Vec3, Vec3] = [
  [-0.5, -0.5, -0.5],
  [0.5, 0.5, 0.5],
];

function rotate(q: Quaternion, v: Vec3): Vec3 {
  const [w, x, y, z] = q;
  return [
    (1 - 2 * (y * y + z * z)) * v[0] + 2 * (x * y - w * z) * v[1] + 2 * (x * z + w * y) * v[2],
    2 * (x * y + w * z) * v[0] + (1 - 2 * (x * x + z * z)) * v[1] + 2 * (y * z - w * x) * v[2],
    2 * (x * z - w * y) * v[0] + 2 * (y * z + w * x) * v[1] + (1 - 2 * (x * x + y * y)) * v[2],
  ];
}

const BOX_EDGES: [number, number][] = [
  [0, 1], [0, 2], [1, 3], [2, 3],
  [4, 5], [4, 6], [5, 7], [6, 7],
  [0, 4], [1, 5], [2, 6], [3, 7],
];

export function boxCorners(bounds: [Vec3, Vec3]): Vec3[] {
  const [lo, hi] = bounds;
  const corners: Vec3[] = [];
  for (const x of [lo[0], hi[0]]) {
    for (const y of [lo[1], hi[1]]) {
      for (const z of [lo[2], hi[2]]) {
        corners.push([x, y, z]);
      }
    }
  }
  return corners;
}

export interface ViewerCallbacks {
  onSelect?: (objectId: string | null) => void;
  onDragObject?: (objectId: string, dxPixels: number, dyPixels: number, elevate: boolean) => void;
  onWheelObject?: (objectId: string, factor: number) => void;
  onRotateObject?: (objectId: string, angle: number) => void;
}

export class SceneViewer {
  readonly camera = new OrbitCamera();
  private scene: Scene = { sceneId: "", objects: [] };
  private bounds: BoundsLookup = () => UNIT_CUBE;
  private selected: string | null = null;
  private editable = false;

  constructor(
    private canvas: HTMLCanvasElement,
    private callbacks: ViewerCallbacks = {}
  ) {
    this.attachInput();
  }

  setScene(scene: Scene, bounds?: BoundsLookup): void {
    this.scene = scene;
    if (bounds) this.bounds = bounds;
    this.draw();
  }

  setSelected(objectId: string | null): void {
    this.selected = objectId;
    this.draw();
  }

  setEditable(editable: boolean): void {
    this.editable = editable;
  }

  /** Nearest projected object center within a pixel threshold. */
  pick(px: number, py: number): string | null {
    const { width, height } = this.canvas;
    let best: string | null = null;
    let bestDistance = 28;
    for (const obj of this.scene.objects) {
      const projected = this.camera.project(obj.transform.position, width, height);
      if (!projected) continue;
      const distance = Math.hypot(projected[0] - px, projected[1] - py);
      if (distance < bestDistance) {
        bestDistance = distance;
        best = obj.objectId;
      }
    }
    return best;
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, width, height);
    this.drawGrid(ctx, width, height);

    const ordered = [...this.scene.objects]
      .map((obj) => ({ obj, depth: this.camera.project(obj.transform.position, width, height)?.[2] ?? Infinity }))
      .sort((a, b) => b.depth - a.depth);

    for (const { obj } of ordered) {
      const t = obj.transform;
      const corners = boxCorners(this.bounds(obj.assetKey)).map((c) => {
        const scaled: Vec3 = [c[0] * t.scale, c[1] * t.scale, c[2] * t.scale];
        const rotated = rotate(t.rotation, scaled);
        return this.camera.project(
          [rotated[0] + t.position[0], rotated[1] + t.position[1], rotated[2] + t.position[2]],
          width,
          height
        );
      });
      const isSelected = obj.objectId === this.selected;
      ctx.strokeStyle = isSelected ? "#ffd166" : "#4cc9f0";
      ctx.lineWidth = isSelected ? 2.5 : 1.2;
      ctx.beginPath();
      for (const [a, b] of BOX_EDGES) {
        const pa = corners[a];
        const pb = corners[b];
        if (!pa || !pb) continue;
        ctx.moveTo(pa[0], pa[1]);
        ctx.lineTo(pb[0], pb[1]);
      }
      ctx.stroke();

      const anchor = this.camera.project(t.position, width, height);
      if (anchor) {
        ctx.fillStyle = isSelected ? "#ffd166" : "#e7ecef";
        ctx.font = "12px system-ui, sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(obj.displayName, anchor[0], anchor[1] + 4);
        if (obj.dialog) {
          const at = this.camera.project(
            [
              t.position[0] + obj.dialog.offset[0],
              t.position[1] + obj.dialog.offset[1],
              t.position[2] + obj.dialog.offset[2],
            ],
            width,
            height
          );
          if (at) this.drawBalloon(ctx, obj.dialog.text, at[0], at[1]);
        }
      }
    }
  }

  private drawBalloon(ctx: CanvasRenderingContext2D, text: string, x: number, y: number): void {
    ctx.font = "11px system-ui, sans-serif";
    const w = ctx.measureText(text).width + 12;
    ctx.fillStyle = "rgba(255,255,255,0.92)";
    ctx.beginPath();
    ctx.roundRect(x - w / 2, y - 26, w, 18, 6);
    ctx.fill();
    ctx.fillStyle = "#1d3557";
    ctx.textAlign = "center";
    ctx.fillText(text, x, y - 13);
  }

  private drawGrid(ctx: CanvasRenderingContext2D, width: number, height: number): void {
    ctx.strokeStyle = "rgba(128, 150, 170, 0.35)";
    ctx.lineWidth = 1;
    const extent = 5;
    for (let i = -extent; i <= extent; i++) {
      this.drawSegment(ctx, [i, 0, -extent], [i, 0, extent], width, height);
      this.drawSegment(ctx, [-extent, 0, i], [extent, 0, i], width, height);
    }
    ctx.strokeStyle = "#c0392b";
    this.drawSegment(ctx, [0, 0, 0], [1, 0, 0], width, height);
    ctx.strokeStyle = "#2980b9";
    this.drawSegment(ctx, [0, 0, 0], [0, 0, 1], width, height);
  }

  private drawSegment(ctx: CanvasRenderingContext2D, a: Vec3, b: Vec3, width: number, height: number): void {
    const pa = this.camera.project(a, width, height);
    const pb = this.camera.project(b, width, height);
    if (!pa || !pb) return;
    ctx.beginPath();
    ctx.moveTo(pa[0], pa[1]);
    ctx.lineTo(pb[0], pb[1]);
    ctx.stroke();
  }

  private attachInput(): void {
    let dragging: "orbit" | "pan" | "object" | "rotate" | null = null;
    let lastX = 0;
    let lastY = 0;

    this.canvas.addEventListener("pointerdown", (event) => {
      this.canvas.setPointerCapture(event.pointerId);
      lastX = event.offsetX;
      lastY = event.offsetY;
      const hit = this.pick(event.offsetX, event.offsetY);
      if (this.editable && hit !== null) {
        // tap selects; dragging a selected object moves it
        this.callbacks.onSelect?.(hit);
        dragging = event.ctrlKey ? "rotate" : "object";
      } else if (event.button === 2 || event.shiftKey) {
        dragging = "pan";
      } else {
        if (this.editable && hit === null) this.callbacks.onSelect?.(null);
        dragging = "orbit";
      }
    });

    this.canvas.addEventListener("pointermove", (event) => {
      if (dragging === null) return;
      const dx = event.offsetX - lastX;
      const dy = event.offsetY - lastY;
      lastX = event.offsetX;
      lastY = event.offsetY;
      if (dragging === "orbit") {
        this.camera.orbit(-dx * 0.008, dy * 0.006);
      } else if (dragging === "pan") {
        this.camera.pan(dx, dy);
      } else if (dragging === "object" && this.selected !== null) {
        // plain drag translates on the plane; alt-drag elevates
        this.callbacks.onDragObject?.(this.selected, dx, dy, event.altKey);
      } else if (dragging === "rotate" && this.selected !== null) {
        this.callbacks.onRotateObject?.(this.selected, -dx * 0.01);
      }
      this.draw();
    });

    const stop = () => {
      dragging = null;
    };
    this.canvas.addEventListener("pointerup", stop);
    this.canvas.addEventListener("pointercancel", stop);
    this.canvas.addEventListener("contextmenu", (event) => event.preventDefault());

    this.canvas.addEventListener(
      "wheel",
      (event) => {
        event.preventDefault();
        const factor = Math.exp(-event.deltaY * 0.0012);
        if (this.editable && this.selected !== null) {
          this.callbacks.onWheelObject?.(this.selected, factor);
        } else {
          this.camera.zoom(1 / factor);
        }
        this.draw();
      },
      { passive: false }
    );
  }
}
