/** Orbit camera with a perspective projection onto canvas pixels. */

import { Vec3 } from "./model.js";

export class OrbitCamera {
  yaw = 0.7;
  pitch = 0.5; // radians above the horizon
  distance = 6;
  target: Vec3 = [0, 0, 0];
  fovY = (55 * Math.PI) / 180;

  position(): Vec3 {
    const cp = Math.cos(this.pitch);
    return [
      this.target[0] + this.distance * cp * Math.sin(this.yaw),
      this.target[1] + this.distance * Math.sin(this.pitch),
      this.target[2] + this.distance * cp * Math.cos(this.yaw),
    ];
  }

  orbit(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    this.pitch = Math.min(Math.max(this.pitch + dPitch, -1.4), 1.5);
  }

  pan(dx: number, dy: number): void {
    // move the target in the camera's screen plane
    const right: Vec3 = [Math.cos(this.yaw), 0, -Math.sin(this.yaw)];
    const scale = this.distance * 0.0022;
    this.target = [
      this.target[0] - right[0] * dx * scale,
      this.target[1] + dy * scale,
      this.target[2] - right[2] * dx * scale,
    ];
  }

  zoom(factor: number): void {
    this.distance = Math.min(Math.max(this.distance * factor, 0.5), 80);
  }

  /** World point -> [pixelX, pixelY, depth] or null when behind the eye. */
  project(point: Vec3, width: number, height: number): [number, number, number] | null {
    const eye = this.position();
    const d: Vec3 = [point[0] - eye[0], point[1] - eye[1], point[2] - eye[2]];
    // camera basis: forward toward the target
    const fLen = Math.hypot(this.target[0] - eye[0], this.target[1] - eye[1], this.target[2] - eye[2]);
    const f: Vec3 = [
      (this.target[0] - eye[0]) / fLen,
      (this.target[1] - eye[1]) / fLen,
      (this.target[2] - eye[2]) / fLen,
    ];
    const worldUp: Vec3 = [0, 1, 0];
    let r: Vec3 = [
      f[1] * worldUp[2] - f[2] * worldUp[1],
      f[2] * worldUp[0] - f[0] * worldUp[2],
      f[0] * worldUp[1] - f[1] * worldUp[0],
    ];
    const rLen = Math.hypot(r[0], r[1], r[2]) || 1;
    r = [r[0] / rLen, r[1] / rLen, r[2] / rLen];
    const u: Vec3 = [
      r[1] * f[2] - r[2] * f[1],
      r[2] * f[0] - r[0] * f[2],
      r[0] * f[1] - r[1] * f[0],
    ];
    const x = d[0] * r[0] + d[1] * r[1] + d[2] * r[2];
    const y = d[0] * u[0] + d[1] * u[1] + d[2] * u[2];
    const z = d[0] * f[0] + d[1] * f[1] + d[2] * f[2];
    if (z <= 0.05) return null;
    const focal = height / 2 / Math.tan(this.fovY / 2);
    return [width / 2 + (x / z) * focal, height / 2 - (y / z) * focal, z];
  }

  /** Pixel delta -> ground-plane (y = planeY) translation for drag edits. */
  dragOnGround(dxPixels: number, dyPixels: number, height: number, planeY = 0): [number, number] {
    const eyeHeight = Math.max(this.position()[1] - planeY, 0.3);
    const focal = height / 2 / Math.tan(this.fovY / 2);
    const metersPerPixel = eyeHeight / focal / Math.max(Math.sin(this.pitch), 0.2);
    const right = [Math.cos(this.yaw), -Math.sin(this.yaw)];
    const forward = [-Math.sin(this.yaw), -Math.cos(this.yaw)];
    return [
      dxPixels * metersPerPixel * right[0] - dyPixels * metersPerPixel * forward[0],
      dxPixels * metersPerPixel * right[1] - dyPixels * metersPerPixel * forward[1],
    ];
  }
}
