"""Spatial reconstruction of scenes on physical planes.

Scene layouts are authored relative to an anchor; this module composes them
back into world space and implements the placement aids a viewer app needs:
plane fit checks, placement hint warnings, off-screen navigation arrows,
viewport clutter measurement, gesture-based transform edits, and draft
caching so a story survives losing the detected surface.

Scene-space conventions: object transforms live in the anchor frame; the
camera poses passed to :func:`navigation_hint` and :func:`clutter_ratio`
are expressed in that same frame (compose with the anchor first if the
camera is tracked in world space).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

from . import package
from .geometry import (
    quat_conjugate,
    quat_from_yaw,
    quat_multiply,
    quat_rotate,
    quat_to_matrix,
    vec_add,
    vec_scale,
    vec_sub,
)
from .model import (
    Aabb,
    AssetRef,
    CameraPose,
    ModelError,
    PlacedObject,
    Plane,
    PlacementHints,
    Scene,
    Story,
    SurfaceClass,
    Transform,
    Vec3,
)

BoundsFn = Callable[[AssetRef], Aabb]

CLUTTER_GRID = 64
# Fraction of viewport samples above which a scene counts as crowded enough
# to warn the creator.
CLUTTER_CROWDED_THRESHOLD = 0.6


def unit_cube_bounds(asset: AssetRef) -> Aabb:
    """Fallback bounds when no catalog metadata is available."""
    return Aabb()


@dataclass(frozen=True)
class AnchorPose:
    """Where a scene sits on a plane: offset within the extents plus a yaw
    about the plane normal."""

    plane: Plane
    position: tuple[float, float] = (0.0, 0.0)
    yaw: float = 0.0

    def __post_init__(self) -> None:
        u, v = (float(self.position[0]), float(self.position[1]))
        if not (math.isfinite(u) and math.isfinite(v)):
            raise ModelError("anchor position must be finite")
        half_w = self.plane.extents[0] / 2.0
        half_d = self.plane.extents[1] / 2.0
        if abs(u) > half_w or abs(v) > half_d:
            raise ModelError(f"anchor ({u}, {v}) outside plane extents {self.plane.extents}")
        if not math.isfinite(float(self.yaw)):
            raise ModelError("anchor yaw must be finite")
        object.__setattr__(self, "position", (u, v))
        object.__setattr__(self, "yaw", float(self.yaw))

    def world_rotation(self):
        return quat_from_yaw(self.plane.yaw + self.yaw)

    def world_position(self) -> Vec3:
        u, v = self.position
        offset = quat_rotate(quat_from_yaw(self.plane.yaw), (u, 0.0, v))
        return vec_add(self.plane.origin, offset)


@dataclass(frozen=True)
class Footprint:
    """Plane-projected bounding rectangle of a scene, in anchor-local meters."""

    min_u: float
    min_v: float
    max_u: float
    max_v: float

    def __post_init__(self) -> None:
        if self.min_u > self.max_u or self.min_v > self.max_v:
            raise ModelError("footprint min must not exceed max")

    @property
    def width(self) -> float:
        return self.max_u - self.min_u

    @property
    def depth(self) -> float:
        return self.max_v - self.min_v


@dataclass(frozen=True)
class NavigationHint:
    """Whether the scene is on screen, and if not, which way to turn."""

    in_view: bool
    arrow: Optional[tuple[float, float]] = None

    def __post_init__(self) -> None:
        if self.in_view and self.arrow is not None:
            raise ModelError("arrow must be absent when the scene is in view")
        if not self.in_view and self.arrow is None:
            raise ModelError("arrow is required when the scene is out of view")


@dataclass(frozen=True)
class FitResult:
    fits: bool
    margin: float


@dataclass(frozen=True)
class PlacementWarning:
    code: str
    detail: str


# Gestures mirror the touch vocabulary of in-situ AR editors: drag to
# translate, twist to rotate, pinch to scale, two-finger drag to elevate.


@dataclass(frozen=True)
class Translate:
    du: float
    dv: float


@dataclass(frozen=True)
class RotateYaw:
    angle: float


@dataclass(frozen=True)
class ScaleBy:
    factor: float


@dataclass(frozen=True)
class Elevate:
    dy: float


Gesture = Union[Translate, RotateYaw, ScaleBy, Elevate]


def compose(anchor: AnchorPose, local: Transform) -> Transform:
    """Apply the anchor's rigid motion to an anchor-local pose; scale is unchanged."""
    rotation = anchor.world_rotation()
    position = vec_add(anchor.world_position(), quat_rotate(rotation, local.position))
    return Transform(
        position=position,
        rotation=quat_multiply(rotation, local.rotation),
        scale=local.scale,
    )


def relative_to(anchor: AnchorPose, world: Transform) -> Transform:
    """Inverse of :func:`compose`: express a world pose in the anchor frame."""
    inverse = quat_conjugate(anchor.world_rotation())
    position = quat_rotate(inverse, vec_sub(world.position, anchor.world_position()))
    return Transform(
        position=position,
        rotation=quat_multiply(inverse, world.rotation),
        scale=world.scale,
    )


def object_footprint(obj: PlacedObject, bounds: BoundsFn = unit_cube_bounds) -> Footprint:
    """Plane projection of one object's scaled, rotated, translated box."""
    box = bounds(obj.asset)
    matrix = quat_to_matrix(obj.transform.rotation)
    scale = obj.transform.scale
    position = obj.transform.position
    min_u = min_v = math.inf
    max_u = max_v = -math.inf
    for corner in box.corners():
        scaled = (corner[0] * scale, corner[1] * scale, corner[2] * scale)
        world = vec_add(
            (
                matrix[0][0] * scaled[0] + matrix[0][1] * scaled[1] + matrix[0][2] * scaled[2],
                matrix[1][0] * scaled[0] + matrix[1][1] * scaled[1] + matrix[1][2] * scaled[2],
                matrix[2][0] * scaled[0] + matrix[2][1] * scaled[1] + matrix[2][2] * scaled[2],
            ),
            position,
        )
        u, v = world[0], world[2]
        min_u = min(min_u, u)
        max_u = max(max_u, u)
        min_v = min(min_v, v)
        max_v = max(max_v, v)
    return Footprint(min_u, min_v, max_u, max_v)


def scene_footprint(scene: Scene, bounds: BoundsFn = unit_cube_bounds) -> Footprint:
    """Smallest anchor-local rectangle containing every object's transformed
    bounding box projected onto the plane. Empty scenes yield a zero-area
    footprint at the origin."""
    if not scene.objects:
        return Footprint(0.0, 0.0, 0.0, 0.0)
    footprints = [object_footprint(obj, bounds) for obj in scene.objects]
    return Footprint(
        min(fp.min_u for fp in footprints),
        min(fp.min_v for fp in footprints),
        max(fp.max_u for fp in footprints),
        max(fp.max_v for fp in footprints),
    )


def fits_on_plane(scene: Scene, anchor: AnchorPose, bounds: BoundsFn = unit_cube_bounds) -> FitResult:
    """Check whether the anchored scene stays within the plane extents.

    The margin is the signed minimum clearance to the nearest plane edge;
    a footprint exactly equal to the extents fits with margin 0.
    """
    fp = scene_footprint(scene, bounds)
    cos_y = math.cos(anchor.yaw)
    sin_y = math.sin(anchor.yaw)
    u0, v0 = anchor.position
    min_u = min_v = math.inf
    max_u = max_v = -math.inf
    for u, v in (
        (fp.min_u, fp.min_v),
        (fp.min_u, fp.max_v),
        (fp.max_u, fp.min_v),
        (fp.max_u, fp.max_v),
    ):
        # In-plane yaw matches the 3D convention: +yaw turns +u toward -v.
        pu = u0 + u * cos_y + v * sin_y
        pv = v0 - u * sin_y + v * cos_y
        min_u = min(min_u, pu)
        max_u = max(max_u, pu)
        min_v = min(min_v, pv)
        max_v = max(max_v, pv)
    half_w = anchor.plane.extents[0] / 2.0
    half_d = anchor.plane.extents[1] / 2.0
    margin = min(min_u + half_w, half_w - max_u, min_v + half_d, half_d - max_v)
    return FitResult(fits=margin >= 0.0, margin=margin)


def check_placement_hints(hints: PlacementHints, plane: Plane) -> list[PlacementWarning]:
    """Advisory warnings about hint/plane mismatches; never blocks placement."""
    warnings: list[PlacementWarning] = []
    if hints.surface_class != SurfaceClass.ANY and hints.surface_class != plane.surface_class:
        warnings.append(
            PlacementWarning(
                "surface_mismatch",
                f"story prefers a {hints.surface_class.value} surface, plane is {plane.surface_class.value}",
            )
        )
    if hints.min_extents is not None:
        need_w, need_d = hints.min_extents
        have_w, have_d = plane.extents
        if have_w < need_w or have_d < need_d:
            warnings.append(
                PlacementWarning(
                    "plane_too_small",
                    f"story wants at least {need_w} x {need_d} m, plane is {have_w} x {have_d} m",
                )
            )
    return warnings


def apply_gesture(t: Transform, gesture: Gesture) -> Transform:
    """Apply one touch gesture to a transform and requantize.

    Scale gestures clamp the result to [0.01, 100]; rotation composes a yaw
    about the plane normal.
    """
    if isinstance(gesture, Translate):
        _require_finite_gesture((gesture.du, gesture.dv))
        position = (t.position[0] + gesture.du, t.position[1], t.position[2] + gesture.dv)
        return Transform(position, t.rotation, t.scale)
    if isinstance(gesture, Elevate):
        _require_finite_gesture((gesture.dy,))
        position = (t.position[0], t.position[1] + gesture.dy, t.position[2])
        return Transform(position, t.rotation, t.scale)
    if isinstance(gesture, RotateYaw):
        _require_finite_gesture((gesture.angle,))
        return Transform(t.position, quat_multiply(quat_from_yaw(gesture.angle), t.rotation), t.scale)
    if isinstance(gesture, ScaleBy):
        _require_finite_gesture((gesture.factor,))
        if gesture.factor <= 0:
            raise ModelError(f"scale factor must be positive, got {gesture.factor!r}")
        scale = min(max(t.scale * gesture.factor, 0.01), 100.0)
        return Transform(t.position, t.rotation, scale)
    raise TypeError(f"unknown gesture {gesture!r}")


def _require_finite_gesture(values) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ModelError(f"gesture values must be finite, got {v!r}")


def scene_centroid(scene: Scene) -> Vec3:
    """Arithmetic mean of the scene's object positions (anchor frame)."""
    if not scene.objects:
        return (0.0, 0.0, 0.0)
    n = len(scene.objects)
    sx = sum(o.transform.position[0] for o in scene.objects)
    sy = sum(o.transform.position[1] for o in scene.objects)
    sz = sum(o.transform.position[2] for o in scene.objects)
    return (sx / n, sy / n, sz / n)


def navigation_hint(camera: CameraPose, scene_centroid: Vec3) -> NavigationHint:
    """Point the viewer back toward a scene that left the viewport.

    The centroid is in view when it falls inside the camera frustum
    (boundaries inclusive). Otherwise the hint carries a unit screen-space
    arrow; a centroid exactly behind the camera resolves to (1, 0).
    """
    direction = vec_sub(scene_centroid, camera.position)
    if direction == (0.0, 0.0, 0.0):
        raise ModelError("scene centroid coincides with camera position")
    d = quat_rotate(quat_conjugate(camera.orientation), direction)
    forward = -d[2]
    half_v = math.tan(math.radians(camera.vertical_fov) / 2.0)
    half_h = half_v * camera.aspect
    if forward > 0 and abs(d[0]) <= forward * half_h and abs(d[1]) <= forward * half_v:
        return NavigationHint(in_view=True)
    length = math.hypot(d[0], d[1])
    if length == 0.0:
        return NavigationHint(in_view=False, arrow=(1.0, 0.0))
    return NavigationHint(in_view=False, arrow=(d[0] / length, d[1] / length))


def clutter_ratio(camera: CameraPose, scene: Scene, bounds: BoundsFn = unit_cube_bounds) -> float:
    """Fraction of a 64x64 viewport sample grid covered by scene objects.

    Each object is tested as the circumscribed sphere of its scaled bounding
    box; samples hit when their view ray meets any sphere in front of the
    camera. Objects entirely behind the camera never intersect and so are
    ignored.
    """
    if not scene.objects:
        return 0.0
    inverse = quat_conjugate(camera.orientation)
    spheres: list[tuple[float, float, float, float]] = []
    for obj in scene.objects:
        box = bounds(obj.asset)
        scale = obj.transform.scale
        center_local = vec_scale(box.center(), scale)
        center_world = vec_add(quat_rotate(obj.transform.rotation, center_local), obj.transform.position)
        center_cam = quat_rotate(inverse, vec_sub(center_world, camera.position))
        radius = box.half_diagonal() * scale
        spheres.append((center_cam[0], center_cam[1], center_cam[2], radius))

    half_v = math.tan(math.radians(camera.vertical_fov) / 2.0)
    half_h = half_v * camera.aspect
    n = CLUTTER_GRID
    hits = 0
    for iy in range(n):
        y = ((iy + 0.5) / n * 2.0 - 1.0) * half_v
        for ix in range(n):
            x = ((ix + 0.5) / n * 2.0 - 1.0) * half_h
            a = x * x + y * y + 1.0  # ray direction (x, y, -1), unnormalized
            for cx, cy, cz, r in spheres:
                b = x * cx + y * cy - cz
                c = cx * cx + cy * cy + cz * cz - r * r
                disc = b * b - a * c
                if disc >= 0.0 and b + math.sqrt(disc) > 0.0:
                    hits += 1
                    break
    return hits / (n * n)


def save_draft(story: Story, session_path: Union[str, Path]) -> Path:
    """Persist a draft-valid story as a draft-marked `.mar` so losing the
    detected surface (or the process) cannot lose the story."""
    path = Path(session_path)
    data = package.encode(story, draft=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return path


def load_draft(session_path: Union[str, Path]) -> Story:
    return package.decode(Path(session_path).read_bytes())
