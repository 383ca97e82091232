"""Core value types for micro AR stories and their physical context.

Every type here is a frozen dataclass. Constructors normalize their inputs
(quantize transforms, fill derived defaults) and reject values that break
per-field invariants, so a constructed value is always safe to serialize or
share across threads. Rules that span collections — scene counts, id
uniqueness, publish requirements — are reported as data by
:func:`validate_story` instead of raised, so editors can surface them.
"""

from __future__ import annotations

import math
import random
import re
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional, Sequence

Vec3 = tuple[float, float, float]
Quaternion = tuple[float, float, float, float]  # (w, x, y, z)

POSITION_QUANTUM = 1e-6  # meters
SCALE_QUANTUM = 1e-6
QUATERNION_QUANTUM = 1e-9
MIN_SCALE = 0.01
MAX_SCALE = 100.0

# Coordinates are capped so the scaled-integer wire form (micrometers) round
# trips through float64 exactly; 10,000 km is far beyond any AR scene.
MAX_COORDINATE_M = 1e7

MAX_TITLE_CHARS = 200
MAX_DESCRIPTION_CHARS = 2000
MAX_DIALOG_CHARS = 500
MAX_NOTE_CHARS = 500

# Near-unit windows for the quaternion quantizer. Values already within
# _QUAT_NEAR_UNIT of unit norm skip renormalization, and grid-aligned values
# within _QUAT_GRID_UNIT are returned untouched; together these make
# quantization exactly idempotent and keep decoded packages byte-stable.
_QUAT_NEAR_UNIT = 2e-9
_QUAT_GRID_UNIT = 4e-9

_ID128_RE = re.compile(r"^[0-9a-f]{32}$")
_STORY_ID_RE = re.compile(r"^[0-9a-f]{64}$")

ValidationMode = Literal["draft", "publish"]


class ModelError(ValueError):
    """A value failed a per-field invariant during construction."""


class StoryValidationError(ModelError):
    """A story failed validation where a valid one was required."""

    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        summary = "; ".join(f"{v.path}: {v.detail}" for v in self.violations)
        super().__init__(f"invalid story: {summary}")


class SurfaceClass(str, Enum):
    FLOOR = "floor"
    TABLE = "table"
    COUNTER = "counter"
    TUB_EDGE = "tub_edge"
    OUTDOOR = "outdoor"
    ANY = "any"


@dataclass(frozen=True)
class Violation:
    """One broken story-level rule: where it is and which rule broke."""

    path: str
    rule: str
    detail: str


def random_id(rng: Optional[random.Random] = None) -> str:
    """Mint a 128-bit id as 32 lowercase hex chars, optionally from a seeded RNG."""
    if rng is None:
        return uuid.uuid4().hex
    return format(rng.getrandbits(128), "032x")


def is_valid_id(value: str) -> bool:
    return isinstance(value, str) and bool(_ID128_RE.match(value))


def is_valid_story_id(value: str) -> bool:
    return isinstance(value, str) and bool(_STORY_ID_RE.match(value))


def _check_id(value: str, what: str) -> str:
    if not is_valid_id(value):
        raise ModelError(f"{what} must be 32 lowercase hex chars, got {value!r}")
    return value


def _check_finite(values: Sequence[float], what: str) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ModelError(f"{what} must be finite, got {v!r}")


def quantize_length(x: float) -> float:
    """Snap a length in meters to the micrometer grid."""
    return round(x * 1e6) / 1e6


def _quantize_vec3(value: Sequence[float], what: str) -> Vec3:
    vec = tuple(float(c) for c in value)
    if len(vec) != 3:
        raise ModelError(f"{what} must have 3 components, got {len(vec)}")
    _check_finite(vec, what)
    for c in vec:
        if abs(c) > MAX_COORDINATE_M:
            raise ModelError(f"{what} component {c!r} exceeds {MAX_COORDINATE_M} m")
    return (quantize_length(vec[0]), quantize_length(vec[1]), quantize_length(vec[2]))


def _quantize_quaternion(value: Sequence[float], what: str) -> Quaternion:
    q = tuple(float(c) for c in value)
    if len(q) != 4:
        raise ModelError(f"{what} must have 4 components (w, x, y, z), got {len(q)}")
    _check_finite(q, what)
    norm = math.sqrt(sum(c * c for c in q))
    if norm == 0.0:
        raise ModelError(f"{what} must have nonzero norm")
    on_grid = all(round(c * 1e9) / 1e9 == c for c in q)
    if on_grid and abs(norm - 1.0) <= _QUAT_GRID_UNIT:
        return q  # already canonical; returning unchanged keeps quantization idempotent
    if abs(norm - 1.0) > _QUAT_NEAR_UNIT:
        q = tuple(c / norm for c in q)
    return tuple(round(c * 1e9) / 1e9 for c in q)


def _quantize_scale(value: float) -> float:
    s = float(value)
    if not math.isfinite(s) or s <= 0.0:
        raise ModelError(f"scale must be finite and positive, got {s!r}")
    q = round(s * 1e6) / 1e6
    if q < MIN_SCALE or q > MAX_SCALE:
        raise ModelError(f"scale {q} outside [{MIN_SCALE}, {MAX_SCALE}]")
    return q


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box in an asset's local frame, meters."""

    min: Vec3 = (-0.5, -0.5, -0.5)
    max: Vec3 = (0.5, 0.5, 0.5)

    def __post_init__(self) -> None:
        lo = tuple(float(c) for c in self.min)
        hi = tuple(float(c) for c in self.max)
        if len(lo) != 3 or len(hi) != 3:
            raise ModelError("AABB min/max must have 3 components")
        _check_finite(lo, "AABB min")
        _check_finite(hi, "AABB max")
        for a, b in zip(lo, hi):
            if a > b:
                raise ModelError(f"AABB min {lo} exceeds max {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    def center(self) -> Vec3:
        return (
            (self.min[0] + self.max[0]) / 2.0,
            (self.min[1] + self.max[1]) / 2.0,
            (self.min[2] + self.max[2]) / 2.0,
        )

    def half_diagonal(self) -> float:
        dx = (self.max[0] - self.min[0]) / 2.0
        dy = (self.max[1] - self.min[1]) / 2.0
        dz = (self.max[2] - self.min[2]) / 2.0
        return math.sqrt(dx * dx + dy * dy + dz * dz)

    def corners(self) -> tuple[Vec3, ...]:
        xs = (self.min[0], self.max[0])
        ys = (self.min[1], self.max[1])
        zs = (self.min[2], self.max[2])
        return tuple((x, y, z) for x in xs for y in ys for z in zs)


UNIT_CUBE = Aabb()


@dataclass(frozen=True)
class Transform:
    """Plane-local pose: position in meters, unit quaternion, uniform scale.

    Components are quantized at construction (position and scale to 1e-6,
    quaternion components to 1e-9 after renormalization) so equal transforms
    serialize to identical scaled integers.
    """

    position: Vec3 = (0.0, 0.0, 0.0)
    rotation: Quaternion = (1.0, 0.0, 0.0, 0.0)
    scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "position", _quantize_vec3(self.position, "position"))
        object.__setattr__(self, "rotation", _quantize_quaternion(self.rotation, "rotation"))
        object.__setattr__(self, "scale", _quantize_scale(self.scale))


IDENTITY_TRANSFORM = Transform()


def quantize_transform(t: Transform) -> Transform:
    """Re-run quantization on a transform; idempotent for any constructible input."""
    return Transform(t.position, t.rotation, t.scale)


@dataclass(frozen=True)
class AssetRef:
    """Reference to a 3D model by its content key plus a human-readable name."""

    asset_key: str
    display_name: str

    def __post_init__(self) -> None:
        if not isinstance(self.asset_key, str) or not self.asset_key:
            raise ModelError("asset_key must be a non-empty string")
        if not isinstance(self.display_name, str) or not self.display_name:
            raise ModelError("display_name must be a non-empty string")


@dataclass(frozen=True)
class DialogBalloon:
    """Speech text attached to an object, offset from the object origin."""

    text: str
    offset: Vec3 = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not isinstance(self.text, str) or not self.text.strip():
            raise ModelError("dialog text must be non-empty after trimming")
        if len(self.text) > MAX_DIALOG_CHARS:
            raise ModelError(f"dialog text exceeds {MAX_DIALOG_CHARS} chars")
        object.__setattr__(self, "offset", _quantize_vec3(self.offset, "dialog offset"))


@dataclass(frozen=True)
class PlacedObject:
    object_id: str
    asset: AssetRef
    transform: Transform = IDENTITY_TRANSFORM
    group_id: Optional[str] = None
    dialog: Optional[DialogBalloon] = None

    def __post_init__(self) -> None:
        _check_id(self.object_id, "object_id")
        if self.group_id is not None:
            _check_id(self.group_id, "group_id")
        if not isinstance(self.asset, AssetRef):
            raise ModelError("asset must be an AssetRef")
        if not isinstance(self.transform, Transform):
            raise ModelError("transform must be a Transform")
        if self.dialog is not None and not isinstance(self.dialog, DialogBalloon):
            raise ModelError("dialog must be a DialogBalloon or None")


@dataclass(frozen=True)
class Scene:
    """One story panel: an ordered set of placed objects on a single plane."""

    scene_id: str
    index: int
    objects: tuple[PlacedObject, ...] = ()

    def __post_init__(self) -> None:
        _check_id(self.scene_id, "scene_id")
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 0:
            raise ModelError(f"scene index must be a non-negative int, got {self.index!r}")
        object.__setattr__(self, "objects", tuple(self.objects))


@dataclass(frozen=True)
class PlacementHints:
    """Physical requirements the viewer should know before placing a story."""

    surface_class: SurfaceClass = SurfaceClass.ANY
    min_extents: Optional[tuple[float, float]] = None
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "surface_class", SurfaceClass(self.surface_class))
        if self.min_extents is not None:
            w, d = (float(self.min_extents[0]), float(self.min_extents[1]))
            _check_finite((w, d), "min_extents")
            if w <= 0 or d <= 0:
                raise ModelError(f"min_extents must be strictly positive, got {(w, d)}")
            object.__setattr__(self, "min_extents", (quantize_length(w), quantize_length(d)))
        if not isinstance(self.note, str):
            raise ModelError("note must be a string")
        if len(self.note) > MAX_NOTE_CHARS:
            raise ModelError(f"note exceeds {MAX_NOTE_CHARS} chars")


@dataclass(frozen=True)
class Metadata:
    """Authored story metadata. Mutable server-side data (view counts) lives
    outside the package so story bytes stay content-addressable."""

    creator: str
    title: str = ""
    description: str = ""
    original_creator: str = ""
    created_at: int = 0
    parent_story: Optional[str] = None
    placement_hints: Optional[PlacementHints] = None
    format_version: tuple[int, int] = (1, 0)

    def __post_init__(self) -> None:
        if not isinstance(self.creator, str) or not self.creator:
            raise ModelError("creator must be a non-empty string")
        if not isinstance(self.title, str) or len(self.title) > MAX_TITLE_CHARS:
            raise ModelError(f"title must be a string of at most {MAX_TITLE_CHARS} chars")
        if not isinstance(self.description, str) or len(self.description) > MAX_DESCRIPTION_CHARS:
            raise ModelError(f"description must be a string of at most {MAX_DESCRIPTION_CHARS} chars")
        if not self.original_creator:
            object.__setattr__(self, "original_creator", self.creator)
        if not isinstance(self.original_creator, str):
            raise ModelError("original_creator must be a string")
        if isinstance(self.created_at, bool) or not isinstance(self.created_at, int) or self.created_at < 0:
            raise ModelError(f"created_at must be a non-negative integer, got {self.created_at!r}")
        if self.parent_story is None:
            # A root story is its creator's own work; remixes may loop back to
            # the original creator (self-remix), so only this direction holds.
            if self.original_creator != self.creator:
                raise ModelError("a story without a parent must have original_creator == creator")
        elif not is_valid_story_id(self.parent_story):
            raise ModelError(f"parent_story must be 64 lowercase hex chars, got {self.parent_story!r}")
        if self.placement_hints is not None and not isinstance(self.placement_hints, PlacementHints):
            raise ModelError("placement_hints must be a PlacementHints or None")
        major, minor = self.format_version
        if isinstance(major, bool) or isinstance(minor, bool) or not isinstance(major, int) or not isinstance(minor, int):
            raise ModelError("format_version must be a pair of integers")
        if major < 0 or minor < 0:
            raise ModelError("format_version components must be non-negative")
        object.__setattr__(self, "format_version", (major, minor))


@dataclass(frozen=True)
class Story:
    """An ordered sequence of scenes plus immutable authored metadata."""

    metadata: Metadata
    scenes: tuple[Scene, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.metadata, Metadata):
            raise ModelError("metadata must be a Metadata")
        object.__setattr__(self, "scenes", tuple(self.scenes))

    def iter_objects(self):
        for scene in self.scenes:
            yield from scene.objects

    def object_count(self) -> int:
        return sum(len(scene.objects) for scene in self.scenes)


@dataclass(frozen=True)
class Plane:
    """A detected horizontal surface, modeled as an input: a centered
    rectangle at a world position, rotated about world up."""

    origin: Vec3
    yaw: float
    extents: tuple[float, float]
    surface_class: SurfaceClass = SurfaceClass.ANY

    def __post_init__(self) -> None:
        origin = tuple(float(c) for c in self.origin)
        _check_finite(origin, "plane origin")
        for c in origin:
            if abs(c) > MAX_COORDINATE_M:
                raise ModelError(f"plane origin component {c!r} exceeds {MAX_COORDINATE_M} m")
        if not math.isfinite(float(self.yaw)):
            raise ModelError("plane yaw must be finite")
        w, d = (float(self.extents[0]), float(self.extents[1]))
        _check_finite((w, d), "plane extents")
        if w <= 0 or d <= 0:
            raise ModelError(f"plane extents must be strictly positive, got {(w, d)}")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "yaw", float(self.yaw))
        object.__setattr__(self, "extents", (w, d))
        object.__setattr__(self, "surface_class", SurfaceClass(self.surface_class))


@dataclass(frozen=True)
class CameraPose:
    """Viewer camera in world space; forward is -z of the orientation frame."""

    position: Vec3
    orientation: Quaternion = (1.0, 0.0, 0.0, 0.0)
    vertical_fov: float = 60.0
    aspect: float = 16.0 / 9.0

    def __post_init__(self) -> None:
        pos = tuple(float(c) for c in self.position)
        _check_finite(pos, "camera position")
        q = tuple(float(c) for c in self.orientation)
        if len(q) != 4:
            raise ModelError("camera orientation must have 4 components")
        _check_finite(q, "camera orientation")
        norm = math.sqrt(sum(c * c for c in q))
        if norm == 0.0:
            raise ModelError("camera orientation must have nonzero norm")
        fov = float(self.vertical_fov)
        if not math.isfinite(fov) or not 0.0 < fov < 180.0:
            raise ModelError(f"vertical_fov must be in (0, 180), got {fov!r}")
        aspect = float(self.aspect)
        if not math.isfinite(aspect) or aspect <= 0.0:
            raise ModelError(f"aspect must be positive, got {aspect!r}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", tuple(c / norm for c in q))
        object.__setattr__(self, "vertical_fov", fov)
        object.__setattr__(self, "aspect", aspect)


def validate_story(story: Story, mode: ValidationMode = "draft") -> list[Violation]:
    """Check story-level rules and return the broken ones as data.

    Draft mode checks structure (scene count, index contiguity, id
    uniqueness); publish mode additionally requires a title, a description,
    and at least one placed object.
    """
    if mode not in ("draft", "publish"):
        raise ValueError(f"mode must be 'draft' or 'publish', got {mode!r}")
    violations: list[Violation] = []
    if len(story.scenes) < 1:
        violations.append(Violation("scenes", "count", "story must contain at least one scene"))
    seen_scene_ids: set[str] = set()
    seen_object_ids: set[str] = set()
    for i, scene in enumerate(story.scenes):
        if scene.index != i:
            violations.append(
                Violation(f"scenes[{i}].index", "contiguous", f"expected index {i}, got {scene.index}")
            )
        if scene.scene_id in seen_scene_ids:
            violations.append(
                Violation(f"scenes[{i}].scene_id", "unique", f"duplicate scene_id {scene.scene_id}")
            )
        seen_scene_ids.add(scene.scene_id)
        for j, obj in enumerate(scene.objects):
            if obj.object_id in seen_object_ids:
                violations.append(
                    Violation(
                        f"scenes[{i}].objects[{j}].object_id",
                        "unique",
                        f"duplicate object_id {obj.object_id}",
                    )
                )
            seen_object_ids.add(obj.object_id)
    if mode == "publish":
        if not story.metadata.title.strip():
            violations.append(Violation("metadata.title", "required", "publishable story needs a title"))
        if not story.metadata.description.strip():
            violations.append(
                Violation("metadata.description", "required", "publishable story needs a description")
            )
        if story.object_count() < 1:
            violations.append(
                Violation("scenes", "objects.count", "publishable story needs at least one placed object")
            )
    return violations


def require_valid(story: Story, mode: ValidationMode) -> None:
    """Raise :class:`StoryValidationError` if the story fails validation."""
    violations = validate_story(story, mode)
    if violations:
        raise StoryValidationError(violations)
