"""The `.mar` container: a zip archive with three canonical JSON parts.

Following document-package formats like ODF, a story splits into
``metadata.json`` (authored metadata), ``content.json`` (dialog text and
asset references, joined to layout by object_id), and ``layout.json``
(quantized spatial data as scaled integers — no floats on the wire).
Encoding is byte-deterministic: parts are stored uncompressed in a fixed
order with zeroed archive timestamps, so equal stories hash identically.
Byte-level rules are documented in docs/format.md.
"""

from __future__ import annotations

import hashlib
import io
import json
import zipfile
from typing import Any, Optional

from .canonical import canonical_bytes
from .model import (
    AssetRef,
    DialogBalloon,
    Metadata,
    ModelError,
    PlacedObject,
    PlacementHints,
    Scene,
    Story,
    SurfaceClass,
    Transform,
    require_valid,
    validate_story,
)

PART_METADATA = "metadata.json"
PART_CONTENT = "content.json"
PART_LAYOUT = "layout.json"
PART_ORDER = (PART_METADATA, PART_CONTENT, PART_LAYOUT)

FORMAT_VERSION = (1, 0)
FILE_EXTENSION = ".mar"
MEDIA_TYPE = "application/vnd.microar+zip"

_UM_PER_M = 10**6  # position and extents: micrometers
_PPM = 10**6  # scale: parts per million
_NANO = 10**9  # quaternion components: nano-units

_ZERO_DATE_TIME = (1980, 1, 1, 0, 0, 0)  # earliest moment zip can represent


class PackageError(Exception):
    """Base for package decode/encode failures."""


class BadArchiveError(PackageError):
    """The bytes are not a readable zip archive."""


class MissingPartError(PackageError):
    def __init__(self, part: str):
        self.part = part
        super().__init__(f"package is missing required part {part!r}")


class MalformedPartError(PackageError):
    def __init__(self, part: str, detail: str):
        self.part = part
        super().__init__(f"{part}: {detail}")


class MissingVersionError(PackageError):
    def __init__(self) -> None:
        super().__init__("metadata.json does not declare format_version")


class UnsupportedMajorError(PackageError):
    def __init__(self, major: int):
        self.major = major
        super().__init__(f"unsupported major format version {major} (this reader handles major 1)")


class PartMismatchError(PackageError):
    """content.json and layout.json disagree about scenes or objects."""


class InvariantViolationError(PackageError):
    """Decoded values violate model invariants."""


def _to_um(x: float) -> int:
    return round(x * _UM_PER_M)


def _vec_um(vec) -> list[int]:
    return [_to_um(c) for c in vec]


def _quat_nano(q) -> list[int]:
    return [round(c * _NANO) for c in q]


def _metadata_doc(meta: Metadata, draft: bool) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "created_at": meta.created_at,
        "creator": meta.creator,
        "description": meta.description,
        "format_version": [meta.format_version[0], meta.format_version[1]],
        "original_creator": meta.original_creator,
        "title": meta.title,
    }
    if meta.parent_story is not None:
        doc["parent_story"] = meta.parent_story
    if meta.placement_hints is not None:
        hints: dict[str, Any] = {"surface_class": meta.placement_hints.surface_class.value}
        if meta.placement_hints.min_extents is not None:
            w, d = meta.placement_hints.min_extents
            hints["min_extents_um"] = [_to_um(w), _to_um(d)]
        if meta.placement_hints.note:
            hints["note"] = meta.placement_hints.note
        doc["placement_hints"] = hints
    if draft:
        doc["draft"] = True
    return doc


def _content_doc(story: Story) -> dict[str, Any]:
    scenes = []
    for scene in story.scenes:
        objects = []
        for obj in scene.objects:
            entry: dict[str, Any] = {
                "asset_key": obj.asset.asset_key,
                "display_name": obj.asset.display_name,
                "object_id": obj.object_id,
            }
            if obj.dialog is not None:
                entry["dialog_text"] = obj.dialog.text
            objects.append(entry)
        scenes.append({"objects": objects, "scene_id": scene.scene_id})
    return {"scenes": scenes}


def _layout_doc(story: Story) -> dict[str, Any]:
    scenes = []
    for scene in story.scenes:
        objects = []
        for obj in scene.objects:
            entry: dict[str, Any] = {
                "object_id": obj.object_id,
                "position_um": _vec_um(obj.transform.position),
                "rotation_nano": _quat_nano(obj.transform.rotation),
                "scale_ppm": round(obj.transform.scale * _PPM),
            }
            if obj.group_id is not None:
                entry["group_id"] = obj.group_id
            if obj.dialog is not None:
                entry["dialog_offset_um"] = _vec_um(obj.dialog.offset)
            objects.append(entry)
        scenes.append({"objects": objects, "scene_id": scene.scene_id})
    return {"scenes": scenes}


def encode(story: Story, *, draft: bool = False) -> bytes:
    """Serialize a draft-valid story to canonical `.mar` bytes.

    Equal stories produce byte-identical packages. Raises
    :class:`microar.model.StoryValidationError` listing violations when the
    story is not draft-valid.
    """
    require_valid(story, "draft")
    parts = {
        PART_METADATA: _metadata_doc(story.metadata, draft),
        PART_CONTENT: _content_doc(story),
        PART_LAYOUT: _layout_doc(story),
    }
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as archive:
        for name in PART_ORDER:
            info = zipfile.ZipInfo(name, date_time=_ZERO_DATE_TIME)
            info.compress_type = zipfile.ZIP_STORED
            info.create_system = 0
            info.external_attr = 0o600 << 16  # fixed permissions; no host umask leakage
            archive.writestr(info, canonical_bytes(parts[name]))
    return buf.getvalue()


def story_id(story: Story) -> str:
    """Content address of a story: SHA-256 of its canonical package bytes."""
    return hashlib.sha256(encode(story)).hexdigest()


def _read_parts(data: bytes) -> dict[str, Any]:
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise BadArchiveError(f"not a zip archive: {exc}") from exc
    docs: dict[str, Any] = {}
    with archive:
        names = set(archive.namelist())
        for part in PART_ORDER:
            if part not in names:
                raise MissingPartError(part)
            raw = archive.read(part)
            try:
                docs[part] = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, ValueError) as exc:
                raise MalformedPartError(part, f"invalid JSON: {exc}") from exc
    return docs


def _expect_object(doc: Any, part: str) -> dict[str, Any]:
    if not isinstance(doc, dict):
        raise MalformedPartError(part, "top-level value must be a JSON object")
    return doc


def _read_str(doc: dict[str, Any], key: str, part: str) -> str:
    if key not in doc:
        raise MalformedPartError(part, f"missing field {key!r}")
    value = doc[key]
    if not isinstance(value, str):
        raise MalformedPartError(part, f"field {key!r} must be a string")
    return value


def _read_int(value: Any, where: str, part: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedPartError(part, f"{where} must be an integer")
    return value


def _read_int_list(value: Any, n: int, where: str, part: str) -> list[int]:
    if not isinstance(value, list) or len(value) != n:
        raise MalformedPartError(part, f"{where} must be a list of {n} integers")
    return [_read_int(v, where, part) for v in value]


def _parse_version(doc: dict[str, Any]) -> tuple[int, int]:
    if "format_version" not in doc:
        raise MissingVersionError()
    pair = _read_int_list(doc["format_version"], 2, "format_version", PART_METADATA)
    return (pair[0], pair[1])


def check_version(data: bytes) -> tuple[int, int]:
    """Return the declared format version, rejecting majors other than 1.

    Any minor under major 1 is accepted; unknown fields introduced by newer
    minors are ignored on decode.
    """
    docs = _read_parts(data)
    version = _parse_version(_expect_object(docs[PART_METADATA], PART_METADATA))
    if version[0] != FORMAT_VERSION[0]:
        raise UnsupportedMajorError(version[0])
    return version


def _parse_metadata(doc: dict[str, Any]) -> Metadata:
    version = _parse_version(doc)
    if version[0] != FORMAT_VERSION[0]:
        raise UnsupportedMajorError(version[0])
    hints: Optional[PlacementHints] = None
    if "placement_hints" in doc:
        hdoc = doc["placement_hints"]
        if not isinstance(hdoc, dict):
            raise MalformedPartError(PART_METADATA, "placement_hints must be an object")
        surface = _read_str(hdoc, "surface_class", PART_METADATA)
        try:
            surface_class = SurfaceClass(surface)
        except ValueError as exc:
            raise InvariantViolationError(f"unknown surface_class {surface!r}") from exc
        min_extents = None
        if "min_extents_um" in hdoc:
            w_um, d_um = _read_int_list(hdoc["min_extents_um"], 2, "min_extents_um", PART_METADATA)
            min_extents = (w_um / _UM_PER_M, d_um / _UM_PER_M)
        note = hdoc.get("note", "")
        if not isinstance(note, str):
            raise MalformedPartError(PART_METADATA, "placement_hints.note must be a string")
        try:
            hints = PlacementHints(surface_class=surface_class, min_extents=min_extents, note=note)
        except ModelError as exc:
            raise InvariantViolationError(str(exc)) from exc
    parent = doc.get("parent_story")
    if parent is not None and not isinstance(parent, str):
        raise MalformedPartError(PART_METADATA, "parent_story must be a string")
    try:
        return Metadata(
            creator=_read_str(doc, "creator", PART_METADATA),
            title=_read_str(doc, "title", PART_METADATA),
            description=_read_str(doc, "description", PART_METADATA),
            original_creator=_read_str(doc, "original_creator", PART_METADATA),
            created_at=_read_int(doc.get("created_at"), "created_at", PART_METADATA),
            parent_story=parent,
            placement_hints=hints,
            format_version=version,
        )
    except ModelError as exc:
        raise InvariantViolationError(str(exc)) from exc


def _scene_list(doc: dict[str, Any], part: str) -> list[dict[str, Any]]:
    scenes = doc.get("scenes")
    if not isinstance(scenes, list):
        raise MalformedPartError(part, "missing or non-list 'scenes'")
    out = []
    for i, scene in enumerate(scenes):
        if not isinstance(scene, dict):
            raise MalformedPartError(part, f"scenes[{i}] must be an object")
        out.append(scene)
    return out


def _object_list(scene_doc: dict[str, Any], i: int, part: str) -> list[dict[str, Any]]:
    objects = scene_doc.get("objects")
    if not isinstance(objects, list):
        raise MalformedPartError(part, f"scenes[{i}] missing or non-list 'objects'")
    for j, obj in enumerate(objects):
        if not isinstance(obj, dict):
            raise MalformedPartError(part, f"scenes[{i}].objects[{j}] must be an object")
    return objects


def decode(data: bytes) -> Story:
    """Parse `.mar` bytes back into a Story.

    Tolerates non-canonical key order, whitespace, compression, and unknown
    fields (minor-version forward compatibility); re-encoding the result
    always yields canonical bytes. Raises a :class:`PackageError` subclass
    naming the failure category otherwise.
    """
    docs = _read_parts(data)
    metadata = _parse_metadata(_expect_object(docs[PART_METADATA], PART_METADATA))
    content_scenes = _scene_list(_expect_object(docs[PART_CONTENT], PART_CONTENT), PART_CONTENT)
    layout_scenes = _scene_list(_expect_object(docs[PART_LAYOUT], PART_LAYOUT), PART_LAYOUT)
    if len(content_scenes) != len(layout_scenes):
        raise PartMismatchError(
            f"content.json has {len(content_scenes)} scenes but layout.json has {len(layout_scenes)}"
        )

    scenes: list[Scene] = []
    for i, (cdoc, ldoc) in enumerate(zip(content_scenes, layout_scenes)):
        scene_id = _read_str(cdoc, "scene_id", PART_CONTENT)
        layout_scene_id = _read_str(ldoc, "scene_id", PART_LAYOUT)
        if scene_id != layout_scene_id:
            raise PartMismatchError(
                f"scenes[{i}]: content scene_id {scene_id} != layout scene_id {layout_scene_id}"
            )
        layout_by_id: dict[str, dict[str, Any]] = {}
        for obj in _object_list(ldoc, i, PART_LAYOUT):
            layout_by_id[_read_str(obj, "object_id", PART_LAYOUT)] = obj
        content_objects = _object_list(cdoc, i, PART_CONTENT)
        if len(content_objects) != len(layout_by_id):
            raise PartMismatchError(f"scenes[{i}]: content and layout object sets differ")

        objects: list[PlacedObject] = []
        for j, cobj in enumerate(content_objects):
            object_id = _read_str(cobj, "object_id", PART_CONTENT)
            lobj = layout_by_id.get(object_id)
            if lobj is None:
                raise PartMismatchError(f"scenes[{i}].objects[{j}]: {object_id} has no layout entry")
            pos_um = _read_int_list(lobj.get("position_um"), 3, "position_um", PART_LAYOUT)
            rot_nano = _read_int_list(lobj.get("rotation_nano"), 4, "rotation_nano", PART_LAYOUT)
            scale_ppm = _read_int(lobj.get("scale_ppm"), "scale_ppm", PART_LAYOUT)
            dialog = None
            dialog_text = cobj.get("dialog_text")
            has_offset = "dialog_offset_um" in lobj
            if (dialog_text is not None) != has_offset:
                raise PartMismatchError(
                    f"scenes[{i}].objects[{j}]: dialog_text and dialog_offset_um must appear together"
                )
            try:
                if dialog_text is not None:
                    if not isinstance(dialog_text, str):
                        raise MalformedPartError(PART_CONTENT, "dialog_text must be a string")
                    offset_um = _read_int_list(lobj["dialog_offset_um"], 3, "dialog_offset_um", PART_LAYOUT)
                    dialog = DialogBalloon(dialog_text, tuple(c / _UM_PER_M for c in offset_um))
                group_id = lobj.get("group_id")
                if group_id is not None and not isinstance(group_id, str):
                    raise MalformedPartError(PART_LAYOUT, "group_id must be a string")
                objects.append(
                    PlacedObject(
                        object_id=object_id,
                        asset=AssetRef(
                            asset_key=_read_str(cobj, "asset_key", PART_CONTENT),
                            display_name=_read_str(cobj, "display_name", PART_CONTENT),
                        ),
                        transform=Transform(
                            position=tuple(c / _UM_PER_M for c in pos_um),
                            rotation=tuple(c / _NANO for c in rot_nano),
                            scale=scale_ppm / _PPM,
                        ),
                        group_id=group_id,
                        dialog=dialog,
                    )
                )
            except ModelError as exc:
                raise InvariantViolationError(f"scenes[{i}].objects[{j}]: {exc}") from exc
        try:
            scenes.append(Scene(scene_id=scene_id, index=i, objects=tuple(objects)))
        except ModelError as exc:
            raise InvariantViolationError(f"scenes[{i}]: {exc}") from exc

    story = Story(metadata=metadata, scenes=tuple(scenes))
    violations = validate_story(story, "draft")
    if violations:
        detail = "; ".join(f"{v.path}: {v.detail}" for v in violations)
        raise InvariantViolationError(detail)
    return story


def is_draft(data: bytes) -> bool:
    """True when the package carries the draft marker in metadata.json."""
    docs = _read_parts(data)
    return bool(_expect_object(docs[PART_METADATA], PART_METADATA).get("draft", False))
