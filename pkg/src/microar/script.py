"""Declarative scene scripts: a YAML/JSON tree that compiles to a story.

Scripts are the desk-scale stand-in for in-situ touch authoring: transforms
are explicit numbers so builds are reproducible. Scene and object ids are
minted from an RNG seeded with the script bytes, and asset queries resolve
to the top catalog hit with the resolved key recorded in the package, so
rebuilding the same script against the same catalog is byte-identical.

Edit scripts reuse the same object grammar as deltas against a remix draft:
add_scenes, add_objects, remove_objects, edit_dialogs, plus replacement
title/description.
"""

from __future__ import annotations

import hashlib
import random
from typing import Any, Optional

import yaml

from .catalog import AssetCatalog
from .geometry import quat_from_yaw
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
    random_id,
    validate_story,
)

LINE_KEY = "__line__"

DEFAULT_DIALOG_OFFSET = (0.0, 0.3, 0.0)

# Ready-made balloon texts, comic onomatopoeia included.
PRESET_DIALOGS = (
    "Raawr",
    "VROOM",
    "Zzzz",
    "SCREECH",
    "pew pew",
    "BOOM",
    "CRASH",
    "ding!",
    "ta-da!",
    "Hello!",
    "Goodbye!",
    "Help!",
    "Wow!",
    "Hmm...",
    "Shhh",
    "Yum!",
    "Ouch!",
    "Let's go!",
    "Why me?",
    "The end.",
)

_PRESET_BY_KEY = {text.lower(): text for text in PRESET_DIALOGS}


class ScriptError(Exception):
    """Script problem with the line it came from."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


class _LineLoader(yaml.SafeLoader):
    """SafeLoader that tags every mapping with the line it starts on."""


def _mapping_with_line(loader: "_LineLoader", node: yaml.MappingNode):
    mapping = loader.construct_mapping(node, deep=True)
    mapping[LINE_KEY] = node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _mapping_with_line)


def parse_script(text: str) -> dict[str, Any]:
    try:
        data = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScriptError(f"invalid script: {exc}", mark.line + 1 if mark else None) from exc
    if not isinstance(data, dict):
        raise ScriptError("script must be a mapping at the top level")
    return data


def _line(doc: dict[str, Any]) -> Optional[int]:
    return doc.get(LINE_KEY)


def _require(doc: dict[str, Any], key: str, kind: type, what: str) -> Any:
    if key not in doc:
        raise ScriptError(f"{what} is missing required field {key!r}", _line(doc))
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ScriptError(f"{what}.{key} must be a {kind.__name__}", _line(doc))
    return value


def _vec3(value: Any, what: str, line: Optional[int]) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ScriptError(f"{what} must be a list of 3 numbers", line)
    try:
        return tuple(float(c) for c in value)
    except (TypeError, ValueError) as exc:
        raise ScriptError(f"{what} must contain numbers: {exc}", line) from exc


def preset_dialog(name: str) -> str:
    text = _PRESET_BY_KEY.get(name.lower())
    if text is None:
        raise KeyError(name)
    return text


def _parse_dialog(doc: Any, line: Optional[int]) -> DialogBalloon:
    if isinstance(doc, str):
        return DialogBalloon(doc, DEFAULT_DIALOG_OFFSET)
    if not isinstance(doc, dict):
        raise ScriptError("dialog must be a string or a mapping", line)
    dline = _line(doc) or line
    offset = DEFAULT_DIALOG_OFFSET
    if "offset" in doc:
        offset = _vec3(doc["offset"], "dialog.offset", dline)
    if "preset" in doc:
        try:
            return DialogBalloon(preset_dialog(str(doc["preset"])), offset)
        except KeyError:
            raise ScriptError(
                f"unknown preset dialog {doc['preset']!r}; choose from {', '.join(PRESET_DIALOGS)}", dline
            ) from None
    if "text" in doc:
        return DialogBalloon(str(doc["text"]), offset)
    raise ScriptError("dialog needs either 'text' or 'preset'", dline)


def _resolve_asset(spec: Any, catalog: AssetCatalog, line: Optional[int]) -> AssetRef:
    if isinstance(spec, str):
        spec = {"query": spec}
    if not isinstance(spec, dict):
        raise ScriptError("asset must be a query string or a mapping", line)
    aline = _line(spec) or line
    if "key" in spec:
        key = str(spec["key"])
        name = spec.get("name")
        if name is None:
            if not catalog.has(key):
                raise ScriptError(f"asset key {key!r} is not in the catalog and no name was given", aline)
            name = catalog.get_record(key).display_name
        return AssetRef(key, str(name))
    if "query" in spec:
        query = str(spec["query"])
        hits = catalog.search(query, 1)
        if not hits:
            raise ScriptError(f"asset query {query!r} matched nothing in the catalog", aline)
        return AssetRef(hits[0].asset_key, hits[0].display_name)
    raise ScriptError("asset needs either 'query' or 'key'", aline)


def _parse_object(
    doc: Any,
    catalog: AssetCatalog,
    rng: random.Random,
    groups: dict[str, str],
    what: str,
) -> PlacedObject:
    if not isinstance(doc, dict):
        raise ScriptError(f"{what} must be a mapping")
    line = _line(doc)
    if "asset" not in doc:
        raise ScriptError(f"{what} is missing its asset", line)
    asset = _resolve_asset(doc["asset"], catalog, line)
    position = _vec3(doc["position"], f"{what}.position", line) if "position" in doc else (0.0, 0.0, 0.0)
    if "rotation" in doc:
        rot = doc["rotation"]
        if not isinstance(rot, list) or len(rot) != 4:
            raise ScriptError(f"{what}.rotation must be a [w, x, y, z] list", line)
        rotation = tuple(float(c) for c in rot)
    elif "yaw" in doc:
        try:
            rotation = quat_from_yaw(float(doc["yaw"]))
        except (TypeError, ValueError) as exc:
            raise ScriptError(f"{what}.yaw must be a number", line) from exc
    else:
        rotation = (1.0, 0.0, 0.0, 0.0)
    scale = doc.get("scale", 1.0)
    if isinstance(scale, bool) or not isinstance(scale, (int, float)):
        raise ScriptError(f"{what}.scale must be a number", line)
    group_id = None
    if "group" in doc:
        label = str(doc["group"])
        if label not in groups:
            groups[label] = random_id(rng)
        group_id = groups[label]
    dialog = _parse_dialog(doc["dialog"], line) if "dialog" in doc else None
    try:
        return PlacedObject(
            object_id=random_id(rng),
            asset=asset,
            transform=Transform(position=position, rotation=rotation, scale=float(scale)),
            group_id=group_id,
            dialog=dialog,
        )
    except ModelError as exc:
        raise ScriptError(str(exc), line) from exc


def _parse_scene_objects(
    doc: Any,
    scene_path: str,
    catalog: AssetCatalog,
    rng: random.Random,
    groups: dict[str, str],
) -> list[PlacedObject]:
    if not isinstance(doc, dict):
        raise ScriptError(f"{scene_path} must be a mapping")
    objects_doc = doc.get("objects", [])
    if not isinstance(objects_doc, list):
        raise ScriptError(f"{scene_path}.objects must be a list", _line(doc))
    return [
        _parse_object(obj, catalog, rng, groups, f"{scene_path}.objects[{j}]")
        for j, obj in enumerate(objects_doc)
    ]


def _parse_hints(doc: Any, line: Optional[int]) -> PlacementHints:
    if not isinstance(doc, dict):
        raise ScriptError("placement_hints must be a mapping", line)
    hline = _line(doc) or line
    surface = doc.get("surface", "any")
    try:
        surface_class = SurfaceClass(str(surface))
    except ValueError:
        choices = ", ".join(s.value for s in SurfaceClass)
        raise ScriptError(f"unknown surface {surface!r}; choose from {choices}", hline) from None
    min_extents = None
    if "min_extents" in doc:
        pair = doc["min_extents"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise ScriptError("min_extents must be a [width, depth] list", hline)
        min_extents = (float(pair[0]), float(pair[1]))
    try:
        return PlacementHints(
            surface_class=surface_class,
            min_extents=min_extents,
            note=str(doc.get("note", "")),
        )
    except ModelError as exc:
        raise ScriptError(str(exc), hline) from exc


def compile_script(text: str, catalog: AssetCatalog) -> Story:
    """Compile a scene script to a draft-valid story, or fail with the line
    that broke it."""
    data = parse_script(text)
    rng = random.Random(hashlib.sha256(text.encode("utf-8")).digest())
    groups: dict[str, str] = {}

    meta_doc = data.get("metadata")
    if not isinstance(meta_doc, dict):
        raise ScriptError("script needs a 'metadata' mapping", _line(data))
    hints = None
    if "placement_hints" in meta_doc:
        hints = _parse_hints(meta_doc["placement_hints"], _line(meta_doc))
    created_at = meta_doc.get("created_at", 0)
    try:
        metadata = Metadata(
            creator=_require(meta_doc, "creator", str, "metadata"),
            title=str(meta_doc.get("title", "")),
            description=str(meta_doc.get("description", "")),
            created_at=created_at,
            placement_hints=hints,
        )
    except ModelError as exc:
        raise ScriptError(str(exc), _line(meta_doc)) from exc

    scenes_doc = data.get("scenes")
    if not isinstance(scenes_doc, list):
        raise ScriptError("script needs a 'scenes' list", _line(data))
    scenes = []
    for i, scene_doc in enumerate(scenes_doc):
        objects = _parse_scene_objects(scene_doc, f"scenes[{i}]", catalog, rng, groups)
        scenes.append(Scene(scene_id=random_id(rng), index=i, objects=tuple(objects)))

    story = Story(metadata=metadata, scenes=tuple(scenes))
    violations = validate_story(story, "draft")
    if violations:
        digest = "; ".join(f"{v.path}: {v.detail}" for v in violations)
        raise ScriptError(f"script compiles to an invalid story: {digest}", _line(data))
    return story


def apply_edit_script(draft: Story, text: str, catalog: AssetCatalog) -> Story:
    """Apply an edit script to a remix draft and return the edited story."""
    data = parse_script(text)
    rng = random.Random(hashlib.sha256(text.encode("utf-8")).digest())
    groups: dict[str, str] = {}

    metadata = draft.metadata
    try:
        metadata = Metadata(
            creator=metadata.creator,
            title=str(data.get("title", metadata.title)),
            description=str(data.get("description", metadata.description)),
            original_creator=metadata.original_creator,
            created_at=data.get("created_at", metadata.created_at),
            parent_story=metadata.parent_story,
            placement_hints=metadata.placement_hints,
        )
    except ModelError as exc:
        raise ScriptError(str(exc), _line(data)) from exc

    scenes = [list(scene.objects) for scene in draft.scenes]
    scene_ids = [scene.scene_id for scene in draft.scenes]

    removals = data.get("remove_objects", [])
    if not isinstance(removals, list):
        raise ScriptError("remove_objects must be a list of object ids", _line(data))
    for object_id in removals:
        found = False
        for objects in scenes:
            for obj in list(objects):
                if obj.object_id == object_id:
                    objects.remove(obj)
                    found = True
        if not found:
            raise ScriptError(f"remove_objects: no object with id {object_id!r}", _line(data))

    edits = data.get("edit_dialogs", [])
    if not isinstance(edits, list):
        raise ScriptError("edit_dialogs must be a list", _line(data))
    for k, edit in enumerate(edits):
        if not isinstance(edit, dict) or "object" not in edit:
            raise ScriptError(f"edit_dialogs[{k}] needs an 'object' id", _line(data))
        eline = _line(edit)
        target_id = str(edit["object"])
        target = None
        for objects in scenes:
            for idx, obj in enumerate(objects):
                if obj.object_id == target_id:
                    target = (objects, idx, obj)
        if target is None:
            raise ScriptError(f"edit_dialogs[{k}]: no object with id {target_id!r}", eline)
        objects, idx, obj = target
        if edit.get("remove"):
            dialog = None
        else:
            base = {LINE_KEY: eline}
            base.update({key: edit[key] for key in ("text", "preset", "offset") if key in edit})
            if "offset" not in base and obj.dialog is not None:
                base["offset"] = list(obj.dialog.offset)
            try:
                dialog = _parse_dialog(base, eline)
            except ScriptError:
                raise
            except ModelError as exc:
                raise ScriptError(str(exc), eline) from exc
        objects[idx] = PlacedObject(
            object_id=obj.object_id,
            asset=obj.asset,
            transform=obj.transform,
            group_id=obj.group_id,
            dialog=dialog,
        )

    additions = data.get("add_objects", [])
    if not isinstance(additions, list):
        raise ScriptError("add_objects must be a list", _line(data))
    for k, doc in enumerate(additions):
        if not isinstance(doc, dict):
            raise ScriptError(f"add_objects[{k}] must be a mapping", _line(data))
        scene_index = doc.get("scene", 0)
        if isinstance(scene_index, bool) or not isinstance(scene_index, int) or not 0 <= scene_index < len(scenes):
            raise ScriptError(
                f"add_objects[{k}].scene must be a scene index in [0, {len(scenes) - 1}]", _line(doc)
            )
        scenes[scene_index].append(_parse_object(doc, catalog, rng, groups, f"add_objects[{k}]"))

    new_scenes = data.get("add_scenes", [])
    if not isinstance(new_scenes, list):
        raise ScriptError("add_scenes must be a list", _line(data))
    for i, scene_doc in enumerate(new_scenes):
        objects = _parse_scene_objects(scene_doc, f"add_scenes[{i}]", catalog, rng, groups)
        scenes.append(objects)
        scene_ids.append(random_id(rng))

    story = Story(
        metadata=metadata,
        scenes=tuple(
            Scene(scene_id=sid, index=i, objects=tuple(objects))
            for i, (sid, objects) in enumerate(zip(scene_ids, scenes))
        ),
    )
    violations = validate_story(story, "draft")
    if violations:
        digest = "; ".join(f"{v.path}: {v.detail}" for v in violations)
        raise ScriptError(f"edits produce an invalid story: {digest}", _line(data))
    return story
