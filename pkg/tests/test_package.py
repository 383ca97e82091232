import io
import json
import random
import re
import zipfile

import pytest

from microar import package
from microar.model import (
    AssetRef,
    DialogBalloon,
    Metadata,
    PlacedObject,
    Scene,
    Story,
    StoryValidationError,
    Transform,
)

from conftest import random_story


def _reorder(value):
    """Rebuild JSON values with reversed key insertion order."""
    if isinstance(value, dict):
        return {k: _reorder(value[k]) for k in sorted(value, reverse=True)}
    if isinstance(value, list):
        return [_reorder(v) for v in value]
    return value


def scrambled_variant(data: bytes) -> bytes:
    """Same story, formatted badly: permuted keys, whitespace, compression,
    reordered members, plus an extra member."""
    with zipfile.ZipFile(io.BytesIO(data)) as archive:
        parts = {name: json.loads(archive.read(name)) for name in package.PART_ORDER}
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_DEFLATED) as archive:
        archive.writestr("extra/notes.txt", "ignore me")
        for name in reversed(package.PART_ORDER):
            archive.writestr(name, json.dumps(_reorder(parts[name]), indent=3))
    return buf.getvalue()


def simple_story(title="ten scenes", scene_count=1) -> Story:
    scenes = []
    for i in range(scene_count):
        obj = PlacedObject(
            object_id=f"{i:032x}",
            asset=AssetRef("key-a", "person"),
            transform=Transform(position=(1.5, 0.0, -0.25)),
        )
        scenes.append(Scene(scene_id=f"{i + 1000:032x}", index=i, objects=(obj,)))
    return Story(
        metadata=Metadata(creator="alice", title=title, description="d", created_at=42),
        scenes=tuple(scenes),
    )


class TestEncode:
    def test_equal_stories_identical_bytes(self):
        rng1, rng2 = random.Random(21), random.Random(21)
        a, b = random_story(rng1), random_story(rng2)
        assert a == b
        assert package.encode(a) == package.encode(b)

    def test_ten_scene_story_roundtrips(self):
        story = simple_story(scene_count=10)
        decoded = package.decode(package.encode(story))
        assert len(decoded.scenes) == 10
        assert decoded == story

    def test_transform_serialized_as_scaled_integers(self):
        data = package.encode(simple_story())
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            layout = json.loads(archive.read("layout.json"))
        entry = layout["scenes"][0]["objects"][0]
        assert entry["position_um"] == [1500000, 0, -250000]
        assert entry["rotation_nano"] == [1000000000, 0, 0, 0]
        assert entry["scale_ppm"] == 1000000

    def test_invalid_story_rejected_with_violations(self):
        story = Story(metadata=Metadata(creator="a", title="t", description="d"))
        with pytest.raises(StoryValidationError) as excinfo:
            package.encode(story)
        assert excinfo.value.violations

    def test_parts_stored_uncompressed_in_order(self):
        data = package.encode(simple_story())
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            infos = archive.infolist()
        assert [i.filename for i in infos] == list(package.PART_ORDER)
        assert all(i.compress_type == zipfile.ZIP_STORED for i in infos)
        assert all(i.date_time == (1980, 1, 1, 0, 0, 0) for i in infos)

    def test_no_float_literals_in_layout(self):
        rng = random.Random(99)
        for _ in range(20):
            data = package.encode(random_story(rng))
            with zipfile.ZipFile(io.BytesIO(data)) as archive:
                text = archive.read("layout.json").decode()
            assert not re.search(r"\d+\.\d+|[eE][+-]\d", text)


class TestDecode:
    def test_roundtrip_property(self):
        rng = random.Random(7)
        for _ in range(300):
            story = random_story(rng, publishable=rng.random() < 0.7)
            assert package.decode(package.encode(story)) == story

    def test_scrambled_input_decodes_equal_and_reencodes_canonical(self):
        rng = random.Random(13)
        for _ in range(25):
            story = random_story(rng)
            canonical = package.encode(story)
            variant = scrambled_variant(canonical)
            assert variant != canonical
            decoded = package.decode(variant)
            assert decoded == story
            assert package.encode(decoded) == canonical

    def test_missing_part(self):
        data = package.encode(simple_story())
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            kept = {n: archive.read(n) for n in package.PART_ORDER if n != "layout.json"}
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            for name, payload in kept.items():
                archive.writestr(name, payload)
        with pytest.raises(package.MissingPartError) as excinfo:
            package.decode(buf.getvalue())
        assert excinfo.value.part == "layout.json"

    def test_not_a_zip(self):
        with pytest.raises(package.BadArchiveError):
            package.decode(b"this is not an archive")

    def test_malformed_json(self):
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            archive.writestr("metadata.json", "{not json")
            archive.writestr("content.json", "{}")
            archive.writestr("layout.json", "{}")
        with pytest.raises(package.MalformedPartError):
            package.decode(buf.getvalue())

    def test_unknown_fields_ignored(self):
        story = simple_story()
        data = package.encode(story)
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            parts = {n: json.loads(archive.read(n)) for n in package.PART_ORDER}
        parts["metadata.json"]["future_field"] = {"anything": [1, 2, 3]}
        parts["content.json"]["scenes"][0]["objects"][0]["thumbnail"] = "x"
        parts["layout.json"]["scenes"][0]["objects"][0]["physics"] = True
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            for name in package.PART_ORDER:
                archive.writestr(name, json.dumps(parts[name]))
        assert package.decode(buf.getvalue()) == story

    def test_content_layout_mismatch(self):
        story = simple_story()
        data = package.encode(story)
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            parts = {n: json.loads(archive.read(n)) for n in package.PART_ORDER}
        parts["layout.json"]["scenes"][0]["objects"][0]["object_id"] = "f" * 32
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            for name in package.PART_ORDER:
                archive.writestr(name, json.dumps(parts[name]))
        with pytest.raises(package.PartMismatchError):
            package.decode(buf.getvalue())

    def test_duplicate_object_ids_rejected_as_invariant_violation(self):
        story = simple_story(scene_count=2)
        data = package.encode(story)
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            parts = {n: json.loads(archive.read(n)) for n in package.PART_ORDER}
        for part in ("content.json", "layout.json"):
            dup = parts[part]["scenes"][0]["objects"][0]
            parts[part]["scenes"][1]["objects"] = [dup]
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            for name in package.PART_ORDER:
                archive.writestr(name, json.dumps(parts[name]))
        with pytest.raises(package.InvariantViolationError):
            package.decode(buf.getvalue())


class TestVersioning:
    def _with_version(self, version) -> bytes:
        data = package.encode(simple_story())
        with zipfile.ZipFile(io.BytesIO(data)) as archive:
            parts = {n: json.loads(archive.read(n)) for n in package.PART_ORDER}
        if version is None:
            del parts["metadata.json"]["format_version"]
        else:
            parts["metadata.json"]["format_version"] = list(version)
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as archive:
            for name in package.PART_ORDER:
                archive.writestr(name, json.dumps(parts[name]))
        return buf.getvalue()

    def test_current_version_accepted(self):
        assert package.check_version(self._with_version((1, 0))) == (1, 0)

    def test_newer_minor_accepted(self):
        data = self._with_version((1, 7))
        assert package.check_version(data) == (1, 7)
        assert package.decode(data) is not None

    def test_newer_major_rejected(self):
        data = self._with_version((2, 0))
        with pytest.raises(package.UnsupportedMajorError):
            package.check_version(data)
        with pytest.raises(package.UnsupportedMajorError):
            package.decode(data)

    def test_missing_version_rejected(self):
        with pytest.raises(package.MissingVersionError):
            package.check_version(self._with_version(None))


class TestStoryId:
    def test_scrambling_does_not_change_id(self):
        rng = random.Random(31)
        story = random_story(rng)
        canonical_id = package.story_id(story)
        decoded = package.decode(scrambled_variant(package.encode(story)))
        assert package.story_id(decoded) == canonical_id

    def test_single_character_dialog_change_changes_id(self):
        base = simple_story()

        def with_dialog(text: str) -> Story:
            obj = PlacedObject(
                object_id="a" * 32, asset=AssetRef("key-a", "person"), dialog=DialogBalloon(text)
            )
            return Story(
                metadata=base.metadata,
                scenes=(Scene(scene_id=base.scenes[0].scene_id, index=0, objects=(obj,)),),
            )

        assert package.story_id(with_dialog("hello")) != package.story_id(with_dialog("hellp"))

    def test_collisions_absent_over_many_stories(self):
        ids = {package.story_id(simple_story(title=f"story {i}")) for i in range(10_000)}
        assert len(ids) == 10_000


class TestDraftMarker:
    def test_draft_flag_roundtrip(self):
        story = simple_story()
        draft = package.encode(story, draft=True)
        published = package.encode(story)
        assert draft != published
        assert package.is_draft(draft)
        assert not package.is_draft(published)
        assert package.decode(draft) == story
