import json
import random

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
    random_id,
)
from microar.remix import (
    BrokenLineageError,
    CyclicLineageError,
    StoryDiff,
    corpus_stats,
    derive_remix,
    diff,
    is_self_remix,
    lineage,
)

from conftest import random_story


def story_with_scenes(creator="alice", scene_count=5, created_at=100) -> Story:
    rng = random.Random(scene_count * 1000 + created_at)
    scenes = tuple(
        Scene(
            scene_id=random_id(rng),
            index=i,
            objects=(
                PlacedObject(
                    object_id=random_id(rng),
                    asset=AssetRef(f"asset-{i}", "person"),
                    transform=Transform(position=(i * 0.5, 0.0, 0.0)),
                    dialog=DialogBalloon("hi") if i % 2 == 0 else None,
                ),
            ),
        )
        for i in range(scene_count)
    )
    return Story(
        metadata=Metadata(creator=creator, title="five scenes", description="d", created_at=created_at),
        scenes=scenes,
    )


def replace_metadata(story: Story, **overrides) -> Story:
    meta = story.metadata
    fields = dict(
        creator=meta.creator,
        title=meta.title or "filled title",
        description=meta.description or "filled description",
        original_creator=meta.original_creator,
        created_at=meta.created_at,
        parent_story=meta.parent_story,
        placement_hints=meta.placement_hints,
    )
    fields.update(overrides)
    return Story(metadata=Metadata(**fields), scenes=story.scenes)


class TestDeriveRemix:
    def test_scenes_copied_with_identical_ids(self):
        parent = story_with_scenes()
        child = derive_remix(parent, "bob")
        assert [s.scene_id for s in child.scenes] == [s.scene_id for s in parent.scenes]
        assert [o.object_id for o in child.iter_objects()] == [o.object_id for o in parent.iter_objects()]

    def test_lineage_and_authorship_fields(self):
        parent = story_with_scenes()
        child = derive_remix(parent, "bob")
        assert child.metadata.parent_story == package.story_id(parent)
        assert child.metadata.creator == "bob"
        assert child.metadata.original_creator == "alice"
        assert child.metadata.title == ""
        assert child.metadata.description == ""

    def test_self_remix_of_own_story(self):
        parent = story_with_scenes(creator="alice")
        child = derive_remix(parent, "alice")
        lookup = {package.story_id(parent): parent}.get
        assert is_self_remix(child, lookup) is True

    def test_remix_of_remix_preserves_root_creator(self):
        root = story_with_scenes(creator="alice")
        mid = replace_metadata(derive_remix(root, "bob"), created_at=200)
        grand = derive_remix(mid, "carol")
        assert grand.metadata.original_creator == "alice"

    def test_unedited_remix_diffs_empty(self):
        parent = story_with_scenes()
        child = derive_remix(parent, "bob")
        assert diff(parent, child).is_empty()

    def test_unpublishable_parent_rejected(self):
        draft = Story(
            metadata=Metadata(creator="a"),
            scenes=(Scene(scene_id="1" * 32, index=0),),
        )
        with pytest.raises(StoryValidationError):
            derive_remix(draft, "bob")


class TestDiff:
    def test_identical_stories_empty(self):
        rng = random.Random(61)
        for _ in range(20):
            story = random_story(rng)
            assert diff(story, story) == StoryDiff()

    def test_added_scene_counted(self):
        parent = story_with_scenes(scene_count=5)
        extra = Scene(
            scene_id=random_id(),
            index=5,
            objects=(PlacedObject(object_id=random_id(), asset=AssetRef("cat", "robot cat")),),
        )
        child = Story(metadata=parent.metadata, scenes=parent.scenes + (extra,))
        d = diff(parent, child)
        assert d.scenes_added == 1
        assert d.scenes_removed == 0
        assert len(d.objects_added) == 1
        assert not d.scenes_reordered

    def test_moved_object_is_transformed(self):
        parent = story_with_scenes(scene_count=2)
        target = parent.scenes[0].objects[0]
        moved = PlacedObject(
            object_id=target.object_id,
            asset=target.asset,
            transform=Transform(position=(1.0, 0.0, 0.0)),
            dialog=target.dialog,
        )
        child = Story(
            metadata=parent.metadata,
            scenes=(
                Scene(scene_id=parent.scenes[0].scene_id, index=0, objects=(moved,)),
                parent.scenes[1],
            ),
        )
        d = diff(parent, child)
        assert d.objects_transformed == (target.object_id,)
        assert d.objects_added == () and d.objects_removed == ()

    def test_dialog_presence_change_is_an_edit(self):
        parent = story_with_scenes(scene_count=1)
        target = parent.scenes[0].objects[0]
        assert target.dialog is not None
        silenced = PlacedObject(
            object_id=target.object_id, asset=target.asset, transform=target.transform, dialog=None
        )
        child = Story(
            metadata=parent.metadata,
            scenes=(Scene(scene_id=parent.scenes[0].scene_id, index=0, objects=(silenced,)),),
        )
        assert diff(parent, child).dialogs_edited == (target.object_id,)

    def test_reorder_detected(self):
        parent = story_with_scenes(scene_count=3)
        swapped = (
            Scene(scene_id=parent.scenes[1].scene_id, index=0, objects=parent.scenes[1].objects),
            Scene(scene_id=parent.scenes[0].scene_id, index=1, objects=parent.scenes[0].objects),
            parent.scenes[2],
        )
        child = Story(metadata=parent.metadata, scenes=swapped)
        assert diff(parent, child).scenes_reordered is True

    def test_delete_and_readd_is_removed_plus_added(self):
        parent = story_with_scenes(scene_count=1)
        target = parent.scenes[0].objects[0]
        lookalike = PlacedObject(
            object_id=random_id(), asset=target.asset, transform=target.transform, dialog=target.dialog
        )
        child = Story(
            metadata=parent.metadata,
            scenes=(Scene(scene_id=parent.scenes[0].scene_id, index=0, objects=(lookalike,)),),
        )
        d = diff(parent, child)
        assert d.objects_removed == (target.object_id,)
        assert d.objects_added == (lookalike.object_id,)

    def test_disjointness_invariant(self):
        rng = random.Random(67)
        for _ in range(30):
            a, b = random_story(rng), random_story(rng)
            d = diff(a, b)
            added, removed, transformed = set(d.objects_added), set(d.objects_removed), set(d.objects_transformed)
            assert not (added & removed) and not (added & transformed) and not (removed & transformed)


class TestLineage:
    def chain(self, length=3):
        stories = [story_with_scenes(creator="alice", created_at=100)]
        for i in range(1, length):
            child = derive_remix(stories[-1], f"author-{i}")
            stories.append(replace_metadata(child, created_at=100 + i))
        return {package.story_id(s): s for s in stories}, stories

    def test_root_story_chain_of_one(self):
        by_id, stories = self.chain(1)
        assert lineage(by_id.get, package.story_id(stories[0])) == [stories[0]]

    def test_remix_of_remix_chain_of_three(self):
        by_id, stories = self.chain(3)
        assert lineage(by_id.get, package.story_id(stories[-1])) == stories

    def test_missing_ancestor_breaks(self):
        by_id, stories = self.chain(2)
        del by_id[package.story_id(stories[0])]
        with pytest.raises(BrokenLineageError):
            lineage(by_id.get, package.story_id(stories[1]))

    def test_unknown_target_breaks(self):
        by_id, _ = self.chain(1)
        with pytest.raises(BrokenLineageError):
            lineage(by_id.get, "f" * 64)

    def test_cycle_detected(self):
        # hand-build two stories that claim each other as parents
        a_id, b_id = "a" * 64, "b" * 64
        scene = Scene(scene_id="5" * 32, index=0)
        a = Story(
            metadata=Metadata(creator="x", original_creator="r", parent_story=b_id), scenes=(scene,)
        )
        b = Story(
            metadata=Metadata(creator="y", original_creator="r", parent_story=a_id), scenes=(scene,)
        )
        with pytest.raises(CyclicLineageError):
            lineage({a_id: a, b_id: b}.get, a_id)


class TestIsSelfRemix:
    def test_root_is_not_self_remix(self):
        story = story_with_scenes()
        assert is_self_remix(story, lambda _: None) is False

    def test_same_creator_is_self_remix(self):
        parent = story_with_scenes(creator="alice")
        child = derive_remix(parent, "alice")
        assert is_self_remix(child, {package.story_id(parent): parent}.get) is True

    def test_other_creator_is_not(self):
        parent = story_with_scenes(creator="alice")
        child = derive_remix(parent, "bob")
        assert is_self_remix(child, {package.story_id(parent): parent}.get) is False

    def test_resolved_against_immediate_parent_not_root(self):
        root = story_with_scenes(creator="alice")
        mid = replace_metadata(derive_remix(root, "bob"), created_at=101)
        # alice remixes bob's remix of alice's story: immediate parent is bob's
        grand = derive_remix(mid, "alice")
        lookup = {package.story_id(root): root, package.story_id(mid): mid}.get
        assert is_self_remix(grand, lookup) is False


class TestCorpusStats:
    def test_empty_corpus_all_zeros(self):
        stats = corpus_stats([])
        assert stats.total_stories == 0
        assert stats.remix_ratio == 0.0
        assert stats.self_remix_share == 0.0
        assert stats.unique_assets == 0

    def test_asset_counting(self):
        a = story_with_scenes(scene_count=2, created_at=1)
        b = story_with_scenes(scene_count=3, created_at=2)
        stats = corpus_stats([a, b])
        # per-scene asset keys repeat across the two stories
        assert stats.total_asset_instances == 5
        assert stats.unique_assets == 3
        assert stats.scene_count_histogram.two_scenes == 1
        assert stats.scene_count_histogram.three_plus == 1
        assert stats.scene_count_histogram.max_scenes == 3

    def test_report_is_canonical_json(self):
        stats = corpus_stats([story_with_scenes()])
        text = stats.to_canonical_json()
        assert json.loads(text)["total_stories"] == 1
        assert ": " not in text and "\n" not in text
