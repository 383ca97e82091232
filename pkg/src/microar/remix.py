"""Remix derivation, lineage walking, story diffing, and corpus analytics.

Remixes keep their parent's scene and object ids, which makes diffs
well-defined: identity is id-based, never content-based, so deleting and
re-adding a look-alike object reads as removed + added.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .canonical import canonical_dumps
from .model import Metadata, Story, require_valid
from .package import story_id

StoryLookup = Callable[[str], Optional[Story]]


class LineageError(Exception):
    pass


class BrokenLineageError(LineageError):
    def __init__(self, missing_id: str):
        self.missing_id = missing_id
        super().__init__(f"story {missing_id} is not resolvable")


class CyclicLineageError(LineageError):
    def __init__(self, repeated_id: str):
        self.repeated_id = repeated_id
        super().__init__(f"lineage revisits story {repeated_id}")


@dataclass(frozen=True)
class StoryDiff:
    """Id-based difference between two stories; authored metadata is
    excluded because every remix changes it by definition."""

    objects_added: tuple[str, ...] = ()
    objects_removed: tuple[str, ...] = ()
    objects_transformed: tuple[str, ...] = ()
    dialogs_edited: tuple[str, ...] = ()
    scenes_added: int = 0
    scenes_removed: int = 0
    scenes_reordered: bool = False

    def is_empty(self) -> bool:
        return (
            not self.objects_added
            and not self.objects_removed
            and not self.objects_transformed
            and not self.dialogs_edited
            and self.scenes_added == 0
            and self.scenes_removed == 0
            and not self.scenes_reordered
        )

    def to_dict(self) -> dict:
        return {
            "dialogs_edited": list(self.dialogs_edited),
            "objects_added": list(self.objects_added),
            "objects_removed": list(self.objects_removed),
            "objects_transformed": list(self.objects_transformed),
            "scenes_added": self.scenes_added,
            "scenes_removed": self.scenes_removed,
            "scenes_reordered": self.scenes_reordered,
        }


@dataclass(frozen=True)
class SceneHistogram:
    """Scene counts of original (non-remix) stories, bucketed 1 / 2 / 3+."""

    one_scene: int = 0
    two_scenes: int = 0
    three_plus: int = 0
    max_scenes: int = 0


@dataclass(frozen=True)
class CorpusStats:
    total_stories: int
    remix_count: int
    self_remix_count: int
    remix_ratio: float
    self_remix_share: float
    scene_count_histogram: SceneHistogram
    unique_assets: int
    total_asset_instances: int

    def to_dict(self) -> dict:
        return {
            "remix_count": self.remix_count,
            "remix_ratio": self.remix_ratio,
            "scene_count_histogram": {
                "max_scenes": self.scene_count_histogram.max_scenes,
                "one_scene": self.scene_count_histogram.one_scene,
                "three_plus": self.scene_count_histogram.three_plus,
                "two_scenes": self.scene_count_histogram.two_scenes,
            },
            "self_remix_count": self.self_remix_count,
            "self_remix_share": self.self_remix_share,
            "total_asset_instances": self.total_asset_instances,
            "total_stories": self.total_stories,
            "unique_assets": self.unique_assets,
        }

    def to_canonical_json(self) -> str:
        return canonical_dumps(self.to_dict())


def derive_remix(parent: Story, new_creator: str) -> Story:
    """Start a remix draft: the parent's scenes with identical ids, lineage
    pointing at the parent, and title/description cleared for the new author.

    Placement hints carry over since the copied scenes keep the same
    physical needs.
    """
    require_valid(parent, "publish")
    metadata = Metadata(
        creator=new_creator,
        title="",
        description="",
        original_creator=parent.metadata.original_creator,
        created_at=0,
        parent_story=story_id(parent),
        placement_hints=parent.metadata.placement_hints,
    )
    return Story(metadata=metadata, scenes=parent.scenes)


def diff(parent: Story, child: Story) -> StoryDiff:
    """Describe how `child` differs from `parent`, matching objects and
    scenes by id. Transform and dialog changes are tracked only for objects
    present on both sides."""
    parent_objects = {o.object_id: o for o in parent.iter_objects()}
    child_objects = {o.object_id: o for o in child.iter_objects()}

    added = tuple(oid for oid in child_objects if oid not in parent_objects)
    removed = tuple(oid for oid in parent_objects if oid not in child_objects)
    transformed = []
    dialogs_edited = []
    for oid, cobj in child_objects.items():
        pobj = parent_objects.get(oid)
        if pobj is None:
            continue
        if pobj.transform != cobj.transform:
            transformed.append(oid)
        if pobj.dialog != cobj.dialog:
            dialogs_edited.append(oid)

    parent_scene_ids = [s.scene_id for s in parent.scenes]
    child_scene_ids = [s.scene_id for s in child.scenes]
    parent_set = set(parent_scene_ids)
    child_set = set(child_scene_ids)
    shared_in_parent = [sid for sid in parent_scene_ids if sid in child_set]
    shared_in_child = [sid for sid in child_scene_ids if sid in parent_set]

    return StoryDiff(
        objects_added=added,
        objects_removed=removed,
        objects_transformed=tuple(transformed),
        dialogs_edited=tuple(dialogs_edited),
        scenes_added=len(child_set - parent_set),
        scenes_removed=len(parent_set - child_set),
        scenes_reordered=shared_in_parent != shared_in_child,
    )


def lineage(lookup: StoryLookup, target_id: str) -> list[Story]:
    """Resolve the remix chain from the root down to `target_id`.

    Raises :class:`BrokenLineageError` when any ancestor (or the target) is
    unresolvable and :class:`CyclicLineageError` when an id repeats.
    """
    chain: list[Story] = []
    seen: set[str] = set()
    current: Optional[str] = target_id
    while current is not None:
        if current in seen:
            raise CyclicLineageError(current)
        seen.add(current)
        story = lookup(current)
        if story is None:
            raise BrokenLineageError(current)
        chain.append(story)
        current = story.metadata.parent_story
    chain.reverse()
    return chain


def is_self_remix(story: Story, lookup: StoryLookup) -> bool:
    """True when the story remixes its *immediate* parent's creator's work.

    Needs a lookup because the package records only the parent id, not the
    parent's creator; an unresolvable parent counts as not-self.
    """
    parent_id = story.metadata.parent_story
    if parent_id is None:
        return False
    parent = lookup(parent_id)
    if parent is None:
        return False
    return parent.metadata.creator == story.metadata.creator


def corpus_stats(stories: Sequence[Story]) -> CorpusStats:
    """Usage summary over a corpus: remix ratios, the scene-count histogram
    of original stories, and asset variety/volume."""
    by_id = {story_id(s): s for s in stories}
    lookup = by_id.get

    total = len(stories)
    remixes = [s for s in stories if s.metadata.parent_story is not None]
    self_remixes = [s for s in remixes if is_self_remix(s, lookup)]

    one = two = three_plus = 0
    max_scenes = 0
    for s in stories:
        if s.metadata.parent_story is not None:
            continue
        n = len(s.scenes)
        max_scenes = max(max_scenes, n)
        if n == 1:
            one += 1
        elif n == 2:
            two += 1
        elif n >= 3:
            three_plus += 1

    asset_keys = set()
    instances = 0
    for s in stories:
        for obj in s.iter_objects():
            asset_keys.add(obj.asset.asset_key)
            instances += 1

    remix_count = len(remixes)
    return CorpusStats(
        total_stories=total,
        remix_count=remix_count,
        self_remix_count=len(self_remixes),
        remix_ratio=remix_count / total if total else 0.0,
        self_remix_share=len(self_remixes) / remix_count if remix_count else 0.0,
        scene_count_histogram=SceneHistogram(one, two, three_plus, max_scenes),
        unique_assets=len(asset_keys),
        total_asset_instances=instances,
    )
