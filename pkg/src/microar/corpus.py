"""Seeded synthetic corpus generator for exercising repository analytics.

Builds a publish-ordered list of valid stories (parents before remixes)
hitting exact targets: story/remix/self-remix counts, the 1 / 2 / 3+ scene
split among originals, the longest story, and the number of distinct and
total placed assets. Useful for seeding demo servers and for end-to-end
statistics tests at desk scale.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Optional

from .model import (
    AssetRef,
    DialogBalloon,
    Metadata,
    PlacedObject,
    Scene,
    Story,
    Transform,
    random_id,
)
from .geometry import quat_from_yaw
from .package import story_id

_NAME_POOL = (
    "person", "bee", "penguin", "piano", "dog", "cat", "robot", "flower",
    "tree", "rocket", "planet", "guitar", "drummer", "castle", "car",
    "cookie", "tortoise", "hare", "windmill", "knight", "astronaut", "mask",
)

_DIALOG_POOL = (
    "Hello there!", "VROOM", "Zzzz", "Raawr", "Who goes first?",
    "Follow me.", "pew pew", "What a day.", "Look up!", "SCREECH",
)

_TITLE_POOL = (
    "garden visit", "space race", "kitchen debate", "tiny concert",
    "morning walk", "night watch", "lost cookie", "big storm",
)


@dataclass
class _Slot:
    """One placed object whose asset key is assigned late, so distinct-key
    coverage can be guaranteed across the whole corpus."""

    object_id: str
    transform: Transform
    dialog: Optional[DialogBalloon] = None
    asset_index: Optional[int] = None


@dataclass
class _StoryPlan:
    scene_ids: list[str]
    scenes: list[list[_Slot]]
    creator: str
    title: str
    parent: Optional[int] = None  # index into the originals list
    is_parent: bool = False


def generate_corpus(
    seed: int = 7,
    total_stories: int = 194,
    remix_count: int = 48,
    self_remix_count: int = 11,
    one_scene_share: float = 0.26,
    two_scene_share: float = 0.32,
    max_scenes: int = 10,
    unique_assets: int = 325,
    total_objects: int = 1204,
    creators: int = 18,
    base_timestamp: int = 1_600_000_000,
) -> list[Story]:
    rng = random.Random(seed)
    original_count = total_stories - remix_count
    author_pool = [f"author-{i:02d}" for i in range(1, creators + 1)]
    keys = [hashlib.sha256(f"corpus-asset-{i:04d}".encode()).hexdigest() for i in range(unique_assets)]
    key_names = {
        i: _NAME_POOL[i % len(_NAME_POOL)] if i < len(_NAME_POOL) else f"{_NAME_POOL[i % len(_NAME_POOL)]} {i // len(_NAME_POOL) + 1}"
        for i in range(unique_assets)
    }

    def make_slot() -> _Slot:
        dialog = None
        if rng.random() < 0.3:
            dialog = DialogBalloon(rng.choice(_DIALOG_POOL), (0.0, round(rng.uniform(0.2, 0.6), 3), 0.0))
        transform = Transform(
            position=(round(rng.uniform(-2.0, 2.0), 3), 0.0, round(rng.uniform(-2.0, 2.0), 3)),
            rotation=quat_from_yaw(rng.uniform(-3.14, 3.14)),
            scale=rng.choice((0.5, 1.0, 1.0, 2.0)),
        )
        return _Slot(object_id=random_id(rng), transform=transform, dialog=dialog)

    # Scene counts for originals: exact 1 / 2 / 3+ bucket sizes, with the
    # first 3+ story pinned to the corpus maximum.
    ones = round(one_scene_share * original_count)
    twos = round(two_scene_share * original_count)
    threes = original_count - ones - twos
    counts = [1] * ones + [2] * twos + [max_scenes] + [rng.randint(3, max_scenes - 1) for _ in range(threes - 1)]
    rng.shuffle(counts)

    originals: list[_StoryPlan] = []
    for i, scene_count in enumerate(counts):
        scenes = [[make_slot()] for _ in range(scene_count)]
        originals.append(
            _StoryPlan(
                scene_ids=[random_id(rng) for _ in range(scene_count)],
                scenes=scenes,
                creator=rng.choice(author_pool),
                title=f"{rng.choice(_TITLE_POOL)} {i:03d}",
            )
        )

    # Remix parents stay short so remixes never exceed the corpus maximum.
    eligible = [i for i, plan in enumerate(originals) if len(plan.scenes) <= 5]
    parent_indices = rng.sample(eligible, remix_count)
    remixes: list[_StoryPlan] = []
    for j, parent_index in enumerate(parent_indices):
        parent = originals[parent_index]
        parent.is_parent = True
        if j < self_remix_count:
            creator = parent.creator
        else:
            creator = rng.choice([a for a in author_pool if a != parent.creator])
        plan = _StoryPlan(
            scene_ids=list(parent.scene_ids),
            scenes=[list(scene) for scene in parent.scenes],  # shared slots: copies keep ids
            creator=creator,
            title=f"remix {j:02d} of {parent.title}",
            parent=parent_index,
        )
        if j % 2 == 0:
            plan.scene_ids.append(random_id(rng))
            plan.scenes.append([make_slot()])
        else:
            plan.scenes[rng.randrange(len(plan.scenes))].append(make_slot())
        remixes.append(plan)

    copied = sum(sum(len(scene) for scene in originals[p].scenes) for p in parent_indices)
    own_slots = sum(sum(len(s) for s in plan.scenes) for plan in originals) + remix_count
    fillers = total_objects - own_slots - copied
    if fillers < 0:
        raise ValueError(f"cannot hit total_objects={total_objects}: corpus already has {own_slots + copied}")
    fillable = [plan for plan in originals if not plan.is_parent] + remixes
    for _ in range(fillers):
        plan = rng.choice(fillable)
        plan.scenes[rng.randrange(len(plan.scenes))].append(make_slot())

    # Assign asset keys: walk every non-copied slot once, covering each key
    # before reuse so distinct-asset counts come out exact.
    slots: list[_Slot] = []
    seen: set[int] = set()
    for plan in originals + remixes:
        for scene in plan.scenes:
            for slot in scene:
                if id(slot) not in seen:
                    seen.add(id(slot))
                    slots.append(slot)
    for n, slot in enumerate(slots):
        slot.asset_index = n if n < unique_assets else rng.randrange(unique_assets)

    def build_story(plan: _StoryPlan, created_at: int, parent_story: Optional[str], original_creator: str) -> Story:
        scenes = []
        for index, (scene_id, slot_list) in enumerate(zip(plan.scene_ids, plan.scenes)):
            objects = tuple(
                PlacedObject(
                    object_id=slot.object_id,
                    asset=AssetRef(keys[slot.asset_index], key_names[slot.asset_index]),
                    transform=slot.transform,
                    dialog=slot.dialog,
                )
                for slot in slot_list
            )
            scenes.append(Scene(scene_id=scene_id, index=index, objects=objects))
        metadata = Metadata(
            creator=plan.creator,
            title=plan.title,
            description=f"a micro story about {plan.title}",
            original_creator=original_creator,
            created_at=created_at,
            parent_story=parent_story,
        )
        return Story(metadata=metadata, scenes=tuple(scenes))

    stories: list[Story] = []
    original_ids: list[str] = []
    for i, plan in enumerate(originals):
        story = build_story(plan, base_timestamp + i, None, plan.creator)
        original_ids.append(story_id(story))
        stories.append(story)
    for j, plan in enumerate(remixes):
        parent_plan = originals[plan.parent]
        story = build_story(
            plan,
            base_timestamp + original_count + j,
            original_ids[plan.parent],
            parent_plan.creator,
        )
        stories.append(story)
    return stories
