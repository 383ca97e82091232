"""The golden story fixture: a fixed, hand-written story whose canonical
package bytes are committed at tests/data/golden.mar.

Any compatible encoder must reproduce those bytes exactly; tests/data/
golden.json carries the same story as plain JSON (meters as floats) plus
the frozen hashes so other implementations can share the fixture.
"""

from __future__ import annotations

from microar.model import (
    AssetRef,
    DialogBalloon,
    Metadata,
    PlacedObject,
    PlacementHints,
    Scene,
    Story,
    SurfaceClass,
    Transform,
)

# SHA-256 of tests/data/golden.mar, which is also the golden story's id.
GOLDEN_STORY_ID = "7d120b46fcf45fb5183ea4105cdb5234292b441b3d52eee931e8f07358cec6a1"


def golden_story() -> Story:
    return Story(
        metadata=Metadata(
            creator="alice",
            title="Die Bienen 🐝",
            description="two bees argue about the last flower — then share it",
            original_creator="alice",
            created_at=1_610_000_000,
            placement_hints=PlacementHints(
                surface_class=SurfaceClass.TABLE,
                min_extents=(1.5, 1.0),
                note="best on a floral tablecloth",
            ),
        ),
        scenes=(
            Scene(
                scene_id="5eed5eed5eed5eed5eed5eed5eed0001",
                index=0,
                objects=(
                    PlacedObject(
                        object_id="0b1ec70b1ec70b1ec70b1ec70b1ec701",
                        asset=AssetRef("a55e7a55e7a55e7a55e7a55e7a55e701", "bee"),
                        transform=Transform(
                            position=(0.25, 0.1, -0.125),
                            rotation=(0.923879533, 0.0, 0.382683432, 0.0),
                            scale=1.5,
                        ),
                        group_id="96009600960096009600960096009601",
                        dialog=DialogBalloon("That flower is mine!", (0.0, 0.3, 0.0)),
                    ),
                    PlacedObject(
                        object_id="0b1ec70b1ec70b1ec70b1ec70b1ec702",
                        asset=AssetRef("a55e7a55e7a55e7a55e7a55e7a55e701", "bee"),
                        transform=Transform(position=(-0.25, 0.1, 0.0)),
                        group_id="96009600960096009600960096009601",
                    ),
                    PlacedObject(
                        object_id="0b1ec70b1ec70b1ec70b1ec70b1ec703",
                        asset=AssetRef("a55e7a55e7a55e7a55e7a55e7a55e702", "flower"),
                        transform=Transform(position=(0.0, 0.0, 0.2), scale=0.75),
                    ),
                ),
            ),
            Scene(
                scene_id="5eed5eed5eed5eed5eed5eed5eed0002",
                index=1,
                objects=(
                    PlacedObject(
                        object_id="0b1ec70b1ec70b1ec70b1ec70b1ec704",
                        asset=AssetRef("a55e7a55e7a55e7a55e7a55e7a55e701", "bee"),
                        transform=Transform(position=(0.0, 0.2, 0.0)),
                        dialog=DialogBalloon("Fine — we share. 🌼", (0.05, 0.35, 0.0)),
                    ),
                ),
            ),
        ),
    )
