"""Micro AR: scene-based AR story packaging, layout, remixing, and sharing.

The pieces compose bottom-up: :mod:`microar.model` defines the value types,
:mod:`microar.package` turns stories into canonical `.mar` bytes,
:mod:`microar.layout` reconstructs scenes on physical planes,
:mod:`microar.remix` handles derivation/diff/lineage,
:mod:`microar.catalog` stores assets content-addressed, and
:mod:`microar.server` + :mod:`microar.cli` put it all on the wire.
"""

from .model import (
    Aabb,
    AssetRef,
    CameraPose,
    DialogBalloon,
    Metadata,
    ModelError,
    PlacedObject,
    PlacementHints,
    Plane,
    Scene,
    Story,
    StoryValidationError,
    SurfaceClass,
    Transform,
    Violation,
    quantize_transform,
    random_id,
    validate_story,
)
from .package import FILE_EXTENSION, MEDIA_TYPE, check_version, decode, encode, story_id

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "AssetRef",
    "CameraPose",
    "DialogBalloon",
    "FILE_EXTENSION",
    "MEDIA_TYPE",
    "Metadata",
    "ModelError",
    "PlacedObject",
    "PlacementHints",
    "Plane",
    "Scene",
    "Story",
    "StoryValidationError",
    "SurfaceClass",
    "Transform",
    "Violation",
    "check_version",
    "decode",
    "encode",
    "quantize_transform",
    "random_id",
    "story_id",
    "validate_story",
    "__version__",
]
