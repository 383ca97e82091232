"""Crash-safe story storage: content-addressed package blobs plus an
append-only metadata journal, replayed into an in-memory index at startup.

Published packages are immutable; nothing here ever rewrites a stored blob.
View counts are mutable server-side state and are journaled one event per
successful fetch so replay reproduces them exactly.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

from .. import package, remix
from ..canonical import canonical_line
from ..model import Story, Violation, validate_story


class StorageError(Exception):
    pass


class InvalidPackageError(StorageError):
    """The uploaded bytes do not decode to a publish-valid story."""

    def __init__(self, detail: str, violations: Optional[list[Violation]] = None):
        self.violations = violations or []
        super().__init__(detail)


class UnknownParentError(StorageError):
    def __init__(self, parent_id: str):
        self.parent_id = parent_id
        super().__init__(f"parent story {parent_id} has not been published")


class CreatorMismatchError(StorageError):
    def __init__(self) -> None:
        super().__init__("creator header does not match the package's creator")


class UnknownStoryError(StorageError, LookupError):
    def __init__(self, story_id: str):
        self.story_id = story_id
        super().__init__(f"no story with id {story_id}")


@dataclass(frozen=True)
class StoryListing:
    story_id: str
    title: str
    creator: str
    original_creator: str
    description: str
    scene_count: int
    created_at: int
    parent_story: Optional[str] = None
    view_count: int = 0

    def to_dict(self) -> dict:
        doc = {
            "created_at": self.created_at,
            "creator": self.creator,
            "description": self.description,
            "original_creator": self.original_creator,
            "scene_count": self.scene_count,
            "story_id": self.story_id,
            "title": self.title,
            "view_count": self.view_count,
        }
        if self.parent_story is not None:
            doc["parent_story"] = self.parent_story
        return doc


class StoryStore:
    """Package blobs under ``stories/<first2>/<id>.mar`` plus ``stories.log``."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.blob_dir = self.root / "stories"
        self.journal_path = self.root / "stories.log"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._listings: dict[str, StoryListing] = {}
        self._publish_order: list[str] = []
        self._replay()

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        for line_no, line in enumerate(self.journal_path.read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                event = json.loads(line)
                kind = event["event"]
                if kind == "publish":
                    listing = StoryListing(
                        story_id=event["story_id"],
                        title=event["title"],
                        creator=event["creator"],
                        original_creator=event["original_creator"],
                        description=event["description"],
                        scene_count=event["scene_count"],
                        created_at=event["created_at"],
                        parent_story=event.get("parent_story"),
                    )
                    self._listings[listing.story_id] = listing
                    self._publish_order.append(listing.story_id)
                elif kind == "view":
                    sid = event["story_id"]
                    listing = self._listings[sid]
                    self._listings[sid] = replace(listing, view_count=listing.view_count + 1)
                else:
                    raise ValueError(f"unknown event {kind!r}")
            except (ValueError, KeyError, TypeError) as exc:
                raise StorageError(f"{self.journal_path}:{line_no}: {exc}") from exc

    def _blob_path(self, story_id: str) -> Path:
        return self.blob_dir / story_id[:2] / f"{story_id}{package.FILE_EXTENSION}"

    def _append(self, event: dict) -> None:
        with self.journal_path.open("a", encoding="utf-8") as journal:
            journal.write(canonical_line(event))

    def publish(self, data: bytes, expected_creator: Optional[str] = None) -> tuple[str, bool]:
        """Validate, canonicalize, and store a package.

        Returns ``(story_id, created)``; republishing identical content is
        idempotent and reports ``created=False``. Remixes require their
        parent to be published first. When ``expected_creator`` is given it
        must match the package's declared creator.
        """
        try:
            story = package.decode(data)
        except package.PackageError as exc:
            raise InvalidPackageError(str(exc)) from exc
        if expected_creator is not None and story.metadata.creator != expected_creator:
            raise CreatorMismatchError()
        violations = validate_story(story, "publish")
        if violations:
            raise InvalidPackageError("story is not publishable", violations)
        canonical = package.encode(story)
        sid = package.story_id(story)
        with self._lock:
            if sid in self._listings:
                return sid, False
            parent = story.metadata.parent_story
            if parent is not None and parent not in self._listings:
                raise UnknownParentError(parent)
            blob_path = self._blob_path(sid)
            blob_path.parent.mkdir(parents=True, exist_ok=True)
            blob_path.write_bytes(canonical)
            listing = StoryListing(
                story_id=sid,
                title=story.metadata.title,
                creator=story.metadata.creator,
                original_creator=story.metadata.original_creator,
                description=story.metadata.description,
                scene_count=len(story.scenes),
                created_at=story.metadata.created_at,
                parent_story=parent,
            )
            event = {"event": "publish", **listing.to_dict()}
            # Resolved against the immediate parent while we still hold it.
            event["self_remix"] = (
                parent is not None and self._listings[parent].creator == story.metadata.creator
            )
            del event["view_count"]
            self._append(event)
            self._listings[sid] = listing
            self._publish_order.append(sid)
        return sid, True

    def fetch(self, story_id: str) -> bytes:
        """Return the published bytes, counting the view exactly once."""
        with self._lock:
            listing = self._listings.get(story_id)
            if listing is None:
                raise UnknownStoryError(story_id)
            self._append({"event": "view", "story_id": story_id})
            self._listings[story_id] = replace(listing, view_count=listing.view_count + 1)
        return self._blob_path(story_id).read_bytes()

    def meta(self, story_id: str) -> StoryListing:
        listing = self._listings.get(story_id)
        if listing is None:
            raise UnknownStoryError(story_id)
        return listing

    def exists(self, story_id: str) -> bool:
        return story_id in self._listings

    def load_story(self, story_id: str) -> Story:
        if story_id not in self._listings:
            raise UnknownStoryError(story_id)
        return package.decode(self._blob_path(story_id).read_bytes())

    def list_stories(
        self, page: int, page_size: int, creator: Optional[str] = None
    ) -> tuple[list[StoryListing], int]:
        """One stable page (newest first, ids as tiebreak) plus the filtered total."""
        listings = [
            l for l in self._listings.values() if creator is None or l.creator == creator
        ]
        listings.sort(key=lambda l: (-l.created_at, l.story_id))
        start = (page - 1) * page_size
        return listings[start : start + page_size], len(listings)

    def lineage(self, story_id: str) -> list[StoryListing]:
        """Root-to-target chain, resolved through the remix engine."""
        if story_id not in self._listings:
            raise UnknownStoryError(story_id)

        def lookup(sid: str) -> Optional[Story]:
            try:
                return self.load_story(sid)
            except UnknownStoryError:
                return None

        chain = remix.lineage(lookup, story_id)
        return [self._listings[package.story_id(s)] for s in chain]

    def stats(self) -> remix.CorpusStats:
        stories = [self.load_story(sid) for sid in self._publish_order]
        return remix.corpus_stats(stories)
