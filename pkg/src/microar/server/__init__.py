"""HTTP story repository: publish, browse, fetch, remix lineage, usage
stats, and asset endpoints over canonical `.mar` packages."""

from .storage import StoryListing, StoryStore

__all__ = ["StoryListing", "StoryStore"]
