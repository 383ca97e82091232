"""Content-addressed 3D asset storage with keyword search.

A local stand-in for a cloud model library: blobs live under
``blobs/<first2>/<key>`` keyed by their SHA-256, and an append-only
``index.log`` of canonical JSON records carries the searchable metadata.
The in-memory index is rebuilt by replaying the journal at startup. Blob
format is opaque — the catalog never parses models, so bounds and tags are
ingestion-time metadata.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .canonical import canonical_line
from .model import Aabb, ModelError, Story

_UM_PER_M = 10**6


class CatalogError(Exception):
    pass


class AssetNotFoundError(CatalogError, LookupError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"no asset with key {key}")


class CatalogCorruptionError(CatalogError):
    pass


@dataclass(frozen=True)
class AssetRecord:
    asset_key: str
    display_name: str
    tags: tuple[str, ...] = ()
    blob_size: int = 0
    bounds: Aabb = Aabb()

    def __post_init__(self) -> None:
        if not self.display_name:
            raise ModelError("display_name must be non-empty")
        object.__setattr__(self, "tags", tuple(t.lower() for t in self.tags))


def _bounds_to_um(bounds: Aabb) -> list[list[int]]:
    return [[round(c * _UM_PER_M) for c in bounds.min], [round(c * _UM_PER_M) for c in bounds.max]]


def _bounds_from_um(pair) -> Aabb:
    lo, hi = pair
    return Aabb(tuple(c / _UM_PER_M for c in lo), tuple(c / _UM_PER_M for c in hi))


class AssetCatalog:
    """Disk-backed catalog; safe for concurrent reads, writes serialized."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.blob_dir = self.root / "blobs"
        self.index_path = self.root / "index.log"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._records: dict[str, AssetRecord] = {}
        self._replay()

    def _replay(self) -> None:
        if not self.index_path.exists():
            return
        for line_no, line in enumerate(self.index_path.read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                record = AssetRecord(
                    asset_key=doc["asset_key"],
                    display_name=doc["display_name"],
                    tags=tuple(doc.get("tags", ())),
                    blob_size=doc["blob_size"],
                    bounds=_bounds_from_um(doc["bounds_um"]),
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise CatalogCorruptionError(f"{self.index_path}:{line_no}: {exc}") from exc
            self._records[record.asset_key] = record

    def _blob_path(self, key: str) -> Path:
        return self.blob_dir / key[:2] / key

    def put_asset(
        self,
        blob: bytes,
        display_name: str,
        tags: Sequence[str] = (),
        bounds: Optional[Aabb] = None,
    ) -> str:
        """Store a blob and its metadata; idempotent on identical bytes.

        Re-putting existing content returns the existing key and keeps the
        first-written metadata.
        """
        if not blob:
            raise CatalogError("asset blob must be non-empty")
        key = hashlib.sha256(blob).hexdigest()
        with self._lock:
            if key in self._records:
                return key
            record = AssetRecord(
                asset_key=key,
                display_name=display_name,
                tags=tuple(tags),
                blob_size=len(blob),
                bounds=bounds if bounds is not None else Aabb(),
            )
            path = self._blob_path(key)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(blob)
            with self.index_path.open("a", encoding="utf-8") as journal:
                journal.write(
                    canonical_line(
                        {
                            "asset_key": record.asset_key,
                            "blob_size": record.blob_size,
                            "bounds_um": _bounds_to_um(record.bounds),
                            "display_name": record.display_name,
                            "tags": list(record.tags),
                        }
                    )
                )
            self._records[key] = record
        return key

    def get_asset(self, key: str) -> bytes:
        """Return the exact original bytes, re-verified against the key."""
        if key not in self._records:
            raise AssetNotFoundError(key)
        blob = self._blob_path(key).read_bytes()
        if hashlib.sha256(blob).hexdigest() != key:
            raise CatalogCorruptionError(f"blob for {key} fails its digest check")
        return blob

    def get_record(self, key: str) -> AssetRecord:
        record = self._records.get(key)
        if record is None:
            raise AssetNotFoundError(key)
        return record

    def has(self, key: str) -> bool:
        return key in self._records

    def records(self) -> list[AssetRecord]:
        return sorted(self._records.values(), key=lambda r: (r.display_name, r.asset_key))

    def __len__(self) -> int:
        return len(self._records)

    def search(self, query: str, limit: int) -> list[AssetRecord]:
        """Case-insensitive token match over display names and tags.

        Ranked by matched token count, then display name, then key, so
        repeated searches are reproducible.
        """
        if limit <= 0:
            raise ValueError(f"limit must be positive, got {limit}")
        query_tokens = set(query.lower().split())
        if not query_tokens:
            return []
        matches: list[tuple[int, str, str, AssetRecord]] = []
        for record in self._records.values():
            tokens = set(record.display_name.lower().split()) | set(record.tags)
            matched = len(query_tokens & tokens)
            if matched:
                matches.append((-matched, record.display_name, record.asset_key, record))
        matches.sort(key=lambda m: m[:3])
        return [m[3] for m in matches[:limit]]

    def bounds_for(self, asset_key: str) -> Aabb:
        """Catalog bounds with the documented unit-cube fallback."""
        record = self._records.get(asset_key)
        return record.bounds if record is not None else Aabb()


def prefetch_plan(story: Story) -> list[str]:
    """Asset keys in first-use order (scene order, then object order),
    deduplicated keeping the first occurrence, so downloads can start while
    the viewer is still scanning for a surface."""
    seen: set[str] = set()
    plan: list[str] = []
    for obj in story.iter_objects():
        key = obj.asset.asset_key
        if key not in seen:
            seen.add(key)
            plan.append(key)
    return plan


# Placeholder models shipped for offline use: (name, tags, bounds extents).
_BUILTIN_SPECS: tuple[tuple[str, tuple[str, ...], tuple[float, float, float]], ...] = (
    ("person", ("human", "character"), (0.5, 1.75, 0.3)),
    ("old man", ("human", "character", "elder"), (0.5, 1.7, 0.3)),
    ("girl", ("human", "character", "child"), (0.4, 1.3, 0.25)),
    ("bee", ("insect", "animal", "flying"), (0.12, 0.1, 0.16)),
    ("penguin", ("bird", "animal"), (0.3, 0.6, 0.3)),
    ("piano", ("instrument", "music"), (1.5, 1.1, 0.65)),
    ("dog", ("animal", "pet"), (0.7, 0.6, 0.3)),
    ("cat", ("animal", "pet"), (0.5, 0.4, 0.2)),
    ("robot", ("machine", "character"), (0.6, 1.4, 0.4)),
    ("robot cat", ("machine", "animal", "pet"), (0.5, 0.45, 0.22)),
    ("flower", ("plant", "nature"), (0.2, 0.4, 0.2)),
    ("tree", ("plant", "nature"), (1.2, 2.5, 1.2)),
    ("rocket", ("space", "vehicle"), (0.6, 2.2, 0.6)),
    ("planet", ("space",), (1.0, 1.0, 1.0)),
    ("guitar", ("instrument", "music"), (0.4, 1.0, 0.15)),
    ("drum", ("instrument", "music"), (0.6, 0.5, 0.6)),
    ("castle", ("building",), (2.0, 1.8, 2.0)),
    ("car", ("vehicle",), (1.8, 1.4, 4.2)),
    ("cookie", ("food",), (0.12, 0.02, 0.12)),
    ("tortoise", ("animal",), (0.5, 0.25, 0.35)),
    ("hare", ("animal",), (0.3, 0.5, 0.25)),
    ("basketball", ("sport", "ball"), (0.24, 0.24, 0.24)),
    ("knight", ("human", "character"), (0.6, 1.8, 0.4)),
    ("windmill", ("building",), (1.4, 2.4, 1.4)),
)


def builtin_blob(name: str) -> bytes:
    return f"microar placeholder model: {name}\n".encode("utf-8")


def install_builtin_assets(catalog: AssetCatalog) -> list[str]:
    """Seed a catalog with the built-in placeholder set; idempotent."""
    keys = []
    for name, tags, (w, h, d) in _BUILTIN_SPECS:
        bounds = Aabb((-w / 2, 0.0, -d / 2), (w / 2, h, d / 2))
        keys.append(catalog.put_asset(builtin_blob(name), name, tags, bounds))
    return keys
