"""Content-addressed artifact store.

Digests are lowercase hex SHA-256 of the content and never change once
written; the store is append-only. Two backends: in-memory, and an on-disk
directory laid out ``store/<first two hex chars>/<digest>``.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..errors import MissingArtifact


def digest_of(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


@dataclass
class Artifact:
    digest: str
    format: str
    size_bytes: int
    created_at: float
    producing_step: Optional[str] = None

    def to_dict(self):
        return {"digest": self.digest, "format": self.format,
                "size_bytes": self.size_bytes, "created_at": self.created_at,
                "producing_step": self.producing_step}


class ArtifactStore:
    """Append-only content-addressed store (in-memory backend)."""

    def __init__(self):
        self._blobs: dict[str, bytes] = {}
        self._meta: dict[str, Artifact] = {}

    def put(self, content: bytes, format: str = "bytes",
            producing_step: str = None) -> Artifact:
        digest = digest_of(content)
        if digest not in self._blobs:
            self._write_blob(digest, content)
            self._meta[digest] = Artifact(
                digest=digest, format=format, size_bytes=len(content),
                created_at=time.time(), producing_step=producing_step)
        return self._meta[digest]

    def get(self, digest: str) -> bytes:
        blob = self._read_blob(digest)
        if blob is None:
            raise MissingArtifact(f"artifact {digest} is not in the store")
        return blob

    def meta(self, digest: str) -> Artifact:
        if digest not in self._meta:
            if self._read_blob(digest) is None:
                raise MissingArtifact(f"artifact {digest} is not in the store")
            blob = self._read_blob(digest)
            return Artifact(digest=digest, format="bytes", size_bytes=len(blob),
                            created_at=0.0)
        return self._meta[digest]

    def __contains__(self, digest: str) -> bool:
        return self._read_blob(digest) is not None

    def digests(self) -> set[str]:
        return set(self._blobs)

    # backend hooks
    def _write_blob(self, digest: str, content: bytes):
        self._blobs[digest] = content

    def _read_blob(self, digest: str) -> Optional[bytes]:
        return self._blobs.get(digest)


class DiskStore(ArtifactStore):
    def __init__(self, root: str | Path):
        super().__init__()
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        for shard in self.root.iterdir():
            if shard.is_dir():
                for blob in shard.iterdir():
                    self._blobs[blob.name] = None  # lazily loaded

    def _path(self, digest: str) -> Path:
        return self.root / digest[:2] / digest

    def _write_blob(self, digest: str, content: bytes):
        path = self._path(digest)
        path.parent.mkdir(parents=True, exist_ok=True)
        if not path.exists():
            path.write_bytes(content)
        self._blobs[digest] = None

    def _read_blob(self, digest: str) -> Optional[bytes]:
        if digest not in self._blobs:
            path = self._path(digest)
            if not path.exists():
                return None
            self._blobs[digest] = None
        path = self._path(digest)
        return path.read_bytes() if path.exists() else None

    def digests(self) -> set[str]:
        found = set()
        for shard in self.root.iterdir():
            if shard.is_dir():
                found.update(p.name for p in shard.iterdir())
        return found
