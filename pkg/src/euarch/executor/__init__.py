"""Plan execution, artifact store, history, and access control."""

from .access import AccessRule, User, authorize
from .builtins import BUILTINS, get_builtin
from .history import HistoryLog, HistoryRecord
from .session import Runtime, RunOptions, Session, replay, resume, run, start, step
from .store import Artifact, ArtifactStore, DiskStore, digest_of
from .synthesis import synthesize_workflow

__all__ = [
    "AccessRule", "User", "authorize",
    "BUILTINS", "get_builtin",
    "HistoryLog", "HistoryRecord",
    "Runtime", "RunOptions", "Session", "run", "start", "step", "resume", "replay",
    "Artifact", "ArtifactStore", "DiskStore", "digest_of",
    "synthesize_workflow",
]
