"""End-user architecting workbench."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Architecture, CompositeDef, ResolvedStyle, Style,
    encapsulate, expand, instantiate, resolve_style,
)
from .conformance import Violation, check, dataflow_graph  # noqa: F401
