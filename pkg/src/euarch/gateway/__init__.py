"""HTTP/JSON service and CLI surface for the workbench."""

from .app import GatewayConfig, GatewayState, create_app

__all__ = ["GatewayConfig", "GatewayState", "create_app"]
