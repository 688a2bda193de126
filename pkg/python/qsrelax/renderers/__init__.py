"""Progress renderers subscribed to the event router."""

from __future__ import annotations

from .rich_renderer import RichRenderer

__all__ = ["RichRenderer"]
