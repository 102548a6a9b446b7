"""HTTP service wrapping the core provisioning toolkit."""

from .app import create_app

__all__ = ["create_app"]
