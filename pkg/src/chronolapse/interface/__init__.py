"""CLI and HTTP service exposing the planning pipeline."""

from .service import Session, create_app

__all__ = ["Session", "create_app"]
