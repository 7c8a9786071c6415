"""HTTP service exposing fog rendering and tracking evaluation."""

from .app import create_app

__all__ = ["create_app"]
