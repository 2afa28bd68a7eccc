"""HTTP service exposing the toolkit; see :func:`privrepair.service.app.create_app`."""

from privrepair.service.app import create_app

__all__ = ["create_app"]
