"""Annotation service: HTTP backend for the browser annotation UI."""

from polyfuse.service.app import create_app
from polyfuse.service.store import AnnotationStore

__all__ = ["AnnotationStore", "create_app"]
