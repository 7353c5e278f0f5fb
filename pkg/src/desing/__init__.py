"""Constructive resolution of singularities of basic objects over Q."""

from __future__ import annotations

__version__ = "0.1.0"
