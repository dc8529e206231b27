"""Multimodal sentiment classification for fashion posts (vision, text, attributes)."""

__version__ = "0.1.0"
