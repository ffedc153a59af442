"""Lifelog day reconstruction: ingestion, stay-point analysis, timeline
compilation, and an episode review service."""

__version__ = "0.1.0"
