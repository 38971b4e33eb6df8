"""Utility package for the KKM solver, exposing file I/O helpers."""

from src.config import settings

from .file_io import append_jsonl, load_json, write_json, write_text

__all__ = [
    "settings",
    "append_jsonl",
    "load_json",
    "write_json",
    "write_text",
]
