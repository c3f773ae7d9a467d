"""Mine API usage idioms from a MiniLang corpus and synthesize snippets for natural-language queries."""

__version__ = "0.1.0"

from importlib import resources
from pathlib import Path


def fixture_path(*parts: str) -> Path:
    """Path inside the bundled demo fixture (registry, corpus, clicks, docs, cases)."""
    return Path(str(resources.files(__name__).joinpath("data", "fixture", *parts)))
