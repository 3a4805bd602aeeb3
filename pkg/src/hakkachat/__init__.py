"""Retrieval-augmented Hakka culture chat service.

Three-way query routing (translation / cultural knowledge base / web
search) over a curated five-source knowledge base, with deterministic
provider stubs so the whole system runs and tests offline.
"""

__version__ = "0.1.0"
