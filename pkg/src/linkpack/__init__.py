"""Packing links under diagonal distance constraints: certificates, mu-bar invariants and constructions."""

from pathlib import Path

__version__ = "0.1.0"

DATA_DIR = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    """Path of a bundled example (hopf.json, hopf.pd, borromean.pd, unlink.pd)."""
    p = DATA_DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no bundled example {name!r}")
    return p
