from pathlib import Path


def read_or_default(path, default=""):
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    return default
