import hashlib


def digest(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def short_id(text: str) -> str:
    h = hashlib.md5(text.encode("utf-8"))
    return h.hexdigest()[:8]
