# ladris/models/base.py

import hashlib


def generate_sample_id(seed: int, index: int, length: int = 10) -> str:
    """Generate a short sample id that is stable for a (seed, index) pair."""
    digest = hashlib.sha1(f"{seed}:{index}".encode("utf-8")).hexdigest()
    return f"s{index:05d}-{digest[:length]}"
