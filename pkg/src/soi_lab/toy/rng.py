"""Named, reproducible random streams for the toy lab.

Every random draw in the lab comes from a stream addressed by a root seed
plus a tuple of string labels ("init", task id, "epoch3", ...). Labels are
hashed with SHA-256 into SeedSequence entropy, so streams are independent,
order-insensitive across purposes, and stable across platforms and numpy
versions (PCG64 and SeedSequence are specified algorithms).
"""
from __future__ import annotations

import hashlib

import numpy as np


def _label_entropy(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, *labels: str) -> np.random.Generator:
    """An independent PCG64 generator for (seed, labels)."""
    entropy = [seed & 0xFFFFFFFFFFFFFFFF] + [_label_entropy(label) for label in labels]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *labels: str) -> int:
    """A child integer seed for (seed, labels); stable, 63-bit, non-negative."""
    hasher = hashlib.sha256(str(seed).encode("utf-8"))
    for label in labels:
        hasher.update(b"\x1f")
        hasher.update(label.encode("utf-8"))
    return int.from_bytes(hasher.digest()[:8], "big") >> 1
