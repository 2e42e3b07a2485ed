"""Labeled derivation of independent random streams from one master seed.

Reordering experiments must not shift randomness between components, so
every component draws from its own stream, derived by hashing the master
seed together with a component label (and optionally a trial index).
"""

from __future__ import annotations

import hashlib
from random import Random


def derive_seed(master_seed: int, *labels: object) -> int:
    material = "/".join([str(master_seed), *(str(x) for x in labels)])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "big")


def derive_rng(master_seed: int, *labels: object) -> Random:
    return Random(derive_seed(master_seed, *labels))
