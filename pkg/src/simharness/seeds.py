"""
Per-replicate seeds.

    seed_j = int.from_bytes(sha256(f"{base_seed}:{cell_id}:{j}")[:8], "big")

Seeds depend only on (base_seed, cell, replicate index), so replicates can run
in any order on any number of workers and still draw identical streams.
"""
import hashlib

import numpy as np


def replicate_seed(base_seed: int, cell_id: str, replicate: int) -> int:
    digest = hashlib.sha256(f"{base_seed}:{cell_id}:{replicate}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def replicate_rng(base_seed: int, cell_id: str, replicate: int) -> np.random.Generator:
    return np.random.default_rng(replicate_seed(base_seed, cell_id, replicate))
