"""Seed streams and node budgets."""

import hashlib
import os
import random

DEFAULT_NODE_BUDGET = 10**9
BUDGET_ENV_VAR = "REMOVAL_LAB_BUDGET"


def node_budget(override=None):
    """Resolve the node-expansion budget: explicit arg, then env, then default."""
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_NODE_BUDGET


def stream_rng(seed, *names) -> random.Random:
    """Named random stream derived from one master seed.

    Every consumer draws from its own stream (seed, *names), so adding or
    reordering experiments never perturbs the randomness seen by others.
    Stable across platforms and Python versions (SHA-256 based).
    """
    tag = f"{int(seed)}|" + "/".join(str(n) for n in names)
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def popcount(x: int) -> int:
    return x.bit_count()


def iter_bits(mask: int):
    """Yield set-bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def format_float(x: float) -> str:
    """Fixed 12-significant-digit rendering used by all reports."""
    return f"{x:.12g}"
