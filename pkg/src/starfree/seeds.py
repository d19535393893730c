"""Deterministic seed derivation.

Generators, testers, and the search model must never share a raw seed:
`random.Random(s).sample` prefixes coincide across stream lengths, which
silently correlates planted structure with tester samples.  Deriving
sub-seeds through a hash keeps every run reproducible while decoupling
the streams.
"""

from __future__ import annotations

import hashlib


def split_seed(master: int, *parts) -> int:
    """Stable 63-bit sub-seed for (master, parts)."""
    text = repr((int(master),) + tuple(parts)).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "big") >> 1
