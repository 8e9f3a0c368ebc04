"""Counter-based random streams keyed by (seed, round, step, substream, chunk).

Every vertex pair gets one uniform per (round, step, substream), indexed by
its position in the lexicographic pair order, so results do not depend on
how many threads generate the chunks.
"""

from __future__ import annotations

import os
import secrets
from concurrent.futures import ThreadPoolExecutor

import numpy as np

GAMMA = 0
STABILIZATION = 1
HOST = 2
AUDIT = 3
VERIFY = 4

CHUNK = 1 << 16
SEED_MASK = (1 << 64) - 1


def fresh_seed() -> int:
    return secrets.randbits(64)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("NIBBLEPACK_THREADS", "1")))
    except ValueError:
        return 1


def generator(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(n: int, us, vs) -> np.ndarray:
    """Position of pair ``(u, v)``, ``u < v``, in lexicographic order."""
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    return us * n - us * (us + 1) // 2 + (vs - us - 1)


def pair_uniforms(seed: int, round_: int, step: int, substream: int, count: int, threads: int = 1) -> np.ndarray:
    """``count`` uniforms in [0, 1); chunk ``c`` comes from its own keyed Philox stream."""
    out = np.empty(count)
    starts = range(0, count, CHUNK)

    def fill(lo: int) -> None:
        g = generator(seed, round_, step, substream, lo // CHUNK)
        out[lo : lo + CHUNK] = g.random(min(CHUNK, count - lo))

    if threads > 1 and count > CHUNK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, starts))
    else:
        for lo in starts:
            fill(lo)
    return out


class StepRandom:
    """Uniform draws for one step of one round."""

    def __init__(self, seed: int, round_: int, step: int, threads: int = 1):
        self.seed = int(seed) & SEED_MASK
        self.round = round_
        self.step = step
        self.threads = threads
        self._idx_cache = (None, None)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.seed, self.round, self.step)

    def edge_uniforms(self, substream: int, n: int, us, vs) -> np.ndarray:
        """The uniforms attached to the pairs ``(us[k], vs[k])``."""
        us = np.asarray(us, dtype=np.int64)
        if us.size == 0:
            return np.empty(0)
        full = pair_uniforms(self.seed, self.round, self.step, substream, n_pairs(n), self.threads)
        cached_us, idx = self._idx_cache
        if cached_us is not us:
            idx = pair_index(n, us, vs)
            self._idx_cache = (us, idx)
        return full[idx]
