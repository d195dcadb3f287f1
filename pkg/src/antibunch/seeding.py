"""Per-stage, per-block random generators derived from one master seed.

A stage's generator for time block ``b`` is

    PCG64(SeedSequence(master_seed, spawn_key=(crc32(stage), b)))

so any block can be produced independently and a parallel schedule gives the
same bits as the sequential loop.
"""
import zlib

import numpy as np

PS_PER_S = 10**12
BLOCK_PS = PS_PER_S  # 1 s blocks


def stage_rng(master_seed: int, stage: str, block: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed),
                                spawn_key=(zlib.crc32(stage.encode()), int(block)))
    return np.random.Generator(np.random.PCG64(ss))


def as_rng(seed, stage: str = "default") -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stage_rng(seed, stage)


def block_edges(duration_ps: int, block_ps: int = BLOCK_PS):
    """Yield ``(index, t0, t1)`` covering ``[0, duration_ps)``."""
    b, t0 = 0, 0
    while t0 < duration_ps:
        t1 = min(t0 + block_ps, duration_ps)
        yield b, t0, t1
        b += 1
        t0 = t1
