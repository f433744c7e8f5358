from __future__ import annotations

import numpy as np

# sklearn y RandomState solo aceptan semillas en [0, 2**32 - 1]
SEED_MODULUS = 2**32


def derive_seed(seed: int, *keys: int) -> int:
    """Semilla hija determinista de 32 bits para (seed, *keys); no depende del orden de ejecución."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint32)[0])


def legacy_seed(seed: int) -> int:
    """Reduce una semilla arbitraria al rango que admite `random_state`."""
    return int(seed) % SEED_MODULUS
