from typing import Any, Callable

import numpy as np
from joblib import Parallel, delayed
from loguru import logger

from .utils import env_int

DEFAULT_BLOCK_SIZE = 256


def default_threads() -> int:
    return max(1, env_int("GWI_THREADS", 1))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seeds(seed: int | np.random.SeedSequence, n: int) -> list[np.random.SeedSequence]:
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return seed.spawn(n)


def run_replicates(
    func: Callable[..., Any],
    seed: int,
    replicates: int,
    *args,
    threads: int | None = None,
    **kwargs,
) -> list[Any]:
    """
    Call func(rng, *args, **kwargs) once per replicate. Replicate r always
    receives the r-th child of SeedSequence(seed), so results do not depend
    on the number of workers.
    """
    threads = threads or default_threads()
    seeds = spawn_seeds(seed, replicates)
    logger.debug(f"Running {replicates} replicates of {func.__name__} on {threads} workers")
    if threads == 1:
        return [func(np.random.default_rng(s), *args, **kwargs) for s in seeds]
    return Parallel(n_jobs=threads)(
        delayed(_call_with_seed)(func, s, args, kwargs) for s in seeds
    )


def run_blocks(
    func: Callable[..., np.ndarray],
    seed: int,
    replicates: int,
    *args,
    block_size: int = DEFAULT_BLOCK_SIZE,
    threads: int | None = None,
    **kwargs,
) -> np.ndarray:
    """
    Vectorized variant: func(rng, n, *args, **kwargs) returns an array whose
    first axis has n replicates. Blocks have a fixed size and their own seed.
    """
    threads = threads or default_threads()
    sizes = [block_size] * (replicates // block_size)
    if replicates % block_size:
        sizes.append(replicates % block_size)
    seeds = spawn_seeds(seed, len(sizes))
    if threads == 1:
        parts = [func(np.random.default_rng(s), n, *args, **kwargs) for s, n in zip(seeds, sizes)]
    else:
        parts = Parallel(n_jobs=threads)(
            delayed(_call_with_seed)(func, s, (n, *args), kwargs) for s, n in zip(seeds, sizes)
        )
    return np.concatenate(parts, axis=0)


def _call_with_seed(func, seed, args, kwargs):
    return func(np.random.default_rng(seed), *args, **kwargs)
