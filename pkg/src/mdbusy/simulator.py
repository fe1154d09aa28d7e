"""Monte Carlo sampling of busy periods.

With deterministic service, customers leave in arrival order, so the busy
period ends at ``last arrival + alpha`` unless another customer arrives
before that. One running "frontier" is enough: draw inter-arrival times
until one lands at or after the frontier.

Samples are generated in fixed blocks of ``BLOCK_SIZE``. Block b draws from
a Philox stream keyed by ``SeedSequence(seed, spawn_key=(b,))``. Samples in a
full block depend only on ``(seed, i)``; those in a short last block also
depend on its length, since the block draws uniforms in vectorised rounds.
The output never depends on the number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from mdbusy.errors import ValidationError
from mdbusy.model import QueueParams

__all__ = [
    "BLOCK_SIZE",
    "MAX_ITERATIONS",
    "SimConfig",
    "SimSummary",
    "block_generator",
    "dump_samples",
    "empirical_cdf",
    "run",
    "sample",
    "sample_busy_period",
    "summarize",
]

BLOCK_SIZE = 1 << 16
MAX_ITERATIONS = 10**9


@dataclass(frozen=True)
class SimConfig:
    n_samples: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValidationError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValidationError(f"workers must be a positive integer, got {self.workers!r}")


@dataclass(frozen=True)
class SimSummary:
    n: int
    mean: float
    variance: float
    std_error_mean: float
    empirical_cdf: np.ndarray  # sorted samples
    atom_fraction: float

    def cdf(self, t: float) -> float:
        return empirical_cdf(self.empirical_cdf, t)


def _interarrival(lam: float, u: float) -> float:
    return -math.log1p(-u) / lam


def sample_busy_period(params: QueueParams, rng: np.random.Generator | Iterable[float]) -> float:
    """Draw one busy period.

    ``rng`` is either a numpy Generator, from which uniforms are turned into
    exponential inter-arrival times by inversion, or an iterable that yields
    the inter-arrival times themselves.
    """
    if isinstance(rng, np.random.Generator):
        draws: Iterator[float] = (_interarrival(params.lam, rng.random()) for _ in iter(int, 1))
    else:
        draws = iter(rng)
    alpha = params.alpha
    end = alpha
    t = 0.0
    for _ in range(MAX_ITERATIONS):
        t += next(draws)
        # an arrival exactly at the frontier finds the system empty
        if t >= end:
            return end
        end = t + alpha
    raise RuntimeError(f"busy period still open after {MAX_ITERATIONS} arrivals")


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _sample_block(lam: float, alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(n)
    idx = np.arange(n)
    t = np.zeros(n)
    end = np.full(n, alpha)
    for _ in range(MAX_ITERATIONS):
        if idx.size == 0:
            return out
        t += -np.log1p(-rng.random(idx.size)) / lam
        done = t >= end
        out[idx[done]] = end[done]
        keep = ~done
        idx, t = idx[keep], t[keep]
        end = t + alpha
    raise RuntimeError(f"busy periods still open after {MAX_ITERATIONS} arrivals")


def sample(params: QueueParams, config: SimConfig) -> np.ndarray:
    """All samples, in sample-index order."""
    n = int(config.n_samples)
    sizes = [min(BLOCK_SIZE, n - start) for start in range(0, n, BLOCK_SIZE)]

    def work(block: int) -> np.ndarray:
        return _sample_block(params.lam, params.alpha, sizes[block], block_generator(config.seed, block))

    workers = min(int(config.workers), len(sizes), os.cpu_count() or 1)
    if workers <= 1:
        parts = [work(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    return np.concatenate(parts)


def summarize(params: QueueParams, samples: np.ndarray) -> SimSummary:
    n = int(samples.size)
    mean = float(math.fsum(samples.tolist()) / n)
    variance = float(np.var(samples, ddof=1)) if n > 1 else 0.0
    return SimSummary(
        n=n,
        mean=mean,
        variance=variance,
        std_error_mean=math.sqrt(variance / n),
        empirical_cdf=np.sort(samples),
        atom_fraction=float(np.count_nonzero(samples == params.alpha)) / n,
    )


def run(params: QueueParams, config: SimConfig) -> SimSummary:
    return summarize(params, sample(params, config))


def empirical_cdf(sorted_samples: np.ndarray, t: float) -> float:
    """Fraction of samples <= t."""
    return float(np.searchsorted(sorted_samples, t, side="right")) / sorted_samples.size


def dump_samples(samples: np.ndarray, path: str | os.PathLike) -> None:
    """Write one sample per line in shortest round-trip decimal form."""
    with open(path, "w", encoding="ascii") as fh:
        for value in samples.tolist():
            fh.write(f"{value!r}\n")
