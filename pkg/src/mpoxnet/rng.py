"""Seedable random primitives shared by every module.

A run is fully determined by ``(seed, stream_id)``.  Each replicate owns one
:class:`RngStream`; the stream hands out named child generators (network,
disease, vaccine) so that, for example, the partnership process draws the
same numbers whether or not an intervention later perturbs the epidemic.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError

_CHILDREN = ("network", "disease", "vaccine", "init")


class RngStream:
    """Deterministic random stream keyed by ``(seed, stream_id)``."""

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ConfigurationError("seed and stream_id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        root = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(root))
        children = root.spawn(len(_CHILDREN))
        self._children = {
            name: np.random.Generator(np.random.PCG64(ss))
            for name, ss in zip(_CHILDREN, children)
        }

    def child(self, name: str) -> np.random.Generator:
        return self._children[name]

    @property
    def network(self) -> np.random.Generator:
        return self._children["network"]

    @property
    def disease(self) -> np.random.Generator:
        return self._children["disease"]

    @property
    def vaccine(self) -> np.random.Generator:
        return self._children["vaccine"]

    @property
    def init(self) -> np.random.Generator:
        return self._children["init"]

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _gen(rng) -> np.random.Generator:
    return rng.generator if isinstance(rng, RngStream) else rng


def draw_categorical(weights, rng, size=None):
    """Sample indices with probability ``weights[i]``."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ConfigurationError("weights must be a non-empty vector")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ConfigurationError(f"weights must be non-negative and sum to 1, got {w.tolist()}")
    g = _gen(rng)
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    u = g.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    if size is None:
        return int(idx)
    return idx.astype(np.int64)


def draw_count_geometric(p_partner, rng, size=None):
    """Number of one-time partners today: P(k) = (1-p) p^k, k >= 0.

    ``p_partner`` may be an array (one probability per node).
    """
    p = np.asarray(p_partner, dtype=np.float64)
    if np.any(p < 0) or np.any(p >= 1):
        raise ConfigurationError("one-time partner probability must lie in [0, 1)")
    g = _gen(rng)
    if size is None and p.ndim == 0:
        return int(g.geometric(1.0 - float(p)) - 1)
    return (g.geometric(1.0 - p, size=size) - 1).astype(np.int64)


def draw_duration_geometric(mean_days, rng, size=None):
    """Partnership duration on {1, 2, ...} with expectation ``mean_days``."""
    if mean_days < 1:
        raise ConfigurationError("mean duration must be at least 1 day")
    g = _gen(rng)
    out = g.geometric(1.0 / mean_days, size=size)
    if size is None:
        return int(out)
    return out.astype(np.int64)


def draw_stage_days(mean, sd, rng, size=None):
    """Normal draw rounded to the nearest day, floored at 1."""
    if mean <= 0 or sd <= 0:
        raise ConfigurationError("stage mean and sd must be positive")
    g = _gen(rng)
    x = np.maximum(np.rint(g.normal(mean, sd, size=size)), 1).astype(np.int64)
    if size is None:
        return int(x)
    return x
