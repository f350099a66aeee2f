"""Standard-normal CDF/quantile and reproducible random substreams.

Every randomized procedure in this package draws from a :class:`SeededStream`,
a value type identifying a substream by ``(master_seed, path)``.  The stream's
Philox generator is keyed by a hash of that pair, so distinct paths yield
independent streams and results never depend on wall clock, call order, or
thread identity.  Normal variates are produced by inversion (quantile applied
to open-interval uniforms), which keeps consumption patterns, and therefore
reproducibility, independent of the values drawn.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "SeededStream",
    "normal_cdf",
    "normal_quantile",
    "standard_normal_draws",
]

_U53 = 0.5 ** 53  # spacing of the open-interval uniform grid


def normal_cdf(x: float) -> float:
    """Standard normal distribution function, accurate to ~1e-16.

    Raises
    ------
    ValueError
        If ``x`` is not finite.
    """
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"normal_cdf requires a finite argument, got {x}")
    return float(ndtr(x))


def normal_quantile(u: float) -> float:
    """Standard normal quantile function on (0, 1).

    Raises
    ------
    ValueError
        If ``u`` lies outside the open interval (0, 1).
    """
    u = float(u)
    if not 0.0 < u < 1.0:
        raise ValueError(f"normal_quantile requires 0 < u < 1, got {u}")
    return float(ndtri(u))


@dataclass(frozen=True)
class SeededStream:
    """A reproducible random substream identified by ``(master_seed, path)``.

    ``path`` is a sequence of ``(label, index)`` pairs.  Sibling streams
    (same parent, different path element) are statistically independent:
    each stream's Philox key is a 128-bit hash of the full identity, and
    Philox produces independent sequences for distinct keys.

    Streams are immutable; derive substreams with :meth:`child`.

    Parameters
    ----------
    master_seed : int
        Nonnegative 64-bit seed.
    path : tuple of (str, int) pairs
        Substream identity below the master seed.
    """

    master_seed: int
    path: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        seed = int(self.master_seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", seed)
        norm = tuple((str(label), int(index)) for label, index in self.path)
        for label, index in norm:
            if index < 0:
                raise ValueError("path indices must be nonnegative")
        object.__setattr__(self, "path", norm)

    def child(self, label: str, index: int = 0) -> "SeededStream":
        """Return the substream ``(label, index)`` below this one."""
        return SeededStream(self.master_seed, self.path + ((label, index),))

    def key(self) -> int:
        """128-bit Philox key derived by hashing ``(master_seed, path)``."""
        h = hashlib.blake2s(digest_size=16)
        h.update(self.master_seed.to_bytes(8, "little"))
        for label, index in self.path:
            raw = label.encode("utf-8")
            h.update(len(raw).to_bytes(4, "little"))
            h.update(raw)
            h.update(index.to_bytes(8, "little"))
        return int.from_bytes(h.digest(), "little")

    def generator(self) -> np.random.Generator:
        """A fresh counter-based generator for this stream."""
        return np.random.Generator(np.random.Philox(key=self.key()))


def open_uniform(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on the *open* interval (0, 1).

    Values are odd multiples of 2^-53, so the endpoints 0 and 1 are
    unreachable and ``ndtri`` stays finite.
    """
    k = gen.integers(0, 1 << 52, size=size, dtype=np.int64)
    return (2 * k + 1) * _U53


def standard_normal_draws(stream: SeededStream, count: int) -> np.ndarray:
    """``count`` i.i.d. N(0,1) draws, fully determined by the stream.

    Uses inversion sampling; identical ``(master_seed, path, count)``
    give bitwise-identical output.
    """
    if count < 1:
        raise ValueError("count must be a positive integer")
    return ndtri(open_uniform(stream.generator(), int(count)))
