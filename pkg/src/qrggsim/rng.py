"""Splittable, seed-stable random streams.

Every stochastic operation in this package takes an explicit stream argument.
A stream is identified by its seed path (master seed plus a chain of
(label, index) derivations), so geometry draws, connectivity draws and
per-trial streams are mutually independent and results do not depend on
execution order or parallelism degree.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


class RandomStream:
    """A deterministic PCG64 stream keyed by an integer seed path."""

    __slots__ = ("_path", "_gen")

    def __init__(self, path):
        self._path = tuple(int(x) & _MASK64 for x in path)
        if not self._path:
            raise ValueError("seed path must be non-empty")
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(list(self._path)))
        )

    @classmethod
    def from_seed(cls, master_seed: int) -> "RandomStream":
        return cls((master_seed,))

    def child(self, label: str, index: int = 0) -> "RandomStream":
        """Derive an independent stream named by (label, index)."""
        return RandomStream(self._path + (zlib.crc32(label.encode("ascii")), index))

    @property
    def path(self):
        return self._path

    @property
    def master_seed(self) -> int:
        return self._path[0]

    # Thin passthroughs to the underlying generator.
    def random(self, size=None):
        return self._gen.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def __repr__(self):
        return f"RandomStream(path={self._path})"
