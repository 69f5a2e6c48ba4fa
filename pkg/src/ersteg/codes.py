"""The two interchangeable syndrome coders behind one small interface.

Both ends of a channel construct the coder from the same parameters and
feed it the same deterministic random stream, so everything the receiver
needs (submatrix draws, frozen sets) reproduces from shared knowledge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Protocol, runtime_checkable

import numpy as np

from . import spc, stc
from .errors import UsageError


@runtime_checkable
class StegoCode(Protocol):
    name: str

    def coded_length(self, n: int) -> int:
        """Elements of an n-element lattice the code actually drives."""

    def l_m(self, n: int, m: int) -> int:
        """Worst-case elements read per message bit at this (n, m)."""

    def embed(self, cover_bits, rho, msg, rng) -> np.ndarray: ...

    def extract(self, stego_bits, m: int, rng) -> np.ndarray: ...


@dataclass(frozen=True)
class PolarStegoCode:
    """List-search polar syndrome coder; deterministic, ignores rng."""

    list_size: int = 6
    name: ClassVar[str] = "spc"

    def __post_init__(self):
        if self.list_size < 1:
            raise UsageError("list size must be at least 1")

    def coded_length(self, n: int) -> int:
        if n < 1:
            return 0
        return 1 << (int(n).bit_length() - 1)

    def l_m(self, n: int, m: int) -> int:
        return spc.l_m_polar(n, m)

    def embed(self, cover_bits, rho, msg, rng=None) -> np.ndarray:
        return spc.spc_embed(cover_bits, rho, msg, self.list_size)

    def extract(self, stego_bits, m: int, rng=None) -> np.ndarray:
        return spc.spc_extract(stego_bits, m)


@dataclass(frozen=True)
class SyndromeTrellisCode:
    """Banded-trellis syndrome coder; draws its submatrix from rng, so
    embed and extract must be handed identically seeded generators."""

    height: int = 10
    name: ClassVar[str] = "stc"

    def __post_init__(self):
        if self.height < 2:
            raise UsageError("constraint height must be at least 2")

    def coded_length(self, n: int) -> int:
        return max(int(n), 0)

    def l_m(self, n: int, m: int) -> int:
        return stc.l_m_stc(n, m, self.height)

    def _submatrix(self, n: int, m: int, rng) -> stc.StcSubmatrix:
        if not (1 <= m <= n):
            raise UsageError("need 1 <= m <= n")
        return stc.make_submatrix(self.height, n // m, rng)

    def embed(self, cover_bits, rho, msg, rng) -> np.ndarray:
        x = np.asarray(cover_bits).astype(np.uint8).ravel() & 1
        m = np.asarray(msg).size
        if m == 0:
            return x.copy()
        sub = self._submatrix(x.size, m, rng)
        return stc.stc_embed(x, rho, msg, sub)

    def extract(self, stego_bits, m: int, rng) -> np.ndarray:
        y = np.asarray(stego_bits).astype(np.uint8).ravel() & 1
        if m == 0:
            return np.zeros(0, dtype=np.uint8)
        sub = self._submatrix(y.size, m, rng)
        return stc.stc_extract(y, sub, m)


def make_code(name: str, *, list_size: int = 6, height: int = 10) -> StegoCode:
    if name == "spc":
        return PolarStegoCode(list_size=list_size)
    if name == "stc":
        return SyndromeTrellisCode(height=height)
    raise UsageError("unknown code %r (expected 'spc' or 'stc')" % (name,))
