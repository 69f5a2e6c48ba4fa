"""Embedding costs over the quantized coefficient plane.

The cost of mode (u, v) in a block is its quantizer step divided by a
local energy term: the block's own AC energy plus a quarter of the energy
of its 8-neighborhood.  The DC mode uses the mean of the 63 AC steps in
place of its own step.  Blocks with zero local energy are undefined under
this rule and become all wet.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import convolve

from .jpeg_model import QuantizedImage, _as_blocks, _from_blocks

_NEIGH = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]], dtype=np.float64)


def uerd_cost(img: QuantizedImage) -> np.ndarray:
    """Per-coefficient flip costs, same shape as img.coef, +inf for wet."""
    q = img.qtable.entries.astype(np.float64)
    blocks = _as_blocks(img.coef).astype(np.float64)

    energy = np.abs(blocks) * q
    energy[:, :, 0, 0] = 0.0  # AC energy only
    e_block = energy.sum(axis=(2, 3))

    # boundary blocks see only existing neighbors, no wraparound
    neigh = convolve(e_block, _NEIGH, mode="constant", cval=0.0)
    denom = e_block + 0.25 * neigh

    q_eff = q.copy()
    q_eff[0, 0] = (q.sum() - q[0, 0]) / 63.0

    with np.errstate(divide="ignore"):
        per_block = np.where(denom > 0, 1.0 / denom, np.inf)
    rho = q_eff[None, None, :, :] * per_block[:, :, None, None]
    return _from_blocks(rho)


def overlay_wet(rho: np.ndarray, wet_positions) -> np.ndarray:
    """Copy of rho with the listed positions set to +inf.

    wet_positions indexes rho directly (boolean mask or fancy index).
    """
    out = np.array(rho, dtype=np.float64, copy=True)
    out[wet_positions] = np.inf
    return out
