"""Post-hoc alignment of carpet rows and location of revival planes."""

from __future__ import annotations

import logging
from typing import List

import numpy as np

from resource_classes import ConfigurationError, NoRevivalFound
from ..data_models.results import CarpetImage

logger = logging.getLogger(__name__)


def best_lag(row: np.ndarray, reference: np.ndarray) -> int:
    """
    Circular shift (whole samples) of `row` with the highest normalized
    cross-correlation against `reference`; ties go to the smallest |lag|.
    """
    a = (row - row.mean()) / row.std()
    b = (reference - reference.mean()) / reference.std()
    correlation = np.fft.ifft(np.conj(np.fft.fft(a)) * np.fft.fft(b)).real / row.size
    lags = np.arange(row.size)
    lags = np.where(lags > row.size // 2, lags - row.size, lags)
    candidates = np.flatnonzero(correlation >= correlation.max() - 1e-12)
    return int(lags[candidates[np.argmin(np.abs(lags[candidates]))]])


def align_carpet_rows(raw: CarpetImage) -> CarpetImage:
    """
    Line up every row with the previously aligned row.

    Rows without variance are flagged and left in place; the next row is
    compared with the last aligned row that had structure.

    :param raw:
        Carpet as acquired.
    :returns:
        The aligned carpet with per-row shifts and flagged rows recorded.
    :rtype: CarpetImage
    """
    rows, columns = raw.shape
    if rows < 2:
        raise ConfigurationError("Alignment needs at least 2 rows")
    aligned = raw.flux.copy()
    shifts: List[int] = [0] * rows
    flagged: List[int] = []
    reference = None
    for index in range(rows):
        row = raw.flux[index]
        if np.ptp(row) == 0:
            flagged.append(index)
            continue
        if reference is not None:
            shifts[index] = best_lag(row, reference)
            aligned[index] = np.roll(row, shifts[index])
        reference = aligned[index]
    if flagged:
        logger.warning("Rows without structure left unaligned: %s", flagged)
    return raw.with_rows(aligned, shifts, flagged)


def find_revival(carpet: CarpetImage, near: float, span: float) -> float:
    """
    Separation of the row-contrast maximum within `near` ± `span`,
    refined by a parabola through the three rows around the best one.
    """
    z = carpet.z_values
    contrast = carpet.row_contrast()
    rows = np.flatnonzero(np.abs(z - near) <= span)
    if rows.size == 0:
        raise NoRevivalFound(f"No carpet rows within {span:.4g} m of {near:.4g} m")
    best = rows[np.argmax(contrast[rows])]
    if best == 0 or best == z.size - 1:
        return float(z[best])
    left, centre, right = contrast[best - 1 : best + 2]
    curvature = left - 2.0 * centre + right
    if curvature >= 0:
        return float(z[best])
    offset = 0.5 * (left - right) / curvature
    return float(z[best] + offset * (z[best + 1] - z[best]))
