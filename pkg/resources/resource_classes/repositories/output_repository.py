"""Output Repository"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from resource_classes import OutputRefused
from ..constants import MM, NM
from ..data_models.config import RunConfig
from ..data_models.results import CarpetImage, FitResult, TransmissionCurve
from ..data_models.wavefield import FarFieldFrame

logger = logging.getLogger(__name__)

PGM_MAXVAL = 65535
CONFIG_ECHO = "config.resolved.cfg"
FRAME_INDEX = "index.csv"


def format_number(value: float) -> str:
    """Shortest text that reads back to the same number; integers stay integers."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


class OutputRepository:
    """
    Writes run results below one output directory.

    Every file starts with `#` metadata lines carrying the digest of the
    resolved configuration; nothing time dependent is written.
    """

    def __init__(self, directory: str | Path, config: Optional[RunConfig] = None):
        self.directory = Path(directory)
        self.config = config

    # --- internals ---
    def _path(self, name: str) -> Path:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputRefused(f"cannot create {self.directory}: {e.strerror}") from e
        return self.directory / name

    def _metadata(self, metadata: Optional[Mapping[str, str]] = None) -> List[str]:
        lines = []
        if self.config is not None:
            lines.append(f"# config_digest = {self.config.digest()}")
        for key, value in (metadata or {}).items():
            lines.append(f"# {key} = {value}")
        return lines

    @staticmethod
    def _require_finite(source: str, values: np.ndarray) -> None:
        if not np.all(np.isfinite(values)):
            raise OutputRefused(f"{source} contains NaN or infinite values, not written")

    def _write(self, name: str, lines: Iterable[str]) -> Path:
        path = self._path(name)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write("\n".join(lines) + "\n")
        except OSError as e:
            raise OutputRefused(f"cannot write {path}: {e.strerror}") from e
        logger.info("Wrote %s", path)
        return path

    def write_table(
        self,
        name: str,
        header: Sequence[str],
        rows: Iterable[Sequence[float]],
        metadata: Optional[Mapping[str, str]] = None,
    ) -> Path:
        """CSV with `#` metadata, one header line and one line per row."""
        rows = [list(row) for row in rows]
        self._require_finite(name, np.asarray(rows, dtype=float))
        lines = self._metadata(metadata) + [",".join(header)]
        lines += [",".join(format_number(value) for value in row) for row in rows]
        return self._write(name, lines)

    # --- results ---
    def write_config_echo(self) -> Optional[Path]:
        if self.config is None:
            return None
        return self._write(CONFIG_ECHO, self.config.to_text().splitlines())

    def write_curve_csv(self, curve: TransmissionCurve, name: str = "moire.csv") -> Path:
        metadata = {"contrast": format_number(curve.contrast), **curve.metadata}
        return self.write_table(
            name,
            ("shift_nm", "normalized_flux"),
            zip(curve.shifts / NM, curve.flux),
            metadata,
        )

    def write_frames(
        self,
        frames: Sequence[FarFieldFrame],
        subdirectory: str = "frames",
        metadata: Optional[Mapping[str, str]] = None,
    ) -> Path:
        """
        One CSV per frame plus an index of the G2 shifts.

        Coordinates and shifts are stored in metres so `read_frames` returns
        the same floats; the index also lists the shift in nm for reading.
        """
        stack = OutputRepository(self.directory / subdirectory, self.config)
        index_rows = []
        for number, frame in enumerate(frames):
            self._require_finite(f"frame {number}", frame.intensity)
            stack.write_table(
                f"frame_{number:03d}.csv",
                ("x_m", "intensity"),
                zip(frame.coordinates, frame.intensity),
                metadata,
            )
            shift = frame.shift if frame.shift is not None else 0.0
            index_rows.append((number, shift, shift / NM, frame.total))
        return stack.write_table(
            FRAME_INDEX, ("index", "shift_m", "shift_nm", "total"), index_rows, metadata
        )

    def read_frames(self, subdirectory: str = "frames") -> List[FarFieldFrame]:
        """Read a stack written by `write_frames`."""
        stack = self.directory / subdirectory
        index = self._read_table(stack / FRAME_INDEX)
        frames = []
        for number, shift, _, _ in index:
            data = self._read_table(stack / f"frame_{int(number):03d}.csv")
            frames.append(
                FarFieldFrame(
                    coordinates=np.array([row[0] for row in data]),
                    intensity=np.array([row[1] for row in data]),
                    shift=shift,
                )
            )
        return frames

    @staticmethod
    def _read_table(path: Path) -> List[List[float]]:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise OutputRefused(f"cannot read {path}: {e.strerror}") from e
        rows = [
            (number, line)
            for number, line in enumerate(text.splitlines(), start=1)
            if line and not line.startswith("#")
        ]
        if not rows:
            raise OutputRefused(f"{path} has no header")
        columns = len(rows[0][1].split(","))
        table = []
        for number, line in rows[1:]:
            try:
                values = [float(value) for value in line.split(",")]
            except ValueError as e:
                raise OutputRefused(f"{path} line {number}: {e}") from e
            if len(values) != columns:
                raise OutputRefused(
                    f"{path} line {number}: expected {columns} values, got {len(values)}"
                )
            table.append(values)
        return table

    def write_carpet_pgm(self, carpet: CarpetImage, name: str = "carpet.pgm") -> Path:
        """
        Plain P2 graymap, z increasing downward, linear min -> 0 / max -> 65535.

        A constant carpet maps to all zeros. Axis CSVs and the raw flux are
        written next to the image.
        """
        self._require_finite("carpet", carpet.flux)
        low, high = float(carpet.flux.min()), float(carpet.flux.max())
        if high > low:
            pixels = np.rint((carpet.flux - low) / (high - low) * PGM_MAXVAL).astype(np.int64)
        else:
            pixels = np.zeros(carpet.flux.shape, dtype=np.int64)
        rows, columns = carpet.shape
        lines = ["P2"] + self._metadata(carpet.metadata)
        lines += [
            f"# z_mm first = {format_number(carpet.z_values[0] / MM)}",
            f"# z_mm last = {format_number(carpet.z_values[-1] / MM)}",
            f"# x_nm first = {format_number(carpet.x_values[0] / NM)}",
            f"# x_nm last = {format_number(carpet.x_values[-1] / NM)}",
            f"# flux min = {format_number(low)}",
            f"# flux max = {format_number(high)}",
            f"{columns} {rows}",
            str(PGM_MAXVAL),
        ]
        lines += [" ".join(str(value) for value in row) for row in pixels]
        path = self._write(name, lines)

        stem = Path(name).stem
        self.write_table(f"{stem}_z.csv", ("row", "z_mm"), enumerate(carpet.z_values / MM))
        self.write_table(f"{stem}_x.csv", ("column", "x_nm"), enumerate(carpet.x_values / NM))
        self.write_table(f"{stem}_flux.csv", [f"c{i}" for i in range(columns)], carpet.flux)
        if carpet.applied_shifts is not None:
            flagged = set(carpet.flagged_rows)
            self.write_table(
                f"{stem}_alignment.csv",
                ("row", "applied_shift_samples", "flagged"),
                ((row, shift, int(row in flagged)) for row, shift in enumerate(carpet.applied_shifts)),
            )
        return path

    def write_fit(self, result: FitResult, metadata: Optional[Mapping[str, str]] = None) -> Path:
        self.write_table(
            "objective.csv", ("r_m", "objective"), result.objective_curve, metadata
        )
        return self.write_table(
            "fit.csv",
            ("r_hat_m", "r_uncertainty_m", "converged", "r_min_m", "r_max_m"),
            [(result.r_hat, result.r_uncertainty, int(result.converged), *result.search)],
            metadata,
        )

    def write_revival(
        self, z_sep: float, measured: float, predicted: float, name: str = "revival_period.csv"
    ) -> Path:
        return self.write_table(
            name,
            ("z_sep_mm", "measured_period_nm", "geometric_period_nm", "relative_difference"),
            [(z_sep / MM, measured / NM, predicted / NM, (measured - predicted) / predicted)],
        )

    def write_orders(
        self, orders: Sequence[Dict[int, float]], shifts: Sequence[float], name: str = "orders.csv"
    ) -> Path:
        """Integrated intensity per diffraction order for every frame."""
        numbers = sorted(orders[0]) if orders else []
        return self.write_table(
            name,
            ["shift_nm"] + [f"order_{n}" for n in numbers],
            ([shift / NM] + [frame[n] for n in numbers] for shift, frame in zip(shifts, orders)),
        )
