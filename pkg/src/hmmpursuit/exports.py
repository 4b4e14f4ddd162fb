"""File exports: belief heatmaps and learning curves.

Heatmaps are written twice per call: a CSV grid of probabilities for
numeric inspection, and an ASCII portable pixmap for eyeballing.  The
pixmap paints walls black and floor tiles on a white to dark-red ramp
scaled by the belief's maximum, so the most likely tile is always the
darkest red regardless of how spread out the belief is.
"""

from collections.abc import Sequence

import numpy as np

from .grid import GridMap, Position

_DARK_RED = (139, 0, 0)
_WHITE = (255, 255, 255)


def _belief_array(belief) -> np.ndarray:
    values = getattr(belief, "probs", belief)
    return np.asarray(values, dtype=np.float64)


def heatmap_grid(belief, grid: GridMap) -> list:
    """height x width nested list: None on walls, probability on floor."""
    values = _belief_array(belief)
    if values.shape != (grid.n,):
        raise ValueError(f"belief has {values.shape} entries, map has {grid.n} states")
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            pos = Position(x, y)
            row.append(float(values[grid.index_of(pos)]) if grid.is_floor(pos) else None)
        rows.append(row)
    return rows


def _ramp(p: float, max_p: float) -> tuple:
    if p <= 0.0 or max_p <= 0.0:
        return _WHITE
    t = p / max_p
    return tuple(
        int(round(w + t * (d - w))) for w, d in zip(_WHITE, _DARK_RED)
    )


def export_heatmap(belief, grid: GridMap, path_base) -> tuple:
    """Write {path_base}.csv and {path_base}.ppm; returns both paths.

    CSV: one row per map row, walls as empty cells, floor probabilities
    with 6 decimal places.  PPM: plain P3, walls black, floor on the
    white to dark-red ramp.
    """
    values = _belief_array(belief)
    cells = heatmap_grid(belief, grid)
    csv_path = f"{path_base}.csv"
    ppm_path = f"{path_base}.ppm"
    with open(csv_path, "w", encoding="utf-8") as fh:
        for row in cells:
            fh.write(
                ",".join("" if c is None else f"{c:.6f}" for c in row) + "\n"
            )
    max_p = float(values.max())
    with open(ppm_path, "w", encoding="utf-8") as fh:
        fh.write(f"P3\n{grid.width} {grid.height}\n255\n")
        for row in cells:
            pixels = []
            for c in row:
                rgb = (0, 0, 0) if c is None else _ramp(c, max_p)
                pixels.append(" ".join(str(v) for v in rgb))
            fh.write("  ".join(pixels) + "\n")
    return csv_path, ppm_path


def export_learning_curve(reports, path) -> None:
    """CSV of per-game mean distances, one row per game per variant.

    ``reports`` is a StatsReport or a sequence of them; rows keep the
    given order so identical inputs always produce identical bytes.
    """
    if not isinstance(reports, Sequence):
        reports = [reports]
    if not reports:
        raise ValueError("need at least one report")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("game_index,variant,mean_distance\n")
        for report in reports:
            for i, value in enumerate(report.per_game_mean_distance, start=1):
                fh.write(f"{i},{report.variant},{value!r}\n")
