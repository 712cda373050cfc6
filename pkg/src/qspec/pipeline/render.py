"""Time-frequency heatmap rasters.

Panels follow the usual quantile-pair layout: the diagonal shows the
(real) spectra ``f(tau_i, tau_i)``, the lower triangle ``Re f(tau_i, tau_j)``
and the upper triangle ``Im f(tau_j, tau_i)`` for row ``i`` and column ``j``.
Time runs left to right, frequency bottom to top.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from ..calibration import CalibrationBands, colorize, extend_scale, palette_color
from ..core import SpectralField
from .io import atomic_write

GAP = 4
LEGEND_GAP = 8
LEGEND_WIDTH = 16
BACKGROUND = (255, 255, 255)


def panel_layout(quantiles) -> dict:
    """``(row, col) -> (tau1, tau2, part)`` for a square panel grid."""
    q = list(quantiles)
    out = {}
    for i in range(len(q)):
        for j in range(len(q)):
            if i == j:
                out[i, j] = (q[i], q[i], "re")
            elif i > j:
                out[i, j] = (q[i], q[j], "re")
            else:
                out[i, j] = (q[j], q[i], "im")
    return out


@dataclass(frozen=True)
class HeatmapGeometry:
    n_t0: int
    n_freq: int
    cell_w: int
    cell_h: int
    rows: int
    cols: int

    @property
    def panel_w(self) -> int:
        return self.n_t0 * self.cell_w

    @property
    def panel_h(self) -> int:
        return self.n_freq * self.cell_h

    @property
    def width(self) -> int:
        return self.cols * self.panel_w + (self.cols - 1) * GAP + LEGEND_GAP + LEGEND_WIDTH

    @property
    def height(self) -> int:
        return self.rows * self.panel_h + (self.rows - 1) * GAP

    def panel_origin(self, row: int, col: int) -> tuple[int, int]:
        return row * (self.panel_h + GAP), col * (self.panel_w + GAP)

    def cell_box(self, row: int, col: int, t_index: int, f_index: int):
        """Pixel slices ``(rows, cols)`` of one ``(t0, frequency)`` cell."""
        y0, x0 = self.panel_origin(row, col)
        top = y0 + (self.n_freq - 1 - f_index) * self.cell_h
        left = x0 + t_index * self.cell_w
        return slice(top, top + self.cell_h), slice(left, left + self.cell_w)


def _default_cells(n_t0: int, n_freq: int) -> tuple[int, int]:
    return max(1, 256 // n_t0), max(1, 256 // n_freq)


def _panel_pixels(values: np.ndarray, entry) -> np.ndarray:
    nt, nf = values.shape
    px = np.empty((nf, nt, 3), dtype=np.uint8)
    for i in range(nt):
        for j in range(nf):
            px[nf - 1 - j, i] = colorize(values[i, j], entry)
    return px


def rasterize(field: SpectralField, bands: CalibrationBands, pairs=None,
              cell: tuple[int, int] | None = None):
    """RGB raster and its geometry; ``pairs`` selects a single ``(tau1, tau2, part)`` panel."""
    for t1 in field.quantiles:
        for t2 in field.quantiles:
            for part in ("re", "im"):
                bands.get(t1, t2, part)
    scale = extend_scale(bands, field)
    cw, ch = cell or _default_cells(len(field.t0_grid), len(field.freqs))
    if pairs is None:
        layout = panel_layout(field.quantiles)
        side = len(field.quantiles)
        geom = HeatmapGeometry(len(field.t0_grid), len(field.freqs), cw, ch, side, side)
    else:
        layout = {(0, 0): tuple(pairs)}
        geom = HeatmapGeometry(len(field.t0_grid), len(field.freqs), cw, ch, 1, 1)
    img = np.empty((geom.height, geom.width, 3), dtype=np.uint8)
    img[...] = BACKGROUND
    for (r, c), (t1, t2, part) in layout.items():
        px = _panel_pixels(field.component(t1, t2, part), scale.get(t1, t2, part))
        px = np.repeat(np.repeat(px, ch, axis=0), cw, axis=1)
        y0, x0 = geom.panel_origin(r, c)
        img[y0:y0 + geom.panel_h, x0:x0 + geom.panel_w] = px
    # colour legend, cool at the bottom and warm at the top
    x0 = geom.width - LEGEND_WIDTH
    for y in range(geom.height):
        pos = 1.0 - y / max(1, geom.height - 1)
        img[y, x0:] = palette_color(pos)
    return img, geom


def render_heatmap(field: SpectralField, bands: CalibrationBands, path, pairs=None,
                   cell: tuple[int, int] | None = None) -> str:
    """Write one PNG for the full panel grid, or for a single ``pairs`` panel."""
    img, _ = rasterize(field, bands, pairs, cell)
    with atomic_write(path, "wb") as fh:
        Image.fromarray(img, "RGB").save(fh, format="PNG")
    return os.fspath(path)
