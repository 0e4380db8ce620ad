"""Extension-operator evaluation and sampled field grids.

E_J g(x) = integral over J of g(xi) e(xi*x1 + xi^2*x2) d xi, with
e(a) = exp(2*pi*i*a).  Pointwise values come from composite Gauss-Legendre
panels sized to the local phase frequency; grids are filled by the block
kernels with per-row-band node rebuilds so far rows never force dense
nodes on near rows.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError
from .geometry import DyadicInterval, Square
from .kernels import eval_field_block, eval_points
from .quadrature import DEFAULT_QUAD, QuadratureSpec, build_nodes, max_frequency
from .symbols import SymbolFunction

_ROW_BAND = 64  # rows per node rebuild when filling grids


def eval_extension(g: SymbolFunction, interval: DyadicInterval,
                   x: Tuple[float, float],
                   quad: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """E_J g at a single point."""
    freq = max_frequency(abs(x[0]), abs(x[1]))
    xi, amp = build_nodes(g, interval, freq, quad)
    val = eval_points(xi, amp, np.array([x[0]]), np.array([x[1]]))
    return complex(val[0])


def eval_extension_many(g: SymbolFunction, interval: DyadicInterval,
                        px: np.ndarray, py: np.ndarray,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """E_J g at scattered points; one node set valid for all of them."""
    px = np.asarray(px, float)
    py = np.asarray(py, float)
    if px.size == 0:
        return np.zeros(px.shape, np.complex128)
    freq = max_frequency(float(np.max(np.abs(px))), float(np.max(np.abs(py))))
    xi, amp = build_nodes(g, interval, freq, quad)
    return eval_points(xi, amp, px, py)


@dataclass
class FieldGrid:
    """Complex samples of a wave on a uniform grid.

    samples[j, i] is the value at (origin[0] + i*spacing, origin[1] + j*spacing).
    """
    origin: Tuple[float, float]
    spacing: float
    samples: np.ndarray  # complex128 (ny, nx)
    provenance: dict = field(default_factory=dict)

    @property
    def dims(self) -> Tuple[int, int]:
        return (int(self.samples.shape[1]), int(self.samples.shape[0]))

    def x_coords(self) -> np.ndarray:
        return self.origin[0] + self.spacing * np.arange(self.samples.shape[1])

    def y_coords(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.samples.shape[0])

    def covers(self, square: Square) -> bool:
        # sample layout is cell-centered: cells span origin +/- spacing/2
        eps = 1e-9 * max(1.0, square.side)
        x0 = self.origin[0] - self.spacing / 2
        y0 = self.origin[1] - self.spacing / 2
        x1 = self.origin[0] + self.spacing * (self.samples.shape[1] - 0.5)
        y1 = self.origin[1] + self.spacing * (self.samples.shape[0] - 0.5)
        cx, cy = square.center
        return (x0 <= cx - square.half + eps and cx + square.half <= x1 + eps
                and y0 <= cy - square.half + eps and cy + square.half <= y1 + eps)

    # -- serialization ------------------------------------------------------

    def to_bytes(self) -> bytes:
        ny, nx = self.samples.shape
        header = struct.pack("<3d2q", self.origin[0], self.origin[1],
                             self.spacing, nx, ny)
        payload = np.empty(2 * nx * ny)
        payload[0::2] = self.samples.real.ravel()
        payload[1::2] = self.samples.imag.ravel()
        return header + payload.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FieldGrid":
        ox, oy, sp, nx, ny = struct.unpack_from("<3d2q", blob)
        flat = np.frombuffer(blob, dtype="<f8", offset=struct.calcsize("<3d2q"))
        if flat.size != 2 * nx * ny:
            raise DomainError("field blob payload size mismatch")
        samples = (flat[0::2] + 1j * flat[1::2]).reshape(ny, nx)
        return cls((ox, oy), sp, samples.copy())

    def to_csv(self) -> str:
        lines = ["x,y,re,im"]
        xs = self.x_coords()
        ys = self.y_coords()
        for j in range(self.samples.shape[0]):
            for i in range(self.samples.shape[1]):
                v = self.samples[j, i]
                lines.append(f"{xs[i]!r},{ys[j]!r},{v.real!r},{v.imag!r}")
        return "\n".join(lines) + "\n"


def grid_for_square(square: Square, spacing: float) -> Tuple[Tuple[float, float], int, int]:
    """Cell-centered uniform grid covering a square: (origin, nx, ny).

    Midpoint layout: n cells of width `spacing` tile each side exactly when
    side/spacing is an integer; otherwise the grid is enlarged to cover.
    """
    n = int(np.ceil(square.side / spacing - 1e-12))
    cx, cy = square.center
    x0 = cx - square.side / 2 + spacing / 2
    y0 = cy - square.side / 2 + spacing / 2
    return (x0, y0), n, n


def build_field(g: SymbolFunction, interval: DyadicInterval, square: Square,
                quad: QuadratureSpec = DEFAULT_QUAD,
                spacing: Optional[float] = None) -> FieldGrid:
    """Sample E_J g on a cell-centered grid covering `square`."""
    h = quad.spacing if spacing is None else spacing
    (x0, y0), nx, ny = grid_for_square(square, h)
    samples = np.empty((ny, nx), np.complex128)
    x_hi = max(abs(x0), abs(x0 + h * (nx - 1)))
    for j0 in range(0, ny, _ROW_BAND):
        j1 = min(j0 + _ROW_BAND, ny)
        y_lo = y0 + h * j0
        y_hi = y0 + h * (j1 - 1)
        freq = max_frequency(x_hi, max(abs(y_lo), abs(y_hi)))
        xi, amp = build_nodes(g, interval, freq, quad)
        samples[j0:j1] = eval_field_block(xi, amp, x0, h, nx, y_lo, h, j1 - j0)
    return FieldGrid((x0, y0), h, samples,
                     provenance={"g": g.label or g.kind, "interval": str(interval),
                                 "nodes_per_cycle": quad.nodes_per_cycle})
