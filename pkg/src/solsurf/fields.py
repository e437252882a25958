"""Grids, matrix-valued fields, stencil calculus and line integration.

A field stores its values on the full grid together with a ``margin``: the
number of boundary layers whose values are not trusted (stencils that do
not fit are never evaluated one-sidedly; those nodes hold NaN).  Every
derivative widens the margin, every residual is reduced over the interior
that its margin defines.

Axis convention: arrays are indexed [i2, i1, ...] (row-major by (i2, i1)),
so axis 1 runs along the first grid coordinate and axis 0 along the
second.  On the Euclidean chart the grid axes are the real and imaginary
parts of a complex coordinate xi, and the abstract derivative pair is
D1 = (d/dx - i d/dy)/2, D2 = (d/dx + i d/dy)/2.  On the Minkowski chart
the axes are the two lightcone coordinates themselves and D1, D2 are the
plain axis derivatives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .matlie import fro, matrix_from_json, matrix_to_json

__all__ = [
    "CHART_EUCLIDEAN",
    "CHART_MINKOWSKI",
    "Grid2",
    "GridMismatch",
    "Jets",
    "MatrixField",
    "cumulative_line_integral",
    "diff1",
    "diff2",
    "interior_max",
    "read_field_json",
    "write_field_json",
    "write_scalar_csv",
]

CHART_EUCLIDEAN = "euclidean-complex"
CHART_MINKOWSKI = "minkowski-lightcone"


class GridMismatch(ValueError):
    """Fields live on different grids."""


@dataclass(frozen=True)
class Grid2:
    """Uniform 2D grid for one of the two charts."""

    chart: str
    origin: tuple[float, float] = (0.0, 0.0)
    spacing: tuple[float, float] = (0.05, 0.05)
    dims: tuple[int, int] = (101, 101)

    def __post_init__(self) -> None:
        if self.chart not in (CHART_EUCLIDEAN, CHART_MINKOWSKI):
            raise ValueError(f"unknown chart {self.chart!r}")
        if self.dims[0] < 9 or self.dims[1] < 9:
            raise ValueError("grid needs at least 9 nodes per axis")
        if self.spacing[0] <= 0 or self.spacing[1] <= 0:
            raise ValueError("grid spacing must be positive")

    @property
    def n1(self) -> int:
        return self.dims[0]

    @property
    def n2(self) -> int:
        return self.dims[1]

    @property
    def h1(self) -> float:
        return self.spacing[0]

    @property
    def h2(self) -> float:
        return self.spacing[1]

    def axis1(self) -> np.ndarray:
        c, half = self.origin[0], (self.n1 - 1) / 2 * self.h1
        return np.linspace(c - half, c + half, self.n1)

    def axis2(self) -> np.ndarray:
        c, half = self.origin[1], (self.n2 - 1) / 2 * self.h2
        return np.linspace(c - half, c + half, self.n2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X1, X2) arrays of shape (n2, n1)."""
        return np.meshgrid(self.axis1(), self.axis2())

    def xi(self) -> np.ndarray:
        """Complex coordinate x + i y (Euclidean chart only)."""
        if self.chart != CHART_EUCLIDEAN:
            raise ValueError("xi() is defined on the euclidean-complex chart")
        x, y = self.mesh()
        return x + 1j * y

    def coord1(self) -> np.ndarray:
        """First abstract coordinate as a field: xi on Euclidean, x1 on Minkowski."""
        if self.chart == CHART_EUCLIDEAN:
            return self.xi()
        return self.mesh()[0].astype(complex)

    def coord2(self) -> np.ndarray:
        """Second abstract coordinate: conj(xi) on Euclidean, x2 on Minkowski."""
        if self.chart == CHART_EUCLIDEAN:
            return np.conj(self.xi())
        return self.mesh()[1].astype(complex)

    def refined(self, factor: int = 2) -> "Grid2":
        """Same extent, spacing divided by ``factor``."""
        return Grid2(
            chart=self.chart,
            origin=self.origin,
            spacing=(self.h1 / factor, self.h2 / factor),
            dims=((self.n1 - 1) * factor + 1, (self.n2 - 1) * factor + 1),
        )

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "origin": [self.origin[0], self.origin[1]],
            "spacing": [self.h1, self.h2],
            "dims": [self.n1, self.n2],
        }

    @staticmethod
    def from_json(obj: dict) -> "Grid2":
        return Grid2(
            chart=obj["chart"],
            origin=(float(obj["origin"][0]), float(obj["origin"][1])),
            spacing=(float(obj["spacing"][0]), float(obj["spacing"][1])),
            dims=(int(obj["dims"][0]), int(obj["dims"][1])),
        )


@dataclass(frozen=True)
class MatrixField:
    """Matrix-valued field: values (n2, n1, n, n) plus a trust margin."""

    grid: Grid2
    values: np.ndarray
    margin: int = 0

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 4 or v.shape[:2] != (self.grid.n2, self.grid.n1):
            raise ValueError(f"field shape {v.shape} does not match grid {self.grid.dims}")

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def with_values(self, values: np.ndarray, margin: int | None = None) -> "MatrixField":
        return MatrixField(self.grid, values, self.margin if margin is None else margin)

    def widen(self, extra: int) -> "MatrixField":
        return replace(self, margin=self.margin + extra)

    def interior(self, margin: int | None = None) -> np.ndarray:
        m = self.margin if margin is None else margin
        if m == 0:
            return self.values
        return self.values[m:-m, m:-m]


def trim_margin(f: MatrixField) -> MatrixField:
    """Drop the untrusted boundary layers, shrinking the grid symmetrically."""
    m = f.margin
    if m == 0:
        return f
    if 2 * m >= min(f.grid.n1, f.grid.n2) - 8:
        raise ValueError("margin too large to trim")
    grid = Grid2(
        chart=f.grid.chart,
        origin=f.grid.origin,
        spacing=f.grid.spacing,
        dims=(f.grid.n1 - 2 * m, f.grid.n2 - 2 * m),
    )
    return MatrixField(grid, f.values[m:-m, m:-m], 0)


def same_grid(*fields: MatrixField) -> Grid2:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatch("fields on different grids")
    return g


def constant_field(grid: Grid2, mat: np.ndarray, margin: int = 0) -> MatrixField:
    values = np.broadcast_to(
        np.asarray(mat, dtype=complex), (grid.n2, grid.n1) + np.asarray(mat).shape
    ).copy()
    return MatrixField(grid, values, margin)


def interior_max(scalar: np.ndarray, margin: int) -> float:
    """Max of |scalar| over the interior; NaN-nodes outside are ignored."""
    s = np.abs(np.asarray(scalar))
    if margin > 0:
        s = s[margin:-margin, margin:-margin]
    if s.size == 0:
        raise ValueError("margin leaves no interior nodes")
    return float(np.nanmax(s))


def _shift_slices(ndim: int, axis: int, k: int) -> tuple[slice, ...]:
    sl = [slice(None)] * ndim
    hi = None if k == 2 else k - 2
    sl[axis] = slice(2 + k, hi)
    return tuple(sl)


def diff1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order central first derivative; outermost 2 layers become NaN."""
    out = np.full_like(values, np.nan, dtype=complex)
    core = [slice(None)] * values.ndim
    core[axis] = slice(2, -2)
    s = lambda k: _shift_slices(values.ndim, axis, k)  # noqa: E731
    out[tuple(core)] = (
        -values[s(2)] + 8 * values[s(1)] - 8 * values[s(-1)] + values[s(-2)]
    ) / (12 * h)
    return out


def diff2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order central second derivative; outermost 2 layers become NaN."""
    out = np.full_like(values, np.nan, dtype=complex)
    core = [slice(None)] * values.ndim
    core[axis] = slice(2, -2)
    s = lambda k: _shift_slices(values.ndim, axis, k)  # noqa: E731
    out[tuple(core)] = (
        -values[s(2)]
        + 16 * values[s(1)]
        - 30 * values[s(0)]
        + 16 * values[s(-1)]
        - values[s(-2)]
    ) / (12 * h * h)
    return out


@dataclass(frozen=True)
class Jets:
    """Chart derivatives of a field up to second order.

    ``margin1`` bounds the trusted region of d1/d2, ``margin2`` that of the
    second-order set (the mixed real-axis stencil is a composition, hence
    the doubled margin).
    """

    d1: np.ndarray
    d2: np.ndarray
    d11: np.ndarray
    d12: np.ndarray
    d22: np.ndarray
    margin1: int
    margin2: int


def chart_first_derivatives(f: MatrixField) -> tuple[np.ndarray, np.ndarray, int]:
    g = f.grid
    dx = diff1(f.values, g.h1, axis=1)
    dy = diff1(f.values, g.h2, axis=0)
    if g.chart == CHART_EUCLIDEAN:
        return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy), f.margin + 2
    return dx, dy, f.margin + 2


def chart_jets(f: MatrixField) -> Jets:
    """All derivatives up to second order by 4th-order stencils."""
    g = f.grid
    dx = diff1(f.values, g.h1, axis=1)
    dy = diff1(f.values, g.h2, axis=0)
    dxx = diff2(f.values, g.h1, axis=1)
    dyy = diff2(f.values, g.h2, axis=0)
    dxy = diff1(dx, g.h2, axis=0)
    if g.chart == CHART_EUCLIDEAN:
        d1 = 0.5 * (dx - 1j * dy)
        d2 = 0.5 * (dx + 1j * dy)
        d11 = 0.25 * (dxx - dyy - 2j * dxy)
        d22 = 0.25 * (dxx - dyy + 2j * dxy)
        d12 = 0.25 * (dxx + dyy)
    else:
        d1, d2 = dx, dy
        d11, d22 = dxx, dyy
        d12 = dxy
    return Jets(
        d1=d1,
        d2=d2,
        d11=d11,
        d12=d12,
        d22=d22,
        margin1=f.margin + 2,
        margin2=f.margin + 4,
    )


def field_norm(values: np.ndarray) -> np.ndarray:
    """Pointwise Frobenius norm, shape (n2, n1)."""
    return fro(values)


# --- cumulative line integration -------------------------------------------
#
# Composite Simpson with a 3/8 closure for odd prefixes and a one-sided
# cubic panel for the first interval: every prefix integral is 4th-order
# accurate, which lets surfaces be integrated to every grid node.


def _cum_1d(f: np.ndarray, h: float) -> np.ndarray:
    n = f.shape[0]
    if n < 4:
        raise ValueError("cumulative integration needs at least 4 nodes")
    out = np.zeros_like(f)
    out[1] = h / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3])
    if n > 2:
        out[2] = h / 3.0 * (f[0] + 4 * f[1] + f[2])
    for j in range(3, n):
        if j % 2 == 0:
            out[j] = out[j - 2] + h / 3.0 * (f[j - 2] + 4 * f[j - 1] + f[j])
        else:
            out[j] = out[j - 3] + 3 * h / 8.0 * (
                f[j - 3] + 3 * f[j - 2] + 3 * f[j - 1] + f[j]
            )
    return out


def cumulative_line_integral(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Antiderivative along one grid axis, zero at index 0 of that axis."""
    moved = np.moveaxis(values, axis, 0)
    res = _cum_1d(moved, h)
    return np.moveaxis(res, 0, axis)


# --- (de)serialization ------------------------------------------------------


def write_field_json(path: str, f: MatrixField, lam: complex | None = None) -> None:
    obj: dict = {
        "grid": f.grid.to_json(),
        "n": f.n,
        "values": [
            matrix_to_json(f.values[i2, i1])
            for i2 in range(f.grid.n2)
            for i1 in range(f.grid.n1)
        ],
    }
    if lam is not None:
        obj["lambda"] = [float(np.real(lam)), float(np.imag(lam))]
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"))


def read_field_json(path: str) -> tuple[MatrixField, complex | None]:
    with open(path) as fh:
        obj = json.load(fh)
    grid = Grid2.from_json(obj["grid"])
    n = int(obj["n"])
    values = np.empty((grid.n2, grid.n1, n, n), dtype=complex)
    it: Iterator[dict] = iter(obj["values"])
    for i2 in range(grid.n2):
        for i1 in range(grid.n1):
            values[i2, i1] = matrix_from_json(next(it))
    lam = None
    if "lambda" in obj:
        lam = complex(obj["lambda"][0], obj["lambda"][1])
    nan_rows = np.isnan(values).any(axis=(-1, -2))
    margin = 0
    while margin * 2 + 1 < min(grid.n1, grid.n2):
        inner = nan_rows[margin:-margin, margin:-margin] if margin else nan_rows
        if not inner.any():
            break
        margin += 1
    return MatrixField(grid, values, margin), lam


def write_scalar_csv(path: str, grid: Grid2, scalar: np.ndarray, margin: int = 0) -> None:
    """Interior nodes as rows ``x1,x2,value`` (17 significant digits)."""
    x1, x2 = grid.mesh()
    lines = ["x1,x2,value"]
    for i2 in range(margin, grid.n2 - margin):
        for i1 in range(margin, grid.n1 - margin):
            v = scalar[i2, i1]
            lines.append(
                f"{x1[i2, i1]:.17g},{x2[i2, i1]:.17g},{float(np.real(v)):.17g}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
