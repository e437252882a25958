import numpy as np
import pytest

from solsurf.fields import (
    CHART_EUCLIDEAN,
    CHART_MINKOWSKI,
    Grid2,
    MatrixField,
    chart_jets,
    cumulative_line_integral,
    diff1,
    diff2,
    interior_max,
    read_field_json,
    trim_margin,
    write_field_json,
    write_scalar_csv,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid2("weird-chart")
    with pytest.raises(ValueError):
        Grid2(CHART_EUCLIDEAN, dims=(8, 101))
    with pytest.raises(ValueError):
        Grid2(CHART_EUCLIDEAN, spacing=(0.0, 0.1))


def test_grid_axes_and_xi():
    g = Grid2(CHART_EUCLIDEAN, origin=(1.0, -2.0), spacing=(0.1, 0.2), dims=(11, 21))
    assert g.axis1()[5] == pytest.approx(1.0)
    assert g.axis2()[10] == pytest.approx(-2.0)
    xi = g.xi()
    assert xi.shape == (21, 11)
    assert xi[10, 5] == pytest.approx(1.0 - 2.0j)
    gm = Grid2(CHART_MINKOWSKI)
    with pytest.raises(ValueError):
        gm.xi()


def _scalar_field(grid, fn):
    x, y = grid.mesh()
    return fn(x, y)[..., None, None] * np.ones((1, 1))


def test_stencil_fourth_order():
    # measured order of the first-derivative stencil on sin(x)cos(y)
    errs = []
    for h in (0.1, 0.05):
        g = Grid2(CHART_MINKOWSKI, spacing=(h, h), dims=(int(2 / h) + 1, int(2 / h) + 1))
        x, y = g.mesh()
        f = np.sin(x) * np.cos(y)
        d = diff1(f, h, axis=1)
        exact = np.cos(x) * np.cos(y)
        errs.append(interior_max((d - exact), 2))
    order = np.log2(errs[0] / errs[1])
    assert order > 3.8

    errs2 = []
    for h in (0.1, 0.05):
        g = Grid2(CHART_MINKOWSKI, spacing=(h, h), dims=(int(2 / h) + 1, int(2 / h) + 1))
        x, y = g.mesh()
        f = np.sin(x) * np.cos(y)
        d = diff2(f, h, axis=1)
        errs2.append(interior_max(d + np.sin(x) * np.cos(y), 2))
    assert np.log2(errs2[0] / errs2[1]) > 3.8


def test_chart_jets_euclidean_holomorphic():
    # for a holomorphic function, d2 must vanish and d1 is the derivative
    g = Grid2(CHART_EUCLIDEAN, spacing=(0.01, 0.01), dims=(41, 41))
    xi = g.xi()
    f = (xi**3)[..., None, None] * np.ones((1, 1))
    jets = chart_jets(MatrixField(g, f.astype(complex), 0))
    assert interior_max(jets.d2, jets.margin1) < 1e-11
    assert interior_max(jets.d1 - (3 * xi**2)[..., None, None], jets.margin1) < 1e-11
    assert interior_max(jets.d11 - (6 * xi)[..., None, None], jets.margin2) < 1e-10
    assert interior_max(jets.d12, jets.margin2) < 1e-10


def test_cumulative_integral_exact_on_cubics():
    h = 0.1
    x = np.arange(0, 2 + h / 2, h)
    f = 3 * x**2 - 2 * x + 1
    exact = x**3 - x**2 + x
    out = cumulative_line_integral(f, h, axis=0)
    assert np.max(np.abs(out - exact)) < 1e-12


def test_cumulative_integral_fourth_order():
    errs = []
    for h in (0.02, 0.01):
        x = np.arange(0, 1 + h / 2, h)
        out = cumulative_line_integral(np.sin(x), h, axis=0)
        errs.append(np.max(np.abs(out - (1 - np.cos(x)))))
    assert np.log2(errs[0] / errs[1]) > 3.7


def test_cumulative_integral_on_axis():
    h = 0.05
    g = Grid2(CHART_MINKOWSKI, spacing=(h, h), dims=(21, 9))
    x, y = g.mesh()
    f = (x * y)[..., None, None] * np.ones((2, 2))
    out = cumulative_line_integral(f, h, axis=1)
    exact = ((x**2 - x[0, 0] ** 2) / 2 * y)[..., None, None] * np.ones((2, 2))
    assert np.max(np.abs(out - exact)) < 1e-12


def test_field_json_roundtrip_bit_exact(tmp_path):
    g = Grid2(CHART_EUCLIDEAN, spacing=(0.1, 0.1), dims=(9, 9))
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((9, 9, 2, 2)) + 1j * rng.standard_normal((9, 9, 2, 2))
    path = str(tmp_path / "field.json")
    write_field_json(path, MatrixField(g, vals, 0), lam=0.5 - 0.25j)
    back, lam = read_field_json(path)
    assert lam == 0.5 - 0.25j
    assert np.array_equal(back.values, vals)
    assert back.grid == g
    # rewriting the reimported field is byte-identical
    path2 = str(tmp_path / "field2.json")
    write_field_json(path2, back, lam=lam)
    assert open(path).read() == open(path2).read()


def test_field_json_margin_detection(tmp_path):
    g = Grid2(CHART_EUCLIDEAN, spacing=(0.1, 0.1), dims=(11, 11))
    vals = np.ones((11, 11, 2, 2), dtype=complex)
    vals[:2] = np.nan
    vals[-2:] = np.nan
    vals[:, :2] = np.nan
    vals[:, -2:] = np.nan
    path = str(tmp_path / "field.json")
    write_field_json(path, MatrixField(g, vals, 2))
    back, _ = read_field_json(path)
    assert back.margin == 2


def test_scalar_csv_rows(tmp_path):
    g = Grid2(CHART_MINKOWSKI, spacing=(0.1, 0.1), dims=(11, 9))
    scalar = np.arange(99, dtype=float).reshape(9, 11)
    path = str(tmp_path / "s.csv")
    write_scalar_csv(path, g, scalar, margin=2)
    lines = open(path).read().strip().split("\n")
    assert lines[0] == "x1,x2,value"
    assert len(lines) - 1 == (11 - 4) * (9 - 4)


def test_trim_margin():
    g = Grid2(CHART_EUCLIDEAN, spacing=(0.1, 0.1), dims=(21, 21))
    vals = np.ones((21, 21, 2, 2), dtype=complex)
    out = trim_margin(MatrixField(g, vals, 3))
    assert out.grid.dims == (15, 15)
    assert out.margin == 0
    assert out.grid.axis1()[0] == pytest.approx(g.axis1()[3])
