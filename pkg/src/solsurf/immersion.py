"""Immersion functions built from spectral, gauge and symmetry tangents.

The tangent pair (A, B) is assembled as

    A = a(lam) d(u1)/d(lam) + D_1 S + [S, u1] + pr w_Q u1
    B = a(lam) d(u2)/d(lam) + D_2 S + [S, u2] + pr w_Q u2

and the surface F is recovered from D_alpha F = Phi^{-1} A_alpha Phi by
line integration along grid lines, using both integration orders; their
mismatch is the path-independence certificate.  Closed forms are provided
for the spectral-parameter term (Sym-Tafel), the gauge term, the conformal
symmetry term, and the explicitly integrated prolongation of the wave
function; each closed form is paired with a finite-difference tangent
check in the verification suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import (
    CHART_EUCLIDEAN,
    Grid2,
    MatrixField,
    chart_first_derivatives,
    cumulative_line_integral,
    interior_max,
    same_grid,
)
from .matlie import commutator, fro, inner, project_su
from .sigma import JetField, check_lambda, u_pair
from .spectral import WaveField
from .symmetry import FrechetPolicy, SymmetryCharacteristic, frechet_apply, u_functional

__all__ = [
    "ImmersionInputs",
    "ImmersionResult",
    "assemble_tangents",
    "compatibility_defect",
    "conformal_immersion_closed",
    "constant_difference_check",
    "gauge_immersion",
    "integrate_surface",
    "linear_independence_report",
    "prolong_immersion",
    "psi_of",
    "psi_residual",
    "sym_tafel",
    "tangent_check",
    "u_dlambda",
]


@dataclass(frozen=True)
class ImmersionInputs:
    """Ingredients of the tangent pair; any subset may be active."""

    a_coeffs: tuple[float, ...] = ()
    gauge: MatrixField | None = None
    characteristic: SymmetryCharacteristic | None = None

    def a_value(self, lam: complex) -> complex:
        out = 0.0 + 0.0j
        for c in self.a_coeffs[::-1]:
            out = out * lam + c
        return out

    def active(self) -> bool:
        return bool(self.a_coeffs) or self.gauge is not None or self.characteristic is not None


@dataclass(frozen=True)
class ImmersionResult:
    """Integrated surface plus its certification data.

    ``field`` is the su(N)-projected surface (the deliverable); ``raw``
    keeps the unprojected line integral, on which the tangent and
    closed-form identities hold for every spectral parameter, admissible
    or not.
    """

    field: MatrixField
    raw: MatrixField
    basepoint: tuple[int, int]
    compat_defect: float
    path_defect: float
    su_correction: float


def u_dlambda(j: JetField, lam: complex) -> tuple[MatrixField, MatrixField]:
    """Spectral-parameter derivative of the connection pair (closed form)."""
    lam = check_lambda(lam)
    v1 = (2.0 / (1 + lam) ** 2) * commutator(j.d1, j.theta)
    v2 = (-2.0 / (1 - lam) ** 2) * commutator(j.d2, j.theta)
    return MatrixField(j.grid, v1, j.margin1), MatrixField(j.grid, v2, j.margin1)


def assemble_tangents(
    inp: ImmersionInputs,
    j: JetField,
    lam: complex,
    policy: FrechetPolicy = FrechetPolicy(),
) -> tuple[MatrixField, MatrixField]:
    """Tangent pair (A, B) from the three symmetry ingredients."""
    if not inp.active():
        raise ValueError("at least one immersion ingredient must be provided")
    lam = check_lambda(lam)
    grid = j.grid
    shape = j.theta.shape
    a_vals = np.zeros(shape, dtype=complex)
    b_vals = np.zeros(shape, dtype=complex)
    margin = j.margin1
    if inp.a_coeffs:
        a = inp.a_value(lam)
        du1, du2 = u_dlambda(j, lam)
        a_vals = a_vals + a * du1.values
        b_vals = b_vals + a * du2.values
    if inp.gauge is not None:
        s = inp.gauge
        if s.grid != grid:
            raise ValueError("gauge field grid mismatch")
        d1s, d2s, smargin = chart_first_derivatives(s)
        u1, u2 = u_pair(j, lam)
        a_vals = a_vals + d1s + commutator(s.values, u1.values)
        b_vals = b_vals + d2s + commutator(s.values, u2.values)
        margin = max(margin, smargin)
    if inp.characteristic is not None:
        q = inp.characteristic(j)
        pw1 = frechet_apply(u_functional(lam, 1), j, q, policy)
        pw2 = frechet_apply(u_functional(lam, 2), j, q, policy)
        a_vals = a_vals + pw1.values
        b_vals = b_vals + pw2.values
        margin = max(margin, pw1.margin, pw2.margin)
    return MatrixField(grid, a_vals, margin), MatrixField(grid, b_vals, margin)


def compatibility_defect(
    a: MatrixField, b: MatrixField, u1: MatrixField, u2: MatrixField
) -> float:
    """Interior max of || D_2 A - D_1 B + [A, u2] + [u1, B] ||_F."""
    same_grid(a, b, u1, u2)
    da = chart_first_derivatives(a)
    db = chart_first_derivatives(b)
    res = da[1] - db[0] + commutator(a.values, u2.values) + commutator(u1.values, b.values)
    margin = max(da[2], db[2], u1.margin, u2.margin)
    return interior_max(fro(res), margin)


def _conjugate(w: WaveField, m: MatrixField) -> np.ndarray:
    return w.inverse() @ m.values @ w.phi


def _axis_integrands(
    grid: Grid2, at: np.ndarray, bt: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Grid-axis tangents from the abstract pair (D_1 F, D_2 F).

    On the Euclidean chart the abstract derivatives are the complex pair
    (d/dx - i d/dy)/2 and (d/dx + i d/dy)/2, so the axis tangents are
    their sum and i times their difference; the Minkowski axes carry the
    abstract coordinates directly.
    """
    if grid.chart == CHART_EUCLIDEAN:
        return at + bt, 1j * (at - bt)
    return at, bt


def integrate_surface(
    a: MatrixField,
    b: MatrixField,
    w: WaveField,
    basepoint: tuple[int, int] | None = None,
    u1: MatrixField | None = None,
    u2: MatrixField | None = None,
    compat_warn: float = 1e-6,
) -> ImmersionResult:
    """Integrate D_1 F = Phi^{-1} A Phi, D_2 F = Phi^{-1} B Phi from a basepoint.

    Composite-Simpson line integration along x1 then x2; the reversed
    order is always computed as well and the worst node-wise discrepancy
    is reported as ``path_defect``.  The integration constant is fixed by
    F(basepoint) = 0, then F is projected onto su(N) with the correction
    norm logged.  When the connection pair is supplied, the compatibility
    defect is measured first and a warning is emitted if it exceeds
    ``compat_warn`` (integration proceeds regardless).
    """
    grid = same_grid(a, b)
    if w.grid != grid:
        raise ValueError("wave field grid mismatch")
    compat = float("nan")
    if u1 is not None and u2 is not None:
        compat = compatibility_defect(a, b, u1, u2)
        if compat > compat_warn:
            import warnings

            warnings.warn(
                f"tangent pair is not compatible (defect {compat:.3e}); "
                "the integrated surface will be path dependent",
                stacklevel=2,
            )
    m = max(a.margin, b.margin, w.margin)
    if basepoint is None:
        basepoint = (m, m)
    i1c, i2c = basepoint
    n1, n2 = grid.n1, grid.n2
    if not (m <= i1c < n1 - m and m <= i2c < n2 - m):
        raise ValueError("basepoint outside the trusted interior")

    at = _conjugate(w, a)
    bt = _conjugate(w, b)
    gx, gy = _axis_integrands(grid, at, bt)
    sl = (slice(m, n2 - m) if m else slice(None), slice(m, n1 - m) if m else slice(None))
    gx_v = gx[sl]
    gy_v = gy[sl]
    j1c, j2c = i1c - m, i2c - m

    ia = cumulative_line_integral(gx_v, grid.h1, axis=1)
    ia = ia - ia[:, j1c : j1c + 1]
    ib = cumulative_line_integral(gy_v, grid.h2, axis=0)
    ib = ib - ib[j2c : j2c + 1, :]

    # x1 first: run along the basepoint row, then up each column.
    f_12 = ia[j2c : j2c + 1, :] + ib
    # x2 first: run along the basepoint column, then across each row.
    f_21 = ib[:, j1c : j1c + 1] + ia
    path_defect = float(np.nanmax(fro(f_12 - f_21)))

    f_full = np.full_like(at, np.nan)
    f_full[sl] = f_12
    su_part, defect = project_su(np.where(np.isfinite(f_full), f_full, 0.0))
    su_correction = float(np.nanmax(np.where(np.isfinite(fro(f_full)), defect, np.nan)))
    f_vals = np.where(np.isfinite(f_full)[..., :, :], su_part, np.nan + 0j)

    return ImmersionResult(
        field=MatrixField(grid, f_vals, m),
        raw=MatrixField(grid, f_full, m),
        basepoint=basepoint,
        compat_defect=compat,
        path_defect=path_defect,
        su_correction=su_correction,
    )


def tangent_check(
    f: MatrixField, w: WaveField, a: MatrixField, b: MatrixField
) -> tuple[float, float]:
    """Stencil derivatives of F against the conjugated tangents."""
    d1f, d2f, dmargin = chart_first_derivatives(f)
    at = _conjugate(w, a)
    bt = _conjugate(w, b)
    margin = max(dmargin, a.margin, b.margin, w.margin)
    return (
        interior_max(fro(d1f - at), margin),
        interior_max(fro(d2f - bt), margin),
    )


def su_distance(f: MatrixField) -> float:
    """Worst interior distance of a field from anti-Hermitian traceless."""
    _, defect = project_su(np.where(np.isfinite(f.values), f.values, 0.0))
    return interior_max(
        np.where(np.isfinite(fro(f.values)), defect, np.nan), f.margin
    )


def su_projected(f: MatrixField) -> tuple[MatrixField, float]:
    """Pointwise su(N) projection of a field, with the correction logged."""
    su_part, defect = project_su(np.where(np.isfinite(f.values), f.values, 0.0))
    vals = np.where(np.isfinite(f.values), su_part, np.nan + 0j)
    corr = interior_max(np.where(np.isfinite(fro(f.values)), defect, np.nan), f.margin)
    return MatrixField(f.grid, vals, f.margin), corr


def sym_tafel(w: WaveField, dphi: MatrixField, a_value: complex) -> tuple[MatrixField, float]:
    """Spectral-parameter immersion F = a(lam) Phi^{-1} dPhi/dlam.

    Returned raw, with the distance from su(N) as a diagnostic; the field
    lies in the algebra exactly on the unitarity domain of the wave
    function.
    """
    raw = a_value * (w.inverse() @ dphi.values)
    out = MatrixField(w.grid, raw, max(w.margin, dphi.margin))
    return out, su_distance(out)


def gauge_immersion(s: MatrixField, w: WaveField) -> tuple[MatrixField, float]:
    """Gauge immersion F = Phi^{-1} S Phi with its su(N) distance."""
    raw = w.inverse() @ s.values @ w.phi
    out = MatrixField(w.grid, raw, max(w.margin, s.margin))
    return out, su_distance(out)


def conformal_immersion_closed(
    spec, j: JetField, w: WaveField, lam: complex
) -> tuple[MatrixField, float]:
    """Closed-form conformal immersion F = Phi^{-1} (f u1 + g u2) Phi."""
    lam = check_lambda(lam)
    u1, u2 = u_pair(j, lam)
    grid = j.grid
    core = (
        spec.f(grid)[..., None, None] * u1.values
        + spec.g(grid)[..., None, None] * u2.values
    )
    raw = w.inverse() @ core @ w.phi
    out = MatrixField(grid, raw, max(w.margin, u1.margin))
    return out, su_distance(out)


def prolong_immersion(
    q: MatrixField,
    j: JetField,
    phi_builder: Callable[[JetField], WaveField],
    policy: FrechetPolicy = FrechetPolicy(),
) -> tuple[MatrixField, float]:
    """Explicitly integrated immersion F = Phi^{-1} (pr w_Q Phi)."""
    wave0 = phi_builder(j)

    def phi_values(jd: JetField) -> MatrixField:
        wd = phi_builder(jd)
        return MatrixField(jd.grid, wd.phi, wd.margin)

    prw_phi = frechet_apply(phi_values, j, q, policy)
    raw = wave0.inverse() @ prw_phi.values
    out = MatrixField(j.grid, raw, max(wave0.margin, prw_phi.margin))
    return out, su_distance(out)


def constant_difference_check(
    f: MatrixField, calf: MatrixField
) -> tuple[np.ndarray, float]:
    """Grid mean of F - calF and the worst deviation from that mean."""
    same_grid(f, calf)
    m = max(f.margin, calf.margin)
    diff = (f.values - calf.values)[m:-m, m:-m] if m else f.values - calf.values
    mean = np.nanmean(diff.reshape(-1, diff.shape[-2], diff.shape[-1]), axis=0)
    variation = float(np.nanmax(fro(diff - mean)))
    return mean, variation


def psi_of(f: MatrixField, w: WaveField) -> MatrixField:
    """Deformation direction of the wave function: Psi = Phi F."""
    vals = w.phi @ f.values
    return MatrixField(f.grid, vals, max(f.margin, w.margin))


def psi_residual(
    psi: MatrixField,
    w: WaveField,
    u1: MatrixField,
    u2: MatrixField,
    a: MatrixField,
    b: MatrixField,
) -> float:
    """Interior max of || D_alpha Psi - u^alpha Psi - A_alpha Phi ||_F."""
    d1psi, d2psi, dmargin = chart_first_derivatives(psi)
    r1 = d1psi - u1.values @ psi.values - a.values @ w.phi
    r2 = d2psi - u2.values @ psi.values - b.values @ w.phi
    margin = max(dmargin, u1.margin, a.margin, b.margin, w.margin)
    return max(interior_max(fro(r1), margin), interior_max(fro(r2), margin))


def linear_independence_report(
    t1: MatrixField, t2: MatrixField
) -> dict[str, float]:
    """Eigenvalue range of the 2x2 Gram matrix of the tangents under inner().

    The smallest eigenvalue measures linear independence pointwise; a
    surface degenerates to a curve exactly where it vanishes.
    """
    same_grid(t1, t2)
    m = max(t1.margin, t2.margin)
    g11 = inner(t1.values, t1.values)
    g12 = inner(t1.values, t2.values)
    g22 = inner(t2.values, t2.values)
    tr_half = 0.5 * (g11 + g22)
    disc = np.sqrt(np.maximum(0.25 * (g11 - g22) ** 2 + g12**2, 0.0))
    lo, hi = tr_half - disc, tr_half + disc
    sl = (slice(m, -m), slice(m, -m)) if m else (slice(None), slice(None))
    return {
        "min_eigenvalue": float(np.nanmin(lo[sl])),
        "max_min_eigenvalue": float(np.nanmax(lo[sl])),
        "max_eigenvalue": float(np.nanmax(hi[sl])),
    }
