"""Wave functions of the linear problem D_alpha(Phi) = u^alpha Phi.

Two closed-form builders are provided:

* Euclidean chart: Phi = I + c(lam) * sum_{m=1..k} L^m(P) + beta(lam) * P
  for a ladder solution at level k, where L is the lowering operator and
  c = 4 lam / (1 - lam)^2, beta = -2/(1 - lam).  The lowered rungs are
  evaluated directly from the jet fields of the active solution, so the
  builder is a smooth function of the jets and can be deformed.
* Minkowski chart: Phi = exp(2 chi [theta_1, theta]) (2i theta - (2-N) I/N)
  for traveling waves, with chi = lam x1/(1+lam) - kappa lam x2/(1-lam).

Both are certified against 4th-order stencil derivatives by
:func:`lsp_residual`; unitarity is reported as a diagnostic only.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import DeformationOutOfDomain
from .fields import Grid2, MatrixField, chart_first_derivatives, interior_max
from .matlie import commutator, dagger, expm, fro, trace
from .sigma import JetField, SolutionLadder, TravelingWave, check_lambda, theta_of

__all__ = [
    "WaveField",
    "euclidean_wave",
    "euclidean_wave_coefficients",
    "euclidean_wave_dlambda",
    "lowered_rungs_from_jets",
    "lowered_rung_with_jets",
    "lsp_residual",
    "phi_euclidean",
    "phi_traveling",
    "traveling_wave_dlambda",
    "wave_diagnostics",
]

DET_FLOOR = 1e-10


@dataclass(frozen=True)
class WaveField:
    """Invertible matrix solution of the linear problem at fixed lambda."""

    grid: Grid2
    lam: complex
    phi: np.ndarray
    margin: int = 0
    builder: str = ""
    ladder_coefficients: tuple[complex, complex, int] | None = None
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.phi.shape[-1]

    def field(self) -> MatrixField:
        return MatrixField(self.grid, self.phi, self.margin)

    def inverse(self) -> np.ndarray:
        """Per-node inverse (LU with partial pivoting); NaN nodes stay NaN."""
        out = np.full_like(self.phi, np.nan, dtype=complex)
        ok = np.isfinite(self.phi).all(axis=(-1, -2))
        if np.any(ok):
            out[ok] = np.linalg.inv(self.phi[ok])
        return out


def wave_diagnostics(w: WaveField) -> dict[str, float]:
    """Invertibility and unitarity report over the trusted interior."""
    phi = w.phi
    ok = np.isfinite(phi).all(axis=(-1, -2))
    det = np.where(ok, np.linalg.det(np.where(ok[..., None, None], phi, 0.0)), np.nan)
    ident = np.eye(w.n)
    unit = np.where(
        ok,
        fro(np.where(ok[..., None, None], dagger(phi) @ phi, 0.0) - ident),
        np.nan,
    )
    cond = np.full(phi.shape[:2], np.nan)
    if np.any(ok):
        cond[ok] = np.linalg.cond(phi[ok])
    m = w.margin
    return {
        "min_abs_det": float(np.nanmin(np.abs(det[m:-m, m:-m] if m else det))),
        "max_condition": float(np.nanmax(cond[m:-m, m:-m] if m else cond)),
        "max_unitarity_defect": interior_max(unit, m),
    }


# --- Euclidean builder ---------------------------------------------------------


def euclidean_wave_coefficients(lam: complex, k: int) -> tuple[complex, complex]:
    """(c, beta) with Phi = I + c * sum of lowered rungs + beta * P."""
    lam = check_lambda(lam)
    return 4 * lam / (1 - lam) ** 2, -2 / (1 - lam)


def lowered_rung_with_jets(
    p: np.ndarray, d1p: np.ndarray, d2p: np.ndarray, j: JetField
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lowered projector L(P) = D2P P D1P / tr(...) and its first derivatives.

    The derivatives come from the quotient rule through the jets of the
    input, so the output is again differentiable data; one extra jet order
    of the input is consumed per application.
    """
    num = d2p @ p @ d1p
    den = trace(num)
    with np.errstate(invalid="ignore"):
        bad = ~(np.abs(den) > 1e-300)
    if bad.all():
        raise DeformationOutOfDomain("lowering denominator vanished everywhere")
    with np.errstate(invalid="ignore", divide="ignore"):
        deninv = np.where(bad, np.nan, 1.0 / np.where(bad, 1.0, den))
    r = num * deninv[..., None, None]
    # the input is P = I/N - i theta, so second derivatives are -i theta_ab
    d11p, d12p, d22p = -1j * j.d11, -1j * j.d12, -1j * j.d22
    d1num = d12p @ p @ d1p + d2p @ d1p @ d1p + d2p @ p @ d11p
    d2num = d22p @ p @ d1p + d2p @ d2p @ d1p + d2p @ p @ d12p
    d1den = trace(d1num)
    d2den = trace(d2num)
    d1r = d1num * deninv[..., None, None] - num * (d1den * deninv**2)[..., None, None]
    d2r = d2num * deninv[..., None, None] - num * (d2den * deninv**2)[..., None, None]
    return r, d1r, d2r


def lowered_rungs_from_jets(j: JetField, k: int) -> list[np.ndarray]:
    """Values of L(P), L^2(P), ... L^k(P) for the solution carried by ``j``.

    Supports k <= 2: the first lowering consumes the cached second jets,
    the second consumes the first derivatives produced alongside rung one.
    """
    if k == 0:
        return []
    if k > 2:
        raise DeformationOutOfDomain(
            "jet-based lowering supports at most two steps (jets are cached to order 2)"
        )
    p = j.projector()
    d1p, d2p = -1j * j.d1, -1j * j.d2
    r1, d1r1, d2r1 = lowered_rung_with_jets(p, d1p, d2p, j)
    if k == 1:
        return [r1]
    num = d2r1 @ r1 @ d1r1
    den = trace(num)
    with np.errstate(invalid="ignore"):
        bad = ~(np.abs(den) > 1e-300)
    if bad.all():
        raise DeformationOutOfDomain("second lowering denominator vanished everywhere")
    with np.errstate(invalid="ignore", divide="ignore"):
        deninv = np.where(bad, np.nan, 1.0 / np.where(bad, 1.0, den))
    r2 = num * deninv[..., None, None]
    return [r1, r2]


def euclidean_wave(j: JetField, k: int, lam: complex) -> WaveField:
    """Wave function for a level-k ladder solution, from its jet field."""
    c, beta = euclidean_wave_coefficients(lam, k)
    p = j.projector()
    phi = np.broadcast_to(np.eye(j.n, dtype=complex), p.shape) + beta * p
    margin = j.margin1 if k == 1 else (j.margin2 if k >= 2 else j.margin0)
    for rung in lowered_rungs_from_jets(j, k):
        phi = phi + c * rung
    return WaveField(
        grid=j.grid,
        lam=complex(lam),
        phi=phi,
        margin=margin,
        builder="euclidean-ladder",
        ladder_coefficients=(c, beta, k),
    )


def phi_euclidean(ladder: SolutionLadder, lam: complex, provenance: str = "analytic") -> WaveField:
    """Wave function at the ladder's active level.

    The lowered rungs are recomputed from the active solution's jets for
    levels up to 2; deeper levels sum the stored ladder rungs instead
    (those are the same projectors, but carry no deformation support).
    """
    k = ladder.active
    rung = ladder.active_rung
    prov = provenance if rung.jets is not None else "numeric-stencil"
    j = theta_of(rung, prov)
    if k <= 2:
        return euclidean_wave(j, k, lam)
    c, beta = euclidean_wave_coefficients(lam, k)
    phi = np.broadcast_to(np.eye(ladder.n, dtype=complex), rung.values.shape).copy()
    phi = phi + beta * rung.values
    for m in range(k):
        phi = phi + c * ladder.rungs[m].values
    margin = max(r.margin for r in ladder.rungs)
    return WaveField(
        grid=rung.grid,
        lam=complex(lam),
        phi=phi,
        margin=margin,
        builder="euclidean-ladder-stored",
        ladder_coefficients=(c, beta, k),
    )


def euclidean_wave_dlambda(j: JetField, k: int, lam: complex) -> MatrixField:
    """Analytic d(Phi)/d(lambda) for the Euclidean builder."""
    lam = check_lambda(lam)
    cprime = 4 * (1 + lam) / (1 - lam) ** 3
    bprime = -2 / (1 - lam) ** 2
    p = j.projector()
    out = bprime * p
    margin = j.margin1 if k == 1 else (j.margin2 if k >= 2 else j.margin0)
    for rung in lowered_rungs_from_jets(j, k):
        out = out + cprime * rung
    return MatrixField(j.grid, out, margin)


# --- Minkowski builder ---------------------------------------------------------


def traveling_phi_values(wave: TravelingWave, j: JetField, lam: complex) -> np.ndarray:
    """(travel-wave closed form) exp(2 chi [theta_1, theta]) (2i theta - (2-N)I/N)."""
    lam = check_lambda(lam)
    n = j.n
    chi = wave.chi(lam)
    komm = commutator(j.d1, j.theta)
    tail = 2j * j.theta - (2 - n) * np.broadcast_to(np.eye(n) / n, j.theta.shape)
    return expm(2.0 * chi[..., None, None] * komm) @ tail


def phi_traveling(wave: TravelingWave, j: JetField, lam: complex) -> WaveField:
    """Traveling-wave wave function (exact jets make this margin-free)."""
    if j.n != 2:
        raise ValueError("traveling-wave wave functions are implemented for N = 2")
    phi = traveling_phi_values(wave, j, lam)
    return WaveField(
        grid=wave.grid,
        lam=complex(lam),
        phi=phi,
        margin=j.margin0,
        builder="traveling",
    )


def traveling_wave_dlambda(wave: TravelingWave, j: JetField, lam: complex) -> MatrixField:
    """d(Phi)/d(lambda) = 2 (d chi/d lambda) [theta_1, theta] Phi."""
    phi = traveling_phi_values(wave, j, lam)
    komm = commutator(j.d1, j.theta)
    out = 2.0 * wave.dlambda_chi(lam)[..., None, None] * (komm @ phi)
    return MatrixField(wave.grid, out, j.margin0)


def dlambda_fd(
    builder: "Callable[[complex], WaveField]", lam: complex, step: float = 1e-5
) -> MatrixField:
    """Central difference of a wave-function builder in the spectral parameter.

    Independent cross-check for the analytic lambda-derivatives; the
    difference is taken along the real lambda direction.
    """
    plus = builder(lam + step)
    minus = builder(lam - step)
    vals = (plus.phi - minus.phi) / (2 * step)
    return MatrixField(plus.grid, vals, max(plus.margin, minus.margin))


# --- residual --------------------------------------------------------------------


def lsp_residual(
    w: WaveField, u1: MatrixField, u2: MatrixField
) -> tuple[np.ndarray, np.ndarray, int]:
    """Pointwise ||D_alpha(Phi) - u^alpha Phi||_F with stencil derivatives of Phi."""
    if u1.grid != w.grid or u2.grid != w.grid:
        raise ValueError("wave field and connection live on different grids")
    d1phi, d2phi, dmargin = chart_first_derivatives(w.field())
    margin = max(dmargin, u1.margin, u2.margin)
    r1 = fro(d1phi - u1.values @ w.phi)
    r2 = fro(d2phi - u2.values @ w.phi)
    return r1, r2, margin
