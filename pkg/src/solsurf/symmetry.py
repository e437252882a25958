"""Generalized symmetries in evolutionary form, realized numerically.

A symmetry characteristic is a matrix field Q built from the jets of a
solution.  Its prolongation acting on any field functional G is realized
by deforming the whole solution, theta -> theta +/- eps*Q, recomputing
the jet fields (linearity: jets of the deformation are eps times the jets
of Q, computed once and shared by every evaluation), and differencing:

    pr w_Q G = [G(theta + eps Q) - G(theta - eps Q)] / (2 eps)

with an optional Richardson step combining eps and eps/2.  Because the
deformed jets are exact linear shifts, the difference quotient is free of
the cancellation noise a naive re-evaluation would produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ChartMismatch
from .fields import (
    CHART_EUCLIDEAN,
    CHART_MINKOWSKI,
    Grid2,
    Jets,
    MatrixField,
    chart_first_derivatives,
    chart_jets,
    interior_max,
)
from .matlie import commutator, fro
from .sigma import JetField, TravelingWave, check_lambda, u_pair

__all__ = [
    "ConformalSpec",
    "FrechetPolicy",
    "SymmetryCharacteristic",
    "commutation_defect",
    "conformal_characteristic",
    "el_symmetry_defect",
    "frechet_apply",
    "lowering_functional",
    "lowering_derivative_functionals",
    "lsp_symmetry_defect",
    "make_characteristic",
    "prolong_u",
    "theta_functional",
    "theta_derivative_functionals",
    "traveling_R_fields",
    "u_functional",
    "u_derivative_functionals",
]

Functional = Callable[[JetField], MatrixField]


# --- conformal data -----------------------------------------------------------


def _polyval(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=complex)
    for c in coeffs[::-1]:
        out = out * x + c
    return out


def _polyder(coeffs: np.ndarray) -> np.ndarray:
    if len(coeffs) <= 1:
        return np.zeros(1, dtype=complex)
    k = np.arange(1, len(coeffs))
    return coeffs[1:] * k


@dataclass(frozen=True)
class ConformalSpec:
    """Polynomial pair (f(x1), g(x2)) defining a conformal characteristic.

    Coefficients are ascending.  Minkowski chart: both polynomials real.
    Euclidean chart: g is the conjugate mirror of f (conjugated
    coefficients), so that f theta_1 + g theta_2 stays anti-Hermitian.
    """

    f_coeffs: tuple[complex, ...]
    g_coeffs: tuple[complex, ...]
    chart: str

    def __post_init__(self) -> None:
        f = np.asarray(self.f_coeffs, dtype=complex)
        g = np.asarray(self.g_coeffs, dtype=complex)
        if self.chart == CHART_MINKOWSKI:
            if np.abs(f.imag).max(initial=0) > 1e-14 or np.abs(g.imag).max(initial=0) > 1e-14:
                raise ValueError("Minkowski conformal coefficients must be real")
        elif self.chart == CHART_EUCLIDEAN:
            fpad = np.zeros(max(len(f), len(g)), dtype=complex)
            gpad = fpad.copy()
            fpad[: len(f)] = f
            gpad[: len(g)] = g
            if np.abs(gpad - np.conj(fpad)).max(initial=0) > 1e-14:
                raise ValueError(
                    "Euclidean conformal data requires g to carry the conjugated "
                    "coefficients of f"
                )
        else:
            raise ValueError(f"unknown chart {self.chart!r}")

    @staticmethod
    def euclidean(f_coeffs: tuple[complex, ...]) -> "ConformalSpec":
        f = np.asarray(f_coeffs, dtype=complex)
        return ConformalSpec(tuple(f), tuple(np.conj(f)), CHART_EUCLIDEAN)

    @staticmethod
    def minkowski(f_coeffs: tuple[float, ...], g_coeffs: tuple[float, ...]) -> "ConformalSpec":
        return ConformalSpec(
            tuple(complex(c) for c in f_coeffs),
            tuple(complex(c) for c in g_coeffs),
            CHART_MINKOWSKI,
        )

    def f(self, grid: Grid2) -> np.ndarray:
        return _polyval(np.asarray(self.f_coeffs, dtype=complex), grid.coord1())

    def f1(self, grid: Grid2) -> np.ndarray:
        return _polyval(_polyder(np.asarray(self.f_coeffs, dtype=complex)), grid.coord1())

    def f11(self, grid: Grid2) -> np.ndarray:
        return _polyval(
            _polyder(_polyder(np.asarray(self.f_coeffs, dtype=complex))), grid.coord1()
        )

    def g(self, grid: Grid2) -> np.ndarray:
        return _polyval(np.asarray(self.g_coeffs, dtype=complex), grid.coord2())

    def g2(self, grid: Grid2) -> np.ndarray:
        return _polyval(_polyder(np.asarray(self.g_coeffs, dtype=complex)), grid.coord2())

    def to_json(self) -> dict:
        return {
            "f": [[float(c.real), float(c.imag)] for c in self.f_coeffs],
            "g": [[float(c.real), float(c.imag)] for c in self.g_coeffs],
        }

    @staticmethod
    def from_json(obj: dict, chart: str) -> "ConformalSpec":
        f = tuple(complex(c[0], c[1]) for c in obj["f"])
        g = tuple(complex(c[0], c[1]) for c in obj["g"])
        return ConformalSpec(f, g, chart)


@dataclass(frozen=True)
class SymmetryCharacteristic:
    """Named map from a jet field to a matrix characteristic field."""

    kind: str
    evaluator: Callable[[JetField], MatrixField]

    def __call__(self, j: JetField) -> MatrixField:
        return self.evaluator(j)


def conformal_characteristic(spec: ConformalSpec, j: JetField) -> MatrixField:
    """Q = f(x1) theta_1 + g(x2) theta_2."""
    if spec.chart != j.grid.chart:
        raise ChartMismatch(
            f"conformal data is for {spec.chart}, jet field lives on {j.grid.chart}"
        )
    q = (
        spec.f(j.grid)[..., None, None] * j.d1
        + spec.g(j.grid)[..., None, None] * j.d2
    )
    return MatrixField(j.grid, q, j.margin1)


def make_characteristic(spec: ConformalSpec) -> SymmetryCharacteristic:
    return SymmetryCharacteristic(
        kind="conformal", evaluator=lambda j: conformal_characteristic(spec, j)
    )


# --- prolongation by whole-field deformation -----------------------------------


@dataclass(frozen=True)
class FrechetPolicy:
    """Step control for directional difference quotients."""

    eps_base: float = 1e-5
    richardson: bool = True

    def __post_init__(self) -> None:
        if self.eps_base <= 0:
            raise ValueError("eps_base must be positive")

    def step(self, j: JetField) -> float:
        scale = 1.0 + interior_max(fro(j.theta), j.margin0)
        return self.eps_base * scale


def frechet_apply(
    g: Functional,
    j: JetField,
    q: MatrixField,
    policy: FrechetPolicy = FrechetPolicy(),
    q_jets: Jets | None = None,
) -> MatrixField:
    """Directional derivative of the functional ``g`` along ``q`` at ``j``.

    ``q_jets`` may be supplied to reuse one stencil evaluation of the
    characteristic's derivatives across many calls.
    """
    if q_jets is None:
        q_jets = chart_jets(MatrixField(j.grid, q.values, q.margin))
    eps = policy.step(j)

    def central(e: float) -> tuple[np.ndarray, int]:
        plus = g(j.deformed(+e, q.values, q_jets))
        minus = g(j.deformed(-e, q.values, q_jets))
        return (plus.values - minus.values) / (2 * e), max(plus.margin, minus.margin)

    val, margin = central(eps)
    if policy.richardson:
        val_half, margin_half = central(eps / 2)
        val = (4.0 * val_half - val) / 3.0
        margin = max(margin, margin_half)
    return MatrixField(j.grid, val, margin)


# --- functionals used throughout -----------------------------------------------


def theta_functional() -> Functional:
    return lambda j: MatrixField(j.grid, j.theta, j.margin0)


def theta_derivative_functionals() -> tuple[Functional, Functional]:
    return (
        lambda j: MatrixField(j.grid, j.d1, j.margin1),
        lambda j: MatrixField(j.grid, j.d2, j.margin1),
    )


def u_functional(lam: complex, index: int) -> Functional:
    def g(j: JetField) -> MatrixField:
        return u_pair(j, lam)[index - 1]

    return g


def u_derivative_functionals(lam: complex, index: int) -> tuple[Functional, Functional]:
    """Jet-expressed D_1 and D_2 of the connection component."""
    lam = check_lambda(lam)

    def d1(j: JetField) -> MatrixField:
        if index == 1:
            v = (-2 / (1 + lam)) * commutator(j.d11, j.theta)
        else:
            v = (-2 / (1 - lam)) * (
                commutator(j.d12, j.theta) + commutator(j.d2, j.d1)
            )
        return MatrixField(j.grid, v, j.margin2)

    def d2(j: JetField) -> MatrixField:
        if index == 1:
            v = (-2 / (1 + lam)) * (
                commutator(j.d12, j.theta) + commutator(j.d1, j.d2)
            )
        else:
            v = (-2 / (1 - lam)) * commutator(j.d22, j.theta)
        return MatrixField(j.grid, v, j.margin2)

    return d1, d2


def lowering_functional() -> Functional:
    """Value of the lowering operator applied once; rational in the jets."""
    from .spectral import lowered_rungs_from_jets

    def g(j: JetField) -> MatrixField:
        return MatrixField(j.grid, lowered_rungs_from_jets(j, 1)[0], j.margin1)

    return g


def lowering_derivative_functionals() -> tuple[Functional, Functional]:
    from .spectral import lowered_rung_with_jets

    def make(which: int) -> Functional:
        def g(j: JetField) -> MatrixField:
            p = j.projector()
            _, d1r, d2r = lowered_rung_with_jets(p, -1j * j.d1, -1j * j.d2, j)
            return MatrixField(j.grid, d1r if which == 1 else d2r, j.margin2)

        return g

    return make(1), make(2)


# --- closed-form prolongations and defects --------------------------------------


def prolong_u(
    spec: ConformalSpec, j: JetField, lam: complex
) -> tuple[MatrixField, MatrixField]:
    """Closed forms of the prolongation acting on the connection pair.

    pr w u1 = D_1(f u1) + g D_2(u1),  pr w u2 = f D_1(u2) + D_2(g u2).
    """
    lam = check_lambda(lam)
    u1, u2 = u_pair(j, lam)
    du1_1, du1_2 = (f(j) for f in u_derivative_functionals(lam, 1))
    du2_1, du2_2 = (f(j) for f in u_derivative_functionals(lam, 2))
    grid = j.grid
    f = spec.f(grid)[..., None, None]
    f1 = spec.f1(grid)[..., None, None]
    g = spec.g(grid)[..., None, None]
    g2 = spec.g2(grid)[..., None, None]
    pw1 = f1 * u1.values + f * du1_1.values + g * du1_2.values
    pw2 = f * du2_1.values + g2 * u2.values + g * du2_2.values
    return (
        MatrixField(grid, pw1, j.margin2),
        MatrixField(grid, pw2, j.margin2),
    )


def el_symmetry_defect(
    q: MatrixField,
    j: JetField,
    lam: complex,
    policy: FrechetPolicy = FrechetPolicy(),
) -> float:
    """Interior max of D_2 Q_1 - D_1 Q_2 + [Q_1, u2] + [u1, Q_2].

    Q_alpha is the prolongation of the connection pair along ``q``; the
    result vanishes exactly when ``q`` generates a symmetry of the
    equations of motion.
    """
    q_jets = chart_jets(MatrixField(j.grid, q.values, q.margin))
    q1 = frechet_apply(u_functional(lam, 1), j, q, policy, q_jets)
    q2 = frechet_apply(u_functional(lam, 2), j, q, policy, q_jets)
    u1, u2 = u_pair(j, lam)
    d1q2 = chart_first_derivatives(q2)
    d2q1 = chart_first_derivatives(q1)
    res = (
        d2q1[1]
        - d1q2[0]
        + commutator(q1.values, u2.values)
        + commutator(u1.values, q2.values)
    )
    margin = max(d2q1[2], d1q2[2], u1.margin)
    return interior_max(fro(res), margin)


def lsp_symmetry_defect(
    q: MatrixField,
    j: JetField,
    lam: complex,
    phi_builder: Callable[[JetField], "object"],
    policy: FrechetPolicy = FrechetPolicy(),
) -> tuple[MatrixField, MatrixField]:
    """Prolongation of the linear-problem residual D_alpha Phi - u^alpha Phi.

    The whole pipeline is rebuilt on the deformed jets: the wave function
    from ``phi_builder``, its stencil derivatives, and the connection.
    Both returned matrix fields vanish exactly when the characteristic is
    also a symmetry of the linear problem.
    """
    q_jets = chart_jets(MatrixField(j.grid, q.values, q.margin))

    def residual_functional(alpha: int) -> Functional:
        def g(jd: JetField) -> MatrixField:
            wave = phi_builder(jd)
            d1phi, d2phi, dmargin = chart_first_derivatives(wave.field())
            u1, u2 = u_pair(jd, lam)
            if alpha == 1:
                vals = d1phi - u1.values @ wave.phi
            else:
                vals = d2phi - u2.values @ wave.phi
            return MatrixField(jd.grid, vals, max(dmargin, u1.margin))

        return g

    r1 = frechet_apply(residual_functional(1), j, q, policy, q_jets)
    r2 = frechet_apply(residual_functional(2), j, q, policy, q_jets)
    return r1, r2


def commutation_defect(
    q: MatrixField,
    g: Functional,
    dg: tuple[Functional, Functional],
    j: JetField,
    policy: FrechetPolicy = FrechetPolicy(),
) -> float:
    """Max over both directions of || D_alpha(pr w_Q G) - pr w_Q(D_alpha G) ||.

    ``dg`` supplies the jet-expressed derivative functionals of ``g``; the
    first term differentiates the prolonged field with stencils.
    """
    q_jets = chart_jets(MatrixField(j.grid, q.values, q.margin))
    prw_g = frechet_apply(g, j, q, policy, q_jets)
    d1_prw, d2_prw, dmargin = chart_first_derivatives(prw_g)
    worst = 0.0
    for alpha, side1 in ((1, d1_prw), (2, d2_prw)):
        side2 = frechet_apply(dg[alpha - 1], j, q, policy, q_jets)
        margin = max(dmargin, side2.margin)
        worst = max(worst, interior_max(fro(side1 - side2.values), margin))
    return worst


# --- traveling-wave tangent fields ----------------------------------------------


def traveling_R_fields(
    spec: ConformalSpec, wave: TravelingWave, j: JetField, lam: complex
) -> tuple[MatrixField, MatrixField]:
    """Closed-form tangent coefficients of the prolonged traveling wave.

    With K = [theta_1, theta] (constant for a traveling wave) and
    chi the exponential phase of the wave function:

        R1 = (-2 f_1/(1+lam) + 2 f_11 chi) K
        R2 = (-2 kappa g_2  - 2 kappa lam f_1/(1-lam)) K

    These are the coefficients in D_alpha(F) = Phi^{-1} R_alpha Phi for the
    explicitly integrated immersion of the conformal symmetry.
    """
    lam = check_lambda(lam)
    if wave.grid.chart != CHART_MINKOWSKI or spec.chart != CHART_MINKOWSKI:
        raise ChartMismatch("traveling-wave tangents live on the Minkowski chart")
    grid = wave.grid
    chi = wave.chi(lam)
    k = wave.kappa
    komm = commutator(j.d1, j.theta)
    f1 = spec.f1(grid)
    f11 = spec.f11(grid)
    g2 = spec.g2(grid)
    c1 = -2.0 * f1 / (1 + lam) + 2.0 * f11 * chi
    c2 = -2.0 * k * g2 - 2.0 * k * lam * f1 / (1 - lam)
    return (
        MatrixField(grid, c1[..., None, None] * komm, j.margin1),
        MatrixField(grid, c2[..., None, None] * komm, j.margin1),
    )
