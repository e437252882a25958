"""CP^{N-1} solutions in projector form on 2D grids.

The model lives in rank-one Hermitian projector fields P; the equivalent
algebra-valued variable is theta = i(P - I/N).  Solution generators:

* Veronese-type holomorphic fields on the Euclidean chart, together with
  the full raising ladder.  The ladder can be built two independent ways:
  numerically (raising operator on stencil derivatives, re-projected) or
  analytically (orthogonalized frame of the holomorphic curve, giving
  exact values and exact jets).  The two routes cross-check each other.
* A rotating traveling wave on the Minkowski chart with exact jets.

Derivative conventions follow :mod:`solsurf.fields`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ChartMismatch, ContractedToZero, LambdaSingular
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
from .matlie import central_unit, commutator, dagger, fro, trace

__all__ = [
    "JetField",
    "ProjectorField",
    "SolutionLadder",
    "TravelingWave",
    "action_density",
    "build_ladder",
    "check_lambda",
    "el_residual",
    "lower_projector",
    "projector_from_vector",
    "projector_invariants",
    "raise_projector",
    "reproject_rank1",
    "theta_comm_identity_residual",
    "theta_of",
    "theta_square_residual",
    "theta_triple_residual",
    "traveling_solution",
    "u_pair",
    "veronese_field",
    "veronese_ladder",
]

TOL_PROJ = 1e-10
TOL_CONTRACT_REL = 1e-10
TOL_LAMBDA = 1e-6


def check_lambda(lam: complex, tol: float = TOL_LAMBDA) -> complex:
    lam = complex(lam)
    if abs(1 + lam) < tol or abs(1 - lam) < tol:
        raise LambdaSingular(f"lambda={lam} is within {tol} of a pole at -1 or +1")
    return lam


# --- projectors --------------------------------------------------------------


def projector_from_vector(v: np.ndarray) -> np.ndarray:
    """Rank-one Hermitian projector v v† / v†v."""
    v = np.asarray(v, dtype=complex)
    w = np.einsum("...k,...k->...", v.conj(), v).real
    if np.any(w <= 0):
        raise ValueError("projector needs a nonzero vector")
    return v[..., :, None] * v.conj()[..., None, :] / w[..., None, None]


def reproject_rank1(values: np.ndarray) -> np.ndarray:
    """Nearest rank-one Hermitian projector, per node (NaN nodes stay NaN)."""
    h = 0.5 * (values + dagger(values))
    out = np.full_like(values, np.nan, dtype=complex)
    ok = np.isfinite(h).all(axis=(-1, -2))
    if np.any(ok):
        _, vecs = np.linalg.eigh(h[ok])
        top = vecs[..., :, -1]
        out[ok] = top[..., :, None] * top.conj()[..., None, :]
    return out


def projector_invariants(values: np.ndarray) -> dict[str, np.ndarray]:
    """Pointwise defects of Hermiticity, idempotency and unit trace."""
    return {
        "hermiticity": fro(values - dagger(values)),
        "idempotency": fro(values @ values - values),
        "trace": np.abs(trace(values) - 1.0),
    }


@dataclass(frozen=True)
class ProjectorField:
    """Rank-one projector field, optionally carrying exact jets of P."""

    field: MatrixField
    jets: Jets | None = None
    reprojection_correction: float = 0.0

    @property
    def grid(self) -> Grid2:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def margin(self) -> int:
        return self.field.margin

    @property
    def n(self) -> int:
        return self.field.n


# --- jets of theta ------------------------------------------------------------


@dataclass(frozen=True)
class JetField:
    """theta = i(P - I/N) together with its derivative fields up to order 2."""

    grid: Grid2
    n: int
    theta: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d11: np.ndarray
    d12: np.ndarray
    d22: np.ndarray
    provenance: str = "numeric-stencil"
    margin0: int = 0
    margin1: int = 2
    margin2: int = 4

    def unit(self) -> np.ndarray:
        return central_unit(self.n)

    def projector(self) -> np.ndarray:
        return np.broadcast_to(np.eye(self.n) / self.n, self.theta.shape) - 1j * self.theta

    def deformed(self, eps: float, q: np.ndarray, q_jets: Jets) -> "JetField":
        """theta -> theta + eps*q with jets shifted by the jets of q.

        Derivatives are linear, so the jets of the deformed field are the
        jets of theta plus eps times the jets of q; sharing one jet set of
        q across all evaluations keeps difference quotients cancellation
        free.
        """
        return JetField(
            grid=self.grid,
            n=self.n,
            theta=self.theta + eps * q,
            d1=self.d1 + eps * q_jets.d1,
            d2=self.d2 + eps * q_jets.d2,
            d11=self.d11 + eps * q_jets.d11,
            d12=self.d12 + eps * q_jets.d12,
            d22=self.d22 + eps * q_jets.d22,
            provenance="deformed",
            margin0=max(self.margin0, q_jets.margin1 - 2),
            margin1=max(self.margin1, q_jets.margin1),
            margin2=max(self.margin2, q_jets.margin2),
        )


def theta_of(p: ProjectorField, provenance: str = "numeric-stencil") -> JetField:
    """Algebra-valued variable theta = i(P - I/N) with derivative fields.

    ``numeric-stencil`` differentiates theta with 4th-order stencils;
    ``analytic`` reuses exact jets carried by the projector field.
    """
    n = p.n
    theta = 1j * (p.values - np.eye(n) / n)
    if provenance == "analytic":
        if p.jets is None:
            raise ValueError("projector field carries no analytic jets")
        j = p.jets
        return JetField(
            grid=p.grid,
            n=n,
            theta=theta,
            d1=1j * j.d1,
            d2=1j * j.d2,
            d11=1j * j.d11,
            d12=1j * j.d12,
            d22=1j * j.d22,
            provenance="analytic",
            margin0=p.margin,
            margin1=max(p.margin, j.margin1),
            margin2=max(p.margin, j.margin2),
        )
    if provenance != "numeric-stencil":
        raise ValueError(f"unknown provenance {provenance!r}")
    mf = MatrixField(p.grid, theta, p.margin)
    j = chart_jets(mf)
    return JetField(
        grid=p.grid,
        n=n,
        theta=theta,
        d1=j.d1,
        d2=j.d2,
        d11=j.d11,
        d12=j.d12,
        d22=j.d22,
        provenance="numeric-stencil",
        margin0=p.margin,
        margin1=j.margin1,
        margin2=j.margin2,
    )


# --- model operators and residuals -------------------------------------------


def u_pair(j: JetField, lam: complex, tol_lambda: float = TOL_LAMBDA) -> tuple[MatrixField, MatrixField]:
    """Connection pair u1 = -2/(1+lam) [theta_1, theta], u2 = -2/(1-lam) [theta_2, theta]."""
    lam = check_lambda(lam, tol_lambda)
    u1 = (-2.0 / (1.0 + lam)) * commutator(j.d1, j.theta)
    u2 = (-2.0 / (1.0 - lam)) * commutator(j.d2, j.theta)
    return (
        MatrixField(j.grid, u1, j.margin1),
        MatrixField(j.grid, u2, j.margin1),
    )


def el_residual(j: JetField) -> tuple[np.ndarray, int]:
    """Pointwise ||[theta_12, theta]||_F: the equation-of-motion residual."""
    return fro(commutator(j.d12, j.theta)), j.margin2


def theta_square_residual(j: JetField) -> tuple[np.ndarray, int]:
    """Defect of theta^2 = -i(2-N)/N theta + (1-N)/N I/N (rank-one algebra)."""
    n = j.n
    e = np.eye(n) / n
    res = (
        j.theta @ j.theta
        + 1j * (2 - n) / n * j.theta
        - (1 - n) / n * np.broadcast_to(e, j.theta.shape)
    )
    return fro(res), j.margin0


def theta_comm_identity_residual(j: JetField) -> tuple[np.ndarray, int]:
    """Defect of [theta_1, theta](2i theta - (2-N) I/N) = -i theta_1."""
    n = j.n
    m = 2j * j.theta - (2 - n) * np.broadcast_to(np.eye(n) / n, j.theta.shape)
    res = commutator(j.d1, j.theta) @ m + 1j * j.d1
    return fro(res), j.margin1


def theta_triple_residual(j: JetField) -> tuple[np.ndarray, int]:
    """Defect of theta theta_1 theta = (N-1)/N^2 theta_1."""
    n = j.n
    res = j.theta @ j.d1 @ j.theta - (n - 1) / n**2 * j.d1
    return fro(res), j.margin1


def action_density(j: JetField) -> tuple[np.ndarray, int]:
    """tr(P_1 P_2) pointwise; real and nonnegative on the Euclidean chart."""
    p1 = -1j * j.d1
    p2 = -1j * j.d2
    return trace(p1 @ p2), j.margin1


# --- Veronese ladder: analytic route -----------------------------------------


def _veronese_jets(n: int, xi: np.ndarray, kmax: int) -> list[dict[str, np.ndarray]]:
    """Exact rung fields of the Veronese ladder at every grid point.

    Orthogonalizes the holomorphic curve v, v', v'' ... at each point; the
    rung projectors and all their first and second derivatives come out of
    hop matrices between consecutive frame vectors, with no grid stencils
    involved.
    """
    shape = xi.shape
    weights = [math.sqrt(math.comb(n - 1, k)) for k in range(n)]
    derivs: list[np.ndarray] = []
    for d in range(n):
        comp = []
        for k in range(n):
            if k >= d:
                fac = math.prod(range(k - d + 1, k + 1))
                comp.append(weights[k] * fac * xi ** (k - d))
            else:
                comp.append(np.zeros(shape, dtype=complex))
        derivs.append(np.stack(comp, axis=-1))

    frame: list[np.ndarray] = []
    for v in derivs:
        u = v.copy()
        for q in frame:
            qq = np.einsum("...k,...k->...", q.conj(), q)
            u = u - (np.einsum("...k,...k->...", q.conj(), v) / qq)[..., None] * q
        frame.append(u)

    w = [np.einsum("...k,...k->...", u.conj(), u).real for u in frame]
    zero = np.zeros(shape + (n, n), dtype=complex)

    def outer(a: np.ndarray, b: np.ndarray, wj: np.ndarray) -> np.ndarray:
        return a[..., :, None] * b.conj()[..., None, :] / wj[..., None, None]

    proj = [outer(frame[k], frame[k], w[k]) for k in range(n)]
    hop = [outer(frame[k + 1], frame[k], w[k]) for k in range(n - 1)]
    ratio = [w[k + 1] / w[k] for k in range(n - 1)]
    t = 1.0 + np.abs(xi) ** 2
    log_slope = [(n - 1 - 2 * k) * xi.conj() / t for k in range(n + 1)]

    def proj_at(k: int) -> np.ndarray:
        return proj[k] if 0 <= k < n else zero

    def hop_at(k: int) -> np.ndarray:
        return hop[k] if 0 <= k < n - 1 else zero

    def ratio_at(k: int) -> np.ndarray:
        return ratio[k] if 0 <= k < n - 1 else np.zeros(shape)

    def dhop(k: int) -> np.ndarray:
        # holomorphic derivative of the up-hop matrix
        if k < 0 or k >= n - 1:
            return zero
        two_up = outer(frame[k + 2], frame[k], w[k]) if k + 2 < n else zero
        skip = outer(frame[k + 1], frame[k - 1], w[k - 1]) if k >= 1 else zero
        return two_up + (log_slope[k + 1] - log_slope[k])[..., None, None] * hop[k] - skip

    rungs = []
    for k in range(kmax + 1):
        d1p = hop_at(k) - hop_at(k - 1)
        d12p = (
            ratio_at(k)[..., None, None] * (proj_at(k + 1) - proj_at(k))
            - ratio_at(k - 1)[..., None, None] * (proj_at(k) - proj_at(k - 1))
        )
        d11p = dhop(k) - dhop(k - 1)
        rungs.append(
            {
                "p": proj_at(k),
                "d1": d1p,
                "d2": dagger(d1p),
                "d11": d11p,
                "d12": d12p,
                "d22": dagger(d11p),
            }
        )
    return rungs


@dataclass
class SolutionLadder:
    """Mutually orthogonal projector rungs reached by repeated raising."""

    n: int
    rungs: list[ProjectorField]
    active: int = 0
    diagnostics: dict = dc_field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rungs)

    @property
    def active_rung(self) -> ProjectorField:
        return self.rungs[self.active]

    def with_active(self, k: int) -> "SolutionLadder":
        if not 0 <= k < len(self.rungs):
            raise IndexError(f"ladder has {len(self.rungs)} rungs, no index {k}")
        return SolutionLadder(self.n, self.rungs, k, self.diagnostics)

    def completeness_residual(self) -> float:
        total = sum(r.values for r in self.rungs)
        ident = np.broadcast_to(np.eye(self.n), total.shape)
        m = max(r.margin for r in self.rungs)
        return interior_max(fro(total - ident), m)

    def orthogonality_defect(self) -> float:
        m = max(r.margin for r in self.rungs)
        worst = 0.0
        for a in range(len(self.rungs)):
            for b in range(a + 1, len(self.rungs)):
                worst = max(
                    worst,
                    interior_max(fro(self.rungs[a].values @ self.rungs[b].values), m),
                )
        return worst


def veronese_field(n: int, grid: Grid2, k: int = 0) -> ProjectorField:
    """Rung ``k`` of the Veronese ladder with exact values and exact jets."""
    if grid.chart != CHART_EUCLIDEAN:
        raise ChartMismatch("Veronese fields live on the euclidean-complex chart")
    if n < 2:
        raise ValueError("need N >= 2")
    if not 0 <= k <= n - 1:
        raise ValueError(f"rung index {k} outside 0..{n - 1}")
    r = _veronese_jets(n, grid.xi(), k)[k]
    jets = Jets(
        d1=r["d1"], d2=r["d2"], d11=r["d11"], d12=r["d12"], d22=r["d22"],
        margin1=0, margin2=0,
    )
    return ProjectorField(MatrixField(grid, r["p"], 0), jets=jets)


def veronese_ladder(n: int, grid: Grid2) -> SolutionLadder:
    """The full analytic ladder of the Veronese field (length N)."""
    rungs = [veronese_field(n, grid, k) for k in range(n)]
    ladder = SolutionLadder(n=n, rungs=rungs, active=0)
    ladder.diagnostics["construction"] = "analytic-frame"
    return ladder


# --- raising / lowering: numeric route ----------------------------------------


def _ladder_step(
    p: ProjectorField, up: bool, tol_contract_rel: float
) -> ProjectorField:
    if p.grid.chart != CHART_EUCLIDEAN:
        raise ChartMismatch("raising/lowering is defined on the euclidean-complex chart")
    if p.jets is not None:
        d1p, d2p, margin = p.jets.d1, p.jets.d2, max(p.margin, p.jets.margin1)
    else:
        d1p, d2p, margin = chart_first_derivatives(p.field)
    if up:
        num = d1p @ p.values @ d2p
    else:
        num = d2p @ p.values @ d1p
    den = trace(num)
    scale = interior_max(fro(d1p) * fro(d2p), margin)
    tol = tol_contract_rel * max(scale, 1e-300)
    if interior_max(np.abs(den), margin) < tol:
        raise ContractedToZero(
            "ladder denominator below the contraction tolerance everywhere"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = num / den[..., None, None]
    raw = np.where(
        (np.abs(den) < tol)[..., None, None], np.nan + 0j, raw
    )
    snapped = reproject_rank1(raw)
    diff = snapped - raw
    correction = interior_max(fro(np.where(np.isfinite(diff), diff, 0.0)), margin)
    return ProjectorField(
        MatrixField(p.grid, snapped, margin), jets=None, reprojection_correction=correction
    )


def raise_projector(p: ProjectorField, tol_contract_rel: float = TOL_CONTRACT_REL) -> ProjectorField:
    """One raising step, re-projected to the nearest rank-one projector."""
    return _ladder_step(p, up=True, tol_contract_rel=tol_contract_rel)


def lower_projector(p: ProjectorField, tol_contract_rel: float = TOL_CONTRACT_REL) -> ProjectorField:
    """One lowering step, re-projected to the nearest rank-one projector."""
    return _ladder_step(p, up=False, tol_contract_rel=tol_contract_rel)


def build_ladder(
    p0: ProjectorField, tol_contract_rel: float = TOL_CONTRACT_REL, max_rungs: int = 8
) -> SolutionLadder:
    """Raise until contraction; records re-projection and orthogonality data."""
    rungs = [p0]
    corrections = [p0.reprojection_correction]
    while len(rungs) < max_rungs:
        try:
            nxt = raise_projector(rungs[-1], tol_contract_rel)
        except ContractedToZero:
            break
        rungs.append(nxt)
        corrections.append(nxt.reprojection_correction)
    ladder = SolutionLadder(n=p0.n, rungs=rungs, active=0)
    ladder.diagnostics["construction"] = "numeric-raising"
    ladder.diagnostics["reprojection_corrections"] = corrections
    ladder.diagnostics["orthogonality_defect"] = ladder.orthogonality_defect()
    ladder.diagnostics["completeness_residual"] = ladder.completeness_residual()
    return ladder


# --- traveling wave ------------------------------------------------------------


@dataclass(frozen=True)
class TravelingWave:
    """Rotating rank-one solution depending only on s = x1 + kappa*x2 (N = 2)."""

    kappa: float
    omega: float
    grid: Grid2

    def __post_init__(self) -> None:
        if self.grid.chart != CHART_MINKOWSKI:
            raise ChartMismatch("traveling waves live on the minkowski-lightcone chart")

    @property
    def n(self) -> int:
        return 2

    def s_field(self) -> np.ndarray:
        x1, x2 = self.grid.mesh()
        return x1 + self.kappa * x2

    def commutator_matrix(self) -> np.ndarray:
        """The constant matrix [theta_1, theta] = omega [[0, 1], [-1, 0]]."""
        return self.omega * np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)

    def chi(self, lam: complex) -> np.ndarray:
        lam = check_lambda(lam)
        x1, x2 = self.grid.mesh()
        return lam * x1 / (1 + lam) - self.kappa * lam * x2 / (1 - lam)

    def dlambda_chi(self, lam: complex) -> np.ndarray:
        lam = check_lambda(lam)
        x1, x2 = self.grid.mesh()
        return x1 / (1 + lam) ** 2 - self.kappa * x2 / (1 - lam) ** 2


def _rotating_theta(s: np.ndarray, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """theta(s) and theta'(s) for the rotating rank-one solution."""
    c = np.cos(2 * omega * s)
    sn = np.sin(2 * omega * s)
    theta = 0.5j * np.stack(
        [np.stack([c, sn], axis=-1), np.stack([sn, -c], axis=-1)], axis=-2
    )
    dtheta = 1j * omega * np.stack(
        [np.stack([-sn, c], axis=-1), np.stack([c, sn], axis=-1)], axis=-2
    )
    return theta, dtheta


def traveling_solution(
    kappa: float, omega: float, grid: Grid2
) -> tuple[TravelingWave, JetField]:
    """Rotating traveling wave with exact jets.

    theta(s) = i(R(omega s) diag(1,0) R(omega s)^T - I/2) along
    s = x1 + kappa*x2; all derivative fields follow by the chain rule, and
    [theta_1, theta] is the same constant matrix at every node.
    """
    wave = TravelingWave(kappa=kappa, omega=omega, grid=grid)
    s = wave.s_field()
    theta, dtheta = _rotating_theta(s, omega)
    ddtheta = -4.0 * omega**2 * theta
    k = kappa
    jets = JetField(
        grid=grid,
        n=2,
        theta=theta,
        d1=dtheta,
        d2=k * dtheta,
        d11=ddtheta,
        d12=k * ddtheta,
        d22=k * k * ddtheta,
        provenance="analytic",
        margin0=0,
        margin1=0,
        margin2=0,
    )
    return wave, jets
