import numpy as np
import pytest

from solsurf.errors import LambdaSingular
from solsurf.fields import CHART_EUCLIDEAN, CHART_MINKOWSKI, Grid2, interior_max
from solsurf.matlie import fro
from solsurf.sigma import theta_of, traveling_solution, u_pair, veronese_ladder
from solsurf.spectral import (
    dlambda_fd,
    euclidean_wave,
    euclidean_wave_coefficients,
    euclidean_wave_dlambda,
    lsp_residual,
    phi_euclidean,
    phi_traveling,
    traveling_wave_dlambda,
    wave_diagnostics,
)

GRID = Grid2(CHART_EUCLIDEAN, (0.0, 0.0), (0.0015, 0.0015), (101, 101))
GRID_M = Grid2(CHART_MINKOWSKI, (0.0, 0.0), (0.001, 0.001), (101, 101))
LADDER2 = veronese_ladder(2, GRID)
LADDER3 = veronese_ladder(3, GRID)
WAVE_M, JET_M = traveling_solution(2.0, 1.0, GRID_M)


def test_wave_base_level_formula():
    # the sum over lowered rungs is empty at the bottom of the ladder
    lam = 0.5
    j = theta_of(LADDER2.rungs[0], "analytic")
    w = euclidean_wave(j, 0, lam)
    _, beta = euclidean_wave_coefficients(lam, 0)
    expected = np.eye(2) + beta * LADDER2.rungs[0].values
    assert interior_max(fro(w.phi - expected), w.margin) < 1e-14


@pytest.mark.parametrize("n,ladder", [(2, LADDER2), (3, LADDER3)])
@pytest.mark.parametrize("lam", [0.5, -0.3, 2.0])
def test_lsp_residual_all_levels(n, ladder, lam):
    for k in range(n):
        lvl = ladder.with_active(k)
        w = phi_euclidean(lvl, lam)
        j = theta_of(lvl.active_rung, "analytic")
        u1, u2 = u_pair(j, lam)
        r1, r2, m = lsp_residual(w, u1, u2)
        assert interior_max(r1, m) < 1e-7
        assert interior_max(r2, m) < 1e-7


def test_lambda_singular():
    j = theta_of(LADDER2.rungs[0], "analytic")
    with pytest.raises(LambdaSingular):
        euclidean_wave(j, 0, 1.0)
    with pytest.raises(LambdaSingular):
        phi_traveling(WAVE_M, JET_M, -1.0)


def test_jet_lowering_depth_limit():
    from solsurf.errors import DeformationOutOfDomain
    from solsurf.spectral import lowered_rungs_from_jets

    j = theta_of(LADDER3.rungs[2], "analytic")
    assert len(lowered_rungs_from_jets(j, 2)) == 2
    with pytest.raises(DeformationOutOfDomain):
        lowered_rungs_from_jets(j, 3)


def test_jet_lowering_matches_stored_rungs():
    # the wave builder lowers from the active rung's jets; on an exact
    # solution these are the stored ladder rungs
    from solsurf.spectral import lowered_rungs_from_jets

    j = theta_of(LADDER3.rungs[2], "analytic")
    r1, r2 = lowered_rungs_from_jets(j, 2)
    assert interior_max(fro(r1 - LADDER3.rungs[1].values), 0) < 1e-12
    assert interior_max(fro(r2 - LADDER3.rungs[0].values), 0) < 1e-12


def test_deep_ladder_stored_rung_wave():
    # N = 4, level 3: the builder falls back to the stored rungs
    g = Grid2(CHART_EUCLIDEAN, (0.0, 0.0), (0.0015, 0.0015), (101, 101))
    ladder = veronese_ladder(4, g)
    assert ladder.orthogonality_defect() < 1e-12
    lvl = ladder.with_active(3)
    lam = 0.5
    w = phi_euclidean(lvl, lam)
    assert w.builder == "euclidean-ladder-stored"
    j = theta_of(lvl.active_rung, "analytic")
    u1, u2 = u_pair(j, lam)
    r1, r2, m = lsp_residual(w, u1, u2)
    assert max(interior_max(r1, m), interior_max(r2, m)) < 1e-7


def test_wave_linearity_reconstruction():
    # coefficients stored on the wave field rebuild it from the ladder rungs
    lam = -0.3
    lvl = LADDER3.with_active(2)
    w = phi_euclidean(lvl, lam)
    c, beta, k = w.ladder_coefficients
    recon = np.broadcast_to(np.eye(3), w.phi.shape).astype(complex).copy()
    recon = recon + beta * LADDER3.rungs[2].values
    for m in range(k):
        recon = recon + c * LADDER3.rungs[m].values
    assert interior_max(fro(w.phi - recon), w.margin) < 1e-14


def test_wave_invertibility_diagnostics():
    lam = 0.5
    w = phi_euclidean(LADDER2.with_active(0), lam)
    diag = wave_diagnostics(w)
    assert diag["min_abs_det"] > 1e-10
    assert diag["max_condition"] < 1e4
    # at imaginary lambda the wave function is unitary
    wi = phi_euclidean(LADDER2.with_active(0), 0.6j)
    assert wave_diagnostics(wi)["max_unitarity_defect"] < 1e-12


def test_traveling_wave_lsp_and_det():
    lam = 0.5
    w = phi_traveling(WAVE_M, JET_M, lam)
    u1, u2 = u_pair(JET_M, lam)
    r1, r2, m = lsp_residual(w, u1, u2)
    assert interior_max(r1, m) < 1e-8
    assert interior_max(r2, m) < 1e-8
    det = np.linalg.det(w.phi)
    assert np.max(np.abs(det - det[50, 50])) < 1e-10


def test_traveling_wave_chi_zero_axis():
    # chi vanishes on x1/(1+lam) = kappa x2/(1-lam); at the origin Phi = 2i theta
    lam = 0.5
    w = phi_traveling(WAVE_M, JET_M, lam)
    i2, i1 = GRID_M.n2 // 2, GRID_M.n1 // 2
    assert fro(w.phi[i2, i1] - 2j * JET_M.theta[i2, i1]) < 1e-14


def test_lsp_residual_trivial_phi():
    lam = 0.5
    u1, u2 = u_pair(JET_M, lam)
    from solsurf.spectral import WaveField

    ident = WaveField(
        grid=GRID_M,
        lam=lam,
        phi=np.broadcast_to(np.eye(2), JET_M.theta.shape).astype(complex).copy(),
        margin=0,
        builder="identity",
    )
    r1, r2, m = lsp_residual(ident, u1, u2)
    assert interior_max(np.abs(r1 - fro(u1.values)), m) < 1e-12
    assert interior_max(np.abs(r2 - fro(u2.values)), m) < 1e-12


def test_traveling_lsp_fourth_order_refinement():
    lam = 0.5
    vals = []
    for h in (0.002, 0.001):
        grid = Grid2(CHART_MINKOWSKI, (0.0, 0.0), (h, h), (101, 101))
        wave, jets = traveling_solution(2.0, 1.0, grid)
        w = phi_traveling(wave, jets, lam)
        u1, u2 = u_pair(jets, lam)
        r1, r2, m = lsp_residual(w, u1, u2)
        vals.append(max(interior_max(r1, m), interior_max(r2, m)))
    assert vals[0] / vals[1] > 8


def test_dlambda_euclid_analytic_vs_fd():
    lam = 0.5
    for k, ladder in ((0, LADDER2), (2, LADDER3)):
        j = theta_of(ladder.rungs[k], "analytic")
        analytic = euclidean_wave_dlambda(j, k, lam)
        fd = dlambda_fd(lambda l, j=j, k=k: euclidean_wave(j, k, l), lam)
        m = max(analytic.margin, fd.margin)
        assert interior_max(fro(analytic.values - fd.values), m) < 1e-7


def test_dlambda_base_level_value():
    # at the bottom of the ladder: dPhi/dlam = -2/(1-lam)^2 P
    lam = 0.5
    j = theta_of(LADDER2.rungs[0], "analytic")
    analytic = euclidean_wave_dlambda(j, 0, lam)
    expected = -2 / (1 - lam) ** 2 * LADDER2.rungs[0].values
    assert interior_max(fro(analytic.values - expected), analytic.margin) < 1e-14


def test_dlambda_traveling_analytic_vs_fd():
    lam = 0.5
    analytic = traveling_wave_dlambda(WAVE_M, JET_M, lam)
    fd = dlambda_fd(lambda l: phi_traveling(WAVE_M, JET_M, l), lam)
    m = max(analytic.margin, fd.margin)
    assert interior_max(fro(analytic.values - fd.values), m) < 1e-7
    # at the origin both chi and its lambda derivative vanish
    i2, i1 = GRID_M.n2 // 2, GRID_M.n1 // 2
    assert fro(analytic.values[i2, i1]) < 1e-13
