import numpy as np
import pytest

from solsurf.errors import ChartMismatch
from solsurf.fields import (
    CHART_EUCLIDEAN,
    CHART_MINKOWSKI,
    Grid2,
    MatrixField,
    chart_first_derivatives,
    interior_max,
)
from solsurf.matlie import commutator, dagger, fro
from solsurf.sigma import theta_of, traveling_solution, veronese_ladder
from solsurf.spectral import euclidean_wave, phi_traveling
from solsurf.symmetry import (
    ConformalSpec,
    FrechetPolicy,
    commutation_defect,
    conformal_characteristic,
    el_symmetry_defect,
    frechet_apply,
    lowering_derivative_functionals,
    lowering_functional,
    lsp_symmetry_defect,
    prolong_u,
    theta_derivative_functionals,
    theta_functional,
    traveling_R_fields,
    u_derivative_functionals,
    u_functional,
)

GRID = Grid2(CHART_EUCLIDEAN, (0.0, 0.0), (0.0015, 0.0015), (101, 101))
GRID_M = Grid2(CHART_MINKOWSKI, (0.0, 0.0), (0.001, 0.001), (101, 101))
LADDER2 = veronese_ladder(2, GRID)
WAVE_M, JET_M = traveling_solution(2.0, 1.0, GRID_M)
LAM_E = 0.6j
LAM_M = 0.5


from hypothesis import given, settings
from hypothesis import strategies as st

complex_coeff = st.tuples(
    st.floats(-2, 2, allow_nan=False), st.floats(-2, 2, allow_nan=False)
).map(lambda p: complex(*p))


@given(st.lists(complex_coeff, min_size=1, max_size=4))
@settings(max_examples=15, deadline=None)
def test_conformal_characteristic_stays_in_algebra(coeffs):
    j = theta_of(LADDER2.rungs[0], "analytic")
    spec = ConformalSpec.euclidean(tuple(coeffs))
    q = conformal_characteristic(spec, j)
    assert interior_max(fro(q.values + dagger(q.values)), q.margin) < 1e-12
    tr = np.einsum("...ii->...", q.values)
    assert interior_max(np.abs(tr), q.margin) < 1e-12


def test_conformal_spec_validation():
    with pytest.raises(ValueError):
        ConformalSpec((1j,), (0j,), CHART_MINKOWSKI)  # complex data on Minkowski
    with pytest.raises(ValueError):
        ConformalSpec((1j,), (1j,), CHART_EUCLIDEAN)  # g must be conjugated
    spec = ConformalSpec.euclidean((0.5j, 1.0))
    assert spec.g_coeffs == (-0.5j, 1.0)
    with pytest.raises(ChartMismatch):
        conformal_characteristic(spec, JET_M)


def test_characteristic_values():
    j = theta_of(LADDER2.rungs[0], "analytic")
    zero = conformal_characteristic(ConformalSpec.euclidean((0.0,)), j)
    assert interior_max(fro(zero.values), zero.margin) == 0
    trans = conformal_characteristic(ConformalSpec.euclidean((1.0,)), j)
    assert interior_max(fro(trans.values - j.d1 - j.d2), trans.margin) < 1e-14
    # anti-Hermitian output on both charts
    spec = ConformalSpec.euclidean((0.3 + 0.2j, 0.0, 1.0))
    q = conformal_characteristic(spec, j)
    assert interior_max(fro(q.values + dagger(q.values)), q.margin) < 1e-13
    qm = conformal_characteristic(ConformalSpec.minkowski((0.0, 1.0), (0.0, 1.0)), JET_M)
    assert interior_max(fro(qm.values + dagger(qm.values)), qm.margin) < 1e-13


def test_frechet_identity_and_first_jet():
    j = theta_of(LADDER2.rungs[0], "analytic")
    spec = ConformalSpec.euclidean((0.0, 0.0, 1.0))
    q = conformal_characteristic(spec, j)
    ident = frechet_apply(theta_functional(), j, q)
    assert interior_max(fro(ident.values - q.values), ident.margin) < 1e-10
    d1_functional = theta_derivative_functionals()[0]
    prw_d1 = frechet_apply(d1_functional, j, q)
    from solsurf.fields import chart_jets

    qj = chart_jets(MatrixField(j.grid, q.values, q.margin))
    assert interior_max(fro(prw_d1.values - qj.d1), max(prw_d1.margin, qj.margin1)) < 1e-8


def test_frechet_linearity_in_q():
    j = theta_of(LADDER2.rungs[0], "analytic")
    q1 = conformal_characteristic(ConformalSpec.euclidean((1.0,)), j)
    q2 = conformal_characteristic(ConformalSpec.euclidean((0.0, 0.0, 1.0)), j)
    qsum = MatrixField(j.grid, q1.values + q2.values, max(q1.margin, q2.margin))
    g = u_functional(LAM_E, 1)
    a = frechet_apply(g, j, q1)
    b = frechet_apply(g, j, q2)
    c = frechet_apply(g, j, qsum)
    m = max(a.margin, b.margin, c.margin)
    assert interior_max(fro(c.values - a.values - b.values), m) < 1e-9


def test_prolong_u_closed_vs_deformation():
    j = theta_of(LADDER2.rungs[0], "analytic")
    spec = ConformalSpec.euclidean((0.0, 0.0, 1.0))
    q = conformal_characteristic(spec, j)
    pw1, pw2 = prolong_u(spec, j, LAM_E)
    f1 = frechet_apply(u_functional(LAM_E, 1), j, q)
    f2 = frechet_apply(u_functional(LAM_E, 2), j, q)
    assert interior_max(fro(pw1.values - f1.values), max(pw1.margin, f1.margin)) < 1e-6
    assert interior_max(fro(pw2.values - f2.values), max(pw2.margin, f2.margin)) < 1e-6


def test_prolong_u_translation():
    # constant coefficients: pr w u1 = c1 D1 u1 + c2 D2 u1
    j = theta_of(LADDER2.rungs[0], "analytic")
    spec = ConformalSpec.euclidean((2.0,))
    pw1, _ = prolong_u(spec, j, LAM_E)
    du1_1, du1_2 = (f(j) for f in u_derivative_functionals(LAM_E, 1))
    expected = 2.0 * du1_1.values + 2.0 * du1_2.values
    assert interior_max(fro(pw1.values - expected), pw1.margin) < 1e-13


def test_prolong_u_zero():
    j = theta_of(LADDER2.rungs[0], "analytic")
    pw1, pw2 = prolong_u(ConformalSpec.euclidean((0.0,)), j, LAM_E)
    assert interior_max(fro(pw1.values), pw1.margin) == 0
    assert interior_max(fro(pw2.values), pw2.margin) == 0


def test_el_symmetry_defect_positive_negative():
    j = theta_of(LADDER2.rungs[0], "analytic")
    q = conformal_characteristic(ConformalSpec.euclidean((0.0, 0.0, 1.0)), j)
    assert el_symmetry_defect(q, j, LAM_E) < 1e-6
    qneg = MatrixField(j.grid, j.theta.copy(), j.margin0)
    assert el_symmetry_defect(qneg, j, LAM_E) > 1e-3
    zero = MatrixField(j.grid, np.zeros_like(j.theta), 0)
    assert el_symmetry_defect(zero, j, LAM_E) < 1e-15


def test_lsp_symmetry_defect_euclid():
    j = theta_of(LADDER2.rungs[0], "analytic")
    q = conformal_characteristic(ConformalSpec.euclidean((0.0, 0.0, 1.0)), j)
    r1, r2 = lsp_symmetry_defect(q, j, LAM_E, lambda jd: euclidean_wave(jd, 0, LAM_E))
    assert interior_max(fro(r1.values), r1.margin) < 1e-6
    assert interior_max(fro(r2.values), r2.margin) < 1e-6


def test_lsp_symmetry_defect_traveling_criteria():
    builder = lambda jd: phi_traveling(WAVE_M, jd, LAM_M)  # noqa: E731
    w = builder(JET_M)
    # quadratic f: fails with the predicted defect field
    spec_q = ConformalSpec.minkowski((0.0, 0.0, 1.0), (0.0,))
    qq = conformal_characteristic(spec_q, JET_M)
    r1, r2 = lsp_symmetry_defect(qq, JET_M, LAM_M, builder)
    d1phi, _, dm = chart_first_derivatives(w.field())
    pred = (-(spec_q.f11(GRID_M)) * WAVE_M.chi(LAM_M) * (1 + LAM_M))[..., None, None] * d1phi
    assert interior_max(fro(r1.values - pred), max(r1.margin, dm)) < 1e-6
    assert interior_max(fro(r1.values), r1.margin) > 0.1
    # affine with equal slopes: both vanish
    spec_l = ConformalSpec.minkowski((0.4, 0.7), (-0.3, 0.7))
    ql = conformal_characteristic(spec_l, JET_M)
    rl1, rl2 = lsp_symmetry_defect(ql, JET_M, LAM_M, builder)
    assert interior_max(fro(rl1.values), rl1.margin) < 1e-6
    assert interior_max(fro(rl2.values), rl2.margin) < 1e-6
    # unequal slopes break the second equation only
    spec_n = ConformalSpec.minkowski((0.0, 1.0), (0.0, 2.0))
    qn = conformal_characteristic(spec_n, JET_M)
    rn1, rn2 = lsp_symmetry_defect(qn, JET_M, LAM_M, builder)
    assert interior_max(fro(rn1.values), rn1.margin) < 1e-6
    assert interior_max(fro(rn2.values), rn2.margin) > 1e-2


def test_traveling_R_fields():
    kappa, lam = WAVE_M.kappa, LAM_M
    komm = commutator(JET_M.d1, JET_M.theta)
    # constants: both vanish
    spec_c = ConformalSpec.minkowski((0.4,), (-0.2,))
    r1, r2 = traveling_R_fields(spec_c, WAVE_M, JET_M, lam)
    assert interior_max(fro(r1.values), r1.margin) == 0
    assert interior_max(fro(r2.values), r2.margin) == 0
    # dilation f = x1, g = x2
    spec_d = ConformalSpec.minkowski((0.0, 1.0), (0.0, 1.0))
    r1, r2 = traveling_R_fields(spec_d, WAVE_M, JET_M, lam)
    assert interior_max(fro(r1.values - (-2 / (1 + lam)) * komm), r1.margin) < 1e-13
    c2 = -2 * kappa - 2 * kappa * lam / (1 - lam)
    assert interior_max(fro(r2.values - c2 * komm), r2.margin) < 1e-13
    # for a symmetry of the wave equations the R pair is the prolonged pair
    q = conformal_characteristic(spec_d, JET_M)
    pw1 = frechet_apply(u_functional(lam, 1), JET_M, q)
    pw2 = frechet_apply(u_functional(lam, 2), JET_M, q)
    assert interior_max(fro(r1.values - pw1.values), pw1.margin) < 1e-8
    assert interior_max(fro(r2.values - pw2.values), pw2.margin) < 1e-8


def test_commutation_defect_small():
    j = theta_of(LADDER2.rungs[0], "analytic")
    q = conformal_characteristic(ConformalSpec.euclidean((0.0, 0.0, 1.0)), j)
    assert commutation_defect(q, theta_functional(), theta_derivative_functionals(), j) < 1e-8
    assert (
        commutation_defect(q, u_functional(LAM_E, 1), u_derivative_functionals(LAM_E, 1), j)
        < 1e-6
    )


def test_commutation_orders():
    j1 = theta_of(LADDER2.rungs[1], "analytic")
    trans = ConformalSpec.euclidean((1.0,))
    q1 = conformal_characteristic(trans, j1)
    g = lowering_functional()
    dg1, dg2 = lowering_derivative_functionals()
    ref = dg1(j1).values + dg2(j1).values  # f = g = 1
    ds = []
    for eps in (0.04, 0.02):
        pw = frechet_apply(g, j1, q1, FrechetPolicy(eps_base=eps, richardson=False))
        ds.append(interior_max(fro(pw.values - ref), max(pw.margin, dg1(j1).margin)))
    assert np.log2(ds[0] / ds[1]) > 1.9

    spec = ConformalSpec.euclidean((0.0, 0.0, 1.0))
    hs = []
    for h in (0.012, 0.006):
        gh = Grid2(CHART_EUCLIDEAN, (0.0, 0.0), (h, h), (101, 101))
        jh = theta_of(veronese_ladder(2, gh).rungs[1], "analytic")
        qh = conformal_characteristic(spec, jh)
        hs.append(
            commutation_defect(
                qh,
                lowering_functional(),
                lowering_derivative_functionals(),
                jh,
                FrechetPolicy(eps_base=1e-3),
            )
        )
    assert np.log2(hs[0] / hs[1]) > 3.0
