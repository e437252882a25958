import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solsurf.matlie import (
    DimensionMismatch,
    central_unit,
    commutator,
    dagger,
    expm,
    fro,
    inner,
    matrix_from_json,
    matrix_to_json,
    project_su,
    su_basis,
)

SIGMA = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_dagger_identity_and_nilpotent():
    assert np.array_equal(dagger(np.eye(2)), np.eye(2))
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.array_equal(dagger(m), np.array([[0, 0], [1, 0]]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_dagger_involution(seed):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, 3)
    assert np.allclose(dagger(dagger(m)), m)


def test_commutator_self_and_trace():
    rng = np.random.default_rng(0)
    x = random_complex(rng, 3)
    y = random_complex(rng, 3)
    assert fro(commutator(x, x)) == 0
    assert abs(np.trace(commutator(x, y))) < 1e-12 * fro(x) * fro(y)


def test_commutator_pauli_structure():
    # e_k = i sigma_k; direct 2x2 multiplication gives [e1, e2] = -2 e3
    e = [1j * s for s in SIGMA]
    assert np.allclose(commutator(e[0], e[1]), -2 * e[2])
    assert np.allclose(commutator(e[1], e[2]), -2 * e[0])


def test_commutator_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        commutator(np.eye(2), np.eye(3))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_commutator_antisymmetry_jacobi(seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_complex(rng, 3) for _ in range(3))
    assert np.max(np.abs(commutator(x, y) + commutator(y, x))) < 1e-12
    jac = (
        commutator(x, commutator(y, z))
        + commutator(y, commutator(z, x))
        + commutator(z, commutator(x, y))
    )
    scale = fro(x) * fro(y) * fro(z)
    assert fro(jac) < 1e-12 * max(1.0, scale)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_su_basis_properties(n):
    basis = su_basis(n)
    assert basis.elements.shape == (n * n - 1, n, n)
    for e in basis.elements:
        assert fro(e + dagger(e)) < 1e-14
        assert abs(np.trace(e)) < 1e-14
    gram = np.array([[inner(a, b) for b in basis.elements] for a in basis.elements])
    assert np.max(np.abs(gram - np.eye(n * n - 1))) < 1e-13
    assert basis.closure_residual() < 1e-12


def test_su_basis_requires_n2():
    with pytest.raises(ValueError):
        su_basis(1)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_basis_decompose_recompose(seed):
    rng = np.random.default_rng(seed)
    basis = su_basis(3)
    m = random_complex(rng, 3)
    x, _ = project_su(m)
    coeffs = basis.decompose(x)
    assert np.max(np.abs(coeffs.imag)) < 1e-12
    assert fro(basis.recompose(coeffs) - x) < 1e-12


def test_project_su_cases():
    rng = np.random.default_rng(1)
    # anti-Hermitian traceless passes through
    x, _ = project_su(random_complex(rng, 3))
    again, defect = project_su(x)
    assert fro(again - x) < 1e-14
    assert defect < 1e-14
    # Hermitian maps to zero with defect equal to its size
    h = random_complex(rng, 3)
    h = 0.5 * (h + dagger(h))
    z, defect = project_su(h)
    assert fro(z) < 1e-14
    assert abs(defect - fro(h)) < 1e-12
    # trace shifts are removed
    shifted, _ = project_su(x + 2.7 * np.eye(3))
    assert fro(shifted - x) < 1e-13


def test_central_unit():
    assert np.allclose(central_unit(2), np.diag([0.5, 0.5]))
    for n in (2, 3, 5):
        assert abs(np.trace(central_unit(n)) - 1) < 1e-15
        assert np.allclose(n * central_unit(n), np.eye(n))


def test_inner_su2_dot_product():
    rng = np.random.default_rng(2)
    a = rng.standard_normal(3)
    b = rng.standard_normal(3)
    x = 1j * sum(ai * si for ai, si in zip(a, SIGMA))
    y = 1j * sum(bi * si for bi, si in zip(b, SIGMA))
    assert abs(inner(x, y) - a @ b) < 1e-13
    assert abs(inner(x, y) - inner(y, x)) < 1e-14
    assert inner(x, x) > 0
    assert inner(0 * x, 0 * x) == 0


def test_expm_trivial():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))
    d = np.diag([0.3 + 0.1j, -1.2])
    assert np.allclose(expm(d), np.diag(np.exp(np.diag(d))), atol=1e-14)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_expm_inverse_identity(seed):
    rng = np.random.default_rng(seed)
    m = random_complex(rng, 3)
    m *= 5.0 / max(1.0, fro(m))
    prod = expm(m) @ expm(-m)
    assert fro(prod - np.eye(3)) < 1e-12


def test_expm_against_scipy():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    rng = np.random.default_rng(3)
    for scale in (0.5, 5.0, 40.0):
        m = random_complex(rng, 4)
        m *= scale / fro(m)
        ours = expm(m)
        ref = scipy_linalg.expm(m)
        assert fro(ours - ref) / fro(ref) < 1e-12


def test_expm_additivity_only_when_commuting():
    rng = np.random.default_rng(4)
    a = np.diag([0.3, -0.7]).astype(complex)
    b = np.diag([1.1, 0.2]).astype(complex)
    assert fro(expm(a + b) - expm(a) @ expm(b)) < 1e-13
    c = random_complex(rng, 2)
    if fro(commutator(a, c)) > 1e-3:
        assert fro(expm(a + c) - expm(a) @ expm(c)) > 1e-6


def test_expm_batched_matches_loop():
    rng = np.random.default_rng(5)
    batch = rng.standard_normal((4, 3, 2, 2)) + 1j * rng.standard_normal((4, 3, 2, 2))
    out = expm(batch)
    for i in range(4):
        for j in range(3):
            assert fro(out[i, j] - expm(batch[i, j])) < 1e-12


def test_matrix_json_roundtrip():
    rng = np.random.default_rng(6)
    m = random_complex(rng, 3)
    again = matrix_from_json(matrix_to_json(m))
    assert np.array_equal(again, m)
    m[0, 1] = np.nan
    again = matrix_from_json(matrix_to_json(m))
    assert np.isnan(again[0, 1].real)
    assert np.array_equal(again[1:], m[1:])
