"""Dense complex matrices and the su(N) layer.

Matrices are numpy complex arrays of shape (..., n, n); every operation
broadcasts over the leading axes, so a "matrix field" on a grid is just a
(n2, n1, n, n) array.  su(N) elements are anti-Hermitian traceless
matrices; the pairing -1/2 Re tr(XY) is positive definite on them and is
the metric used for all geometry downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatch",
    "NonFiniteMatrix",
    "SuBasis",
    "central_unit",
    "commutator",
    "dagger",
    "expm",
    "fro",
    "inner",
    "matrix_from_json",
    "matrix_to_json",
    "project_su",
    "su_basis",
    "su_defect",
    "trace",
]

TOL_ALG = 1e-12


class DimensionMismatch(ValueError):
    """Operands act on different matrix dimensions."""


class NonFiniteMatrix(ValueError):
    """Matrix contains NaN or Inf entries where finite values are required."""


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose, broadcasting over leading axes."""
    return np.conj(np.swapaxes(np.asarray(m), -1, -2))


def trace(m: np.ndarray) -> np.ndarray:
    return np.einsum("...ii->...", np.asarray(m))


def fro(m: np.ndarray) -> np.ndarray:
    """Frobenius norm over the trailing matrix axes."""
    a = np.asarray(m)
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-1, -2)))


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1] or x.shape[-2] != y.shape[-2]:
        raise DimensionMismatch(
            f"matrix dims differ: {x.shape[-2:]} vs {y.shape[-2:]}"
        )


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """[X, Y] = XY - YX."""
    x = np.asarray(x)
    y = np.asarray(y)
    _check_same_dim(x, y)
    return x @ y - y @ x


def inner(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Pairing -1/2 Re tr(XY); positive definite on anti-Hermitian matrices."""
    x = np.asarray(x)
    y = np.asarray(y)
    _check_same_dim(x, y)
    return -0.5 * np.real(trace(x @ y))


def central_unit(n: int) -> np.ndarray:
    """Identity divided by the dimension: the trace-part unit of u(N)."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return np.eye(n, dtype=complex) / n


def project_su(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal projection onto su(N).

    Returns ``(s, defect)`` where ``s = (M - M†)/2 - tr((M - M†)/2)/N * I``
    and ``defect`` is the Frobenius norm of the discarded part.  Broadcasts;
    ``defect`` has the leading shape.
    """
    a = np.asarray(m, dtype=complex)
    n = a.shape[-1]
    anti = 0.5 * (a - dagger(a))
    s = anti - (trace(anti) / n)[..., None, None] * np.eye(n)
    return s, fro(a - s)


def su_defect(m: np.ndarray) -> np.ndarray:
    """How far a matrix is from anti-Hermitian traceless (Frobenius)."""
    return project_su(m)[1]


# Padé(13) numerator coefficients for the matrix exponential.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_PADE13_THETA = 4.25


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Padé(13) kernel.

    Accepts batches (..., n, n); the squaring count is shared across the
    batch, taken from the largest 1-norm.
    """
    a = np.asarray(m, dtype=complex)
    if not np.isfinite(a).all():
        if a.ndim == 2:
            raise NonFiniteMatrix("expm requires finite entries")
        # batched fields: margin nodes carry NaN and stay NaN
        ok = np.isfinite(a).all(axis=(-1, -2))
        if not ok.any():
            raise NonFiniteMatrix("expm requires finite entries")
        out = np.full_like(a, np.nan)
        out[ok] = expm(a[ok])
        return out
    n = a.shape[-1]
    norm1 = float(np.max(np.sum(np.abs(a), axis=-2), initial=0.0))
    s = 0
    if norm1 > _PADE13_THETA:
        s = max(0, int(math.ceil(math.log2(norm1 / _PADE13_THETA))))
    a = a / (2.0**s)

    b = _PADE13
    ident = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (
        a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
        + b[7] * a6
        + b[5] * a4
        + b[3] * a2
        + b[1] * ident
    )
    v = (
        a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
        + b[6] * a6
        + b[4] * a4
        + b[2] * a2
        + b[0] * ident
    )
    r = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        r = r @ r
    return r


@dataclass(frozen=True)
class SuBasis:
    """Orthonormal anti-Hermitian traceless basis with structure constants.

    ``elements`` has shape (s, n, n) with s = n^2 - 1; the basis is
    orthonormal for :func:`inner`, so decomposition is a plain projection.
    ``structure`` holds real c[k, l, j] with [e_k, e_l] = sum_j c[k,l,j] e_j.
    """

    dim: int
    elements: np.ndarray
    structure: np.ndarray

    def decompose(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of x in the basis (real for su(N) inputs)."""
        return np.einsum("sab,...ba->...s", self.elements, np.asarray(x)) * (-0.5)

    def recompose(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("...s,sab->...ab", np.real(np.asarray(coeffs)), self.elements)

    def closure_residual(self) -> float:
        """max_{k,l} || [e_k, e_l] - c[k,l,j] e_j ||_F."""
        e = self.elements
        comm = np.einsum("kab,lbc->klac", e, e) - np.einsum("lab,kbc->klac", e, e)
        recon = np.einsum("klj,jab->klab", self.structure, e)
        return float(np.max(fro(comm - recon)))


def su_basis(n: int) -> SuBasis:
    """Generalized anti-Hermitian Gell-Mann-type basis of su(N).

    Ordered as: for each pair j < k a real-antisymmetric element
    E_jk - E_kj and an imaginary-symmetric element i(E_jk + E_kj), then the
    n-1 imaginary diagonal elements.  Normalized so inner(e_a, e_b) = δ_ab.
    """
    if n < 2:
        raise ValueError("su(N) requires N >= 2")
    elems: list[np.ndarray] = []
    for j in range(n):
        for k in range(j + 1, n):
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = 1.0
            a[k, j] = -1.0
            elems.append(a)
            b = np.zeros((n, n), dtype=complex)
            b[j, k] = 1j
            b[k, j] = 1j
            elems.append(b)
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        d[:l, :l] = np.eye(l)
        d[l, l] = -l
        elems.append(1j * math.sqrt(2.0 / (l * (l + 1))) * d)
    e = np.array(elems)
    comm = np.einsum("kab,lbc->klac", e, e) - np.einsum("lab,kbc->klac", e, e)
    structure = np.real(np.einsum("jab,klba->klj", e, comm)) * (-0.5)
    return SuBasis(dim=n, elements=e, structure=structure)


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize one matrix as {"n": N, "re": [...], "im": [...]}, row-major.

    Non-finite entries map to null so margin nodes survive a round trip.
    """
    a = np.asarray(m, dtype=complex)
    n = a.shape[-1]

    def num(x: float):
        return float(x) if math.isfinite(x) else None

    return {
        "n": n,
        "re": [num(v) for v in a.real.reshape(-1)],
        "im": [num(v) for v in a.imag.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    n = int(obj["n"])

    def num(x) -> float:
        return float("nan") if x is None else float(x)

    re = np.array([num(v) for v in obj["re"]], dtype=float).reshape(n, n)
    im = np.array([num(v) for v in obj["im"]], dtype=float).reshape(n, n)
    return re + 1j * im


def matrix_json_dumps(m: np.ndarray) -> str:
    return json.dumps(matrix_to_json(m), sort_keys=True)
