"""Dense linear-algebra helpers shared by the constructions and the verifier."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray
from scipy import linalg as sla
from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import HypothesisError

FloatMatrix = NDArray[np.float64]
ExactMatrix = tuple[tuple[Fraction, ...], ...]
MatrixLike = FloatMatrix | ExactMatrix


# ---- Exact matrices -------------------------------------------------------------


def as_exact(entries: Iterable[Iterable[int | Fraction | str]]) -> ExactMatrix:
    return tuple(tuple(Fraction(x) for x in row) for row in entries)


def is_exact(a: MatrixLike) -> bool:
    return isinstance(a, tuple)


def exact_identity(n: int) -> ExactMatrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def to_domain_matrix(a: ExactMatrix) -> DomainMatrix:
    rows = [[QQ(x.numerator, x.denominator) for x in row] for row in a]
    ncols = len(a[0]) if a else 0
    return DomainMatrix(rows, (len(a), ncols), QQ)


def from_domain_matrix(dm: DomainMatrix) -> ExactMatrix:
    m = dm.to_Matrix()
    return tuple(
        tuple(Fraction(int(Rational(x).p), int(Rational(x).q)) for x in m.row(i))
        for i in range(m.rows)
    )


def exact_matmul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return from_domain_matrix(to_domain_matrix(a) * to_domain_matrix(b))


def exact_blocks(blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
    """Assemble a block matrix row by row of blocks."""
    rows: list[tuple[Fraction, ...]] = []
    for block_row in blocks:
        height = len(block_row[0])
        for r in range(height):
            rows.append(tuple(x for block in block_row for x in block[r]))
    return tuple(rows)


def exact_scale(a: ExactMatrix, c: Fraction) -> ExactMatrix:
    return tuple(tuple(c * x for x in row) for row in a)


def to_float(a: MatrixLike) -> FloatMatrix:
    if is_exact(a):
        return np.array([[float(x) for x in row] for row in a], dtype=np.float64)
    return np.asarray(a, dtype=np.float64)


def permute_exact(a: ExactMatrix, perm: Sequence[int]) -> ExactMatrix:
    """Entry ``(i, j)`` moves to ``(perm[i], perm[j])``."""
    inverse = [0] * len(perm)
    for old, new in enumerate(perm):
        inverse[new] = old
    return tuple(tuple(a[inverse[i]][inverse[j]] for j in range(len(a))) for i in range(len(a)))


def permute_float(a: FloatMatrix, perm: Sequence[int]) -> FloatMatrix:
    inverse = np.argsort(np.asarray(perm))
    return a[np.ix_(inverse, inverse)]


# ---- Floating helpers -----------------------------------------------------------


def is_symmetric(a: FloatMatrix, rtol: float = 1e-12) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= rtol * scale)


def symmetric_sqrt(s: FloatMatrix, *, allow_singular: bool = False) -> FloatMatrix:
    """Principal square root of a symmetric positive (semi)definite matrix.

    Parameters
    ----------
    s
        Symmetric input.
    allow_singular
        Accept eigenvalues down to roundoff below zero, clipping them to zero.

    Returns
    -------
    FloatMatrix
        Symmetric ``r`` with ``r @ r ≈ s``.
    """
    if not is_symmetric(s):
        raise HypothesisError("not_symmetric")
    w, v = sla.eigh(s)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    floor = -1e-12 * scale if allow_singular else 0.0
    if w.size and (w[0] < floor or (not allow_singular and w[0] <= 0.0)):
        raise HypothesisError("not_positive_definite", f"smallest eigenvalue {w[0]:.3g}")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return (root + root.T) / 2


def random_orthogonal(rng: np.random.Generator, n: int) -> FloatMatrix:
    """Haar-distributed orthogonal matrix from a sign-corrected QR factorization."""
    q, r = sla.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def is_totally_nonzero(a: FloatMatrix, floor: float) -> bool:
    return bool(np.all(np.abs(a) > floor))
