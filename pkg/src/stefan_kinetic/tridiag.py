"""Tridiagonal solves for the implicit diffusion step."""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system by forward elimination and back substitution.

    ``lower[i]`` multiplies ``x[i-1]`` in row ``i`` (``lower[0]`` unused) and
    ``upper[i]`` multiplies ``x[i+1]`` (``upper[-1]`` unused).  No pivoting, so
    the matrix should be diagonally dominant.
    """
    n = len(diag)
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / m if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


class ConstantTridiagonal:
    """``I + coeff * T`` with ``T = tridiag(-1, 2, -1)``, factorised once.

    The factorisation is reused for every right-hand side, which is where the
    time stepper spends its time.
    """

    def __init__(self, size: int, coeff: float):
        if size < 3:
            # scipy's dgttrf wrapper mis-sizes its workspace for n = 2
            raise ValueError(f"need at least 3 unknowns, got {size}")
        self.size = size
        self.coeff = coeff
        dl = np.full(size - 1, -coeff)
        d = np.full(size, 1.0 + 2.0 * coeff)
        du = np.full(size - 1, -coeff)
        self._lu = lapack.dgttrf(dl, d, du)
        info = self._lu[-1]
        if info != 0:
            raise np.linalg.LinAlgError(f"dgttrf failed with info={info}")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        dl, d, du, du2, ipiv, _ = self._lu
        x, info = lapack.dgttrs(dl, d, du, du2, ipiv, rhs)
        if info != 0:
            raise np.linalg.LinAlgError(f"dgttrs failed with info={info}")
        return x


def apply_second_difference(x: np.ndarray) -> np.ndarray:
    """``T @ x`` for interior values ``x`` with zero Dirichlet neighbours."""
    out = 2.0 * x
    out[1:] -= x[:-1]
    out[:-1] -= x[1:]
    return out
