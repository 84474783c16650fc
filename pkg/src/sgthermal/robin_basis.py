"""Boundary-adapted Chebyshev bases for Robin conditions on [-1, 1].

Each basis function is phi_n = C_n + zeta_n C_{n+1} + eta_n C_{n+2} with
(zeta_n, eta_n) chosen so that

    a_plus  phi_n(+1) + b_plus  phi_n'(+1) = 0
    a_minus phi_n(-1) + b_minus phi_n'(-1) = 0
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import DegenerateBC, DomainError

_DET_RTOL = 1e-14


@dataclass(frozen=True)
class RobinBC:
    a_plus: float
    b_plus: float
    a_minus: float
    b_minus: float

    def __post_init__(self):
        vals = (self.a_plus, self.b_plus, self.a_minus, self.b_minus)
        if not all(np.isfinite(vals)):
            raise DomainError(f"non-finite Robin coefficients {vals}")
        if all(v == 0 for v in vals):
            raise DomainError("Robin coefficients cannot all be zero")

    def residuals(self, value_p, slope_p, value_m, slope_m):
        """Residuals of the homogeneous conditions at +1 and -1."""
        return (
            self.a_plus * value_p + self.b_plus * slope_p,
            self.a_minus * value_m + self.b_minus * slope_m,
        )


def robin_basis_coeffs(n: int, bc: RobinBC) -> tuple[float, float]:
    """(zeta_n, eta_n) for the Robin-adapted basis function of index ``n``."""
    ap, bp, am, bm = bc.a_plus, bc.b_plus, bc.a_minus, bc.b_minus
    n1, n2 = (n + 1) ** 2, (n + 2) ** 2
    det = 2 * ap * am + (n1 + n2) * (am * bp - ap * bm) - 2 * bm * bp * n1 * n2
    scale = max(abs(ap), abs(bp), abs(am), abs(bm)) ** 2 * max(1.0, n1 * n2)
    if abs(det) <= _DET_RTOL * scale:
        raise DegenerateBC(n, det)
    zeta = 4 * (n + 1) * (ap * bm + am * bp) / det
    eta = (-2 * am * ap + (n * n + n1) * (ap * bm - am * bp) + 2 * bm * bp * n * n * n1) / det
    return zeta, eta


@dataclass(frozen=True)
class RobinBasis:
    """The first ``count`` Robin-adapted basis functions for ``bc``."""

    count: int
    bc: RobinBC
    coeffs: tuple = field(init=False)

    def __post_init__(self):
        if self.count < 1:
            raise DomainError(f"basis needs at least one function, got {self.count}")
        object.__setattr__(
            self, "coeffs", tuple(robin_basis_coeffs(n, self.bc) for n in range(self.count))
        )

    def series(self, n: int) -> np.ndarray:
        """Chebyshev coefficients of phi_n (length n + 3)."""
        self._check_index(n)
        zeta, eta = self.coeffs[n]
        c = np.zeros(n + 3)
        c[n : n + 3] = (1.0, zeta, eta)
        return c

    def _check_index(self, n):
        if not 0 <= n < self.count:
            raise IndexError(f"basis index {n} out of range for N={self.count}")

    def eval(self, n: int, x, deriv: int = 0):
        if deriv not in (0, 1, 2):
            raise DomainError(f"deriv must be 0, 1 or 2, got {deriv}")
        c = self.series(n)
        if deriv:
            c = cheb.chebder(c, deriv)
        out = cheb.chebval(np.asarray(x, dtype=float), c)
        return float(out) if np.ndim(out) == 0 else out

    def table(self, x, deriv: int = 0) -> np.ndarray:
        """Matrix with entry [n, i] = phi_n^(deriv)(x[i])."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([self.eval(n, x, deriv) for n in range(self.count)])

    def bc_residuals(self) -> np.ndarray:
        """(count, 2) array of the Robin residuals at +1 and -1."""
        out = np.empty((self.count, 2))
        for n in range(self.count):
            v = self.table([1.0, -1.0])[n]
            d = self.table([1.0, -1.0], 1)[n]
            out[n] = self.bc.residuals(v[0], d[0], v[1], d[1])
        return out


def eval_basis(basis: RobinBasis, n: int, x, deriv: int = 0):
    """phi_n, phi_n' or phi_n'' of ``basis`` at ``x``."""
    return basis.eval(n, x, deriv)
