"""Chebyshev polynomials, their derivatives and Clenshaw-Curtis quadrature.

Everything here works on the reference interval [-1, 1]. The scalar
functions accept numpy arrays for ``x`` as well, which is how the Galerkin
assembly uses them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericError

_CLAMP_TOL = 1e-12


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + _CLAMP_TOL):
        raise DomainError(f"Chebyshev argument outside [-1, 1]: {x}")
    return np.clip(x, -1.0, 1.0)


def _check_degree(n):
    if int(n) != n or n < 0:
        raise DomainError(f"Chebyshev degree must be a non-negative integer, got {n}")
    return int(n)


def chebyshev_eval(n: int, x):
    """Chebyshev polynomial of the first kind C_n(x) by three-term recurrence."""
    n = _check_degree(n)
    x = _check_x(x)
    c_prev = np.ones_like(x)
    if n == 0:
        return c_prev if c_prev.ndim else float(c_prev)
    c = x.copy()
    for _ in range(1, n):
        c_prev, c = c, 2.0 * x * c - c_prev
    return c if c.ndim else float(c)


def _second_kind_table(n, x):
    """U_0..U_n at x (Chebyshev polynomials of the second kind)."""
    u = [np.ones_like(x), 2.0 * x]
    for _ in range(2, n + 1):
        u.append(2.0 * x * u[-1] - u[-2])
    return u[: n + 1]


def chebyshev_deriv(n: int, x, order: int = 1):
    """First or second derivative of C_n at ``x``.

    The first derivative is n U_{n-1}(x) (second kind, by recurrence); the
    second is summed from the differentiated coefficient series. At x = +-1
    the closed forms C_n'(+-1) = (+-1)^(n+1) n^2 and
    C_n''(+-1) = (+-1)^n n^2 (n^2 - 1)/3 are used directly.
    """
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    n = _check_degree(n)
    x = _check_x(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if n == 0:
        out = np.zeros_like(x)
    elif order == 1:
        out = n * _second_kind_table(n - 1, x)[n - 1]
    else:
        unit = np.zeros(n + 1)
        unit[n] = 1.0
        out = np.polynomial.chebyshev.chebval(x, np.polynomial.chebyshev.chebder(unit, 2))
    ends = np.abs(x) == 1.0
    if np.any(ends):
        s = x[ends]
        if order == 1:
            out[ends] = s ** (n + 1) * n * n
        else:
            out[ends] = s**n * n * n * (n * n - 1) / 3.0
    return float(out[0]) if scalar else out


def chebyshev_series(coeffs, x, deriv: int = 0):
    """Evaluate sum_k coeffs[k] C_k(x) or its first/second derivative."""
    cheb = np.polynomial.chebyshev.Chebyshev(coeffs)
    if deriv:
        cheb = cheb.deriv(deriv)
    return cheb(x)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=64)
def _cc_rule(order):
    n = order - 1
    theta = np.pi * np.arange(order) / n
    nodes = np.cos(theta)
    nodes[np.abs(nodes) < 1e-16] = 0.0
    weights = np.zeros(order)
    # w_j = c_j/n * (1 - sum_{k=1}^{n/2} b_k cos(2 k theta_j) / (4k^2 - 1))
    for j in range(order):
        s = 0.0
        for k in range(1, n // 2 + 1):
            b = 1.0 if 2 * k == n else 2.0
            s += b * np.cos(2 * k * theta[j]) / (4 * k * k - 1)
        c = 1.0 if j in (0, n) else 2.0
        weights[j] = c / n * (1.0 - s)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def clenshaw_curtis(order: int) -> QuadratureRule:
    """Clenshaw-Curtis rule with ``order`` nodes x_j = cos(j pi / (order - 1))."""
    if int(order) != order or order < 2:
        raise DomainError(f"Clenshaw-Curtis rule needs at least 2 nodes, got {order}")
    nodes, weights = _cc_rule(int(order))
    return QuadratureRule(nodes, weights)


def galerkin_rule(n_basis: int) -> QuadratureRule:
    """Rule used for every Galerkin integral: 4(N+3) nodes for N basis functions."""
    return clenshaw_curtis(4 * (n_basis + 3))


def radial_weight(r_hat, alpha: float, r_in: float):
    """Physical radius written in scaled coordinates, (1 + r_hat + alpha r_in)/alpha."""
    return (1.0 + np.asarray(r_hat) + alpha * r_in) / alpha


def weighted_inner_product(f, weight="unit", rule=None, *, rule_z=None, alpha=None, r_in=None):
    """Integrate ``f`` over [-1, 1] (1-D) or [-1, 1]^2 (2-D) with an optional radial weight.

    ``f`` is a callable of one or two arguments evaluated at the quadrature
    nodes; the dimension follows from ``rule_z``. With ``weight="radial"`` the
    integrand is multiplied by the scaled radius, which needs ``alpha`` and
    ``r_in`` and applies to the first coordinate.
    """
    if rule is None:
        raise DomainError("a quadrature rule is required")
    if weight not in ("unit", "radial"):
        raise DomainError(f"unknown weight {weight!r}")
    x = rule.nodes
    if rule_z is None:
        vals = np.asarray(f(x), dtype=float) * np.ones_like(x)
        coords = (x,)
    else:
        rr, zz = np.meshgrid(x, rule_z.nodes, indexing="ij")
        vals = np.asarray(f(rr, zz), dtype=float) * np.ones_like(rr)
        coords = (rr, zz)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        where = tuple(float(c[tuple(idx)]) for c in coords)
        raise NumericError(f"non-finite integrand at node {where}")
    if weight == "radial":
        if alpha is None or r_in is None:
            raise DomainError("radial weight needs alpha and r_in")
        vals = vals * radial_weight(coords[0], alpha, r_in)
    if rule_z is None:
        return float(rule.weights @ vals)
    return float(rule.weights @ vals @ rule_z.weights)
