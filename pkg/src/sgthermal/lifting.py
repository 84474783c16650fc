"""Time-invariant boundary lifting T_e(r_hat, z_hat) for non-homogeneous Robin data.

The lifting has the separable form

    T_e = sum_k (d1_k z + d2_k z^2) phi^r_k(r) + sum_j (d3_j r + d4_j r^2) phi^z_j(z)

and satisfies each face condition weakly: the residual on the axial faces is
orthogonal (radially weighted) to every radial basis function, and the
residual on the radial faces is orthogonal to every axial basis function.
Corner contributions are not included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateLifting, DomainError, NumericError
from .robin_basis import RobinBasis
from .spectral_core import galerkin_rule, radial_weight

_DERIVS = ("value", "dr", "drr", "dz", "dzz")


@dataclass(frozen=True)
class BCConstants:
    """Scaled Robin data of the four faces.

    a/b act on the radial faces (plus: outer radius, minus: inner radius),
    c/d on the axial faces (plus: z = H, minus: z = 0). e_t, e_b, e_r, e_l
    are the right-hand sides on the outer, inner, z = H and z = 0 faces.
    """

    a_plus: float
    a_minus: float
    b_plus: float
    b_minus: float
    c_plus: float
    c_minus: float
    d_plus: float
    d_minus: float
    e_t: float
    e_b: float
    e_r: float
    e_l: float


def _gram(basis, rule, weight):
    phi = basis.table(rule.nodes)
    return (phi * (rule.weights * weight)) @ phi.T, phi @ (rule.weights * weight)


def _check_det(det, scale, what):
    if abs(det) <= 1e-14 * scale:
        raise DegenerateLifting(f"{what} edge system is singular (det={det:.3e})")


def _solve(P, s):
    try:
        lu = sla.lu_factor(P, check_finite=True)
    except (ValueError, sla.LinAlgError) as exc:
        raise NumericError(f"lifting Gram matrix cannot be factored: {exc}") from exc
    if np.any(np.diag(lu[0]) == 0.0):
        raise NumericError("lifting Gram matrix is singular")
    return sla.lu_solve(lu, s)


@dataclass(frozen=True)
class LiftingFunction:
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    radial_basis: RobinBasis
    axial_basis: RobinBasis

    def is_zero(self) -> bool:
        return not any(np.any(d) for d in (self.d1, self.d2, self.d3, self.d4))

    def __call__(self, r_hat, z_hat, deriv: str = "value"):
        return eval_lifting(self, r_hat, z_hat, deriv)


def solve_lifting_systems(
    radial_basis: RobinBasis, axial_basis: RobinBasis, bc: BCConstants, alpha: float, r_in: float
) -> LiftingFunction:
    """Coefficient vectors of the lifting from the two weak edge systems."""
    k1, k2 = bc.c_plus + bc.d_plus, bc.c_plus + 2 * bc.d_plus
    k3, k4 = bc.d_minus - bc.c_minus, bc.c_minus - 2 * bc.d_minus
    j1, j2 = bc.a_plus + bc.b_plus, bc.a_plus + 2 * bc.b_plus
    j3, j4 = bc.b_minus - bc.a_minus, bc.a_minus - 2 * bc.b_minus
    kdet = k1 * k4 - k2 * k3
    jdet = j1 * j4 - j2 * j3
    _check_det(kdet, max(abs(k1), abs(k2), abs(k3), abs(k4)) ** 2, "axial")
    _check_det(jdet, max(abs(j1), abs(j2), abs(j3), abs(j4)) ** 2, "radial")

    rule_r = galerkin_rule(radial_basis.count)
    rule_z = galerkin_rule(axial_basis.count)
    P_rl, s_rl = _gram(radial_basis, rule_r, radial_weight(rule_r.nodes, alpha, r_in))
    P_tb, s_tb = _gram(axial_basis, rule_z, 1.0)

    v_rl = _solve(P_rl, s_rl)
    v_tb = _solve(P_tb, s_tb)
    d1 = (k4 * bc.e_r - k2 * bc.e_l) / kdet * v_rl
    d2 = (k1 * bc.e_l - k3 * bc.e_r) / kdet * v_rl
    d3 = (j4 * bc.e_t - j2 * bc.e_b) / jdet * v_tb
    d4 = (j1 * bc.e_b - j3 * bc.e_t) / jdet * v_tb
    return LiftingFunction(d1, d2, d3, d4, radial_basis, axial_basis)


def eval_lifting(te: LiftingFunction, r_hat, z_hat, deriv: str = "value"):
    """T_e or one of its partial derivatives at scaled coordinates.

    ``deriv`` is one of "value", "dr", "drr", "dz", "dzz". ``r_hat`` and
    ``z_hat`` broadcast against each other.
    """
    if deriv not in _DERIVS:
        raise DomainError(f"deriv must be one of {_DERIVS}, got {deriv!r}")
    r, z = np.broadcast_arrays(np.asarray(r_hat, dtype=float), np.asarray(z_hat, dtype=float))
    if np.any(np.abs(r) > 1 + 1e-12) or np.any(np.abs(z) > 1 + 1e-12):
        raise DomainError("lifting evaluated outside [-1, 1]^2")
    shape = r.shape
    r, z = r.ravel(), z.ravel()

    nr = {"dr": 1, "drr": 2}.get(deriv, 0)
    nz = {"dz": 1, "dzz": 2}.get(deriv, 0)
    phi_r = te.radial_basis.table(r, nr)
    phi_z = te.axial_basis.table(z, nz)

    # polynomial factors (z, z^2) and (r, r^2) differentiated as required
    zpow = [(z, z * z), (np.ones_like(z), 2 * z), (np.zeros_like(z), 2 * np.ones_like(z))]
    rpow = [(r, r * r), (np.ones_like(r), 2 * r), (np.zeros_like(r), 2 * np.ones_like(r))]
    out = np.zeros_like(r)
    if deriv in ("value", "dr", "drr"):
        p1, p2 = zpow[0]
        out += ((te.d1[:, None] * p1 + te.d2[:, None] * p2) * phi_r).sum(0)
    else:
        p1, p2 = zpow[nz]
        phi_r0 = te.radial_basis.table(r)
        out += ((te.d1[:, None] * p1 + te.d2[:, None] * p2) * phi_r0).sum(0)
    if deriv in ("value", "dz", "dzz"):
        p1, p2 = rpow[0]
        out += ((te.d3[:, None] * p1 + te.d4[:, None] * p2) * phi_z).sum(0)
    else:
        p1, p2 = rpow[nr]
        phi_z0 = te.axial_basis.table(z)
        out += ((te.d3[:, None] * p1 + te.d4[:, None] * p2) * phi_z0).sum(0)
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def weak_bc_residuals(te: LiftingFunction, bc: BCConstants, alpha: float, r_in: float) -> dict:
    """Projected face residuals of the lifting, one vector per face.

    Axial faces are projected onto the radial basis with the radial weight,
    radial faces onto the axial basis with unit weight.
    """
    rule_r = galerkin_rule(te.radial_basis.count)
    rule_z = galerkin_rule(te.axial_basis.count)
    r, z = rule_r.nodes, rule_z.nodes
    wr = rule_r.weights * radial_weight(r, alpha, r_in)
    wz = rule_z.weights
    phi_r = te.radial_basis.table(r)
    phi_z = te.axial_basis.table(z)

    def face_z(zv, c, d, e):
        res = c * te(r, zv) + d * te(r, zv, "dz") - e
        return phi_r @ (wr * res)

    def face_r(rv, a, b, e):
        res = a * te(rv, z) + b * te(rv, z, "dr") - e
        return phi_z @ (wz * res)

    return {
        "right": face_z(1.0, bc.c_plus, bc.d_plus, bc.e_r),
        "left": face_z(-1.0, bc.c_minus, bc.d_minus, bc.e_l),
        "top": face_r(1.0, bc.a_plus, bc.b_plus, bc.e_t),
        "bottom": face_r(-1.0, bc.a_minus, bc.b_minus, bc.e_b),
    }


OUTPUT_POINTS = ((-1.0, 0.0), (0.0, -1.0), (1.0, 0.0), (0.0, 1.0))


def radial_mean(values, rule_r, rule_z, alpha: float, r_in: float) -> float:
    """Volume average of a field sampled on the tensor grid of two rules."""
    w = rule_r.weights * radial_weight(rule_r.nodes, alpha, r_in)
    volume = 2.0 * 2.0 * (1.0 + alpha * r_in) / alpha
    return float(w @ values @ rule_z.weights) / volume


def lifting_outputs(te: LiftingFunction, geometry) -> np.ndarray:
    """T_e at the four probe points followed by its volume average."""
    alpha = 2.0 / (geometry.r_out - geometry.r_in)
    pts = np.array(OUTPUT_POINTS)
    probes = te(pts[:, 0], pts[:, 1])
    rule_r = galerkin_rule(te.radial_basis.count)
    rule_z = galerkin_rule(te.axial_basis.count)
    rr, zz = np.meshgrid(rule_r.nodes, rule_z.nodes, indexing="ij")
    mean = radial_mean(te(rr, zz), rule_r, rule_z, alpha, geometry.r_in)
    return np.append(probes, mean)
