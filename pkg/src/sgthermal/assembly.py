"""Scaling and Galerkin assembly of the cylindrical cell model.

The 2-D model is the descriptor system E x' = A x + B u with inputs
u = [q, 1]: q is the volumetric heat generation (W/m^3) and the constant
second input carries the boundary forcing of the lifting. Outputs are the
temperatures at the inner-radius, z = 0, outer-radius and z = H mid-points
plus the volume-averaged temperature.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .lifting import (
    OUTPUT_POINTS,
    BCConstants,
    LiftingFunction,
    lifting_outputs,
    solve_lifting_systems,
)
from .robin_basis import RobinBasis, RobinBC
from .spectral_core import galerkin_rule, radial_weight

MAX_WELL_CONDITIONED_N = 15


class Face(str, enum.Enum):
    RADIAL_INNER = "radial_inner"
    RADIAL_OUTER = "radial_outer"
    AXIAL_LOW = "axial_low"
    AXIAL_HIGH = "axial_high"


@dataclass(frozen=True)
class CellGeometry:
    r_in: float
    r_out: float
    height: float

    def __post_init__(self):
        if not (0 < self.r_in < self.r_out):
            raise DomainError(f"need 0 < r_in < r_out, got r_in={self.r_in}, r_out={self.r_out}")
        if not self.height > 0:
            raise DomainError(f"height must be positive, got {self.height}")

    @property
    def volume(self) -> float:
        return np.pi * (self.r_out**2 - self.r_in**2) * self.height


@dataclass(frozen=True)
class ThermalProps:
    rho: float
    cp: float
    k_r: float
    k_z: float

    def __post_init__(self):
        for name in ("rho", "cp", "k_r", "k_z"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be strictly positive, got {v}")

    @property
    def heat_capacity(self) -> float:
        return self.rho * self.cp


@dataclass(frozen=True)
class FaceCondition:
    face: Face
    h: float
    T_inf: float

    def __post_init__(self):
        object.__setattr__(self, "face", Face(self.face))
        if not (np.isfinite(self.h) and self.h >= 0):
            raise DomainError(f"h must be >= 0 on {self.face.value}, got {self.h}")
        if not np.isfinite(self.T_inf):
            raise DomainError(f"T_inf must be finite on {self.face.value}")


# reference cell (64 mm diameter, 198 mm tall) and its two cooling cases
REFERENCE_GEOMETRY = CellGeometry(r_in=0.004, r_out=0.032, height=0.198)
REFERENCE_PROPS = ThermalProps(rho=2118.0, cp=765.0, k_r=0.66, k_z=66.0)


def uniform_faces(h: float, T_inf: float, h_inner: float = 0.0):
    """Same h and T_inf on every face except the inner radius (h_inner)."""
    return (
        FaceCondition(Face.RADIAL_INNER, h_inner, T_inf),
        FaceCondition(Face.RADIAL_OUTER, h, T_inf),
        FaceCondition(Face.AXIAL_LOW, h, T_inf),
        FaceCondition(Face.AXIAL_HIGH, h, T_inf),
    )


CASE1_FACES = uniform_faces(100.0, 18.0)
CASE2_FACES = (
    FaceCondition(Face.RADIAL_INNER, 0.0, 18.0),
    FaceCondition(Face.RADIAL_OUTER, 30.0, 18.0),
    FaceCondition(Face.AXIAL_LOW, 400.0, 3.0),
    FaceCondition(Face.AXIAL_HIGH, 30.0, 18.0),
)


def faces_by_name(faces) -> dict:
    out = {}
    for fc in faces:
        if fc.face in out:
            raise DomainError(f"face {fc.face.value} given twice")
        out[fc.face] = fc
    missing = set(Face) - set(out)
    if missing:
        raise DomainError(f"missing face conditions: {sorted(f.value for f in missing)}")
    return out


def power_to_volumetric(power_w: float, geometry: CellGeometry) -> float:
    """Convert total cell heat generation (W) to a uniform q (W/m^3)."""
    return power_w / geometry.volume


@dataclass(frozen=True)
class Scaling:
    alpha: float
    beta: float
    r_in: float

    def to_scaled(self, r, z):
        return self.alpha * (np.asarray(r) - self.r_in) - 1.0, self.beta * np.asarray(z) - 1.0

    def to_physical(self, r_hat, z_hat):
        return radial_weight(r_hat, self.alpha, self.r_in), (np.asarray(z_hat) + 1.0) / self.beta


def scale_problem(geometry: CellGeometry) -> Scaling:
    return Scaling(
        alpha=2.0 / (geometry.r_out - geometry.r_in),
        beta=2.0 / geometry.height,
        r_in=geometry.r_in,
    )


def bc_constants(props: ThermalProps, faces, alpha: float, beta: float) -> BCConstants:
    f = faces_by_name(faces)
    a_p = f[Face.RADIAL_OUTER].h / props.k_r
    a_m = -f[Face.RADIAL_INNER].h / props.k_r
    c_p = f[Face.AXIAL_HIGH].h / props.k_z
    c_m = -f[Face.AXIAL_LOW].h / props.k_z
    return BCConstants(
        a_plus=a_p,
        a_minus=a_m,
        b_plus=alpha,
        b_minus=alpha,
        c_plus=c_p,
        c_minus=c_m,
        d_plus=beta,
        d_minus=beta,
        e_t=a_p * f[Face.RADIAL_OUTER].T_inf,
        e_b=a_m * f[Face.RADIAL_INNER].T_inf,
        e_r=c_p * f[Face.AXIAL_HIGH].T_inf,
        e_l=c_m * f[Face.AXIAL_LOW].T_inf,
    )


def flat_index(k: int, j: int, n_r: int) -> int:
    """State index of coefficient x_kj (radial index k varies fastest)."""
    return k + j * n_r


def unflat_index(i: int, n_r: int) -> tuple[int, int]:
    return i % n_r, i // n_r


@dataclass(frozen=True)
class StateSpaceModel:
    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    Te_out: np.ndarray
    scaling: Scaling
    geometry: CellGeometry
    props: ThermalProps
    faces: tuple
    radial_basis: RobinBasis
    axial_basis: RobinBasis
    lifting: LiftingFunction
    bc: BCConstants = field(repr=False)

    @property
    def n_states(self) -> int:
        return self.E.shape[0]

    @property
    def n_r(self) -> int:
        return self.radial_basis.count

    @property
    def n_z(self) -> int:
        return self.axial_basis.count

    @property
    def alpha(self) -> float:
        return self.scaling.alpha

    @property
    def beta(self) -> float:
        return self.scaling.beta

    @property
    def gram(self) -> np.ndarray:
        """Radially weighted Gram matrix of the 2-D basis (E without rho c_p)."""
        return self.E / self.props.heat_capacity

    def psi(self, r_hat, z_hat) -> np.ndarray:
        """2-D basis values, shape (n_states, npoints)."""
        r_hat = np.atleast_1d(r_hat)
        z_hat = np.atleast_1d(z_hat)
        pr = self.radial_basis.table(r_hat)
        pz = self.axial_basis.table(z_hat)
        return (pz[:, None, :] * pr[None, :, :]).reshape(self.n_states, -1)

    def with_faces(self, faces) -> "StateSpaceModel":
        return assemble_2d(self.geometry, self.props, faces, self.n_r, self.n_z)


def _weighted_mats(basis: RobinBasis, rule, weight):
    """Mass, second-derivative and first-derivative matrices [test, trial]."""
    x = rule.nodes
    w = rule.weights * weight
    phi = basis.table(x)
    d1 = basis.table(x, 1)
    d2 = basis.table(x, 2)
    return (phi * w) @ phi.T, (phi * w) @ d2.T, (phi * w) @ d1.T, phi @ w


def assemble_2d(
    geometry: CellGeometry, props: ThermalProps, faces, n_r: int, n_z: int
) -> StateSpaceModel:
    """Galerkin state-space model with n_r x n_z basis functions."""
    if n_r < 1 or n_z < 1:
        raise DomainError(f"basis counts must be >= 1, got ({n_r}, {n_z})")
    if max(n_r, n_z) > MAX_WELL_CONDITIONED_N:
        warnings.warn(
            f"basis count ({n_r}, {n_z}) exceeds {MAX_WELL_CONDITIONED_N}; "
            "the mass matrix may be ill-conditioned",
            RuntimeWarning,
            stacklevel=2,
        )
    faces = tuple(faces_by_name(faces)[f] for f in Face)
    sc = scale_problem(geometry)
    alpha, beta, r_in = sc.alpha, sc.beta, geometry.r_in
    bc = bc_constants(props, faces, alpha, beta)
    rbasis = RobinBasis(n_r, RobinBC(bc.a_plus, bc.b_plus, bc.a_minus, bc.b_minus))
    zbasis = RobinBasis(n_z, RobinBC(bc.c_plus, bc.d_plus, bc.c_minus, bc.d_minus))
    te = solve_lifting_systems(rbasis, zbasis, bc, alpha, r_in)

    rule_r = galerkin_rule(n_r)
    rule_z = galerkin_rule(n_z)
    wr = radial_weight(rule_r.nodes, alpha, r_in)
    Mr_w, Sr_w, _, sr_w = _weighted_mats(rbasis, rule_r, wr)
    _, _, Dr, _ = _weighted_mats(rbasis, rule_r, 1.0)
    Mz, Sz, _, sz = _weighted_mats(zbasis, rule_z, 1.0)

    k_r, k_z = props.k_r, props.k_z
    E = props.heat_capacity * np.kron(Mz, Mr_w)
    A = (
        alpha**2 * k_r * np.kron(Mz, Sr_w)
        + beta**2 * k_z * np.kron(Sz, Mr_w)
        + alpha * k_r * np.kron(Mz, Dr)
    )
    E = 0.5 * (E + E.T)

    # boundary forcing of the lifting, integrated on the tensor grid
    rr, zz = np.meshgrid(rule_r.nodes, rule_z.nodes, indexing="ij")
    if te.is_zero():
        b2 = np.zeros(n_r * n_z)
    else:
        forcing = (
            wr[:, None] * (alpha**2 * k_r * te(rr, zz, "drr") + beta**2 * k_z * te(rr, zz, "dzz"))
            + alpha * k_r * te(rr, zz, "dr")
        )
        phi_r = rbasis.table(rule_r.nodes) * rule_r.weights
        phi_z = zbasis.table(rule_z.nodes) * rule_z.weights
        b2 = (phi_r @ forcing @ phi_z.T).T.ravel()
    b1 = np.kron(sz, sr_w)
    B = np.column_stack([b1, b2])

    pts = np.array(OUTPUT_POINTS)
    pr = rbasis.table(pts[:, 0])
    pz = zbasis.table(pts[:, 1])
    C_probe = np.array([np.kron(pz[:, p], pr[:, p]) for p in range(len(pts))])
    volume = 4.0 * (1.0 + alpha * r_in) / alpha
    C = np.vstack([C_probe, b1 / volume])

    return StateSpaceModel(
        E=E,
        A=A,
        B=B,
        C=C,
        Te_out=lifting_outputs(te, geometry),
        scaling=sc,
        geometry=geometry,
        props=props,
        faces=faces,
        radial_basis=rbasis,
        axial_basis=zbasis,
        lifting=te,
        bc=bc,
    )


@dataclass(frozen=True)
class SlabModel:
    """1-D Cartesian slab model: E x' = A x + B u, y = C x + D u, u = [q, T_inf]."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    basis: RobinBasis

    @property
    def n_states(self) -> int:
        return self.E.shape[0]


def build_1d_model(
    k: float, rho: float, cp: float, h: float, n_basis: int, half_length: float = 1.0
) -> SlabModel:
    """Galerkin model of a slab with the same convection on both faces.

    The slab occupies [-L, L] with L = ``half_length``; with L = 1 the
    coordinate is already the reference one. Outputs are the face
    temperatures; T_inf enters through the D pass-through.
    """
    if n_basis < 1:
        raise DomainError(f"n_basis must be >= 1, got {n_basis}")
    for name, v in (("k", k), ("rho", rho), ("cp", cp), ("half_length", half_length)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h}")
    b = 1.0 / half_length
    basis = RobinBasis(n_basis, RobinBC(h / k, b, -h / k, b))
    rule = galerkin_rule(n_basis)
    M, S, _, s = _weighted_mats(basis, rule, 1.0)
    E = rho * cp * M
    A = k / half_length**2 * S
    B = np.column_stack([s, np.zeros(n_basis)])
    C = basis.table([-1.0, 1.0]).T
    D = np.array([[0.0, 1.0], [0.0, 1.0]])
    return SlabModel(E=E, A=A, B=B, C=C, D=D, basis=basis)
