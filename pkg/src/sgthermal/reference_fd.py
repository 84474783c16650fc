"""Finite-difference reference solver for the cylindrical cell.

Node-centred finite-volume form of the axisymmetric heat equation on a
uniform (r, z) grid that includes the boundary nodes. Boundary nodes own
half control volumes and exchange heat with the fluid through their outer
face, which gives a second-order scheme with exact discrete energy balance.
Time stepping is implicit Euler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import CellGeometry, Face, ThermalProps, faces_by_name
from .dynamics import LoadProfile, SimulationResult
from .errors import DomainError, NumericError

DEFAULT_GRID = (141, 71)


@dataclass
class FdGrid:
    r: np.ndarray  # (n_r,) node radii, m
    z: np.ndarray  # (n_z,) node heights, m
    T: np.ndarray  # (n_r, n_z) temperatures, degC

    @property
    def n_r(self) -> int:
        return len(self.r)

    @property
    def n_z(self) -> int:
        return len(self.z)

    def interpolate(self, r, z) -> np.ndarray:
        return _bilinear(self.r, self.z, self.T, r, z)


def _bilinear(rn, zn, T, r, z):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    i = np.clip(np.searchsorted(rn, r) - 1, 0, len(rn) - 2)
    j = np.clip(np.searchsorted(zn, z) - 1, 0, len(zn) - 2)
    tr = (r - rn[i]) / (rn[i + 1] - rn[i])
    tz = (z - zn[j]) / (zn[j + 1] - zn[j])
    return (
        T[i, j] * (1 - tr) * (1 - tz)
        + T[i + 1, j] * tr * (1 - tz)
        + T[i, j + 1] * (1 - tr) * tz
        + T[i + 1, j + 1] * tr * tz
    )


class _Discretization:
    """Capacity vector, conductance matrix and boundary terms on one grid."""

    def __init__(self, geometry: CellGeometry, props: ThermalProps, faces, grid):
        n_r, n_z = grid
        if n_r < 3 or n_z < 3:
            raise DomainError(f"grid needs at least 3x3 nodes, got {n_r}x{n_z}")
        f = faces_by_name(faces)
        self.geometry = geometry
        self.r = np.linspace(geometry.r_in, geometry.r_out, n_r)
        self.z = np.linspace(0.0, geometry.height, n_z)
        dr = self.r[1] - self.r[0]
        dz = self.z[1] - self.z[0]

        r_face = np.concatenate([[self.r[0]], 0.5 * (self.r[:-1] + self.r[1:]), [self.r[-1]]])
        ring = 0.5 * (r_face[1:] ** 2 - r_face[:-1] ** 2)  # annulus area / 2 pi
        z_len = np.full(n_z, dz)
        z_len[[0, -1]] = 0.5 * dz
        self.volume = np.outer(ring, z_len)  # per radian

        idx = np.arange(n_r * n_z).reshape(n_r, n_z)
        rows, cols, vals = [], [], []

        def couple(a, b, g):
            rows.extend([a, b, a, b])
            cols.extend([b, a, a, b])
            vals.extend([g, g, -g, -g])

        g_r = props.k_r * np.outer(r_face[1:-1], z_len) / dr  # between i and i+1
        couple(idx[:-1, :].ravel(), idx[1:, :].ravel(), g_r.ravel())
        g_z = props.k_z * np.outer(ring, np.ones(n_z - 1)) / dz
        couple(idx[:, :-1].ravel(), idx[:, 1:].ravel(), g_z.ravel())
        rows = np.concatenate([np.atleast_1d(x) for x in rows])
        cols = np.concatenate([np.atleast_1d(x) for x in cols])
        vals = np.concatenate([np.atleast_1d(x) for x in vals])

        # convective conductances h * area (per radian) on each boundary node
        hA = np.zeros((n_r, n_z))
        hAT = np.zeros((n_r, n_z))
        for face, area, sl in (
            (Face.RADIAL_INNER, self.r[0] * z_len, np.s_[0, :]),
            (Face.RADIAL_OUTER, self.r[-1] * z_len, np.s_[-1, :]),
            (Face.AXIAL_LOW, ring, np.s_[:, 0]),
            (Face.AXIAL_HIGH, ring, np.s_[:, -1]),
        ):
            hA[sl] += f[face].h * area
            hAT[sl] += f[face].h * area * f[face].T_inf
        self.hA = hA
        n = n_r * n_z
        self.K = (sp.coo_matrix((vals, (rows, cols)), shape=(n, n)) - sp.diags(hA.ravel())).tocsc()
        self.b_conv = hAT.ravel()
        self.cap = props.heat_capacity * self.volume.ravel()
        self.shape = (n_r, n_z)

    def source(self, q):
        return q * self.volume.ravel() + self.b_conv

    def outputs(self, T):
        g = self.geometry
        T2 = T.reshape(self.shape)
        pr = np.array([g.r_in, 0.5 * (g.r_in + g.r_out), g.r_out, 0.5 * (g.r_in + g.r_out)])
        pz = np.array([0.5 * g.height, 0.0, 0.5 * g.height, g.height])
        probes = _bilinear(self.r, self.z, T2, pr, pz)
        mean = float((self.volume * T2).sum() / self.volume.sum())
        return np.append(probes, mean)


def _factor(M):
    try:
        return spla.splu(M.tocsc())
    except RuntimeError as exc:
        raise NumericError(f"finite-difference system is singular: {exc}") from exc


def fd_solve_steady(
    geometry: CellGeometry, props: ThermalProps, faces, q: float, grid=DEFAULT_GRID
) -> FdGrid:
    """Steady field for constant q (W/m^3); needs at least one convective face."""
    d = _Discretization(geometry, props, faces, grid)
    if not np.any(d.hA):
        raise NumericError("steady problem is singular without a convective face")
    T = _factor(d.K).solve(-d.source(q))
    if not np.all(np.isfinite(T)):
        raise NumericError("steady finite-difference solve did not converge")
    return FdGrid(d.r, d.z, T.reshape(d.shape))


def fd_solve_transient(
    geometry: CellGeometry,
    props: ThermalProps,
    faces,
    profile: LoadProfile,
    grid=DEFAULT_GRID,
    dt: float = 1.0,
    T_init=18.0,
    snapshot_times=(),
    substeps: int = 1,
) -> SimulationResult:
    """Implicit-Euler transient on the reporting grid t = 0, dt, 2 dt, ...

    ``T_init`` is a uniform temperature, a callable of (r, z) in metres, or
    "equilibrium" for the steady field at q = 0. Each reporting step is split into ``substeps`` equal implicit steps; q on
    a step is the time average of the profile over it. Field snapshots are
    stored as FdGrid objects for the reporting times closest to
    ``snapshot_times``.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    d = _Discretization(geometry, props, faces, grid)
    n_steps = int(np.ceil(profile.duration / dt - 1e-9))
    times = np.minimum(np.arange(n_steps + 1) * dt, profile.duration)
    if isinstance(T_init, str):
        if T_init != "equilibrium":
            raise DomainError(f"unknown initial condition {T_init!r}")
        T = fd_solve_steady(geometry, props, faces, 0.0, grid).T.ravel()
    elif callable(T_init):
        rr, zz = np.meshgrid(d.r, d.z, indexing="ij")
        T = (np.asarray(T_init(rr, zz), dtype=float) * np.ones_like(rr)).ravel()
    else:
        T = np.full(d.cap.shape, float(T_init))
    if not np.all(np.isfinite(T)):
        raise DomainError("initial temperature must be finite")

    h = dt / substeps
    lu = _factor(sp.diags(d.cap / h) - d.K)
    outputs = np.empty((5, len(times)))
    outputs[:, 0] = d.outputs(T)
    wanted = {int(np.argmin(np.abs(times - ts))): ts for ts in snapshot_times}
    fields = {}
    if 0 in wanted:
        fields[float(times[0])] = FdGrid(d.r, d.z, T.reshape(d.shape).copy())
    for i in range(n_steps):
        step = times[i + 1] - times[i]
        sub = step / substeps
        solver = lu if abs(sub - h) < 1e-12 else _factor(sp.diags(d.cap / sub) - d.K)
        for s in range(substeps):
            a = times[i] + s * sub
            segs = profile.segments(a, a + sub)
            q = sum(L * qv for L, qv in segs) / sub
            T = solver.solve(d.cap / sub * T + d.source(q))
        outputs[:, i + 1] = d.outputs(T)
        if i + 1 in wanted:
            fields[float(times[i + 1])] = FdGrid(d.r, d.z, T.reshape(d.shape).copy())
    if not np.all(np.isfinite(outputs)):
        raise NumericError("finite-difference transient produced non-finite values")
    return SimulationResult(times=times, outputs=outputs, fields=fields)


def boundary_heat_loss(geometry, props, faces, fd: FdGrid) -> float:
    """Total convective heat leaving the cell (W) for a solved field."""
    d = _Discretization(geometry, props, faces, (fd.n_r, fd.n_z))
    per_radian = float(np.sum(d.hA.ravel() * fd.T.ravel() - d.b_conv))
    return 2 * np.pi * per_radian
