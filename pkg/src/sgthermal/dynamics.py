"""Time- and frequency-domain evaluation of the Galerkin model."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .assembly import StateSpaceModel
from .errors import DomainError, NumericError
from .lifting import radial_mean
from .spectral_core import galerkin_rule, radial_weight

DEFAULT_DT = 1.0


@dataclass(frozen=True)
class LoadProfile:
    """Piecewise-constant heat generation: q = q_i on [t_i, t_{i+1})."""

    times: tuple
    q: tuple
    duration: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if t.ndim != 1 or len(t) == 0 or len(t) != len(q):
            raise DomainError("profile needs matching, non-empty time and q columns")
        if t[0] != 0.0:
            raise DomainError(f"profile must start at t=0, starts at {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise DomainError("profile times must be strictly increasing")
        if not np.all(np.isfinite(q)):
            raise DomainError("profile q values must be finite")
        if not self.duration > 0:
            raise DomainError(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "q", tuple(q))

    @classmethod
    def constant(cls, q: float, duration: float) -> "LoadProfile":
        return cls((0.0,), (q,), duration)

    @classmethod
    def pulse_train(
        cls, q_on: float, t_on: float, t_off: float, n_pulses: int, tail: float = 0.0
    ) -> "LoadProfile":
        times, qs = [], []
        for i in range(n_pulses):
            t0 = i * (t_on + t_off)
            times += [t0, t0 + t_on]
            qs += [q_on, 0.0]
        return cls(tuple(times), tuple(qs), n_pulses * (t_on + t_off) + tail)

    def value_at(self, t: float) -> float:
        i = np.searchsorted(self.times, t, side="right") - 1
        return self.q[max(i, 0)]

    def segments(self, t0: float, t1: float):
        """(length, q) pieces covering [t0, t1]."""
        cuts = [t for t in self.times if t0 < t < t1]
        edges = [t0, *cuts, t1]
        return [(b - a, self.value_at(a)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


@dataclass
class SimulationResult:
    times: np.ndarray
    outputs: np.ndarray  # (5, len(times)): T1..T4 and the volume mean
    states: np.ndarray | None = None
    fields: dict = field(default_factory=dict)

    @property
    def labels(self):
        return ("T1", "T2", "T3", "T4", "Tmean")


class ZOHDiscretization:
    """Exact zero-order-hold discretization of E x' = A x + B u.

    Uses the exponential of the augmented matrix [[E^-1 A, E^-1 B], [0, 0]],
    which stays valid when E^-1 A is singular (all faces adiabatic).
    """

    def __init__(self, E, A, B):
        self.M = sla.solve(E, A)
        self.N = sla.solve(E, B)
        self._cache = {}

    def __call__(self, dt: float):
        key = round(dt, 12)
        if key not in self._cache:
            n, m = self.N.shape
            aug = np.zeros((n + m, n + m))
            aug[:n, :n] = self.M * dt
            aug[:n, n:] = self.N * dt
            ex = sla.expm(aug)
            if not np.all(np.isfinite(ex)):
                raise NumericError(f"matrix exponential is not finite for dt={dt}")
            self._cache[key] = (ex[:n, :n], ex[:n, n:])
        return self._cache[key]


def _rule_grid(model):
    rule_r = galerkin_rule(model.n_r)
    rule_z = galerkin_rule(model.n_z)
    rr, zz = np.meshgrid(rule_r.nodes, rule_z.nodes, indexing="ij")
    return rule_r, rule_z, rr, zz


def _project_grid(model, values):
    """Weighted projection of (values - T_e) sampled on the Galerkin grid."""
    rule_r, rule_z, rr, zz = _rule_grid(model)
    resid = values - model.lifting(rr, zz)
    wr = rule_r.weights * radial_weight(rule_r.nodes, model.alpha, model.geometry.r_in)
    phi_r = model.radial_basis.table(rule_r.nodes) * wr
    phi_z = model.axial_basis.table(rule_z.nodes) * rule_z.weights
    rhs = (phi_r @ resid @ phi_z.T).T.ravel()
    try:
        return sla.solve(model.gram, rhs, assume_a="pos")
    except sla.LinAlgError as exc:
        raise NumericError(f"basis Gram matrix is singular: {exc}") from exc


def project_initial_condition(model: StateSpaceModel, T_init) -> np.ndarray:
    """Weighted least-squares coefficients of (T_init - T_e) in the 2-D basis.

    ``T_init`` is a number (uniform field, degC) or a callable of the
    physical coordinates (r, z) returning degC. The string "equilibrium"
    selects the model's own steady state at q = 0 instead.
    """
    if isinstance(T_init, str):
        if T_init != "equilibrium":
            raise DomainError(f"unknown initial condition {T_init!r}")
        return steady_state(model, 0.0)
    _, _, rr, zz = _rule_grid(model)
    if callable(T_init):
        r, z = model.scaling.to_physical(rr, zz)
        target = np.asarray(T_init(r, z), dtype=float) * np.ones_like(rr)
    else:
        target = np.full_like(rr, float(T_init))
    if not np.all(np.isfinite(target)):
        raise DomainError("initial temperature must be finite")
    return _project_grid(model, target)


def steady_state(model: StateSpaceModel, q: float) -> np.ndarray:
    """Equilibrium state for constant q (needs at least one convective face)."""
    if not any(fc.h > 0 for fc in model.faces):
        raise NumericError("no steady state: the model has no convective face")
    return -sla.solve(model.A, model.B @ np.array([q, 1.0]))


def simulate(
    model: StateSpaceModel,
    profile: LoadProfile,
    dt: float = DEFAULT_DT,
    T_init=18.0,
    ambient_schedule=None,
    keep_states: bool = False,
) -> SimulationResult:
    """Step the model through ``profile`` and return the five outputs.

    ``T_init`` accepts the forms documented in project_initial_condition.
    Inputs are held piecewise constant; steps are split at profile
    breakpoints, so the result carries no time-integration error.
    ``ambient_schedule`` is an optional list of (t, faces) pairs: at each
    time the model is rebuilt with the new face conditions and the state is
    re-projected so the temperature field carries over.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    n_steps = int(np.ceil(profile.duration / dt - 1e-9))
    times = np.minimum(np.arange(n_steps + 1) * dt, profile.duration)

    switches = sorted(ambient_schedule or [], key=lambda s: s[0])
    for ts, faces in switches:
        if ts == 0.0:
            model = model.with_faces(faces)
    switches = [(ts, faces) for ts, faces in switches if ts > 0.0]
    x = project_initial_condition(model, T_init)
    disc = ZOHDiscretization(model.E, model.A, model.B)

    outputs = np.empty((5, len(times)))
    states = np.empty((model.n_states, len(times))) if keep_states else None
    outputs[:, 0] = model.C @ x + model.Te_out
    if keep_states:
        states[:, 0] = x
    for i in range(n_steps):
        t0, t1 = times[i], times[i + 1]
        edges = [t0] + [ts for ts, _ in switches if t0 < ts < t1] + [t1]
        for a, b in zip(edges[:-1], edges[1:]):
            pending = [faces for ts, faces in switches if ts == a]
            if pending:
                model, x = _switch_ambient(model, x, pending[-1])
                disc = ZOHDiscretization(model.E, model.A, model.B)
            for length, q in profile.segments(a, b):
                Phi, Gam = disc(length)
                x = Phi @ x + Gam @ np.array([q, 1.0])
        outputs[:, i + 1] = model.C @ x + model.Te_out
        if keep_states:
            states[:, i + 1] = x
    if not np.all(np.isfinite(outputs)):
        raise NumericError("simulation produced non-finite outputs")
    return SimulationResult(times=times, outputs=outputs, states=states)


def _switch_ambient(model, x, faces):
    """Rebuild the model for new face conditions, carrying the field over."""
    new = model.with_faces(faces)
    _, _, rr, zz = _rule_grid(model)
    field_old = (model.psi(rr.ravel(), zz.ravel()).T @ x).reshape(rr.shape) + model.lifting(rr, zz)
    return new, _project_grid(new, field_old)


def reconstruct_field(model: StateSpaceModel, state, points) -> np.ndarray:
    """Temperature (degC) at physical points [(r, z), ...]."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    g = model.geometry
    tol = 1e-12 * max(g.r_out, g.height)
    for r, z in pts:
        if not (g.r_in - tol <= r <= g.r_out + tol and -tol <= z <= g.height + tol):
            raise DomainError(f"point (r={r}, z={z}) lies outside the cell cross-section")
    r_hat, z_hat = model.scaling.to_scaled(pts[:, 0], pts[:, 1])
    r_hat = np.clip(r_hat, -1.0, 1.0)
    z_hat = np.clip(z_hat, -1.0, 1.0)
    psi = np.array([model.psi(a, b)[:, 0] for a, b in zip(r_hat, z_hat)])
    return psi @ np.asarray(state) + model.lifting(r_hat, z_hat)


def field_mean(model: StateSpaceModel, state) -> float:
    """Volume-averaged temperature of the reconstructed field."""
    rule_r, rule_z, rr, zz = _rule_grid(model)
    vals = (model.psi(rr.ravel(), zz.ravel()).T @ state).reshape(rr.shape) + model.lifting(rr, zz)
    return radial_mean(vals, rule_r, rule_z, model.alpha, model.geometry.r_in)


def frequency_response(model: StateSpaceModel, frequencies, output: int = 1, input: str = "q"):
    """Complex gain C (sE - A)^-1 B from ``input`` to output ``output`` (1..5)."""
    if input != "q":
        raise DomainError(f"only the heat-generation input is supported, got {input!r}")
    if not 1 <= output <= 5:
        raise DomainError(f"output index must be in 1..5, got {output}")
    c = model.C[output - 1]
    b = model.B[:, 0]
    freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
    out = np.empty(len(freqs), dtype=complex)
    for i, f in enumerate(freqs):
        s = 2j * np.pi * f
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu = sla.lu_factor(s * model.E - model.A, check_finite=True)
        except (ValueError, sla.LinAlgError) as exc:
            raise NumericError(f"sE - A cannot be factored at f={f} Hz") from exc
        if np.any(np.abs(np.diag(lu[0])) < 1e-13 * np.abs(model.A).max()):
            raise NumericError(f"sE - A is singular at f={f} Hz")
        out[i] = c @ sla.lu_solve(lu, b)
    return out


def biot_number(props, geometry, h: float) -> float:
    if h < 0:
        raise DomainError(f"h must be >= 0, got {h}")
    return h * (geometry.r_out - geometry.r_in) / props.k_r
