"""Scenario files (INI) and load-profile files (CSV).

A scenario file has the sections ``[geometry]``, ``[props]``, one
``[face.<name>]`` per face (radial_inner, radial_outer, axial_low,
axial_high), ``[solver]`` and optionally ``[validate]``::

    [geometry]
    r_in_m = 0.004
    r_out_m = 0.032
    height_m = 0.198

    [props]
    rho_kg_m3 = 2118
    cp_J_kgK = 765
    k_r_W_mK = 0.66
    k_z_W_mK = 66

    [face.radial_outer]
    h_W_m2K = 100
    T_inf_degC = 18
    ...

    [solver]
    n_r = 2
    n_z = 2
    dt_s = 1
    initial = 18           ; degC, or "equilibrium"
    profile = pulse.profile

Temperatures are in degC throughout. Profiles are CSV with header
``t_s,q_W_per_m3`` (volumetric heat generation) or ``t_s,P_W`` (total cell
power, converted with the cell volume). Each row starts a piecewise-constant
segment; the last row marks the end of the profile and its value is unused.
"""

from __future__ import annotations

import configparser
import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .assembly import (
    REFERENCE_GEOMETRY,
    REFERENCE_PROPS,
    CASE1_FACES,
    CellGeometry,
    Face,
    FaceCondition,
    ThermalProps,
    power_to_volumetric,
)
from .dynamics import DEFAULT_DT, LoadProfile
from .errors import DomainError, ThermalModelError

OUTPUT_NAMES = ("T1", "T2", "T3", "T4", "Tmean")


class ScenarioError(ThermalModelError, ValueError):
    """A scenario or profile file does not match its schema."""


@dataclass(frozen=True)
class Scenario:
    geometry: CellGeometry = REFERENCE_GEOMETRY
    props: ThermalProps = REFERENCE_PROPS
    faces: tuple = CASE1_FACES
    n_r: int = 2
    n_z: int = 2
    dt: float = DEFAULT_DT
    initial: float | str = 18.0
    profile: str | None = None
    fd_grid: tuple = (141, 71)
    validate_outputs: tuple = ("T1", "T2", "T3", "T4")
    validate_max_abs: float = 0.5
    source: Path | None = field(default=None, compare=False)


def _number(cp, section, key, cast=float, default=None):
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise ScenarioError(f"[{section}] {key}: missing required field")
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except ValueError:
        raise ScenarioError(f"[{section}] {key}: cannot read {raw!r} as {cast.__name__}") from None


def parse_grid(text, where):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ScenarioError(f"{where}: grid must look like 141x71, got {text!r}") from None


def parse_scenario(text: str, source: Path | None = None) -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=str(source or "<scenario>"))
    except configparser.Error as exc:
        raise ScenarioError(str(exc)) from None

    known = {"geometry", "props", "solver", "validate"} | {f"face.{f.value}" for f in Face}
    unknown = [s for s in cp.sections() if s not in known]
    if unknown:
        raise ScenarioError(f"unknown section(s): {', '.join(unknown)}")

    d = Scenario()
    try:
        geometry = d.geometry
        if cp.has_section("geometry"):
            geometry = CellGeometry(
                _number(cp, "geometry", "r_in_m", default=d.geometry.r_in),
                _number(cp, "geometry", "r_out_m", default=d.geometry.r_out),
                _number(cp, "geometry", "height_m", default=d.geometry.height),
            )
        props = d.props
        if cp.has_section("props"):
            props = ThermalProps(
                _number(cp, "props", "rho_kg_m3", default=d.props.rho),
                _number(cp, "props", "cp_J_kgK", default=d.props.cp),
                _number(cp, "props", "k_r_W_mK", default=d.props.k_r),
                _number(cp, "props", "k_z_W_mK", default=d.props.k_z),
            )
        defaults = {fc.face: fc for fc in d.faces}
        faces = []
        for face in Face:
            sec = f"face.{face.value}"
            if cp.has_section(sec):
                faces.append(
                    FaceCondition(
                        face,
                        _number(cp, sec, "h_W_m2K", default=defaults[face].h),
                        _number(cp, sec, "T_inf_degC", default=defaults[face].T_inf),
                    )
                )
            else:
                faces.append(defaults[face])
    except DomainError as exc:
        raise ScenarioError(str(exc)) from None

    s = cp["solver"] if cp.has_section("solver") else {}
    n_r = _number(cp, "solver", "n_r", int, d.n_r) if s else d.n_r
    n_z = _number(cp, "solver", "n_z", int, d.n_z) if s else d.n_z
    dt = _number(cp, "solver", "dt_s", float, d.dt) if s else d.dt
    if n_r < 1 or n_z < 1:
        raise ScenarioError(f"[solver] n_r/n_z must be >= 1, got {n_r}/{n_z}")
    if not dt > 0:
        raise ScenarioError(f"[solver] dt_s must be positive, got {dt}")
    initial = s.get("initial", str(d.initial)).strip() if s else d.initial
    if isinstance(initial, str):
        if initial != "equilibrium":
            try:
                initial = float(initial)
            except ValueError:
                raise ScenarioError(
                    f"[solver] initial: expected degC or 'equilibrium', got {initial!r}"
                ) from None
    profile = s.get("profile", None) if s else None
    grid = parse_grid(s["fd_grid"], "[solver] fd_grid") if s and "fd_grid" in s else d.fd_grid
    if min(grid) < 3:
        raise ScenarioError(f"[solver] fd_grid needs at least 3x3 nodes, got {grid}")

    v_out, v_tol = d.validate_outputs, d.validate_max_abs
    if cp.has_section("validate"):
        v = cp["validate"]
        if "outputs" in v:
            v_out = tuple(x.strip() for x in v["outputs"].split(",") if x.strip())
            bad = [x for x in v_out if x not in OUTPUT_NAMES]
            if bad or not v_out:
                raise ScenarioError(f"[validate] outputs: unknown names {bad}")
        v_tol = _number(cp, "validate", "max_abs_degC", float, d.validate_max_abs)

    return Scenario(
        geometry=geometry,
        props=props,
        faces=tuple(faces),
        n_r=n_r,
        n_z=n_z,
        dt=dt,
        initial=initial,
        profile=profile,
        fd_grid=grid,
        validate_outputs=v_out,
        validate_max_abs=v_tol,
        source=source,
    )


def dump_scenario(sc: Scenario) -> str:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    g, p = sc.geometry, sc.props
    cp["geometry"] = {"r_in_m": repr(g.r_in), "r_out_m": repr(g.r_out), "height_m": repr(g.height)}
    cp["props"] = {
        "rho_kg_m3": repr(p.rho),
        "cp_J_kgK": repr(p.cp),
        "k_r_W_mK": repr(p.k_r),
        "k_z_W_mK": repr(p.k_z),
    }
    for fc in sc.faces:
        cp[f"face.{fc.face.value}"] = {"h_W_m2K": repr(fc.h), "T_inf_degC": repr(fc.T_inf)}
    solver = {
        "n_r": str(sc.n_r),
        "n_z": str(sc.n_z),
        "dt_s": repr(sc.dt),
        "initial": sc.initial if isinstance(sc.initial, str) else repr(sc.initial),
        "fd_grid": f"{sc.fd_grid[0]}x{sc.fd_grid[1]}",
    }
    if sc.profile:
        solver["profile"] = sc.profile
    cp["solver"] = solver
    cp["validate"] = {
        "outputs": ",".join(sc.validate_outputs),
        "max_abs_degC": repr(sc.validate_max_abs),
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("sgthermal") / "data" / name))


def resolve(path_or_name, suffix: str) -> Path:
    """A file path, or the name of a bundled file with or without its suffix."""
    p = Path(path_or_name)
    if p.exists():
        return p
    for cand in (str(path_or_name), f"{path_or_name}{suffix}"):
        b = bundled_path(cand)
        if b.exists():
            return b
    raise ScenarioError(f"file not found: {path_or_name}")


def load_scenario(path) -> Scenario:
    p = resolve(path, ".scenario")
    return parse_scenario(p.read_text(), source=p)


def parse_profile(text: str, geometry: CellGeometry, where: str = "<profile>") -> LoadProfile:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise ScenarioError(f"{where}: empty profile")
    header = [h.strip() for h in rows[0]]
    if header not in (["t_s", "q_W_per_m3"], ["t_s", "P_W"]):
        raise ScenarioError(
            f"{where}: line 1: header must be 't_s,q_W_per_m3' or 't_s,P_W', got {','.join(header)}"
        )
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ScenarioError(f"{where}: line {lineno}: expected 2 columns, got {len(row)}")
        try:
            t, v = float(row[0]), float(row[1])
        except ValueError:
            raise ScenarioError(f"{where}: line {lineno}: non-numeric value in {row}") from None
        times.append(t)
        values.append(v)
    if len(times) < 2:
        raise ScenarioError(f"{where}: need at least one segment and an end row")
    if header[1] == "P_W":
        values = [power_to_volumetric(v, geometry) for v in values]
    try:
        return LoadProfile(tuple(times[:-1]), tuple(values[:-1]), times[-1])
    except DomainError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def load_profile(path, geometry: CellGeometry) -> LoadProfile:
    p = resolve(path, ".profile")
    return parse_profile(p.read_text(), geometry, where=str(p))
