"""Command-line entry point: simulate, freqsweep, validate, export-model.

Exit codes: 0 success, 2 scenario/profile schema error, 3 numeric error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .assembly import assemble_2d, uniform_faces
from .dynamics import biot_number, frequency_response, reconstruct_field, simulate
from .errors import NumericError, ThermalModelError
from .reference_fd import fd_solve_transient
from .scenario import (
    OUTPUT_NAMES,
    ScenarioError,
    load_profile,
    load_scenario,
    parse_grid,
    resolve,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
OUTPUT_HEADER = "t_s,T1_degC,T2_degC,T3_degC,T4_degC,Tmean_degC"


def fmt(v) -> str:
    return f"{v:.9g}"


def write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


def _parse_list(text, cast=float):
    try:
        return [cast(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ScenarioError(f"cannot parse list {text!r}") from None


def _orders_to_n(orders):
    out = []
    for ns in orders:
        n = int(round(np.sqrt(ns)))
        if n < 1 or n * n != ns:
            raise ScenarioError(f"model order {ns} is not a square number of states")
        out.append(n)
    return out


def _load_inputs(args, need_profile=True):
    sc = load_scenario(args.scenario)
    if getattr(args, "dt", None):
        if not args.dt > 0:
            raise ScenarioError(f"--dt must be positive, got {args.dt}")
        sc = replace(sc, dt=args.dt)
    if getattr(args, "grid", None):
        sc = replace(sc, fd_grid=parse_grid(args.grid, "--grid"))
    profile = None
    if need_profile:
        ref = getattr(args, "profile", None) or sc.profile
        if ref is None:
            raise ScenarioError("no load profile: pass --profile or set [solver] profile")
        if not getattr(args, "profile", None) and sc.source is not None:
            local = sc.source.parent / ref
            ref = local if local.exists() else ref
        profile = load_profile(resolve(ref, ".profile"), sc.geometry)
    return sc, profile


def _plots_enabled(args):
    if args.no_plots:
        return False
    try:
        import matplotlib

        matplotlib.use("Agg")
        return True
    except ImportError:
        logger.warning("matplotlib not available; skipping plots")
        return False


def _plot_outputs(path, times, outputs, title):
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for name, row in zip(OUTPUT_NAMES, outputs):
        ax.plot(times, row, label=name)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("T [degC]")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _plot_field(path, r, z, T, title):
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4, 6))
    cs = ax.contourf(r * 1e3, z * 1e3, T, levels=20)
    fig.colorbar(cs, ax=ax, label="T [degC]")
    ax.set_xlabel("r [mm]")
    ax.set_ylabel("z [mm]")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _safe_plot(fn, *a):
    try:
        fn(*a)
    except Exception as exc:  # plotting never gates the numeric results
        logger.warning("plot %s failed: %s", a[0], exc)


def cmd_simulate(args) -> int:
    sc, profile = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model = assemble_2d(sc.geometry, sc.props, sc.faces, sc.n_r, sc.n_z)
    res = simulate(model, profile, sc.dt, sc.initial, keep_states=True)
    write_csv(out / "outputs.csv", OUTPUT_HEADER, (
        [t, *res.outputs[:, i]] for i, t in enumerate(res.times)
    ))
    plots = _plots_enabled(args)
    if plots:
        _safe_plot(_plot_outputs, out / "outputs.svg", res.times, res.outputs,
                   f"SG model, Ns={model.n_states}")
    if args.field_times:
        g = sc.geometry
        r = np.linspace(g.r_in, g.r_out, args.field_points)
        z = np.linspace(0.0, g.height, args.field_points)
        rr, zz = np.meshgrid(r, z, indexing="ij")
        pts = np.column_stack([rr.ravel(), zz.ravel()])
        for t in _parse_list(args.field_times):
            k = int(np.argmin(np.abs(res.times - t)))
            T = reconstruct_field(model, res.states[:, k], pts)
            tag = fmt(res.times[k])
            write_csv(out / f"field_t{tag}.csv", "r_m,z_m,T_degC", np.column_stack([pts, T]))
            if plots:
                _safe_plot(_plot_field, out / f"field_t{tag}.svg", rr, zz,
                           T.reshape(rr.shape), f"t = {tag} s")
    logger.info("wrote %s", out)
    return EXIT_OK


def cmd_freqsweep(args) -> int:
    sc, _ = _load_inputs(args, need_profile=False)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not (0 < args.f_min < args.f_max):
        raise ScenarioError(f"need 0 < f_min < f_max, got {args.f_min}, {args.f_max}")
    decades = np.log10(args.f_max / args.f_min)
    n_f = int(round(decades * args.points_per_decade)) + 1
    freqs = np.logspace(np.log10(args.f_min), np.log10(args.f_max), n_f)
    orders = _parse_list(args.orders, int)
    ns = _orders_to_n(orders)
    (n_base,) = _orders_to_n([args.baseline])

    if args.h_values:
        cases = [(h, uniform_faces(h, _common_ambient(sc))) for h in _parse_list(args.h_values)]
        header = "h_W_m2K,Bi,f_hz,order,mag_K_per_Wm3,relerr"
    else:
        cases = [(None, sc.faces)]
        header = "f_hz,order,mag_K_per_Wm3,relerr"
    rows = []
    for h, faces in cases:
        base = frequency_response(
            assemble_2d(sc.geometry, sc.props, faces, n_base, n_base), freqs, args.output
        )
        for order, n in zip(orders, ns):
            H = frequency_response(assemble_2d(sc.geometry, sc.props, faces, n, n), freqs, args.output)
            rel = np.abs(H - base) / np.abs(base)
            for f, mag, e in zip(freqs, np.abs(H), rel):
                prefix = [] if h is None else [h, biot_number(sc.props, sc.geometry, h)]
                rows.append([*prefix, f, str(order), mag, e])
    write_csv(out / "freqresp.csv", header, rows)
    if _plots_enabled(args):
        _safe_plot(_plot_freq, out / "freqresp.svg", header, rows)
    return EXIT_OK


def _common_ambient(sc):
    temps = {fc.T_inf for fc in sc.faces}
    return temps.pop() if len(temps) == 1 else float(np.mean([fc.T_inf for fc in sc.faces]))


def _plot_freq(path, header, rows):
    import matplotlib.pyplot as plt

    cols = header.split(",")
    data = {}
    for row in rows:
        rec = dict(zip(cols, row))
        key = (rec.get("h_W_m2K"), rec["order"])
        data.setdefault(key, []).append((rec["f_hz"], rec["mag_K_per_Wm3"], rec["relerr"]))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for (h, order), pts in data.items():
        f, mag, err = np.array(pts).T
        label = f"Ns={order}" + ("" if h is None else f", h={h:g}")
        ax1.loglog(f, mag, label=label)
        ax2.loglog(f, np.maximum(err, 1e-16), label=label)
    ax1.set_ylabel("|T1/q| [K m^3/W]")
    ax2.set_ylabel("relative error")
    ax2.set_xlabel("f [Hz]")
    ax1.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_validate(args) -> int:
    sc, profile = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    orders = _parse_list(args.orders, int)
    ns = _orders_to_n(orders)
    fd = fd_solve_transient(sc.geometry, sc.props, sc.faces, profile, sc.fd_grid, sc.dt, sc.initial)
    idx = [OUTPUT_NAMES.index(o) for o in sc.validate_outputs]
    rows, ok, worst = [], True, []
    for order, n in zip(orders, ns):
        model = assemble_2d(sc.geometry, sc.props, sc.faces, n, n)
        res = simulate(model, profile, sc.dt, sc.initial)
        err = res.outputs - fd.outputs
        for i, name in enumerate(OUTPUT_NAMES):
            checked = i in idx
            max_abs = float(np.max(np.abs(err[i])))
            rms = float(np.sqrt(np.mean(err[i] ** 2)))
            passed = max_abs <= sc.validate_max_abs if checked else True
            ok &= passed
            status = ("PASS" if passed else "FAIL") if checked else "info"
            rows.append([str(order), name, max_abs, rms, sc.validate_max_abs, status])
        worst.append(float(np.max(np.abs(err[idx]))))
    improves = all(b <= a for a, b in zip(worst, worst[1:]))
    ok &= improves
    rows.append(["all", "order_improves", worst[-1] - worst[0], float("nan"), 0.0,
                 "PASS" if improves else "FAIL"])
    write_csv(out / "validate.csv", "order,output,max_abs_degC,rms_degC,threshold_degC,status", rows)
    if _plots_enabled(args):
        _safe_plot(_plot_outputs, out / "validate_fd.svg", fd.times, fd.outputs, "FD reference")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_export_model(args) -> int:
    sc, _ = _load_inputs(args, need_profile=False)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n_r = args.n_r or sc.n_r
    n_z = args.n_z or sc.n_z
    m = assemble_2d(sc.geometry, sc.props, sc.faces, n_r, n_z)
    for name, mat in (("E", m.E), ("A", m.A), ("B", m.B), ("C", m.C), ("Te_out", m.Te_out[:, None])):
        with open(out / f"{name}.csv", "w", newline="\n") as fh:
            for row in np.atleast_2d(mat):
                fh.write(",".join(fmt(v) for v in row) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgthermal",
        description="Low-order spectral-Galerkin thermal model of a cylindrical cell",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, profile=True):
        p.add_argument("--scenario", required=True,
                       help="scenario file, or a bundled name (case1, case2, adiabatic)")
        if profile:
            p.add_argument("--profile", help="load profile CSV (default: scenario's [solver] profile)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--no-plots", action="store_true", help="skip SVG plots")

    p = sub.add_parser("simulate", help="time-domain simulation of the SG model")
    common(p)
    p.add_argument("--dt", type=float, help="time step [s] (default: scenario dt_s)")
    p.add_argument("--field-times", help="comma-separated times [s] for field snapshots")
    p.add_argument("--field-points", type=int, default=21, help="field grid points per direction")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("freqsweep", help="frequency response T_out/q for several model orders")
    common(p, profile=False)
    p.add_argument("--orders", default="1,4,9,25", help="model orders Ns (square numbers)")
    p.add_argument("--baseline", type=int, default=225, help="reference order Ns")
    p.add_argument("--f-min", type=float, default=1e-4)
    p.add_argument("--f-max", type=float, default=1.0)
    p.add_argument("--points-per-decade", type=int, default=10)
    p.add_argument("--output", type=int, default=1, help="output index 1..5 (default T1)")
    p.add_argument("--h-values", help="sweep a common h [W/m^2K] over all but the inner face")
    p.set_defaults(func=cmd_freqsweep)

    p = sub.add_parser("validate", help="compare SG models against the finite-difference oracle")
    common(p)
    p.add_argument("--orders", default="4,9", help="model orders Ns (square numbers)")
    p.add_argument("--dt", type=float, help="time step [s]")
    p.add_argument("--grid", help="finite-difference grid, e.g. 141x71")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export-model", help="write E, A, B, C and Te_out as CSV matrices")
    common(p, profile=False)
    p.add_argument("--n-r", type=int, help="radial basis count (default: scenario)")
    p.add_argument("--n-z", type=int, help="axial basis count (default: scenario)")
    p.set_defaults(func=cmd_export_model)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ThermalModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
