import numpy as np
import pytest

from sgthermal.assembly import CASE2_FACES, Face, FaceCondition, uniform_faces
from sgthermal.dynamics import LoadProfile
from sgthermal.errors import DomainError, NumericError
from sgthermal.reference_fd import boundary_heat_loss, fd_solve_steady, fd_solve_transient

RADIAL_ONLY = (
    FaceCondition(Face.RADIAL_INNER, 0.0, 18.0),
    FaceCondition(Face.RADIAL_OUTER, 100.0, 18.0),
    FaceCondition(Face.AXIAL_LOW, 0.0, 18.0),
    FaceCondition(Face.AXIAL_HIGH, 0.0, 18.0),
)


def radial_surface_temperature(g, q, h=100.0, T_inf=18.0):
    return T_inf + q * (g.r_out**2 - g.r_in**2) / (2 * h * g.r_out)


def radial_core_temperature(g, props, q):
    k = props.k_r
    Ts = radial_surface_temperature(g, q)
    return Ts + q / (4 * k) * (g.r_out**2 - g.r_in**2) - q * g.r_in**2 / (2 * k) * np.log(g.r_out / g.r_in)


def test_adiabatic_lumped_rise(geometry, props):
    res = fd_solve_transient(geometry, props, uniform_faces(0.0, 18.0), LoadProfile.constant(1e5, 100), (41, 21))
    np.testing.assert_allclose(res.outputs[:, -1], 18.0 + 1e7 / (2118 * 765), rtol=1e-8)


def test_radial_steady_surface(geometry, props):
    q = 5e4
    fd = fd_solve_steady(geometry, props, RADIAL_ONLY, q, (161, 81))
    Ts = radial_surface_temperature(geometry, q)
    np.testing.assert_allclose(fd.T[-1, :], Ts, rtol=1e-3)


def test_radial_transient_reaches_analytic_profile(geometry, props):
    q = 5e4
    res = fd_solve_transient(
        geometry, props, RADIAL_ONLY, LoadProfile.constant(q, 6e5), (41, 5), dt=2000.0
    )
    assert res.outputs[2, -1] == pytest.approx(radial_surface_temperature(geometry, q), rel=1e-3)


def test_second_order_convergence(geometry, props):
    q = 5e4
    exact = radial_core_temperature(geometry, props, q)
    errs = [abs(fd_solve_steady(geometry, props, RADIAL_ONLY, q, (n, 5)).T[0, 2] - exact)
            for n in (21, 41, 81)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(3.5 <= r <= 4.5 for r in ratios), ratios


def test_uniform_ambient_is_exact(geometry, props):
    fd = fd_solve_steady(geometry, props, uniform_faces(25.0, 21.0, h_inner=5.0), 0.0, (31, 17))
    np.testing.assert_allclose(fd.T, 21.0, atol=1e-9)


def test_case2_coldest_at_cooled_end(geometry, props):
    fd = fd_solve_steady(geometry, props, CASE2_FACES, 5e4, (41, 41))
    i, j = np.unravel_index(np.argmin(fd.T), fd.T.shape)
    assert j == 0
    assert fd.T[:, 0].max() < fd.T[:, -1].min()


def test_steady_energy_balance(geometry, props):
    q = 5e4
    fd = fd_solve_steady(geometry, props, CASE2_FACES, q)
    assert boundary_heat_loss(geometry, props, CASE2_FACES, fd) == pytest.approx(q * geometry.volume, rel=5e-3)


def test_maximum_principle(geometry, props):
    fd = fd_solve_steady(geometry, props, CASE2_FACES, 0.0, (41, 41))
    assert fd.T.min() >= 3.0 - 1e-9 and fd.T.max() <= 18.0 + 1e-9


def test_time_step_refinement(geometry, props):
    prof = LoadProfile.pulse_train(2e5, 30, 90, 2, tail=120)
    a = fd_solve_transient(geometry, props, CASE2_FACES, prof, (41, 21), T_init="equilibrium")
    b = fd_solve_transient(geometry, props, CASE2_FACES, prof, (41, 21), T_init="equilibrium", substeps=8)
    assert np.abs(a.outputs - b.outputs).max() < 0.02


def test_snapshots_and_interpolation(geometry, props):
    prof = LoadProfile.constant(1e5, 20)
    res = fd_solve_transient(geometry, props, CASE2_FACES, prof, (21, 11), snapshot_times=[0, 10])
    assert sorted(res.fields) == [0.0, 10.0]
    snap = res.fields[10.0]
    assert snap.interpolate(snap.r[3], snap.z[4])[0] == pytest.approx(snap.T[3, 4])


def test_invalid_inputs(geometry, props):
    with pytest.raises(DomainError):
        fd_solve_steady(geometry, props, CASE2_FACES, 0.0, (2, 10))
    with pytest.raises(NumericError):
        fd_solve_steady(geometry, props, uniform_faces(0.0, 18.0), 1e4, (11, 11))
    with pytest.raises(DomainError):
        fd_solve_transient(geometry, props, CASE2_FACES, LoadProfile.constant(0, 5), dt=-1)
