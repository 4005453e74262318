"""Sampling, integrators, drift reports, finite-difference brackets."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import extkit as ek
from extkit.verify import RejectionError


def harmonic_rhs(y):
    return np.array([y[1], -y[0]])


def test_sampling_is_deterministic():
    spec = ek.SampleSpec(intervals=((0.0, 1.0), (-2.0, 2.0)), count=25, seed=5)
    a = ek.sample_points(spec, None)
    b = ek.sample_points(spec, None)
    assert len(a) == 25
    np.testing.assert_array_equal(np.array(a), np.array(b))


def test_sampling_respects_margin_predicate():
    spec = ek.SampleSpec(intervals=((-1.0, 1.0),), count=40, seed=6, margin=0.2)
    pts = ek.sample_points(spec, lambda x, m: abs(x[0]) <= m)
    assert all(abs(p[0]) > 0.2 for p in pts)


def test_sampling_gives_up_on_empty_region():
    spec = ek.SampleSpec(intervals=((0.0, 1.0),), count=10, seed=7)
    with pytest.raises(RejectionError):
        ek.sample_points(spec, lambda x, m: True)


def test_rk4_order_on_harmonic_oscillator():
    y0 = np.array([1.0, 0.0])
    errs = []
    for dt in (2e-2, 1e-2):
        traj = ek.integrate(harmonic_rhs, y0, 2.0, method="rk4", dt=dt)
        exact = np.array([math.cos(2.0), -math.sin(2.0)])
        errs.append(float(np.max(np.abs(traj.states[-1] - exact))))
    ratio = errs[0] / errs[1]
    assert 12.0 <= ratio <= 20.0  # fourth order halving


def test_rk4_final_time_hit_exactly():
    traj = ek.integrate(harmonic_rhs, np.array([1.0, 0.0]), 1.0005, dt=1e-3)
    assert abs(traj.times[-1] - 1.0005) < 1e-12


def test_rkf45_adapts_and_meets_tolerance():
    y0 = np.array([1.0, 0.0])
    traj = ek.integrate(harmonic_rhs, y0, 6.0, method="rkf45", tol=1e-10)
    exact = np.array([math.cos(6.0), -math.sin(6.0)])
    assert float(np.max(np.abs(traj.states[-1] - exact))) < 1e-7
    steps = np.diff(traj.times)
    assert steps.min() > 0
    assert steps.max() / steps.min() > 1.0 + 1e-9  # dt actually adapted


def test_trajectory_truncates_on_singularity():
    def rhs(y):
        if y[0] >= 0.5:
            raise ek.EvaluationError("left the chart")
        return np.array([1.0])

    traj = ek.integrate(rhs, np.array([0.0]), 10.0, dt=1e-2)
    assert traj.truncated
    assert "left the chart" in traj.reason
    assert traj.times[-1] < 10.0


def test_conservation_report_drift_formula():
    from extkit.verify import Trajectory

    times = np.linspace(0.0, 1.0, 11)
    states = np.stack([np.linspace(2.0, 2.2, 11), np.zeros(11)], axis=1)
    traj = Trajectory(times, states, "rk4", False, "", {})
    rep = ek.conservation_report(traj, {"A": lambda y: float(y[0])}, stride=1)
    assert abs(rep.drifts["A"] - 0.2 / 2.0) < 1e-14


def test_conservation_report_stride_includes_endpoint():
    times = np.linspace(0.0, 1.0, 11)
    states = np.stack([np.linspace(0.0, 1.0, 11), np.zeros(11)], axis=1)
    from extkit.verify import Trajectory
    traj = Trajectory(times, states, "rk4", False, "", {})
    rep = ek.conservation_report(traj, {"A": lambda y: float(y[0])}, stride=4)
    assert rep.times[-1] == 1.0


def test_fd_bracket_canonical_pair():
    st_ = ek.canonical_structure(2)
    f = lambda y: float(y[0])
    g = lambda y: float(y[1])
    val = ek.fd_bracket(st_, f, g, np.array([0.4, -1.1]))
    assert abs(val - 1.0) < 1e-9


def test_fd_bracket_normalized_scale_invariance():
    st_ = ek.canonical_structure(2)
    f = lambda y: 1000.0 * y[0] * y[1]
    g = lambda y: 1e-3 * (y[0] ** 2 - y[1] ** 2)
    x = np.array([0.8, 0.6])
    raw = ek.fd_bracket_normalized(st_, f, g, x)
    scaled = ek.fd_bracket_normalized(st_, lambda y: 7.0 * f(y), g, x)
    assert abs(raw - scaled) <= 1e-6 * max(raw, scaled)


def test_independence_rank_detects_dependence():
    states = [np.array([0.3, 1.2]), np.array([-0.7, 0.4]), np.array([1.1, -0.9])]
    f1 = lambda y: float(y[0])
    f2 = lambda y: float(y[1])
    f3 = lambda y: 2.0 * y[0] - 3.0 * y[1]
    assert ek.independence_rank([f1, f2], states) == 2
    assert ek.independence_rank([f1, f2, f3], states) == 2


def test_independence_rank_complex_gradients():
    states = [np.array([0.4, 0.9]), np.array([1.3, -0.2])]
    f1 = lambda y: complex(y[0], y[1])
    f2 = lambda y: float(y[0] + y[1])
    # real and imaginary parts of f1 already span the plane
    assert ek.independence_rank([f1, f2], states) == 2


def test_recursion_sweep_shape():
    res = ek.recursion_closed_sweep(4, 20, 5, 123)
    assert set(res["per_n"]) == {1, 2, 3, 4}
    assert res["max_rel"] <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.3, max_value=2.0),
       st.floats(min_value=-1.5, max_value=1.5))
def test_rk4_energy_drift_small_property(q0, p0):
    y0 = np.array([q0, p0])
    traj = ek.integrate(harmonic_rhs, y0, 1.0, dt=5e-3)
    e = 0.5 * (traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2)
    assert np.max(np.abs(e - e[0])) <= 1e-9 * max(1.0, e[0])
