"""Catalog entries: frozen values, defining-identity residuals, parameters."""
import math

import numpy as np
import pytest

import extkit as ek
import extkit.catalog as cat
from extkit.poisson import apply_xl, base_flow, jacobi_residual

SEEDED = ["quartic1", "quartic2a", "quartic2b", "square_polar",
          "vortex_equal", "vortex_opposite"]


def test_entry_listing_stable():
    assert ek.entry_ids() == SEEDED + ["lotka_volterra", "euler_top"]


def test_quartic1_level_frozen():
    # defaults C1=1, C2=0, C3=0, c=c0=1, f=0 at (q,p)=(1,1):
    # bracket = 16 + 2 = 18, L = 18^2/256 - 1 = 17/64
    b = ek.instantiate("quartic1")
    assert b.system.hamiltonian.value(np.array([1.0, 1.0])) == 17.0 / 64.0
    assert b.seed.field.value(np.array([1.0, 1.0])) == 1.0


def test_quartic2a_level_frozen():
    # defaults C3=1: f(1) = 1/16 - 1/2 = -7/16,
    # L = 1 - 7/16 + 49/1024 - 1 = -399/1024
    b = ek.instantiate("quartic2a")
    got = b.system.hamiltonian.value(np.array([1.0, 1.0]))
    assert abs(got - (-399.0 / 1024.0)) < 1e-15
    assert b.seed.field.value(np.array([1.0, 1.0])) == 1.0


@pytest.mark.parametrize("key", SEEDED)
def test_seeded_entries_satisfy_identity(key):
    b = ek.instantiate(key)
    sd = b.seed
    c, c0 = sd.meta["pair"]
    spec = ek.SampleSpec(intervals=ek.get_entry(key).default_box,
                         count=40, seed=501, margin=0.15)
    rep = ek.pde_residual(b.system, sd.field, c, c0, spec, singular=b.singular)
    assert len(rep.residuals) == 40
    assert rep.max_residual <= 1e-7, (key, rep.max_residual)


def test_quartic2b_build_gate_reported():
    b = ek.instantiate("quartic2b")
    assert b.seed.verified is True


def test_vortex_equal_radius_identity():
    # Q1 = k^2 exp(-L / (alpha k^2)), a direct consequence of the level form
    b = ek.instantiate("vortex_equal")
    pars = b.params
    k, al = pars["k"], pars["alpha"]
    rng = np.random.default_rng(88)
    for _ in range(50):
        x = np.array([rng.uniform(0.2, 1.5), rng.uniform(-1, 1),
                      rng.uniform(0.2, 1.5), rng.uniform(-1, 1)])
        q1 = 4 * k * k * x[0] ** 2 + x[2] ** 2
        lv = b.system.hamiltonian.value(x)
        assert abs(q1 - k * k * math.exp(-lv / (al * k * k))) <= 1e-12 * q1


def test_vortex_opposite_radius_identity():
    b = ek.instantiate("vortex_opposite")
    pars = b.params
    k, al = pars["k"], pars["alpha"]
    rng = np.random.default_rng(89)
    for _ in range(50):
        x = np.array([rng.uniform(0.2, 1.5), rng.uniform(-1, 1),
                      rng.uniform(-1, 1), rng.uniform(0.3, 1.5)])
        q2 = 4 * k * k * x[0] ** 2 + x[3] ** 2
        lv = b.system.hamiltonian.value(x)
        assert abs(q2 - k * k * math.exp(lv / (al * k * k))) <= 1e-12 * q2


def test_vortex_conserved_coordinates():
    # X1t and Y2t generate the opposite-pair translation symmetries
    b = ek.instantiate("vortex_opposite")
    x1 = b.system.observables["X1t"]
    y2 = b.system.observables["Y2t"]
    rng = np.random.default_rng(90)
    for _ in range(20):
        x = np.array([rng.uniform(0.2, 1.5), rng.uniform(-1, 1),
                      rng.uniform(-1, 1), rng.uniform(0.3, 1.5)])
        assert abs(apply_xl(b.system, x1, x)) <= 1e-12
        assert abs(apply_xl(b.system, y2, x)) <= 1e-12


def test_lotka_volterra_flow_is_classic():
    b = ek.instantiate("lotka_volterra", {"a": 2.0, "b": 0.5, "d": 0.3, "g": 1.2})
    rhs = base_flow(b.system)
    x = np.array([1.3, 0.7])
    expect = [2.0 * 1.3 - 0.5 * 1.3 * 0.7, 0.3 * 1.3 * 0.7 - 1.2 * 0.7]
    np.testing.assert_allclose(rhs(x), expect, rtol=1e-12)


def test_lotka_volterra_exposes_no_seed():
    b = ek.instantiate("lotka_volterra")
    assert b.seeds == []
    with pytest.raises(ek.CatalogError):
        _ = b.seed


def test_euler_flow_is_rigid_body():
    b = ek.instantiate("euler_top")
    rhs = base_flow(b.system)
    m = np.array([0.4, -0.7, 1.1])
    om = m / np.array([3.0, 2.0, 1.0])
    np.testing.assert_allclose(rhs(m), np.cross(m, om), rtol=1e-12, atol=1e-14)


def test_euler_casimir_and_level_invariant():
    b = ek.instantiate("euler_top")
    mfun = b.system.observables["M"]
    rng = np.random.default_rng(91)
    for _ in range(20):
        x = rng.uniform(-1.5, 1.5, 3)
        assert abs(apply_xl(b.system, mfun, x)) <= 1e-12
        assert abs(apply_xl(b.system, b.system.hamiltonian, x)) <= 1e-12


def test_nonconstant_bivectors_satisfy_jacobi():
    blv = ek.instantiate("lotka_volterra")
    be = ek.instantiate("euler_top")
    rng = np.random.default_rng(92)
    for _ in range(10):
        assert jacobi_residual(blv.system.structure,
                               rng.uniform(0.3, 3.0, 2)) <= 1e-9
        assert jacobi_residual(be.system.structure,
                               rng.uniform(-1.5, 1.5, 3)) <= 1e-9


def test_euler_local_seed_domain_guard():
    b = ek.instantiate("euler_top")
    field = b.meta["local_seed_builder"](0.0, -0.5, branch=1)
    # m2 = m3 = 0 puts the level pair on the boundary
    with pytest.raises(ek.SingularPointError):
        field.value(np.array([0.5, 0.0, 0.0]))
    v = field.value(np.array([0.2, 0.8, 0.6]))
    assert np.isfinite(v) and v != 0.0


def test_function_registry_poly_ascending():
    f = cat.build_function({"kind": "poly", "coeffs": [2.0, -1.0, 0.5]})
    assert f(0.0) == 2.0
    assert f(2.0) == 2.0 - 2.0 + 0.5 * 4.0


def test_function_registry_trig():
    f = cat.build_function({"kind": "sin", "amplitude": 2.0,
                            "frequency": 3.0, "phase": 0.5})
    assert abs(f(0.2) - 2.0 * math.sin(0.2 * 3.0 + 0.5)) < 1e-15


def test_function_registry_rejects_unknown_kind():
    with pytest.raises(ek.CatalogError):
        cat.build_function({"kind": "spline", "coeffs": [1.0]})


def test_function_registry_rejects_stray_keys():
    with pytest.raises(ek.CatalogError):
        cat.build_function({"kind": "const", "value": 1.0, "slope": 2.0})


def test_unknown_entry_rejected():
    with pytest.raises(ek.CatalogError, match="no_such"):
        ek.instantiate("no_such")


def test_unknown_parameter_names_entry():
    with pytest.raises(ek.CatalogError, match="quartic1"):
        ek.instantiate("quartic1", {"C9": 1.0})


def test_parameter_check_message_names_parameter():
    with pytest.raises(ek.CatalogError, match="C1"):
        ek.instantiate("quartic1", {"C1": 0.0})


def test_null_vortex_seed_rejected():
    with pytest.raises(ek.CatalogError):
        ek.instantiate("vortex_equal", {"F1": 0.0, "F2": 0.0})


def test_quartic2a_pole_predicate():
    b = ek.instantiate("quartic2a", {"C1": 1.0, "C2": -1.0})
    assert b.singular(np.array([1.0, 0.3]), 0.05)
    assert not b.singular(np.array([2.0, 0.3]), 0.05)


def test_square_polar_identity_with_trig_profile():
    # swap in a bounded profile for the free function and re-gate
    b = ek.instantiate("square_polar",
                       {"F": {"kind": "cos", "amplitude": 0.7, "frequency": 1.3}})
    sd = b.seed
    c, c0 = sd.meta["pair"]
    spec = ek.SampleSpec(intervals=ek.get_entry("square_polar").default_box,
                         count=30, seed=74, margin=0.15)
    rep = ek.pde_residual(b.system, sd.field, c, c0, spec, singular=b.singular)
    assert rep.max_residual <= 1e-7


def test_quartic1_identity_with_poly_profile():
    b = ek.instantiate("quartic1", {"f": {"kind": "poly", "coeffs": [0.3, -0.2, 0.1]}})
    sd = b.seed
    c, c0 = sd.meta["pair"]
    spec = ek.SampleSpec(intervals=ek.get_entry("quartic1").default_box,
                         count=30, seed=75, margin=0.1)
    rep = ek.pde_residual(b.system, sd.field, c, c0, spec, singular=b.singular)
    assert rep.max_residual <= 1e-7
