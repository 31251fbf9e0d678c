import numpy as np
import pytest

from wavetrain import (
    ConfigError,
    ParameterAbsent,
    evaluate_rhs,
    fixed_points,
    jacobian_at,
    make_preset,
    physical_fixed_point,
    spec_from_mapping,
)

PINNED_FP = {
    "A": (0.5454545454545454, 0.6666666666666666),
    "B": (1.0, 1.25),
    "C": (1.2727272727272727, 1.0909090909090909),
    "D": (1.5555555555555556, 2.2222222222222223),
    "E": (0.190364744651803, 0.6325017858139244),
}


def test_preset_defaults():
    a = make_preset("A")
    assert a.params.alpha == 1.5
    assert a.params.D2 == 2.1
    assert a.eps_tilde == 0.0
    b = make_preset("B")
    assert b.eps_tilde == b.params.eps == -3.0
    e = make_preset("E")
    assert e.params.delta == 0.6
    assert e.eps_tilde == 0.0


def test_absent_parameter_raises():
    e = make_preset("E")
    assert not e.params.has("eps")
    with pytest.raises(ParameterAbsent):
        e.params.eps
    c = make_preset("C")
    with pytest.raises(ParameterAbsent):
        c.params.gamma


def test_eps_tilde_override_rules():
    b = make_preset("B", {"eps_tilde": 0.5})
    assert b.eps_tilde == 0.5
    assert b.params.eps == -3.0  # eps itself untouched
    for sysid in ("A", "E"):
        with pytest.raises(ConfigError):
            make_preset(sysid, {"eps_tilde": 1.0})


def test_override_validation():
    with pytest.raises(ConfigError):
        make_preset("Z")
    with pytest.raises(ConfigError):
        make_preset("A", {"zeta": 1.0})
    with pytest.raises(ConfigError):
        make_preset("A", {"c": 1.0})  # c belongs to C/D only
    with pytest.raises(ConfigError):
        make_preset("A", {"alpha": 0.0})
    with pytest.raises(ConfigError):
        make_preset("B", {"k": 0.0})
    with pytest.raises(ConfigError):
        make_preset("B", {"alpha": "not a number"})


def test_mapping_roundtrip():
    for sysid in "ABCDE":
        spec = make_preset(sysid)
        again = spec_from_mapping(spec.to_mapping())
        assert again.system == spec.system
        assert again.eps_tilde == spec.eps_tilde
        assert again.params == spec.params
    spec = make_preset("B", {"eps_tilde": 0.25, "gamma": -1.0})
    again = spec_from_mapping(spec.to_mapping())
    assert again.eps_tilde == 0.25
    assert again.params.gamma == -1.0


def test_rhs_structure_at_fixed_point():
    """At an equilibrium with M=1, Q=0 only the derivative slots in the
    friction terms survive."""
    for sysid in "ABCDE":
        spec = make_preset(sysid)
        fp = physical_fixed_point(spec)
        v = 1.7
        rhs = evaluate_rhs(spec, v, (fp.N0, 1.0, fp.P0, 0.0))
        assert rhs[0] == 1.0
        assert rhs[1] == pytest.approx(-v / spec.params.D1, abs=1e-12)
        assert rhs[2] == 0.0
        assert rhs[3] == pytest.approx(0.0, abs=1e-12)


def test_fixed_points_pinned():
    for sysid, (n0, p0) in PINNED_FP.items():
        fp = physical_fixed_point(make_preset(sysid))
        assert fp is not None
        assert fp.N0 == pytest.approx(n0, abs=1e-12)
        assert fp.P0 == pytest.approx(p0, abs=1e-12)
        assert fp.M0 == 0.0 and fp.Q0 == 0.0
        assert fp.residual < 1e-12
        assert fp.physical


def test_fixed_points_sorted_and_flagged():
    spec = make_preset("A", {"beta": 2.75})  # flips N0 negative
    roots = fixed_points(spec)
    assert len(roots) == 1
    assert not roots[0].physical
    assert physical_fixed_point(spec) is None
    ns = [f.N0 for f in fixed_points(make_preset("E"))]
    assert ns == sorted(ns)


def test_linear_growth_reduces_to_constant_growth():
    """The N-proportional prey response shifts the effective quadratic
    coefficient: its fixed point must coincide with the constant-response
    system run at eps - k0."""
    rng = np.random.default_rng(11)
    done = 0
    while done < 20:
        vals = rng.uniform(-3.0, 3.0, 9)
        if np.min(np.abs(vals)) < 0.3:
            continue
        alpha, beta, eps, k, c, d, k0, D1, D2 = vals
        base = dict(alpha=alpha, beta=beta, eps=eps, k=k, c=c, d=d, k0=k0,
                    D1=D1, D2=D2)
        den_d = (eps - k0) * c + alpha * beta * k
        if abs(den_d) < 1e-3:
            continue
        fpd = fixed_points(make_preset("D", base))
        fpc = fixed_points(make_preset("C", dict(base, eps=eps - k0)))
        assert len(fpd) == len(fpc) == 1
        assert fpd[0].N0 == pytest.approx(fpc[0].N0, rel=1e-9)
        assert fpd[0].P0 == pytest.approx(fpc[0].P0, rel=1e-9)
        done += 1


def test_quintic_roots_backsubstitute():
    rng = np.random.default_rng(5)
    done = 0
    while done < 20:
        alpha, beta, gamma, delta, k = rng.uniform(-3.0, 3.0, 5)
        if min(abs(alpha), abs(beta), abs(gamma), abs(k)) < 0.3:
            continue
        spec = make_preset("E", dict(alpha=alpha, beta=beta, gamma=gamma,
                                     delta=delta, k=k))
        roots = fixed_points(spec)
        assert roots, "odd-degree polynomial must have a real root"
        for fp in roots:
            rhs = evaluate_rhs(spec, 0.7, fp.state())
            assert np.max(np.abs(rhs)) < 1e-8
        done += 1


def test_jacobian_matches_finite_differences():
    """The analytic Jacobian is valid at any (N, P), not only at
    equilibria, because M and Q never enter the partials being checked."""
    rng = np.random.default_rng(3)
    systems = "ABCDE"
    for trial in range(20):
        spec = make_preset(systems[trial % 5])
        v = rng.uniform(-3.0, 3.0)
        N = rng.uniform(0.2, 2.0)
        P = rng.uniform(0.2, 2.0)
        J = jacobian_at(spec, v, N, P)
        state = np.array([N, 0.3, P, -0.2])
        for col, comp in ((0, 0), (2, 2)):
            h = 1e-6 * max(1.0, abs(state[comp]))
            up = state.copy(); up[comp] += h
            dn = state.copy(); dn[comp] -= h
            fd = (evaluate_rhs(spec, v, up) - evaluate_rhs(spec, v, dn)) / (2 * h)
            assert np.allclose(J[:, col], fd, atol=1e-6, rtol=1e-6)
        # M and Q columns are exact by construction
        assert J[0, 1] == 1.0 and J[2, 3] == 1.0
        assert J[1, 1] == pytest.approx(-v / spec.params.D1)
        assert J[3, 3] == pytest.approx(-v / spec.params.D2)


def test_response_derivatives_match_fd():
    for sysid in "ABCDE":
        spec = make_preset(sysid)
        for x in np.linspace(0.1, 2.5, 10):
            h = 1e-7 * max(1.0, x)
            fd_f = (spec.F(x + h) - spec.F(x - h)) / (2 * h)
            fd_g = (spec.G(x + h) - spec.G(x - h)) / (2 * h)
            assert spec.F_prime(x) == pytest.approx(fd_f, abs=1e-6)
            assert spec.G_prime(x) == pytest.approx(fd_g, abs=1e-6)


def test_rhs_rejects_nonfinite():
    spec = make_preset("B")
    with pytest.raises(FloatingPointError):
        evaluate_rhs(spec, 1.0, (np.inf, 0.0, 1.0, 0.0))
