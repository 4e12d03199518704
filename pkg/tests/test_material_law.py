import math

import numpy as np
import pytest

from evokit.errors import (
    DivergenceError,
    ProjectorInvalidError,
    ShapeMismatchError,
    SpdViolationError,
)
from evokit.material_law import (
    Const,
    ExpDelay,
    KernelHat,
    MaterialLaw,
    Product,
    ScalarPower,
    Sum,
    build_delay,
    build_fractional,
    build_heat,
    build_kelvin_voigt,
    build_maxwell,
    certify_neumann,
    check_fractional_conditions,
    check_integro_kernel,
    check_positivity,
    check_stability,
    constant_law,
    disc_samples,
    law_from_dict,
    load_law,
    save_law,
    zero_order_law,
)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_eval_heat_law():
    law = build_heat(2.0)
    m = law.eval(0.5)
    assert np.allclose(m, [[1.0, 0.0], [0.0, 0.25]], atol=1e-15)


def test_exp_delay_node():
    law = MaterialLaw(ExpDelay(-1.0), r=1.0, dim=1)
    assert law.eval(1.0)[0, 0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_kelvin_voigt_scalar_value():
    # z (1 + z C/D)^-1 / D at z=0.1, C=1, D=2:
    # 0.1 * (1.05)^-1 * 0.5 = 1/21
    law = build_kelvin_voigt(1.0, 2.0)
    m = law.eval(0.1)
    assert m[0, 0] == pytest.approx(1.0, abs=1e-13)
    assert m[1, 1] == pytest.approx(1.0 / 21.0, abs=1e-12)
    # cross-check against an explicitly truncated Neumann sum
    z, c_over_d, dinv = 0.1, 0.5, 0.5
    series = sum((-1.0) ** k * z ** (k + 1) * c_over_d ** k * dinv
                 for k in range(60))
    assert m[1, 1] == pytest.approx(series, abs=1e-13)


def test_eval_vectorized_matches_scalar():
    law = build_heat(3.0)
    zs = np.array([0.1 + 0.2j, 0.5, 1.0 - 0.3j])
    batch = law.eval(zs)
    for k, z in enumerate(zs):
        assert np.allclose(batch[k], law.eval(z), atol=1e-14)


def test_neumann_inverse_matches_direct_solve(rng):
    # remainder bound q^(J+1)/(1-q): compare against a dense linear solve
    e_mat = 0.2 * rng.standard_normal((3, 3))
    child = Product((ScalarPower(1.0), Const(e_mat)))
    inv = certify_neumann(child, r=0.5, dim=3)
    assert inv.bound < 1.0
    law = MaterialLaw(inv, r=0.5, dim=3)
    for _ in range(10):
        z = 0.5 + 0.45 * (rng.random() + 1j * (rng.random() - 0.5))
        got = law.eval(z)
        direct = np.linalg.inv(np.eye(3) + z * e_mat)
        assert np.max(np.abs(got - direct)) < 1e-12


def test_neumann_certification_rejects_expansive():
    child = Product((ScalarPower(1.0), Const(np.eye(2))))
    with pytest.raises(DivergenceError):
        certify_neumann(child, r=1.0, dim=2)  # sup |z| = 2 >= 1


def test_holomorphy_cauchy_riemann():
    # finite-difference d/d(conj z) residual at interior points
    law = build_kelvin_voigt(1.0, 2.0) + build_delay(-0.5, [[0, 0], [0, 1]],
                                                     r=0.2)
    h = 1e-6
    for z in (0.2 + 0.05j, 0.3 - 0.1j, 0.15):
        dx = (law.eval(z + h) - law.eval(z - h)) / (2 * h)
        dy = (law.eval(z + 1j * h) - law.eval(z - 1j * h)) / (2 * h)
        residual = 0.5 * (dx + 1j * dy)
        assert np.max(np.abs(residual)) < 1e-6


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------

def test_positivity_heat_half():
    # Re z^-1 >= 1/(2r) on B(r,r) and 1/kappa = 0.5
    rep = check_positivity(build_heat(2.0), r=1.0)
    assert rep.passed
    assert rep.c_est == pytest.approx(0.5, abs=0.05)


def test_positivity_identity_law():
    rep = check_positivity(constant_law(np.eye(2)), r=2.0)
    assert rep.c_est == pytest.approx(1.0 / 4.0, abs=0.01)


def test_positivity_pure_z_law():
    law = MaterialLaw(ScalarPower(1.0), r=1.0, dim=1)  # M(z) = z
    rep = check_positivity(law)
    assert rep.c_est == pytest.approx(1.0, abs=1e-9)


def test_positivity_monotone_under_damping():
    base = build_heat(2.0)
    c = 0.7
    damped = base + zero_order_law(np.zeros((2, 2)), c * np.eye(2))
    r1 = check_positivity(base, r=1.0)
    r2 = check_positivity(damped, r=1.0)
    assert r2.c_est >= r1.c_est + c - 1e-8


def test_positivity_affine_closed_form(rng):
    # hermitian M0, M1: sampled c_est equals min over samples of
    # lambda_min(Re(z^-1) M0 + M1)
    a = rng.standard_normal((3, 3))
    m0 = a @ a.T + 0.5 * np.eye(3)
    b = rng.standard_normal((3, 3))
    m1 = 0.5 * (b + b.T)
    law = zero_order_law(m0, m1)
    rep = check_positivity(law, r=1.5)
    z = disc_samples(1.5)
    direct = min(np.linalg.eigvalsh((1.0 / zz).real * m0 + m1)[0] for zz in z)
    assert abs(rep.c_est - direct) < 1e-10


# ---------------------------------------------------------------------------
# stability condition
# ---------------------------------------------------------------------------

def test_stability_damped_law_passes_below_damping():
    law = zero_order_law(1.0, 2.0)  # M(z) = 1 + 2 z
    assert check_stability(law, nu0=2.0, nu_prime=1.5).passed
    assert not check_stability(law, nu0=3.0, nu_prime=2.5).passed


def test_stability_pure_quadratic_fails():
    law = MaterialLaw(Product((ScalarPower(1.0), ScalarPower(1.0))),
                      r=1.0, dim=1)  # M(z) = z^2, z^-1 M = z
    assert not check_stability(law, nu0=1.0, nu_prime=0.5).passed


def test_stability_delay_law_threshold():
    # M(z) = 1 + z (c + e^{h/z}); the sampled condition turns at the root of
    # nu + exp(-nu h) = c
    c, h = 2.0, -1.0
    root = 0.44285440100599
    law = zero_order_law(1.0, c) + build_delay(h, 1.0)
    assert check_stability(law, nu0=root, nu_prime=0.9 * root).passed
    assert not check_stability(law, nu0=2 * root, nu_prime=1.1 * root).passed


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def test_build_heat_block_form():
    law = build_heat(2.0)
    z = 0.3 + 0.1j
    expected = np.array([[1.0, 0.0], [0.0, 0.0]]) + z * np.array(
        [[0.0, 0.0], [0.0, 0.5]])
    assert np.allclose(law.eval(z), expected, atol=1e-14)


def test_build_maxwell_eddy_current():
    law = build_maxwell(0.0, 1.0, 1.0)
    z = 0.2
    expected = np.array([[0.0, 0.0], [0.0, 1.0]]) + z * np.array(
        [[1.0, 0.0], [0.0, 0.0]])
    assert np.allclose(law.eval(z), expected, atol=1e-14)
    with pytest.raises(SpdViolationError):
        build_maxwell(0.0, 1.0, -1.0)
    with pytest.raises(SpdViolationError):
        build_maxwell(-1.0, 1.0, 1.0)


def test_build_fractional_value():
    law = build_fractional(np.diag([1.0, 0.0]), [(0.5, np.diag([0.0, 1.0]))],
                           np.diag([0.0, 1.0]))
    m = law.eval(0.25)
    assert np.allclose(m, np.diag([1.0, 0.5 * 1.0 + 0.25 * 1.0]), atol=1e-14)


def test_builder_shape_validation():
    with pytest.raises(SpdViolationError):
        build_heat(-1.0)
    with pytest.raises(ShapeMismatchError):
        build_fractional(np.eye(2), [(0.5, np.eye(3))], np.eye(2))


# ---------------------------------------------------------------------------
# kernel hypotheses
# ---------------------------------------------------------------------------

def kernel_table(func, t_max=20.0, m=8192):
    t = np.linspace(0.0, t_max, m)
    return t, func(t)


def test_integro_kernel_exponential():
    t, v = kernel_table(lambda s: np.exp(-s))
    assert check_integro_kernel(t, v, nu0=1.0)


def test_integro_kernel_sign_flip():
    # closed form: for k = -e^-t, t Im k_hat(t - i nu0) tends to the
    # bounded limit 1/sqrt(2 pi); the sampled checker stays true
    t, v = kernel_table(lambda s: -np.exp(-s))
    nu0 = 1.0
    xi = 3.0
    hat = -1.0 / math.sqrt(2 * math.pi) / ((1.0 + nu0) + 1j * xi)
    # quadrature cross-check of the transform the checker uses
    dt = t[1] - t[0]
    quad = dt / math.sqrt(2 * math.pi) * np.sum(v * np.exp(-(1j * xi + nu0) * t))
    assert quad == pytest.approx(hat, abs=1e-3)
    assert check_integro_kernel(t, v, nu0=nu0)


def test_integro_kernel_zero():
    t, v = kernel_table(lambda s: 0.0 * s)
    assert check_integro_kernel(t, v, nu0=1.0)


def test_integro_kernel_spike_fails_bound():
    # delta-like spike: t Im k_hat grows linearly, unbounded
    t = np.linspace(0.0, 20.0, 8192)
    v = np.zeros_like(t)
    v[100] = 1.0 / (t[1] - t[0])
    assert not check_integro_kernel(t, v, nu0=1.0)


# ---------------------------------------------------------------------------
# fractional hypotheses
# ---------------------------------------------------------------------------

def test_fractional_conditions_simple_true():
    p, q, f = np.diag([1.0, 0.0]), np.zeros((2, 2)), np.diag([0.0, 1.0])
    ok = check_fractional_conditions(
        p, q, f, m0=np.diag([1.0, 0.0]),
        alpha_terms=[(0.5, np.diag([0.0, 1.0]))], m1=np.diag([0.0, 1.0]))
    assert ok
    # smallest exponent not positive on range(F) fails
    bad = check_fractional_conditions(
        p, q, f, m0=np.diag([1.0, 0.0]),
        alpha_terms=[(0.5, np.diag([1.0, 0.0]))], m1=np.diag([0.0, 1.0]))
    assert not bad


def test_fractional_conditions_pure_elliptic():
    # P = Q = 0, F = 1, M0 = 0, no fractional terms: Re M1 controls F
    d = 2
    ok = check_fractional_conditions(
        np.zeros((d, d)), np.zeros((d, d)), np.eye(d),
        m0=np.zeros((d, d)), alpha_terms=[], m1=np.eye(d))
    assert ok


def test_fractional_conditions_projector_invalid():
    with pytest.raises(ProjectorInvalidError):
        check_fractional_conditions(
            np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]),
            m0=np.eye(2), alpha_terms=[], m1=np.eye(2))


# ---------------------------------------------------------------------------
# law files
# ---------------------------------------------------------------------------

def test_law_json_round_trip(tmp_path):
    law = build_heat(2.0)
    path = tmp_path / "heat.json"
    save_law(law, path)
    back = load_law(path)
    for z in (0.2, 0.4 + 0.1j):
        assert np.allclose(back.eval(z), law.eval(z), atol=1e-14)
    assert back.is_real


def test_law_from_dict_rejects_unknown():
    with pytest.raises(Exception):
        law_from_dict({"dim": 1, "r": 1.0, "expr": {"kind": "mystery"}})
