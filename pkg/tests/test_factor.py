import numpy as np
import pytest

from dpwforge import factor, holode
from dpwforge import loopalg as la
from dpwforge.errors import NotSL2, OutsideBigCell, SingularInput

from conftest import N, loop, sphere_factors


def sup(c, K=128):
    return float(np.max(np.abs(la.samples(c, K))))


def test_gram_schmidt_examples():
    U, T = factor.gram_schmidt_sl2(np.array([[1, 1], [0, 1]]))
    assert np.allclose(U, la.I2) and np.allclose(T, [[1, 1], [0, 1]])
    U, T = factor.gram_schmidt_sl2(la.I2)
    assert np.allclose(U, la.I2) and np.allclose(T, la.I2)
    U, T = factor.gram_schmidt_sl2(np.array([[1, 0], [1, 1]]))
    r = np.sqrt(2)
    assert np.allclose(U, np.array([[1, -1], [1, 1]]) / r)
    assert np.allclose(T, [[r, 1 / r], [0, 1 / r]])
    with pytest.raises(SingularInput):
        factor.gram_schmidt_sl2(np.zeros((2, 2)))


def test_iwasawa_identity():
    r = factor.iwasawa(la.TwistedLoop.identity(N))
    assert sup(r.F.coeffs - la.TwistedLoop.identity(N).coeffs) < 1e-12
    assert sup(r.B.coeffs - la.TwistedLoop.identity(N).coeffs) < 1e-12
    assert r.b0_diag == pytest.approx((1.0, 1.0))


def test_iwasawa_sphere_z1():
    phi = loop({0: la.I2, -1: np.array([[0, 1], [0, 0]])})
    r = factor.iwasawa(phi, 1e-12)
    F, B = sphere_factors(1.0)
    assert sup(r.F.coeffs - F.coeffs) < 1e-10
    assert sup(r.B.coeffs - B.coeffs) < 1e-10
    assert r.rho == pytest.approx(1 / np.sqrt(2))


def test_iwasawa_result_invariants():
    phi = la.TwistedLoop(holode.closed_form_coeffs("cylinder", {}, 0.4 + 0.2j, N), True)
    r = factor.iwasawa(phi, 1e-10)
    assert la.is_unitary_loop(r.F, 1e-9)[0]
    assert np.max(np.abs(r.B.coeffs[:N])) == 0
    b0 = r.B.coeff(0)
    assert abs(b0[0, 1]) + abs(b0[1, 0]) < 1e-14 and b0[0, 0].real > 0 and b0[1, 1].real > 0
    assert abs(b0[0, 0].imag) < 1e-14


def test_iwasawa_is_deterministic():
    phi = la.TwistedLoop(holode.closed_form_coeffs("cylinder", {}, 0.3 - 0.5j, N), True)
    a, b = factor.iwasawa(phi), factor.iwasawa(phi)
    assert np.array_equal(a.F.coeffs, b.F.coeffs) and np.array_equal(a.B.coeffs, b.B.coeffs)


def test_spectral_identity():
    phi = la.TwistedLoop(holode.closed_form_coeffs("cylinder", {}, 0.7 + 0.1j, N), True)
    tol = 1e-10
    r = factor.iwasawa(phi, tol)
    assert factor.spectral_identity_residual(phi.coeffs, r.B.coeffs) < 10 * tol


def test_iwasawa_rejects_non_sl2():
    with pytest.raises(NotSL2):
        factor.iwasawa(la.TwistedLoop.constant(2 * la.I2, N, True))


def test_constant_loop_matches_gram_schmidt(rng):
    for _ in range(10):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        m /= np.sqrt(np.linalg.det(m))
        F, B, _ = factor.iwasawa_coeffs(la.TwistedLoop.constant(m, N).coeffs, 1e-12, twisted=False)
        U, T = factor.gram_schmidt_sl2(m)
        assert np.max(np.abs(F[N] - U)) < 1e-12 and np.max(np.abs(B[N] - T)) < 1e-12


def test_birkhoff_plus_loop_is_trivial(rng):
    Bp0 = factor.random_plus_loop(rng, 3, N)
    r = factor.birkhoff(la.TwistedLoop(Bp0, True))
    assert r.in_big_cell
    assert sup(r.B_minus.coeffs - la.TwistedLoop.identity(N).coeffs) < 1e-12
    assert sup(r.B_plus.coeffs - Bp0) < 1e-12


def test_birkhoff_finite_analog():
    m = np.array([[2, 1], [3, 2]], dtype=complex)
    L, U = factor.birkhoff_finite(m)
    assert np.allclose(L, [[1, 0], [1.5, 1]]) and np.allclose(U, [[2, 1], [0, 0.5]])
    assert np.allclose(L @ U, m)
    with pytest.raises(OutsideBigCell):
        factor.birkhoff_finite(np.array([[0, 1], [-1, 0]]))


def test_birkhoff_outside_big_cell():
    # lam^-1 e12 - lam e21 style loop with vanishing (1,1) entry sits off the big cell
    phi = loop({-1: np.array([[0, 1], [0, 0]]), 1: np.array([[0, 0], [-1, 0]])})
    with pytest.raises(OutsideBigCell) as exc:
        factor.birkhoff(phi)
    assert exc.value.result.in_big_cell is False


def test_birkhoff_random_near_identity(rng):
    Bm0 = factor.random_minus_loop(rng, 2, N, scale=0.1)
    Bp0 = factor.random_plus_loop(rng, 2, N, scale=0.1)
    phi, _ = la.conv(Bm0, Bp0, N)
    r = factor.birkhoff(la.TwistedLoop(phi, True))
    assert sup(r.B_minus.coeffs - Bm0) < 1e-8 and sup(r.B_plus.coeffs - Bp0) < 1e-8
    assert np.allclose(r.B_minus.coeff(0), la.I2)


def test_roundtrip_suite_small():
    worst = factor.roundtrip_suite(10, N, seed=3)
    assert max(worst["iwasawa"], worst["iwasawa_factor"], worst["birkhoff"], worst["birkhoff_factor"]) < 1e-8
    assert worst["gram_schmidt"] < 1e-12


def test_normalized_potential_sphere():
    G = lambda z: holode.closed_form_coeffs("sphere", {}, z, N)
    out = factor.normalized_potential_at(G, 0j, n_terms=4)
    assert np.allclose(out["a"], [1, 0, 0, 0], atol=1e-9)
    assert np.allclose(out["b"], 0, atol=1e-9)


def test_normalized_potential_smyth_k0():
    c = 0.6 + 0.8j
    G = lambda z: holode.closed_form_coeffs("smyth_k0", {"c": c}, z, N)
    out = factor.normalized_potential_at(G, 0j, n_terms=4)
    assert np.allclose(out["a"], [1, 0, 0, 0], atol=1e-8)
    assert np.allclose(out["b"], [c, 0, 0, 0], atol=1e-8)


def test_normalized_potential_ignores_plus_gauge():
    # G = phi_cyl(z) p_+(z) with p_+ = exp(lam z^2 sigma1): the minus factor, hence the potential, is the cylinder's
    def G(z):
        p = la.expm_coeffs(loop({1: z * z * la.SIGMA1}).coeffs, N)
        return la.conv(holode.closed_form_coeffs("cylinder", {}, z, N), p, N)[0]

    out = factor.normalized_potential_at(G, 0j, n_terms=4)
    assert np.allclose(out["a"], [1, 0, 0, 0], atol=1e-8)
    assert np.allclose(out["b"], [1, 0, 0, 0], atol=1e-8)
