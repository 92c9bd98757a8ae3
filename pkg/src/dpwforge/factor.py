"""Iwasawa and Birkhoff splittings of loops, and the 2x2 finite-dimensional analogs.

Iwasawa uses Bauer's method: the block Toeplitz matrix of the Fourier
coefficients of P = phi^* phi is Cholesky factored and its last block row,
read backwards, gives the plus factor B with P = B^* B on the unit circle.
Birkhoff solves the block Toeplitz system that kills the negative Fourier
modes of B_-^{-1} phi.
"""

from dataclasses import dataclass

import numpy as np

from . import loopalg as la
from .errors import NoConvergence, NotSL2, OutsideBigCell, SingularInput

# ----------------------------------------------------------------------------
# finite analogs
# ----------------------------------------------------------------------------


def gram_schmidt_sl2(m):
    """m = U T with U in SU2 and T upper triangular with positive diagonal (closed form)."""
    m = np.asarray(m, dtype=complex)
    (a, b), (c, d) = m
    n = np.sqrt(abs(a) ** 2 + abs(c) ** 2)
    if n == 0:
        raise SingularInput("first column has zero norm")
    U = np.array([[a / n, -np.conj(c) / n], [c / n, np.conj(a) / n]])
    T = np.array([[n, (np.conj(a) * b + np.conj(c) * d) / n], [0, 1 / n]])
    return U, T


def birkhoff_finite(m):
    """[[a,b],[c,d]] = [[1,0],[c/a,1]] [[a,b],[0,1/a]] for det 1 and a != 0."""
    m = np.asarray(m, dtype=complex)
    (a, b), (c, d) = m
    if a == 0:
        raise OutsideBigCell("upper-left entry is zero")
    return np.array([[1, 0], [c / a, 1]]), np.array([[a, b], [0, 1 / a]])


# ----------------------------------------------------------------------------
# Iwasawa
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class IwasawaResult:
    F: la.TwistedLoop
    B: la.TwistedLoop
    residual: float
    b0_diag: tuple

    @property
    def rho(self):
        return self.b0_diag[0]


def _toeplitz(P, n):
    """Block matrix with (i, j) block P_{j-i}, shape (..., 2n, 2n)."""
    M = la.order_of(P)
    i = np.arange(n)
    D = i[None, :] - i[:, None]
    valid = np.abs(D) <= M
    blocks = P[..., np.clip(D + M, 0, 2 * M), :, :] * valid[:, :, None, None]
    # (..., n, n, 2, 2) -> (..., n, 2, n, 2)
    blocks = np.swapaxes(blocks, -3, -2)
    return blocks.reshape(P.shape[:-3] + (2 * n, 2 * n))


def bauer_plus_factor(P, n, N):
    """Plus loop B of order N (coefficients j >= 0) with P ~ B^* B, from an n-block Toeplitz section."""
    T = _toeplitz(P, n)
    try:
        L = np.linalg.cholesky(T)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence("Toeplitz matrix of phi^* phi is not positive definite") from exc
    row = L[..., 2 * n - 2:, :].reshape(P.shape[:-3] + (2, n, 2))
    row = np.swapaxes(row, -3, -2)  # (..., n, 2, 2): block L_{n-1, k}
    B = np.zeros(P.shape[:-3] + (2 * N + 1, 2, 2), dtype=complex)
    kmax = min(N, n - 1)
    for k in range(kmax + 1):
        B[..., N + k, :, :] = np.conj(np.swapaxes(row[..., n - 1 - k, :, :], -1, -2))
    return B


def _unitarity_residual(F, K):
    v = la.samples(F, K)
    r1 = np.abs(v @ np.conj(np.swapaxes(v, -1, -2)) - la.I2).max(axis=(-3, -2, -1))
    return r1


def iwasawa_coeffs(phi, tol=1e-10, twisted=None, n_start=None, n_max=512, inner_order=None):
    """Batched Iwasawa splitting phi = F B.

    phi: array (..., 2N+1, 2, 2).  Returns (F, B, residual) with residual per batch item,
    the larger of the sampled unitarity defect of F and the sampled |phi - F B|."""
    phi = np.asarray(phi, dtype=complex)
    N = la.order_of(phi)
    if twisted is None:
        twisted = bool(np.max(np.abs(np.where(la.parity_mask(N), 0, phi)), initial=0.0) < 1e-14)
    K = la._fft_len(4 * N + 2)
    d = np.linalg.det(la.samples(phi, K))
    drift = float(np.max(np.abs(d - 1)))
    if drift > 1e-6:
        raise NotSL2(f"det phi deviates from 1 by {drift:.2e}")
    M = inner_order or N + 4
    P, _ = la.conv(la.star_coeffs(phi), phi, 2 * N)
    n = n_start or max(2 * N + 2, 8)
    prevB = None
    last = None
    while True:
        B = bauer_plus_factor(P, n, M)
        if twisted:
            B = np.where(la.parity_mask(M), B, 0)
        Binv = la.inv_coeffs(B, M)
        F, _ = la.conv(la.resize(phi, M)[0], Binv, M)
        F, _ = la.resize(F, N)
        if twisted:
            F = np.where(la.parity_mask(N), F, 0)
        Bn, _ = la.resize(B, N)
        FB, _ = la.conv(F, Bn, N)
        res = np.maximum(_unitarity_residual(F, K),
                         np.abs(la.samples(FB - phi, K)).max(axis=(-3, -2, -1)))
        worst = float(np.max(res))
        change = np.inf if prevB is None else float(np.max(np.abs(B - prevB)))
        if worst < tol and change < tol:
            return F, Bn, res
        if last is not None and worst >= last * 0.999 and change < 1e-14:
            raise NoConvergence(f"Iwasawa stalled at residual {worst:.2e}", worst)
        if 2 * n > n_max and prevB is not None:
            if worst < tol:
                return F, Bn, res
            raise NoConvergence(f"Iwasawa residual {worst:.2e} above tol {tol:.0e} at n={n}", worst)
        prevB, last = B, worst
        n = min(2 * n, n_max)


def iwasawa(phi, tol=1e-10, **kw):
    """Iwasawa splitting of a single loop; returns IwasawaResult."""
    F, B, res = iwasawa_coeffs(phi.coeffs, tol, twisted=phi.parity_enforced or None, **kw)
    b0 = B[la.order_of(B)]
    twisted = phi.parity_enforced
    return IwasawaResult(la.TwistedLoop(F, twisted), la.TwistedLoop(B, twisted), float(res),
                         (float(b0[0, 0].real), float(b0[1, 1].real)))


def spectral_identity_residual(phi, B, K=None):
    """Sampled |phi^* phi - B^* B| on the circle."""
    N = la.order_of(phi)
    K = K or la._fft_len(8 * N + 4)
    P, _ = la.conv(la.star_coeffs(phi), phi, 2 * N)
    Q, _ = la.conv(la.star_coeffs(B), B, 2 * N)
    return float(np.max(np.abs(la.samples(P - Q, K))))


# ----------------------------------------------------------------------------
# Birkhoff
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BirkhoffResult:
    B_minus: la.TwistedLoop
    B_plus: la.TwistedLoop
    residual: float
    in_big_cell: bool
    cond: float = 1.0


def _birkhoff_system(phi, m):
    """Solve sum_k Y_k phi_{k-a} = -phi_{-a}, a = 1..m, for Y_1..Y_m (rows of 2x2 blocks)."""
    N = la.order_of(phi)
    k = np.arange(1, m + 1)
    D = k[:, None] - k[None, :]  # (k, a) -> k - a
    valid = np.abs(D) <= N
    blocks = phi[..., np.clip(D + N, 0, 2 * N), :, :] * valid[:, :, None, None]
    T = np.swapaxes(blocks, -3, -2).reshape(phi.shape[:-3] + (2 * m, 2 * m))
    a = np.arange(1, m + 1)
    R = phi[..., np.clip(N - a, 0, 2 * N), :, :] * (a <= N)[:, None, None]  # phi_{-a}
    R = np.swapaxes(R, -3, -2).reshape(phi.shape[:-3] + (2, 2 * m))
    cond = float(np.max(np.linalg.cond(T)))
    if not np.isfinite(cond) or cond > 1e12:
        raise OutsideBigCell(f"Birkhoff system condition number {cond:.2e}", cond)
    Tt = np.swapaxes(T, -1, -2)
    Y = np.swapaxes(np.linalg.solve(Tt, -np.swapaxes(R, -1, -2)), -1, -2)
    Y = np.swapaxes(Y.reshape(phi.shape[:-3] + (2, m, 2)), -3, -2)  # (..., m, 2, 2)
    return Y, cond


def birkhoff_coeffs(phi, tol=1e-10, m_start=None, m_max=256, twisted=None):
    """Batched Birkhoff splitting phi = B_- B_+ with B_-(inf) = I.  Returns (Bm, Bp, residual, cond)."""
    phi = np.asarray(phi, dtype=complex)
    N = la.order_of(phi)
    if twisted is None:
        twisted = bool(np.max(np.abs(np.where(la.parity_mask(N), 0, phi)), initial=0.0) < 1e-14)
    K = la._fft_len(4 * N + 2)
    m = m_start or max(2 * N, 4)
    prev = None
    while True:
        Y, cond = _birkhoff_system(phi, m)
        Ymax = max(m, N)
        Yl = np.zeros(phi.shape[:-3] + (2 * Ymax + 1, 2, 2), dtype=complex)
        Yl[..., Ymax, :, :] = la.I2
        Yl[..., Ymax - m:Ymax, :, :] = Y[..., ::-1, :, :]
        Bp_full, _ = la.conv(Yl, la.resize(phi, Ymax)[0], Ymax)
        Bp = np.zeros_like(phi)
        Bp[..., N:, :, :] = la.resize(Bp_full, N)[0][..., N:, :, :]
        Bm = la.inv_coeffs(Yl, Ymax)
        Bm = la.resize(Bm, N)[0]
        Bm[..., N + 1:, :, :] = 0
        if twisted:
            Bm = np.where(la.parity_mask(N), Bm, 0)
            Bp = np.where(la.parity_mask(N), Bp, 0)
        prod, _ = la.conv(Bm, Bp, N)
        res = np.abs(la.samples(prod - phi, K)).max(axis=(-3, -2, -1))
        worst = float(np.max(res))
        if worst < tol:
            return Bm, Bp, res, cond
        if m >= m_max or (prev is not None and worst > 0.9 * prev):
            raise NoConvergence(f"Birkhoff residual {worst:.2e} above tol", worst)
        prev = worst
        m = min(2 * m, m_max)


def birkhoff(phi, tol=1e-10, **kw):
    try:
        Bm, Bp, res, cond = birkhoff_coeffs(phi.coeffs, tol, twisted=phi.parity_enforced or None, **kw)
    except OutsideBigCell as exc:
        nan = la.TwistedLoop(np.full_like(phi.coeffs, np.nan))
        r = BirkhoffResult(nan, nan, float("inf"), False, exc.cond or float("inf"))
        exc.result = r
        raise
    t = phi.parity_enforced
    return BirkhoffResult(la.TwistedLoop(Bm, t), la.TwistedLoop(Bp, t), float(res), True, cond)


# ----------------------------------------------------------------------------
# normalized potential
# ----------------------------------------------------------------------------


def normalized_potential_at(G, z_star, radius=0.5, n_terms=12, n_samples=64, tol=1e-10,
                            min_radius=1e-3):
    """Taylor coefficients of a, b in the normalized potential lambda^-1 [[0,a],[b,0]] dz.

    G: callable z -> coefficient array (2N+1, 2, 2) of a holomorphic frame with G(z_star) = I.
    The minus factor G_- = I + g_1 lambda^-1 + ... gives the potential lambda^-1 dg_1;
    g_1 is sampled on a circle around z_star and expanded by FFT.
    Returns dict(a=..., b=..., radius=...), coefficients of (z - z_star)^n."""
    r = radius
    while r >= min_radius:
        th = 2 * np.pi * np.arange(n_samples) / n_samples
        zs = z_star + r * np.exp(1j * th)
        try:
            phis = np.stack([G(z) for z in zs])
            Bm, _, _, _ = birkhoff_coeffs(phis, tol)
        except (OutsideBigCell, NoConvergence):
            r /= 2
            continue
        N = la.order_of(Bm)
        g1 = Bm[:, N - 1]  # coefficient of lambda^-1
        c = np.fft.fft(g1, axis=0) / n_samples  # c_n r^n e^{i n th}
        n = np.arange(n_samples)
        c = c / (r ** n)[:, None, None]
        c12 = c[: n_terms + 1, 0, 1]
        c21 = c[: n_terms + 1, 1, 0]
        k = np.arange(n_terms)
        a = (k + 1) * c12[1:]
        b = (k + 1) * c21[1:]
        return {"a": a, "b": b, "radius": r}
    raise OutsideBigCell("no disk around the base point lies in the big cell")


# ----------------------------------------------------------------------------
# exact random test loops and the round-trip suite
# ----------------------------------------------------------------------------


def _terms_loop(terms, N):
    return la.TwistedLoop.from_terms(terms, N, True).coeffs


def random_unitary_loop(rng, degree, N=la.DEFAULT_ORDER):
    """Product of `degree` factors diag(e^{it}, e^{-it}) [[a, b/lam], [-conj(b) lam, conj(a)]]."""
    out = _terms_loop({0: la.I2}, N)
    for _ in range(degree):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / n, b / n
        t = rng.uniform(0, 2 * np.pi)
        D = np.diag([np.exp(1j * t), np.exp(-1j * t)])
        f = _terms_loop({0: D @ np.diag([a, np.conj(a)]), -1: D @ np.array([[0, b], [0, 0]]),
                         1: D @ np.array([[0, 0], [-np.conj(b), 0]])}, N)
        out, _ = la.conv(out, f, N)
    return out


def _random_triangular(rng, degree, N, sign, scale):
    out = _terms_loop({0: la.I2}, N)
    for k in range(degree):
        c = scale * (rng.normal() + 1j * rng.normal())
        m = np.array([[0, c], [0, 0]]) if k % 2 else np.array([[0, 0], [c, 0]])
        out, _ = la.conv(out, _terms_loop({0: la.I2, sign: m}, N), N)
    return out


def random_plus_loop(rng, degree, N=la.DEFAULT_ORDER, scale=0.5):
    """diag(rho, 1/rho) times unipotent factors I + c lam E; rho > 0, so it is a valid Iwasawa B."""
    rho = float(np.exp(rng.normal(scale=0.3)))
    B0 = _terms_loop({0: np.diag([rho, 1 / rho])}, N)
    return la.conv(B0, _random_triangular(rng, degree, N, 1, scale), N)[0]


def random_minus_loop(rng, degree, N=la.DEFAULT_ORDER, scale=0.5):
    """Unipotent factors I + c lam^-1 E; equals I at lam = infinity."""
    return _random_triangular(rng, degree, N, -1, scale)


def roundtrip_suite(n_cases=100, N=la.DEFAULT_ORDER, seed=0, tol=1e-10):
    """Construct-then-split cases.  Returns dict of worst residuals:
    iwasawa / birkhoff (|product - phi| and unitarity), iwasawa_factor / birkhoff_factor
    (distance of the recovered factors from the constructed ones) and gram_schmidt."""
    rng = np.random.default_rng(seed)
    K = la._fft_len(4 * N + 2)
    worst = dict.fromkeys(("iwasawa", "iwasawa_factor", "birkhoff", "birkhoff_factor", "gram_schmidt"), 0.0)
    for _ in range(n_cases):
        F0 = random_unitary_loop(rng, 3, N)
        B0 = random_plus_loop(rng, 4, N)
        phi, _ = la.conv(F0, B0, N)
        F, B, res = iwasawa_coeffs(phi, tol, twisted=True)
        worst["iwasawa"] = max(worst["iwasawa"], float(res))
        worst["iwasawa_factor"] = max(worst["iwasawa_factor"], float(np.max(np.abs(la.samples(F - F0, K)))),
                                      float(np.max(np.abs(la.samples(B - B0, K)))))
        Bm0 = random_minus_loop(rng, 3, N)
        Bp0 = random_plus_loop(rng, 3, N)
        psi, _ = la.conv(Bm0, Bp0, N)
        Bm, Bp, res, _ = birkhoff_coeffs(psi, tol, twisted=True)
        worst["birkhoff"] = max(worst["birkhoff"], float(res))
        worst["birkhoff_factor"] = max(worst["birkhoff_factor"], float(np.max(np.abs(la.samples(Bm - Bm0, K)))),
                                       float(np.max(np.abs(la.samples(Bp - Bp0, K)))))
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        m /= np.sqrt(np.linalg.det(m))
        phi_c = la.TwistedLoop.from_terms({0: m}, N).coeffs
        Fc, Bc, _ = iwasawa_coeffs(phi_c, tol, twisted=False)
        U, T = gram_schmidt_sl2(m)
        worst["gram_schmidt"] = max(worst["gram_schmidt"], float(np.max(np.abs(Fc[N] - U))),
                                    float(np.max(np.abs(Bc[N] - T))),
                                    float(np.max(np.abs(np.delete(Fc, N, 0)), initial=0.0)))
    return worst
