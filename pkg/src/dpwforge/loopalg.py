"""Truncated matrix Laurent series in the spectral parameter lambda.

A loop of order N is stored densely as an array ``c`` of shape (..., 2N+1, 2, 2),
with ``c[..., j + N, :, :]`` the coefficient of lambda**j.  The array-level helpers
(``conv``, ``evaluate``, ``star_coeffs`` ...) accept leading batch axes so a whole
grid of loops can be processed at once; ``TwistedLoop`` wraps a single loop.
"""

import numpy as np

from .errors import SingularLoop

DEFAULT_ORDER = 16

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


# ----------------------------------------------------------------------------
# ComplexMat2 predicates
# ----------------------------------------------------------------------------

def is_su2(m, tol=1e-9):
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m @ m.conj().T - I2)) < tol and abs(np.linalg.det(m) - 1) < tol)


def is_hermitian(m, tol=1e-9):
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m - m.conj().T)) < tol)


def is_traceless(m, tol=1e-9):
    return bool(abs(np.trace(np.asarray(m))) < tol)


def is_det_one(m, tol=1e-9):
    return bool(abs(np.linalg.det(np.asarray(m, dtype=complex)) - 1) < tol)


# ----------------------------------------------------------------------------
# array-level kernels
# ----------------------------------------------------------------------------

def order_of(c):
    return (c.shape[-3] - 1) // 2


def parity_mask(N):
    """Boolean mask (2N+1, 2, 2) of entries allowed to be nonzero in a twisted loop."""
    j = np.arange(-N, N + 1)
    even = (j % 2 == 0)[:, None, None]
    diag = np.eye(2, dtype=bool)[None]
    return np.where(diag, even, ~even)


def resize(c, N):
    """Pad with zeros or cut to order N; returns (array, dropped_max)."""
    M = order_of(c)
    if N == M:
        return c, 0.0
    if N > M:
        pad = [(0, 0)] * c.ndim
        pad[-3] = (N - M, N - M)
        return np.pad(c, pad), 0.0
    k = M - N
    kept = c[..., k:k + 2 * N + 1, :, :]
    dropped = max(_absmax(c[..., :k, :, :]), _absmax(c[..., M + N + 1:, :, :]))
    return kept, dropped


def _absmax(x):
    return float(np.max(np.abs(x))) if x.size else 0.0


def _fft_len(n):
    L = 1
    while L < n:
        L *= 2
    return L


def samples(c, K):
    """Values at the K points lambda_k = exp(2 pi i k / K); shape (..., K, 2, 2).

    Exact (no aliasing) for K >= 2N+1."""
    N = order_of(c)
    if K < 2 * N + 1:
        raise ValueError("need K >= 2N+1 sample points")
    buf = np.zeros(c.shape[:-3] + (K, 2, 2), dtype=complex)
    idx = np.arange(-N, N + 1) % K
    buf[..., idx, :, :] = c
    return np.fft.ifft(buf, axis=-3) * K


def from_samples(v, N):
    """Laurent coefficients of order N from K equispaced circle samples (aliasing if K small)."""
    K = v.shape[-3]
    f = np.fft.fft(v, axis=-3) / K
    idx = np.arange(-N, N + 1) % K
    return f[..., idx, :, :]


def conv(a, b, N=None):
    """Cauchy product of two loop arrays; result cut to order N (default max order).

    Returns (c, dropped) where dropped is the largest coefficient outside the window."""
    Na, Nb = order_of(a), order_of(b)
    if N is None:
        N = max(Na, Nb)
    full = Na + Nb
    L = _fft_len(2 * full + 1)
    A = samples(resize(a, full)[0], L)
    B = samples(resize(b, full)[0], L)
    c = from_samples(A @ B, full)
    return resize(c, N)


def shift_mul(phi, terms):
    """phi * sum_j A_j lambda^j for a short dict of j -> (..., 2, 2) coefficients; order of phi kept.

    Direct (non-FFT) evaluation; this is the hot path of the ODE right-hand side."""
    N = order_of(phi)
    out = None
    for j, A in terms.items():
        prod = phi @ np.asarray(A)[..., None, :, :]
        if out is None:
            out = np.zeros(prod.shape, dtype=complex)
        # coefficient k of phi lands at k + j
        if j >= 0:
            out[..., j:, :, :] += prod[..., :2 * N + 1 - j, :, :]
        else:
            out[..., :2 * N + 1 + j, :, :] += prod[..., -j:, :, :]
    return out


def evaluate(c, lam):
    """sum_j c_j lam^j; lam scalar or array broadcasting against the batch axes."""
    if np.any(np.asarray(lam) == 0):
        raise ValueError("loop evaluation at lambda = 0")
    N = order_of(c)
    j = np.arange(-N, N + 1)
    lam = np.asarray(lam, dtype=complex)
    pw = lam[..., None] ** j
    return np.einsum("...j,...jab->...ab", pw, c)


def dlambda_coeffs(c):
    """Termwise derivative; coefficient of lambda^(j-1) is j*c_j.  Order kept, lowest term dropped."""
    N = order_of(c)
    j = np.arange(-N, N + 1)
    d = c * j[:, None, None]
    out = np.zeros_like(c)
    out[..., :-1, :, :] = d[..., 1:, :, :]
    dropped = _absmax(d[..., 0, :, :])
    return out, dropped


def star_coeffs(c):
    """a*(lambda) = conj(a(1/conj lambda))^T: coefficient j is the conjugate transpose of coefficient -j."""
    return np.conj(np.swapaxes(c[..., ::-1, :, :], -1, -2))


def adjugate(c):
    out = np.empty_like(c)
    out[..., 0, 0] = c[..., 1, 1]
    out[..., 1, 1] = c[..., 0, 0]
    out[..., 0, 1] = -c[..., 0, 1]
    out[..., 1, 0] = -c[..., 1, 0]
    return out


def det_series(c):
    """Scalar Laurent series det c, order 2N (exact)."""
    N = order_of(c)
    L = _fft_len(4 * N + 1)
    v = samples(c, L)
    d = v[..., 0, 0] * v[..., 1, 1] - v[..., 0, 1] * v[..., 1, 0]
    f = np.fft.fft(d, axis=-1) / L
    idx = np.arange(-2 * N, 2 * N + 1) % L
    return f[..., idx]


def inv_coeffs(c, N=None, oversample=8):
    """Inverse loop: adjugate times the reciprocal of the det series.

    The reciprocal is the Laurent expansion on the unit circle, obtained from
    oversampled circle values.  Raises SingularLoop if |det| < 1e-12 at a sample."""
    M = order_of(c)
    if N is None:
        N = M
    K = _fft_len(oversample * (2 * max(M, N) + 1))
    dser = det_series(c)
    buf = np.zeros(dser.shape[:-1] + (K,), dtype=complex)
    idx = np.arange(-2 * M, 2 * M + 1) % K
    buf[..., idx] = dser
    dvals = np.fft.ifft(buf, axis=-1) * K
    if np.min(np.abs(dvals)) < 1e-12:
        raise SingularLoop("det of loop vanishes (|det| < 1e-12) on the unit circle")
    adj_vals = samples(adjugate(c), K)
    inv_vals = adj_vals / dvals[..., None, None]
    out = from_samples(inv_vals, N)
    return out


def sup_norm_on_circle(c, K=None):
    N = order_of(c)
    K = K or max(4 * N, 2 * N + 1)
    v = samples(c, max(K, 2 * N + 1))
    return float(np.max(np.abs(v))) if v.size else 0.0


def tail_norm_coeffs(c, k):
    N = order_of(c)
    if k > N:
        return 0.0
    lo = c[..., :N - k + 1, :, :]
    hi = c[..., N + k:, :, :]
    return max(_absmax(lo), _absmax(hi))


def expm_coeffs(c, N=None, oversample=4):
    """Matrix exponential of a loop of sl2 matrices, pointwise on the circle.

    Uses exp(X) = cosh(k) I + sinh(k)/k X with k^2 = -det X for traceless X."""
    M = order_of(c)
    N = N or M
    K = _fft_len(oversample * (2 * max(M, N) + 1) + 64)
    v = samples(resize(c, max(M, N))[0], K)
    return from_samples(expm_sl2(v), N)


def expm_sl2(X):
    """exp of traceless 2x2 matrices (batched)."""
    k2 = -(X[..., 0, 0] * X[..., 1, 1] - X[..., 0, 1] * X[..., 1, 0])
    k = np.sqrt(k2.astype(complex))
    small = np.abs(k) < 1e-8
    ks = np.where(small, 1.0, k)
    sh = np.where(small, 1 + k2 / 6 + k2 ** 2 / 120, np.sinh(ks) / ks)
    ch = np.cosh(k)
    return ch[..., None, None] * I2 + sh[..., None, None] * X


# ----------------------------------------------------------------------------
# single-loop object
# ----------------------------------------------------------------------------

class TwistedLoop:
    """Immutable truncated Laurent loop; coefficient j stored at index j + N."""

    __slots__ = ("_c", "parity_enforced", "trunc_err")

    def __init__(self, coeffs, parity_enforced=False, trunc_err=0.0):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1:] != (2, 2) or c.shape[0] % 2 != 1:
            raise ValueError("coefficients must have shape (2N+1, 2, 2)")
        if parity_enforced:
            c = np.where(parity_mask(order_of(c)), c, 0)
        c.setflags(write=False)
        self._c = c
        self.parity_enforced = bool(parity_enforced)
        self.trunc_err = float(trunc_err)

    # constructors ------------------------------------------------------------
    @classmethod
    def from_terms(cls, terms, N=DEFAULT_ORDER, parity_enforced=False):
        c = np.zeros((2 * N + 1, 2, 2), dtype=complex)
        for j, m in terms.items():
            if abs(j) > N:
                raise ValueError(f"lambda^{j} outside window of order {N}")
            c[j + N] = m
        return cls(c, parity_enforced)

    @classmethod
    def constant(cls, m, N=DEFAULT_ORDER, parity_enforced=False):
        return cls.from_terms({0: np.asarray(m, dtype=complex)}, N, parity_enforced)

    @classmethod
    def identity(cls, N=DEFAULT_ORDER):
        return cls.constant(I2, N, True)

    @classmethod
    def from_function(cls, fn, N=DEFAULT_ORDER, K=None, parity_enforced=False):
        """Coefficients of lambda -> fn(lambda) (2x2) by sampling the unit circle."""
        K = K or _fft_len(8 * (2 * N + 1))
        lam = np.exp(2j * np.pi * np.arange(K) / K)
        v = np.array([fn(l) for l in lam], dtype=complex)
        return cls(from_samples(v, N), parity_enforced)

    # accessors ---------------------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    @property
    def N(self):
        return order_of(self._c)

    def coeff(self, j):
        N = self.N
        if abs(j) > N:
            return np.zeros((2, 2), dtype=complex)
        return self._c[j + N]

    def tail_norm(self, k):
        return tail_norm_coeffs(self._c, k)

    def is_resolved(self, tol):
        return self.tail_norm(self.N - 1) < tol

    def with_order(self, N):
        c, dropped = resize(self._c, N)
        return TwistedLoop(c, self.parity_enforced, max(self.trunc_err, dropped))

    def __call__(self, lam):
        return loop_eval(self, lam)

    def __matmul__(self, other):
        return loop_mul(self, other)

    def __repr__(self):
        return f"TwistedLoop(N={self.N}, twisted={self.parity_enforced}, tail={self.tail_norm(self.N - 1):.2e})"


def _wrap(c, parity, err):
    return TwistedLoop(c, parity, err)


def loop_mul(a, b):
    """Cauchy product cut to the window of the larger order; loss reported in trunc_err."""
    c, dropped = conv(a.coeffs, b.coeffs)
    return _wrap(c, a.parity_enforced and b.parity_enforced,
                 max(a.trunc_err, b.trunc_err, dropped))


def loop_inv(a):
    return _wrap(inv_coeffs(a.coeffs), a.parity_enforced, a.trunc_err)


def loop_eval(a, lam):
    if lam == 0:
        raise ValueError("loop evaluation at lambda = 0")
    return evaluate(a.coeffs, lam)


def loop_dlambda(a):
    d, dropped = dlambda_coeffs(a.coeffs)
    # d/dlambda flips the twisted parity, so the mask no longer applies
    return _wrap(d, False, max(a.trunc_err, dropped))


def loop_star(a):
    return _wrap(star_coeffs(a.coeffs), a.parity_enforced, a.trunc_err)


def is_unitary_loop(a, tol=1e-9, K=None):
    """Check a(lambda) a(lambda)^* = I and det = 1 at K circle points; returns (ok, residual)."""
    N = a.N
    K = K or 4 * N
    lam = np.exp(2j * np.pi * np.arange(K) / K)
    v = evaluate(a.coeffs, lam)
    r1 = np.max(np.abs(v @ np.conj(np.swapaxes(v, -1, -2)) - I2))
    r2 = np.max(np.abs(np.linalg.det(v) - 1))
    res = float(max(r1, r2))
    return res < tol, res


def untwist_coeffs(c):
    """Twisted (order N) -> untwisted of order ceil((N+1)/2), by index shifts only."""
    N = order_of(c)
    M = (N + 2) // 2
    out = np.zeros(c.shape[:-3] + (2 * M + 1, 2, 2), dtype=complex)
    for j in range(-N, N + 1):
        if j % 2 == 0:
            k = j // 2
            out[..., k + M, 0, 0] += c[..., j + N, 0, 0]
            out[..., k + M, 1, 1] += c[..., j + N, 1, 1]
        else:
            out[..., (j - 1) // 2 + M, 0, 1] += c[..., j + N, 0, 1]
            out[..., (j + 1) // 2 + M, 1, 0] += c[..., j + N, 1, 0]
    return out


def retwist_coeffs(c):
    """Untwisted (order M) -> twisted of order 2M+1."""
    M = order_of(c)
    N = 2 * M + 1
    out = np.zeros(c.shape[:-3] + (2 * N + 1, 2, 2), dtype=complex)
    for k in range(-M, M + 1):
        out[..., 2 * k + N, 0, 0] = c[..., k + M, 0, 0]
        out[..., 2 * k + N, 1, 1] = c[..., k + M, 1, 1]
        out[..., 2 * k + 1 + N, 0, 1] = c[..., k + M, 0, 1]
        out[..., 2 * k - 1 + N, 1, 0] = c[..., k + M, 1, 0]
    return out


def untwist(a):
    return _wrap(untwist_coeffs(a.coeffs), False, a.trunc_err)


def retwist(a, N=None):
    c = retwist_coeffs(a.coeffs)
    out = _wrap(c, True, a.trunc_err)
    return out.with_order(N) if N is not None else out


def scalar_series_reciprocal(s, N=None, oversample=8):
    """Reciprocal of a scalar Laurent series (order M array) as its Laurent expansion on the circle."""
    M = (len(s) - 1) // 2
    N = N or M
    K = _fft_len(oversample * (2 * max(M, N) + 1))
    buf = np.zeros(K, dtype=complex)
    buf[np.arange(-M, M + 1) % K] = s
    v = np.fft.ifft(buf) * K
    if np.min(np.abs(v)) < 1e-12:
        raise SingularLoop("scalar series vanishes on the unit circle")
    f = np.fft.fft(1 / v) / K
    return f[np.arange(-N, N + 1) % K]
