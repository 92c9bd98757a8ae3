"""Solve d phi = phi xi along paths, grid sweeps, monodromy, closed-form phi oracles."""

from dataclasses import dataclass

import numpy as np

from . import loopalg as la
from .errors import BadFamily, BadParams, DetDrift, PathThroughPole, StepUnderflow

# ----------------------------------------------------------------------------
# coordinate maps and paths
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordMap:
    """z = w (identity) or z = center + exp(w) (log-polar)."""

    kind: str = "identity"
    center: complex = 0j

    def z(self, w):
        if self.kind == "identity":
            return w
        return self.center + np.exp(w)

    def dz(self, w):
        if self.kind == "identity":
            return np.ones_like(w)
        return np.exp(w)

    def w(self, z):
        if self.kind == "identity":
            return np.asarray(z, dtype=complex)
        return np.log(np.asarray(z, dtype=complex) - self.center)


IDENTITY = CoordMap()


@dataclass(frozen=True)
class PathSpec:
    """kind 'segments' (nodes) or 'circle' (center, radius, turns, start angle)."""

    kind: str
    nodes: tuple = ()
    center: complex = 0j
    radius: float = 1.0
    turns: float = 1.0
    start_angle: float = 0.0

    @classmethod
    def segments(cls, *nodes):
        nodes = tuple(complex(n) for n in nodes)
        for a, b in zip(nodes, nodes[1:]):
            if a == b:
                raise ValueError("consecutive path nodes must differ")
        return cls("segments", nodes)

    @classmethod
    def circle(cls, center=0j, radius=1.0, turns=1.0, start_angle=0.0):
        if radius <= 0:
            raise ValueError("circle radius must be positive")
        return cls("circle", (), complex(center), float(radius), float(turns), float(start_angle))

    @property
    def start(self):
        if self.kind == "segments":
            return self.nodes[0]
        return self.center + self.radius * np.exp(1j * self.start_angle)

    @property
    def end(self):
        if self.kind == "segments":
            return self.nodes[-1]
        return self.center + self.radius * np.exp(1j * (self.start_angle + 2 * np.pi * self.turns))

    def pieces(self):
        """List of (coordmap, w0, w1): straight segments in w coordinates."""
        if self.kind == "segments":
            return [(IDENTITY, a, b) for a, b in zip(self.nodes, self.nodes[1:])]
        cm = CoordMap("exp", self.center)
        w0 = np.log(self.radius) + 1j * self.start_angle
        total = 2 * np.pi * self.turns
        n = max(1, int(np.ceil(abs(self.turns) * 8)))
        return [(cm, w0 + 1j * total * k / n, w0 + 1j * total * (k + 1) / n) for k in range(n)]

    def min_clearance(self, punctures):
        """Exact distance from the path to the nearest puncture."""
        if not punctures:
            return np.inf
        return float(min(self._distance(complex(p)) for p in punctures))

    def _distance(self, p):
        if self.kind == "segments":
            best = np.inf
            for a, b in zip(self.nodes, self.nodes[1:]):
                t = min(1.0, max(0.0, ((p - a) * np.conj(b - a)).real / abs(b - a) ** 2))
                best = min(best, abs(a + t * (b - a) - p))
            return best
        d = p - self.center
        sweep = 2 * np.pi * self.turns
        rel = (np.angle(d) - self.start_angle) * np.sign(sweep) % (2 * np.pi) if d != 0 else 0.0
        if d == 0 or abs(sweep) >= 2 * np.pi or rel <= abs(sweep):
            return abs(abs(d) - self.radius)
        return min(abs(self.start - p), abs(self.end - p))


# ----------------------------------------------------------------------------
# RK4 with step doubling
# ----------------------------------------------------------------------------


def _rhs(pot, N, phi, w, dw, cmap):
    z = cmap.z(w)
    fac = cmap.dz(w) * dw
    terms = getattr(pot, "terms", None)
    if terms:
        T = pot.terms_at(z)
        T = {j: A * fac[..., None, None] for j, A in T.items()}
        return la.shift_mul(phi, T)
    X = pot.loop_at(z, N) * fac[..., None, None, None]
    return la.conv(phi, X, N)[0]


def integrate_segments(phi0, pot, w0, w1, cmap=IDENTITY, tol=1e-12, h0=0.25, max_steps=200000):
    """Integrate a batch of straight w-segments w0[b] -> w1[b] sharing the parameter t in [0, 1].

    phi0: (B, 2N+1, 2, 2) (or unbatched).  Error control on the batch maximum."""
    phi = np.array(phi0, dtype=complex)
    single = phi.ndim == 3
    if single:
        phi = phi[None]
    w0 = np.atleast_1d(np.asarray(w0, dtype=complex))
    w1 = np.atleast_1d(np.asarray(w1, dtype=complex))
    N = la.order_of(phi)
    dw = w1 - w0
    t, h = 0.0, h0
    steps = 0
    length = float(np.max(np.abs(dw))) if dw.size else 0.0
    if length == 0:
        return phi[0] if single else phi

    def f(tt, y):
        return _rhs(pot, N, y, w0 + dw * tt, dw, cmap)

    def rk4(tt, y, hh):
        k1 = f(tt, y)
        k2 = f(tt + hh / 2, y + hh / 2 * k1)
        k3 = f(tt + hh / 2, y + hh / 2 * k2)
        k4 = f(tt + hh, y + hh * k3)
        return y + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    while t < 1 - 1e-15:
        h = min(h, 1 - t)
        full = rk4(t, phi, h)
        half = rk4(t + h / 2, rk4(t, phi, h / 2), h / 2)
        scale = max(1.0, float(np.max(np.abs(half))))
        err = float(np.max(np.abs(half - full))) / 15 / scale
        if not np.isfinite(err):
            raise PathThroughPole("integrand blew up along the path")
        if err <= tol:
            phi = half + (half - full) / 15
            t += h
            steps += 1
            h *= min(2.0, max(1.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2))
        else:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
        if h < 1e-12:
            raise StepUnderflow("RK4 step below 1e-12 of the path length")
        if steps > max_steps:
            raise StepUnderflow("too many RK4 steps")
    return phi[0] if single else phi


def det_drift(phi):
    N = la.order_of(phi)
    K = la._fft_len(4 * N + 2)
    d = np.linalg.det(la.samples(phi, K))
    return float(np.max(np.abs(d - 1)))


def integrate(phi0, xi, path, tol=1e-12, N=None, check_det=True):
    """phi at the end of path, starting from phi0 (TwistedLoop or array)."""
    arr = phi0.coeffs if isinstance(phi0, la.TwistedLoop) else np.asarray(phi0, dtype=complex)
    if N is not None:
        arr = la.resize(arr, N)[0]
    punct = tuple(getattr(getattr(xi, "domain", None), "punctures", ()) or ())
    if path.min_clearance(punct) < 1e-6:
        raise PathThroughPole("path passes within 1e-6 of a puncture")
    y = arr
    for cm, a, b in path.pieces():
        y = integrate_segments(y, xi, a, b, cm, tol)
    if check_det:
        drift = det_drift(y)
        if drift > 1e-6:
            raise DetDrift(f"|det phi - 1| = {drift:.2e}")
    if isinstance(phi0, la.TwistedLoop):
        return la.TwistedLoop(y, phi0.parity_enforced)
    return y


# ----------------------------------------------------------------------------
# solutions over a domain
# ----------------------------------------------------------------------------


class PhiSolution:
    """phi(z) for a potential with phi(z_star) = phi0, evaluated along straight w-paths.

    zmap maps integration coordinates w to z; the log-polar map makes radial
    rays and circles straight, which is how annular domains are swept."""

    def __init__(self, potential, z_star=None, phi0=None, N=la.DEFAULT_ORDER, tol=1e-12,
                 zmap=IDENTITY, dressing=None):
        self.potential = potential
        self.z_star = complex(potential.base_point if z_star is None else z_star)
        self.N = N
        self.tol = tol
        self.zmap = zmap
        self.phi0 = la.resize(np.asarray(phi0, dtype=complex), N)[0] if phi0 is not None \
            else la.TwistedLoop.identity(N).coeffs.copy()
        self.dressing = dressing
        self.cache = {}

    @property
    def w_star(self):
        return complex(self.zmap.w(self.z_star))

    def at(self, z):
        z = complex(z)
        if z in self.cache:
            return self.cache[z]
        w = complex(self.zmap.w(z))
        phi = integrate_segments(self.phi0, self.potential, self.w_star, w, self.zmap, self.tol)
        self.cache[z] = phi
        return phi

    def at_w(self, w):
        return integrate_segments(self.phi0, self.potential, self.w_star, complex(w), self.zmap, self.tol)

    def grid(self, W):
        """phi at grid nodes W (nr, nc) in w coordinates: first row left to right, then
        every column downward as one batch.  Returns array (nr, nc, 2N+1, 2, 2)."""
        W = np.asarray(W, dtype=complex)
        nr, nc = W.shape
        out = np.empty((nr, nc, 2 * self.N + 1, 2, 2), dtype=complex)
        y = integrate_segments(self.phi0, self.potential, self.w_star, W[0, 0], self.zmap, self.tol)
        out[0, 0] = y
        for j in range(1, nc):
            y = integrate_segments(y, self.potential, W[0, j - 1], W[0, j], self.zmap, self.tol)
            out[0, j] = y
        col = out[0].copy()
        for i in range(1, nr):
            col = integrate_segments(col, self.potential, W[i - 1], W[i], self.zmap, self.tol)
            out[i] = col
        drift = det_drift(out)
        if drift > 1e-6:
            raise DetDrift(f"|det phi - 1| = {drift:.2e} on the grid")
        return out


def monodromy(phi, loop, tol=None, check=True):
    """M = phi_end phi_start^-1 around a closed loop; returns (TwistedLoop, z-independence residual)."""
    tol = tol or phi.tol
    if abs(loop.end - loop.start) > 1e-12:
        raise ValueError("monodromy needs a closed loop")

    def one(lp):
        start = phi.at(lp.start)
        end = integrate(start, phi.potential, lp, tol)
        return la.conv(end, la.inv_coeffs(start), phi.N)[0]

    M = one(loop)
    resid = 0.0
    if check:
        if loop.kind == "circle":
            lp2 = PathSpec.circle(loop.center, loop.radius, loop.turns, loop.start_angle + 0.7)
        else:
            nodes = loop.nodes[1:] + loop.nodes[1:2]
            lp2 = PathSpec.segments(*nodes)
        M2 = one(lp2)
        resid = float(np.max(np.abs(M - M2)))
    return la.TwistedLoop(M, True), resid


# ----------------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------------


def delaunay_D(r, s, t, N=la.DEFAULT_ORDER):
    c = np.zeros((2 * N + 1, 2, 2), dtype=complex)
    c[N] = np.diag([r, -r])
    c[N - 1] = [[0, s], [t, 0]]
    c[N + 1] = [[0, np.conj(t)], [np.conj(s), 0]]
    return c


def delaunay_kappa(r, s, t, lam):
    lam = np.asarray(lam, dtype=complex)
    return np.sqrt(r ** 2 + abs(s + np.conj(t)) ** 2 + s * t * (lam - 1 / lam) ** 2 + 0j)


def exp_wD(w, r, s, t, N=la.DEFAULT_ORDER, K=None):
    """exp(w D) = cosh(w k) I + sinh(w k)/k D, expanded to Laurent coefficients by circle quadrature."""
    K = K or la._fft_len(8 * (2 * N + 1))
    lam = np.exp(2j * np.pi * np.arange(K) / K)
    D = la.samples(delaunay_D(r, s, t, N), K)
    k = delaunay_kappa(r, s, t, lam)
    w = np.asarray(w, dtype=complex)
    wk = w[..., None] * k
    ch = np.cosh(wk)
    small = np.abs(k) < 1e-12
    sh = np.where(small, w[..., None], np.sinh(wk) / np.where(small, 1, k))
    v = ch[..., None, None] * la.I2 + sh[..., None, None] * D
    return la.from_samples(v, N)


def closed_form_phi(family, params, z, N=la.DEFAULT_ORDER):
    """phi(z) in closed form for cylinder / sphere / delaunay / smyth_k0."""
    return la.TwistedLoop(closed_form_coeffs(family, params, z, N), True)


def closed_form_coeffs(family, params, z, N=la.DEFAULT_ORDER):
    """Coefficient array (2N+1, 2, 2) behind closed_form_phi."""
    z = complex(z)
    params = dict(params or {})
    if family == "cylinder":
        X = la.TwistedLoop.from_terms({-1: z * la.SIGMA1}, N).coeffs
        return la.expm_coeffs(X, N)
    if family == "sphere":
        return la.TwistedLoop.from_terms({0: la.I2, -1: np.array([[0, z], [0, 0]])}, N).coeffs
    if family == "delaunay":
        if z == 0:
            raise BadParams("delaunay phi undefined at z = 0")
        r = float(np.real(params.get("r", 0.0)))
        s, t = complex(params.get("s", 0.25)), complex(params.get("t", 0.25))
        return exp_wD(np.log(z), r, s, t, N)
    if family == "smyth_k0":
        c = complex(params.get("c", 1.0))
        X = la.TwistedLoop.from_terms({-1: z * np.array([[0, 1], [c, 0]])}, N).coeffs
        return la.expm_coeffs(X, N)
    raise BadFamily(f"no closed form for {family!r}")


def smyth_k0_split(z, c, N=la.DEFAULT_ORDER):
    """Explicit Iwasawa factors of exp(lambda^-1 z [[0,1],[c,0]]) for |c| = 1."""
    c = complex(c)
    M = np.array([[0, 1], [c, 0]])
    F = la.expm_coeffs(la.TwistedLoop.from_terms({-1: z * M, 1: -np.conj(z) / c * M}, N).coeffs, N)
    B = la.expm_coeffs(la.TwistedLoop.from_terms({1: np.conj(z) / c * M}, N).coeffs, N)
    return F, B
