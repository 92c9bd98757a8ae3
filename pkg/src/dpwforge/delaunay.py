"""Delaunay surfaces: closing conditions, monodromy, axes and weights in R3, S3 and H3."""

from dataclasses import dataclass, field

import numpy as np

from . import factor, holode, potential, sym
from . import loopalg as la
from .errors import BadParams, DegenerateAxis, NoClosing, NotClosed
from .holode import CoordMap
from .pipeline import SymParams

LOGPOLAR = CoordMap("exp", 0j)


@dataclass(frozen=True)
class DelaunayParams:
    r: float
    s: complex
    t: complex
    ambient: str = "R3"
    H: float = 0.5
    gamma: float = None
    q: float = None

    def __post_init__(self):
        object.__setattr__(self, "ambient", self.ambient.upper())
        object.__setattr__(self, "r", float(np.real(self.r)))
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "t", complex(self.t))
        if abs((self.s * self.t).imag) > 1e-12:
            raise BadParams("s*t must be real")
        if self.ambient == "S3" and self.gamma is None:
            raise BadParams("S3 Delaunay needs gamma")
        if self.ambient == "H3" and not self.q:
            raise BadParams("H3 Delaunay needs q != 0")

    @property
    def st(self):
        return float((self.s * self.t).real)

    def sym_params(self):
        if self.ambient == "R3":
            return SymParams("R3", H=self.H)
        if self.ambient == "S3":
            return SymParams("S3", gamma1=-self.gamma, gamma2=self.gamma)
        return SymParams("H3", q=self.q, psi=0.0)

    @property
    def mean_curvature(self):
        return self.sym_params().mean_curvature

    def potential(self):
        return potential.builtin("delaunay", {"r": self.r, "s": self.s, "t": self.t})

    def closing_lambdas(self):
        if self.ambient == "R3":
            return (1.0 + 0j,)
        if self.ambient == "S3":
            return (np.exp(-1j * self.gamma), np.exp(1j * self.gamma))
        return (np.exp(self.q / 2) + 0j,)

    def to_json(self):
        d = {"r": self.r, "s": [self.s.real, self.s.imag], "t": [self.t.real, self.t.imag],
             "ambient": self.ambient}
        if self.ambient == "R3":
            d["H"] = self.H
        elif self.ambient == "S3":
            d["gamma"] = self.gamma
        else:
            d["q"] = self.q
        return d


def _closing_shift(s, t, ambient, gamma=None, q=None):
    """The term added to r^2 + |s + conj t|^2 in the closing identity."""
    st = float((s * t).real)
    if ambient == "R3":
        return 0.0
    if ambient == "S3":
        return -4 * st * np.sin(gamma) ** 2
    return 4 * st * np.sinh(q / 2) ** 2


def closing_residual(p):
    shift = _closing_shift(p.s, p.t, p.ambient, p.gamma, p.q)
    return abs(p.r ** 2 + abs(p.s + np.conj(p.t)) ** 2 + shift - 0.25)


def close(s, t, ambient="R3", H=0.5, gamma=None, q=None):
    """Solve the closing identity for r >= 0."""
    ambient = ambient.upper()
    s, t = complex(s), complex(t)
    r2 = 0.25 - abs(s + np.conj(t)) ** 2 - _closing_shift(s, t, ambient, gamma, q)
    if r2 < -1e-15:
        raise NoClosing(f"closing needs r^2 = {r2:.6g} < 0")
    return DelaunayParams(float(np.sqrt(max(r2, 0.0))), s, t, ambient, H, gamma, q)


def kappa(p, lam):
    return holode.delaunay_kappa(p.r, p.s, p.t, lam)


def monodromy_closed_form(p, N=la.DEFAULT_ORDER):
    """exp(2 pi i D) as a twisted loop."""
    return la.TwistedLoop(holode.exp_wD(2j * np.pi, p.r, p.s, p.t, N), True)


def period_residuals(M, p):
    """Closing residuals of a monodromy loop: min over sign of |M - (+-)I| at the Sym
    evaluation points (one common sign), plus |dM/dlambda| at 1 in R3."""
    c = M.coeffs if isinstance(M, la.TwistedLoop) else np.asarray(M)
    vals = [la.evaluate(c, lam) for lam in p.closing_lambdas()]
    out = {}
    best = min((max(float(np.max(np.abs(v - sg * la.I2))) for v in vals), sg) for sg in (1, -1))
    out["pm_identity"] = best[0]
    out["sign"] = best[1]
    if p.ambient == "R3":
        out["dlambda"] = float(np.max(np.abs(la.evaluate(la.dlambda_coeffs(c)[0], 1.0))))
    out["closed_tol"] = 1e-8
    out["closed"] = all(v < 1e-8 for k, v in out.items() if k in ("pm_identity", "dlambda"))
    return out


@dataclass
class WeightReport:
    ambient: str
    w: float
    classification: str
    H: float
    neck: dict = field(default_factory=dict)

    def to_json(self):
        return {"ambient": self.ambient, "w": self.w, "classification": self.classification,
                "H": self.H, "neck": self.neck}


def _classify(p, w):
    if abs(w) < 1e-14:
        return "sphere-chain"
    if abs(p.r) < 1e-12 and abs(p.s - p.t) < 1e-12:
        return "cylinder"
    return "unduloid" if w > 0 else "nodoid"


def weight(p, tol=1e-10):
    if closing_residual(p) > tol:
        raise NotClosed(f"closing residual {closing_residual(p):.2e}")
    H = p.mean_curvature
    st = p.st
    s, t = float(p.s.real), float(p.t.real)
    if p.ambient == "R3":
        w = 8 * np.pi * st / abs(H)
        neck = {"circle_radius": 2 * abs(p.s) / abs(H), "cos_beta": 2 * (s + t)}
    elif p.ambient == "S3":
        w = 8 * np.pi * st / np.sqrt(H * H + 1)
        sl = 2 * t * np.sin(2 * p.gamma)
        neck = {"sin_ell": sl, "cos_beta": 2 * (s + t * np.cos(2 * p.gamma)) / np.sqrt(1 - sl * sl)
                if abs(sl) < 1 else None}
    else:
        w = 8 * np.pi * st / np.sqrt(H * H - 1)
        sl = 2 * s * np.sinh(p.q)
        neck = {"sinh_ell": sl, "cos_beta": 2 * (t + s * np.cosh(p.q)) / np.sqrt(1 + sl * sl)}
    return WeightReport(p.ambient, float(w), _classify(p, w), float(H), neck)


# ----------------------------------------------------------------------------
# axes
# ----------------------------------------------------------------------------


@dataclass
class AxisDescriptor:
    ambient: str
    direction: np.ndarray = None  # R3
    point: np.ndarray = None  # R3
    functionals: np.ndarray = None  # S3 / H3: rows l with l . x = 0 cutting out the axis
    degenerate: bool = False

    def contains(self, x, tol=1e-8):
        x = np.asarray(x, dtype=float)
        if self.ambient == "R3":
            d = self.direction / np.linalg.norm(self.direction)
            v = x - self.point
            return np.linalg.norm(v - np.dot(v, d) * d) < tol
        return float(np.max(np.abs(self.functionals @ x))) < tol

    def distance_r3(self, x):
        d = self.direction / np.linalg.norm(self.direction)
        v = np.asarray(x, dtype=float) - self.point
        return np.linalg.norm(v - (v @ d)[..., None] * d, axis=-1)


def axis(p, strict=False):
    s, t, r = p.s, p.t, p.r
    if p.ambient == "R3":
        direction = np.array([-(s + t).real, -(s - t).imag, r])
        if abs(r) < 1e-14:
            if strict:
                raise DegenerateAxis("R3 axis point (s-t)/r needs r != 0")
            point = np.zeros(3) if abs(s - t) < 1e-14 else None
            return AxisDescriptor("R3", direction, point, degenerate=True)
        point = np.array([((s - t) / r).real, 0.0, 0.0]) / (2 * p.H)
        return AxisDescriptor("R3", direction, point)
    if abs(s.imag) > 1e-14 or abs(t.imag) > 1e-14:
        raise BadParams("S3/H3 axis formulas take real s, t (apply the phase gauge first)")
    s, t = s.real, t.real
    if p.ambient == "S3":
        g = p.gamma
        rows = np.array([[0, 0, 1, 0], [np.sin(g) * (s - t), r, 0, -np.cos(g) * (s + t)]])
    else:
        h = p.q / 2
        rows = np.array([[0, 1, 0, 0], [-r, 0, np.cosh(h) * (s + t), np.sinh(h) * (s - t)]])
    return AxisDescriptor(p.ambient, functionals=rows)


def rotation_isometry(p, theta0, N=la.DEFAULT_ORDER):
    """The ambient isometry induced by z -> exp(i theta0) z, from exp(i theta0 D)."""
    A = la.TwistedLoop(holode.exp_wD(1j * theta0, p.r, p.s, p.t, N), True)
    if p.ambient == "R3":
        return sym.isometry_from_loop(A, "R3", H=p.H)
    if p.ambient == "S3":
        return sym.isometry_from_loop(A, "S3", g1=-p.gamma, g2=p.gamma)
    return sym.isometry_from_loop(A, "H3", q=p.q)


# ----------------------------------------------------------------------------
# surfaces and the numerical flux oracle
# ----------------------------------------------------------------------------


def frames_logpolar(p, w, N=la.DEFAULT_ORDER, tol=1e-10):
    """Iwasawa frames F at w = log z of phi = exp(w D), batched."""
    w = np.asarray(w, dtype=complex)
    phi = holode.exp_wD(w.ravel(), p.r, p.s, p.t, N)
    F, B, res = factor.iwasawa_coeffs(phi, tol)
    return F.reshape(w.shape + F.shape[1:])


def surface_logpolar(p, w, N=la.DEFAULT_ORDER):
    return p.sym_params().apply(frames_logpolar(p, w, N))


def _fixed_plane(iso):
    """Orthonormal basis of the fixed 2-plane of an S3/H3 rotation (4x4 matrix)."""
    R = iso.matrix
    _, sv, vt = np.linalg.svd(R - np.eye(4))
    return vt[-2:]


def _axis_killing(p, N):
    """Killing field of unit translation along the axis, as a function X -> Y(X); the axis is
    recovered from the fixed set of a rotation isometry, not from the axis formulas."""
    iso = rotation_isometry(p, 1.0, N)
    if p.ambient == "R3":
        w, v = np.linalg.eig(iso.matrix)
        d = np.real(v[:, np.argmin(np.abs(w - 1))])
        d /= np.linalg.norm(d)
        pt = np.linalg.lstsq(np.eye(3) - iso.matrix, iso.translation, rcond=None)[0]
        return (lambda X: np.broadcast_to(d, np.shape(X))), pt, d
    B = _fixed_plane(iso)
    G = np.diag(sym.METRIC_DIAG[p.ambient])
    if p.ambient == "S3":
        a, b = B[0], B[1]
        a /= np.linalg.norm(a)
        b = b - (a @ b) * a
        b /= np.linalg.norm(b)
        P_, Q_ = a, b

        def Y(X):
            return (X @ P_)[..., None] * Q_ - (X @ Q_)[..., None] * P_
    else:
        # timelike unit p and spacelike unit q spanning the fixed plane
        M = B @ G @ B.T
        ev, U = np.linalg.eigh(M)
        P_ = U[:, 0] @ B
        Q_ = U[:, 1] @ B
        P_ /= np.sqrt(-(P_ @ G @ P_))
        if P_[3] < 0:
            P_ = -P_
        Q_ /= np.sqrt(Q_ @ G @ Q_)

        def Y(X):
            return (X @ G @ Q_)[..., None] * P_ - (X @ G @ P_)[..., None] * Q_
    return Y, (P_, Q_), None


def _omega(ambient, X, a, b, c):
    if ambient == "R3":
        return np.linalg.det(np.stack([a, b, c], axis=-2))
    return np.linalg.det(np.stack([X, a, b, c], axis=-2))


def _normalize(ambient, X):
    if ambient == "S3":
        return X / np.linalg.norm(X, axis=-1, keepdims=True)
    if ambient == "H3":
        return X / np.sqrt(-sym.ambient_inner("H3", X, X))[..., None]
    return X


def flux_weight(p, n_theta=128, n_tau=24, h=1e-2, N=la.DEFAULT_ORDER):
    """w = circle integral of <eta, Y> minus 2H times the flux of Y through a cone cap.

    The loop is the unit circle |z| = 1, counterclockwise; the conormal points toward
    increasing |z|; the cap is the geodesic cone from the axis point nearest the loop's
    centroid.  Orientation: the cap normal induces on the loop the tangent opposite to the
    one induced by the surface normal, and Y is directed so that the cap term enters with
    the sign that makes the cylinder weight positive."""
    amb = p.ambient
    Hc = p.mean_curvature
    th = 2 * np.pi * np.arange(n_theta) / n_theta
    w = 1j * th
    stencil = np.array([-2, -1, 1, 2]) * h
    pts = w[None, :] + stencil[:, None]
    X_all, N_all = surface_logpolar(p, np.concatenate([w[None, :], pts]), N)
    delta, Nrm = X_all[0], N_all[0]
    Xs = X_all[1:]
    f_u = (Xs[0] - 8 * Xs[1] + 8 * Xs[2] - Xs[3]) / (12 * h)
    dth = 2 * np.pi / n_theta
    k = np.fft.fftfreq(n_theta, 1 / n_theta)
    f_th = np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(delta, axis=0), axis=0))

    Y, axis_data, axis_dir = _axis_killing(p, N)
    eta_term = float(np.sum(sym.ambient_inner(amb, f_u, Y(delta))) * dth)

    # apex: axis point nearest the centroid of the loop
    cen = delta.mean(axis=0)
    if amb == "R3":
        apex = axis_data + ((cen - axis_data) @ axis_dir) * axis_dir
    else:
        P_, Q_ = axis_data
        G = sym.METRIC_DIAG[amb]
        cp = np.sum(G * cen * P_) / np.sum(G * P_ * P_)
        cq = np.sum(G * cen * Q_) / np.sum(G * Q_ * Q_)
        apex = _normalize(amb, cp * P_ + cq * Q_)

    x, wt = np.polynomial.legendre.leggauss(n_tau)
    tau = (x + 1) / 2
    wt = wt / 2
    lin = (1 - tau)[:, None, None] * apex + tau[:, None, None] * delta[None]
    lin_t = delta[None] - apex
    lin_th = tau[:, None, None] * f_th[None]
    if amb == "R3":
        Xc, Xt, Xth = lin, np.broadcast_to(lin_t, lin.shape), lin_th
    else:
        G = sym.METRIC_DIAG[amb]
        nrm2 = np.sum(G * lin * lin, axis=-1)
        s_ = 1.0 if amb == "S3" else -1.0
        nr = np.sqrt(s_ * nrm2)[..., None]
        Xc = lin / nr

        def dnorm(dv):
            return dv / nr - lin * (s_ * np.sum(G * lin * dv, axis=-1)[..., None] / nr ** 3)
        Xt = dnorm(np.broadcast_to(lin_t, lin.shape))
        Xth = dnorm(lin_th)
    cap_density = _omega(amb, Xc, Xt, Xth, Y(Xc))
    cap_raw = float(np.sum(cap_density * wt[:, None]) * dth)

    # orientation of the cap normal relative to the surface normal along the loop
    # the mean-curvature normal sign(H) N fixes the orientation, so |H| enters the cap term
    orient = np.sign(Hc) * np.sign(np.mean(_omega(amb, delta, f_u, f_th, Nrm)))
    Hc = abs(Hc)
    sigma = -orient
    cap = sigma * cap_raw
    # direct Y so that the cap flux is negative (cylinder calibration)
    ysign = -np.sign(cap) if cap != 0 else 1.0
    w_num = ysign * (eta_term + 2 * Hc * cap)
    return {"w": float(w_num), "eta_term": ysign * eta_term, "cap_term": ysign * 2 * Hc * cap,
            "H": p.mean_curvature, "apex": apex}


def seam_gap(p, u_range=(-1.0, 1.0), n_u=9, N=la.DEFAULT_ORDER, n_v=None):
    """max distance between the surface along v = 0 and along v = 2 pi (log-polar seam)."""
    u = np.linspace(*u_range, n_u)
    X0, _ = surface_logpolar(p, u + 0j, N)
    X1, _ = surface_logpolar(p, u + 2j * np.pi, N)
    return float(np.max(np.linalg.norm(X0 - X1, axis=-1)))


def dressing_residual(p, h_plus, z0, N=la.DEFAULT_ORDER, tol=1e-12):
    """Relative sup-norm distance between the monodromy of h_plus phi and h_plus M h_plus^-1.

    Both monodromies are integrated around the circle |z| = |z0| starting at z0."""
    sol = holode.PhiSolution(p.potential(), z0, N=N, tol=tol)
    dsol = potential.dress(sol, h_plus)
    loop = holode.PathSpec.circle(0j, abs(z0), 1, float(np.angle(z0)))
    M, _ = holode.monodromy(sol, loop, check=False)
    Md, _ = holode.monodromy(dsol, loop, check=False)
    H = h_plus.coeffs if isinstance(h_plus, la.TwistedLoop) else np.asarray(h_plus)
    H = la.resize(H, N)[0]
    pred = la.conv(la.conv(H, M.coeffs, N)[0], la.inv_coeffs(H, N), N)[0]
    K = la._fft_len(4 * N + 2)
    scale = max(1.0, float(np.max(np.abs(la.samples(Md.coeffs, K)))))
    return float(np.max(np.abs(la.samples(Md.coeffs - pred, K)))) / scale
