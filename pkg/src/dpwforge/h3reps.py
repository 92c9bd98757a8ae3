"""CMC 1 surfaces in H3 (Bryant representation) and flat surfaces in H3 (Galvez-Martinez-Milan)."""

from dataclasses import dataclass

import numpy as np

from . import sym
from .errors import BadParams, DetDrift, PathThroughPole, StepUnderflow, UnknownSurface
from .holode import IDENTITY, PathSpec
from .potential import DomainSpec, RationalFn

I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class BryantData:
    """F^-1 dF = [[g, -g^2], [1, -g]] omega dw, omega the coefficient function."""

    g: RationalFn
    omega: RationalFn
    domain: DomainSpec = DomainSpec()
    name: str = "custom"
    params: tuple = ()

    def coefficient(self, w):
        w = np.asarray(w, dtype=complex)
        g, om = self.g(w), self.omega(w)
        A = np.empty(w.shape + (2, 2), dtype=complex)
        A[..., 0, 0] = g * om
        A[..., 0, 1] = -g * g * om
        A[..., 1, 0] = om
        A[..., 1, 1] = -g * om
        return A

    def check_structure(self, samples, tol=1e-9):
        """Trace and det of the coefficient vanish at the sample points (nilpotent rank one)."""
        A = self.coefficient(samples)
        tr = np.abs(A[..., 0, 0] + A[..., 1, 1])
        det = np.abs(np.linalg.det(A))
        return float(max(np.max(tr), np.max(det))) < tol * max(1.0, float(np.max(np.abs(A))) ** 2)


@dataclass(frozen=True)
class FlatData:
    """dF = F [[0, h], [g, 0]] dz."""

    h: RationalFn
    g: RationalFn
    domain: DomainSpec = DomainSpec()
    name: str = "custom"
    params: tuple = ()

    def coefficient(self, z):
        z = np.asarray(z, dtype=complex)
        A = np.zeros(z.shape + (2, 2), dtype=complex)
        A[..., 0, 1] = self.h(z)
        A[..., 1, 0] = self.g(z)
        return A

    def cauchy_riemann_residual(self, samples, step=1e-3):
        z = np.asarray(samples, dtype=complex)
        out = 0.0

        def d(fn, e):
            return (fn(z - 2 * e) - 8 * fn(z - e) + 8 * fn(z + e) - fn(z + 2 * e)) / (12 * step)

        for fn in (self.h, self.g):
            dx, dy = d(fn, step), d(fn, 1j * step)
            out = max(out, float(np.max(np.abs(dx + 1j * dy) / np.maximum(1, np.abs(dx)))))
        return out


# ----------------------------------------------------------------------------
# 2x2 matrix ODE  Y' = Y A(z) dz, batched RK4 with step doubling
# ----------------------------------------------------------------------------


def integrate_matrix(Y0, coeff, w0, w1, cmap=IDENTITY, tol=1e-12, h0=0.25, max_steps=200000):
    Y = np.array(Y0, dtype=complex)
    single = Y.ndim == 2
    if single:
        Y = Y[None]
    w0 = np.atleast_1d(np.asarray(w0, dtype=complex))
    dw = np.atleast_1d(np.asarray(w1, dtype=complex)) - w0
    if not np.any(dw):
        return Y[0] if single else Y

    def f(t, y):
        w = w0 + dw * t
        return y @ (coeff(cmap.z(w)) * (cmap.dz(w) * dw)[..., None, None])

    def rk4(t, y, h):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    t, h, steps = 0.0, h0, 0
    while t < 1 - 1e-15:
        h = min(h, 1 - t)
        full = rk4(t, Y, h)
        half = rk4(t + h / 2, rk4(t, Y, h / 2), h / 2)
        err = float(np.max(np.abs(half - full))) / 15 / max(1.0, float(np.max(np.abs(half))))
        if not np.isfinite(err):
            raise PathThroughPole("integrand blew up along the path")
        if err <= tol:
            Y = half + (half - full) / 15
            t += h
            steps += 1
            h *= min(2.0, max(1.0, 0.9 * (tol / max(err, 1e-300)) ** 0.2))
        else:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
        if h < 1e-12 or steps > max_steps:
            raise StepUnderflow("RK4 step control failed")
    return Y[0] if single else Y


def _det_check(F, tol=1e-8):
    d = float(np.max(np.abs(np.linalg.det(F) - 1)))
    if d > tol:
        raise DetDrift(f"|det F - 1| = {d:.2e}")
    return d


def _integrate_path(data, z, base, path, F0, tol):
    path = path or PathSpec.segments(base, z)
    if path.min_clearance(tuple(data.domain.punctures)) < 1e-6:
        raise PathThroughPole("path passes within 1e-6 of a puncture")
    F = np.array(I2 if F0 is None else F0, dtype=complex)
    for cm, a, b in path.pieces():
        F = integrate_matrix(F, data.coefficient, a, b, cm, tol)
    _det_check(F)
    return F


def bryant_integrate(data, z, base=0j, path=None, F0=None, tol=1e-12):
    return _integrate_path(data, z, base, path, F0, tol)


def flat_integrate(data, z, base=0j, path=None, F0=None, tol=1e-12):
    """H3 coordinates of f = F conj(F)^T."""
    F = _integrate_path(data, z, base, path, F0, tol)
    return bryant_surface(F)


def integrate_grid(data, W, cmap=IDENTITY, w_star=None, F0=None, tol=1e-12):
    """F at grid nodes W (nr, nc): first row, then all columns as one batch."""
    W = np.asarray(W, dtype=complex)
    nr, nc = W.shape
    w_star = W[0, 0] if w_star is None else complex(w_star)
    out = np.empty((nr, nc, 2, 2), dtype=complex)
    y = integrate_matrix(I2 if F0 is None else F0, data.coefficient, w_star, W[0, 0], cmap, tol)
    out[0, 0] = y
    for j in range(1, nc):
        y = integrate_matrix(y, data.coefficient, W[0, j - 1], W[0, j], cmap, tol)
        out[0, j] = y
    col = out[0].copy()
    for i in range(1, nr):
        col = integrate_matrix(col, data.coefficient, W[i - 1], W[i], cmap, tol)
        out[i] = col
    _det_check(out)
    return out


# ----------------------------------------------------------------------------
# surfaces and Gauss maps
# ----------------------------------------------------------------------------


def _dag(A):
    return np.conj(np.swapaxes(A, -1, -2))


def bryant_surface(F):
    F = np.asarray(F)
    return sym.h3_from_matrix(F @ _dag(F))


def bryant_dual(F):
    Fi = np.linalg.inv(np.asarray(F))
    return sym.h3_from_matrix(Fi @ _dag(Fi))


def bryant_gauss_maps(data, F, w):
    """(g, G) with G = dF11/dF21 = (F11 g + F12)/(F21 g + F22); infinity returned as complex inf."""
    F = np.asarray(F)
    g = np.asarray(data.g(np.asarray(w, dtype=complex)))
    num = F[..., 0, 0] * g + F[..., 0, 1]
    den = F[..., 1, 0] * g + F[..., 1, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.where(np.abs(den) > 1e-300, num / np.where(den == 0, 1, den), complex(np.inf))
    return g, G


def gauss_map_from_derivative(dF):
    """G = dF11/dF21, falling back to dF12/dF22 when dF21 vanishes."""
    dF = np.asarray(dF)
    a = np.abs(dF[..., 1, 0]) >= np.abs(dF[..., 1, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a, dF[..., 0, 0] / dF[..., 1, 0], dF[..., 0, 1] / dF[..., 1, 1])


def hyperbolic_gauss_map_geometric(x, n):
    """Endpoint at infinity of the oriented normal geodesic, as an extended complex number.

    x, n: H3 coordinates (x1, x2, x3, x0) of the point and the unit normal.  x + n is
    null, so its Hermitian matrix is v v^*; the value returned is v1/v2."""
    M = sym.h3_to_matrix(np.asarray(x) + np.asarray(n))
    use_col0 = np.abs(M[..., 1, 0]) >= np.abs(M[..., 1, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(use_col0, M[..., 0, 0] / M[..., 1, 0], M[..., 0, 1] / M[..., 1, 1])


def bryant_metric_factor(data, w):
    """(1+|g|^2)^2 |omega|^2, which is 4 e^{2u}."""
    w = np.asarray(w, dtype=complex)
    return (1 + np.abs(data.g(w)) ** 2) ** 2 * np.abs(data.omega(w)) ** 2


# ----------------------------------------------------------------------------
# catalogs
# ----------------------------------------------------------------------------


def bryant_catalog(name, params=None):
    p = dict(params or {})
    c = complex(p.get("c", 1.0))
    R = RationalFn
    slit = False
    if name == "horosphere":
        g, om, dom = R.const(p.get("c1", 0.0)), R.const(p.get("c2", 1.0)), DomainSpec("plane")
    elif name == "enneper_cousin":
        g, om, dom = R((0, 1)), R.const(c), DomainSpec("plane")
    elif name == "helicoid_cousin":
        g, om, dom = R((1,), exp=(0, 1)), R((1j * c,), exp=(0, -1)), DomainSpec("plane")
    elif name == "catenoid_cousin":
        mu = float(p.get("mu", 0.8))
        if mu == 1 or mu == 0:
            raise BadParams("catenoid cousin needs mu not in {0, 1}")
        g = R((1,), pow=mu)
        om = R(((1 - mu * mu) / (4 * mu),), (0, 1), pow=-mu, punctures=(0j,))
        dom = DomainSpec("slit", (0j,), {"slit": "negative real axis"})
        slit = True
    elif name == "trinoid_cousin_dual":
        den = np.polynomial.polynomial.polypow([-1, 0, 0, 1], 2)
        g, om = R((0, 0, 1)), R((c,), tuple(den))
        dom = DomainSpec("punctured", tuple(np.exp(2j * np.pi * k / 3) for k in range(3)))
    else:
        raise UnknownSurface(f"no Bryant catalog entry {name!r}")
    d = dict(p)
    if slit:
        d["slit"] = True
    return BryantData(g, om, dom, name, tuple(sorted(d.items())))


def flat_catalog(name, params=None):
    p = dict(params or {})
    if name != "flat_rotational":
        raise UnknownSurface(f"no flat catalog entry {name!r}")
    alpha = float(p.get("alpha", -1.0))
    c = complex(p.get("c", 1.0))
    if alpha == 1:
        raise BadParams("alpha must differ from 1")
    e_g = -2 / (1 - alpha)
    e_h = 2 * alpha / (1 - alpha)
    g = RationalFn((-c ** -2,), pow=e_g)
    h = RationalFn((c * c * alpha / (1 - alpha) ** 2,), pow=e_h)
    dom = DomainSpec("punctured", (0j,))
    return FlatData(h, g, dom, name, tuple(sorted(p.items())))


BRYANT_CATALOG = ("horosphere", "enneper_cousin", "helicoid_cousin", "catenoid_cousin",
                  "trinoid_cousin_dual")
FLAT_CATALOG = ("flat_rotational",)


def frames_at(data, w, base=0j, cmap=IDENTITY, F0=None, tol=1e-12):
    """F at arbitrary points w (any shape) by straight paths from base, batched."""
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    Y0 = np.broadcast_to(I2 if F0 is None else np.asarray(F0, dtype=complex), (flat.size, 2, 2))
    F = integrate_matrix(Y0, data.coefficient, np.full(flat.size, complex(base)), flat, cmap, tol)
    _det_check(F)
    return F.reshape(w.shape + (2, 2))


def bryant_normal(F, g):
    """Unit normal F M F^*, M = [[|g|^2-1, 2g], [2 conj g, 1-|g|^2]] / (1+|g|^2).

    M is the unit trace-free Hermitian matrix orthogonal to the nilpotent coefficient;
    with this sign H = +1."""
    F = np.asarray(F)
    g = np.asarray(g, dtype=complex)
    a = np.abs(g) ** 2
    M = np.empty(g.shape + (2, 2), dtype=complex)
    M[..., 0, 0], M[..., 1, 1] = a - 1, 1 - a
    M[..., 0, 1], M[..., 1, 0] = 2 * g, 2 * np.conj(g)
    M /= (1 + a)[..., None, None]
    return sym.h3_from_matrix(F @ M @ _dag(F))


class H3Sampler:
    """geomcheck sampler for Bryant (kind 'bryant') or flat (kind 'flat') data."""

    def __init__(self, data, base=0j, cmap=IDENTITY, tol=1e-12):
        self.data, self.base, self.cmap, self.tol = data, complex(base), cmap, tol

    def frames(self, w):
        return frames_at(self.data, w, self.base, self.cmap, tol=self.tol)

    def __call__(self, w):
        F = self.frames(w)
        if isinstance(self.data, FlatData):
            return bryant_surface(F)
        z = self.cmap.z(np.asarray(w, dtype=complex))
        return bryant_surface(F), bryant_normal(F, self.data.g(z))
