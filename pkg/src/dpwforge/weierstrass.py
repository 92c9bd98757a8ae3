"""Minimal surfaces in R3 from Weierstrass data (g, eta = h dz)."""

from dataclasses import dataclass

import numpy as np

from .errors import PathThroughPole, UnknownSurface
from .holode import IDENTITY, PathSpec
from .potential import DomainSpec, RationalFn

_GL = {n: np.polynomial.legendre.leggauss(n) for n in (8, 16)}


@dataclass(frozen=True)
class WeierstrassData:
    g: RationalFn
    h: RationalFn
    domain: DomainSpec = DomainSpec()
    name: str = "custom"
    params: tuple = ()

    def integrand(self, z):
        """(1-g^2, i(1+g^2), 2g) h, shape (..., 3)."""
        z = np.asarray(z, dtype=complex)
        g = self.g(z)
        h = self.h(z)
        return np.stack([(1 - g * g) * h, 1j * (1 + g * g) * h, 2 * g * h], axis=-1)

    def to_json(self):
        return {"name": self.name, "params": dict(self.params)}


@dataclass
class PeriodReport:
    loop: str
    vector: np.ndarray
    real_norm: float
    closed: bool

    def to_json(self):
        return {"loop": self.loop, "vector": [[c.real, c.imag] for c in self.vector],
                "real_norm": self.real_norm, "closed": self.closed}


# ----------------------------------------------------------------------------
# quadrature
# ----------------------------------------------------------------------------


def _gl_segments(fn, w0, w1, cmap, n):
    x, wt = _GL[n]
    dw = (w1 - w0)[:, None]
    w = w0[:, None] + dw * (x + 1) / 2
    vals = fn(cmap.z(w)) * (cmap.dz(w) * dw / 2)[..., None]
    return np.einsum("bkc,k->bc", vals, wt)


def integrate_segments(fn, w0, w1, cmap=IDENTITY, tol=1e-13, depth=0):
    """Adaptive Gauss-Legendre for a batch of straight w-segments; fn(z) -> (..., 3)."""
    w0 = np.atleast_1d(np.asarray(w0, dtype=complex))
    w1 = np.atleast_1d(np.asarray(w1, dtype=complex))
    coarse = _gl_segments(fn, w0, w1, cmap, 8)
    fine = _gl_segments(fn, w0, w1, cmap, 16)
    if not np.all(np.isfinite(fine)):
        raise PathThroughPole("Weierstrass integrand not finite on the path")
    err = np.max(np.abs(fine - coarse), axis=-1)
    scale = np.maximum(1.0, np.max(np.abs(fine), axis=-1))
    bad = err > tol * scale
    if np.any(bad):
        if depth > 40:
            raise PathThroughPole("quadrature does not converge; path too close to a pole")
        mid = (w0[bad] + w1[bad]) / 2
        fine[bad] = (integrate_segments(fn, w0[bad], mid, cmap, tol, depth + 1)
                     + integrate_segments(fn, mid, w1[bad], cmap, tol, depth + 1))
    return fine


def _check_path(data, path):
    if path.min_clearance(tuple(data.domain.punctures)) < 1e-6:
        raise PathThroughPole("path passes within 1e-6 of a puncture")


def contour_integral(data, path, tol=1e-13):
    total = np.zeros(3, dtype=complex)
    for cm, a, b in path.pieces():
        total = total + integrate_segments(data.integrand, a, b, cm, tol)[0]
    return total


def eval_minimal(data, z, z_star=0j, path=None, tol=1e-13):
    """f(z) = Re of the integral from z_star to z (straight segment unless path given)."""
    path = path or PathSpec.segments(z_star, z)
    _check_path(data, path)
    return np.real(contour_integral(data, path, tol))


def eval_grid(data, W, cmap=IDENTITY, w_star=None, tol=1e-13):
    """f at grid nodes W (nr, nc) in w coordinates: first row, then all columns as a batch."""
    W = np.asarray(W, dtype=complex)
    nr, nc = W.shape
    w_star = W[0, 0] if w_star is None else complex(w_star)
    fn = data.integrand
    out = np.zeros((nr, nc, 3), dtype=complex)
    out[0, 0] = integrate_segments(fn, w_star, W[0, 0], cmap, tol)[0] if w_star != W[0, 0] else 0
    if nc > 1:
        steps = integrate_segments(fn, W[0, :-1], W[0, 1:], cmap, tol)
        out[0, 1:] = out[0, 0] + np.cumsum(steps, axis=0)
    if nr > 1:
        steps = integrate_segments(fn, W[:-1].ravel(), W[1:].ravel(), cmap, tol).reshape(nr - 1, nc, 3)
        out[1:] = out[0][None] + np.cumsum(steps, axis=0)
    return np.real(out)


def period_check(data, loop, tol=1e-8, loop_id="loop"):
    if abs(loop.end - loop.start) > 1e-12:
        raise ValueError("period check needs a closed loop")
    _check_path(data, loop)
    v = contour_integral(data, loop)
    rn = float(np.linalg.norm(v.real))
    return PeriodReport(loop_id, v, rn, rn < tol)


def gauss_map(data, z):
    """Unit normal (..., 3) from g by inverse stereographic projection; g = inf -> (0,0,1)."""
    g = np.asarray(data.g(np.asarray(z, dtype=complex)))
    a = np.abs(g) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        N = np.stack([2 * g.real / (a + 1), 2 * g.imag / (a + 1), (a - 1) / (a + 1)], axis=-1)
    return np.where(np.isfinite(g)[..., None], N, np.array([0.0, 0.0, 1.0]))


def metric_factor(data, z):
    """(1+|g|^2)^2 |h|^2, which is 4 e^{2u}."""
    z = np.asarray(z, dtype=complex)
    return (1 + np.abs(data.g(z)) ** 2) ** 2 * np.abs(data.h(z)) ** 2


# ----------------------------------------------------------------------------
# catalog
# ----------------------------------------------------------------------------


def _roots_of_unity(n, shift=0.0):
    return tuple(np.exp(1j * (2 * np.pi * k / n + shift)) for k in range(n))


def catalog(name, params=None):
    p = dict(params or {})
    c = complex(p.get("c", 1.0))
    R = RationalFn
    if name == "plane":
        g, h, dom = R.const(p.get("c1", 0.0)), R.const(p.get("c2", 1.0)), DomainSpec("plane")
    elif name == "enneper":
        g, h, dom = R((0, 1)), R.const(c), DomainSpec("plane")
    elif name == "enneper_n":
        n = int(p.get("n", 2))
        g, h, dom = R.monomial(1, n), R.const(c), DomainSpec("plane")
    elif name == "helicoid":
        g, h, dom = R((1,), exp=(0, 1)), R((1j * c,), exp=(0, -1)), DomainSpec("plane")
    elif name == "catenoid":
        g, h, dom = R((0, 1)), R.monomial(c, -2), DomainSpec("punctured", (0j,))
    elif name == "catenoid_imaginary":
        g, h, dom = R((0, 1)), R.monomial(1j * c, -2), DomainSpec("punctured", (0j,))
    elif name == "jorge_meeks":
        n = int(p.get("n", 3))
        den = np.polynomial.polynomial.polypow([-1] + [0] * (n - 1) + [1], 2)
        g, h = R.monomial(1, n - 1), R((c,), tuple(den))
        dom = DomainSpec("punctured", _roots_of_unity(n))
    elif name == "scherk_singly":
        g, h = R((0, 1)), R((1j * c,), (-1, 0, 0, 0, 1))
        dom = DomainSpec("punctured", (1, 1j, -1, -1j))
    elif name == "richmond":
        g, h, dom = R.monomial(1, 2), R.monomial(c, -2), DomainSpec("punctured", (0j,))
    elif name == "lopez_ros":
        rho = complex(p.get("rho", 1.0))
        g, h = R((3 * rho, 0, rho), (-1, 0, 1)), R.const(1 / rho)
        dom = DomainSpec("punctured", (1 + 0j, -1 + 0j))
    else:
        raise UnknownSurface(f"no Weierstrass catalog entry {name!r}")
    return WeierstrassData(g, h, dom, name, tuple(sorted(p.items())))


CATALOG = ("plane", "enneper", "enneper_n", "helicoid", "catenoid", "catenoid_imaginary",
           "jorge_meeks", "scherk_singly", "richmond", "lopez_ros")


def eval_points(data, w, w_star=0j, cmap=IDENTITY, tol=1e-13):
    """f at arbitrary points w (any shape) by straight w-segments from w_star, batched."""
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    out = integrate_segments(data.integrand, np.full(flat.size, complex(w_star)), flat, cmap, tol)
    return np.real(out).reshape(w.shape + (3,))
