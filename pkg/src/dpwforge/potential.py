"""Holomorphic potentials xi = sum_j A_j(z) lambda^j dz with rational coefficient functions."""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import loopalg as la
from .errors import BadParams, BranchPointRisk, NotPlusLoop, ValidationError


# ----------------------------------------------------------------------------
# coefficient functions
# ----------------------------------------------------------------------------


def _as_complex_list(seq):
    out = []
    for c in seq:
        if isinstance(c, (list, tuple)):
            out.append(complex(c[0], c[1]))
        else:
            out.append(complex(c))
    return out


@dataclass(frozen=True)
class RationalFn:
    """num(z)/den(z), optionally times exp(p(z)) and a principal-branch power z**pow.

    Polynomials are coefficient sequences in ascending powers of z.  The exp and
    power factors are the small transcendental extension needed by the helicoid
    and the fractional-power catalog entries."""

    num: tuple
    den: tuple = (1.0,)
    exp: tuple = ()
    pow: float = 0.0
    punctures: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(_as_complex_list(self.num)))
        object.__setattr__(self, "den", tuple(_as_complex_list(self.den)))
        object.__setattr__(self, "exp", tuple(_as_complex_list(self.exp)))
        if not any(c != 0 for c in self.den):
            raise ValidationError("denominator is identically zero")

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def monomial(cls, c, k):
        """c z^k for integer k (negative k puts z^-k in the denominator)."""
        if k >= 0:
            return cls((0,) * k + (c,))
        return cls((c,), (0,) * (-k) + (1,), punctures=(0j,))

    def is_zero(self):
        return not any(c != 0 for c in self.num)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        val = np.polyval(self.num[::-1], z) / np.polyval(self.den[::-1], z)
        if self.exp:
            val = val * np.exp(np.polyval(self.exp[::-1], z))
        if self.pow:
            val = val * np.exp(self.pow * np.log(z))
        return val

    def derivative(self, z, h=1e-5):
        """Complex derivative by a 4-point central stencil (holomorphic so any direction works)."""
        return (-self(z + 2 * h) + 8 * self(z + h) - 8 * self(z - h) + self(z - 2 * h)) / (12 * h)

    def to_json(self):
        d = {"num": [[c.real, c.imag] for c in self.num], "den": [[c.real, c.imag] for c in self.den]}
        if self.exp:
            d["exp"] = [[c.real, c.imag] for c in self.exp]
        if self.pow:
            d["pow"] = self.pow
        return d

    @classmethod
    def from_json(cls, d):
        if isinstance(d, (int, float, list)):
            return cls((_as_complex_list([d])[0],))
        return cls(tuple(d["num"]), tuple(d.get("den", [1.0])), tuple(d.get("exp", [])),
                   float(d.get("pow", 0.0)))


ZERO = RationalFn((0,))


# ----------------------------------------------------------------------------
# domains
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainSpec:
    """kind: 'plane' | 'rectangle' | 'annulus' | 'punctured'.  punctures: declared poles."""

    kind: str = "plane"
    punctures: tuple = ()
    params: dict = field(default_factory=dict)

    def to_json(self):
        return {"kind": self.kind, "punctures": [[p.real, p.imag] for p in self.punctures],
                **self.params}

    @classmethod
    def from_json(cls, d):
        d = dict(d or {})
        kind = d.pop("kind", "plane")
        punct = tuple(complex(*p) if isinstance(p, (list, tuple)) else complex(p)
                      for p in d.pop("punctures", []))
        return cls(kind, punct, d)


# ----------------------------------------------------------------------------
# potentials
# ----------------------------------------------------------------------------


class HolomorphicPotential:
    """terms: dict j -> 2x2 nested list of RationalFn (j >= -1)."""

    def __init__(self, terms, domain=None, name="custom", params=None, base_point=0j):
        self.terms = {int(j): [[m[0][0], m[0][1]], [m[1][0], m[1][1]]] for j, m in terms.items()}
        self.domain = domain or DomainSpec()
        self.name = name
        self.params = dict(params or {})
        self.base_point = complex(base_point)
        if min(self.terms) < -1:
            raise ValidationError("potentials start at lambda^-1")

    @property
    def j_max(self):
        return max(self.terms)

    def terms_at(self, z):
        """dict j -> array (..., 2, 2) of evaluated coefficients."""
        z = np.asarray(z, dtype=complex)
        out = {}
        for j, m in self.terms.items():
            A = np.zeros(z.shape + (2, 2), dtype=complex)
            for a in range(2):
                for b in range(2):
                    if not m[a][b].is_zero():
                        A[..., a, b] = m[a][b](z)
            out[j] = A
        return out

    def loop_at(self, z, N=la.DEFAULT_ORDER):
        z = np.asarray(z, dtype=complex)
        c = np.zeros(z.shape + (2 * N + 1, 2, 2), dtype=complex)
        for j, A in self.terms_at(z).items():
            c[..., j + N, :, :] = A
        return c

    def validate(self, sample_points=None, tol=1e-9):
        """Trace-free and twisted structure at sample points; warns BranchPointRisk on vanishing a_-1."""
        pts = np.asarray(sample_points if sample_points is not None else self.default_samples())
        report = {"ok": True, "problems": []}
        T = self.terms_at(pts)
        for j, A in T.items():
            tr = np.abs(A[..., 0, 0] + A[..., 1, 1])
            if np.max(tr, initial=0) > tol:
                k = int(np.argmax(tr))
                report["problems"].append(f"A_{j} not trace free at z={pts.flat[k]}")
            if j % 2:
                bad = np.abs(A[..., 0, 0]) + np.abs(A[..., 1, 1])
                what = "diagonal"
            else:
                bad = np.abs(A[..., 0, 1]) + np.abs(A[..., 1, 0])
                what = "off-diagonal"
            if np.max(bad, initial=0) > tol:
                k = int(np.argmax(bad))
                report["problems"].append(f"A_{j} has {what} part at z={pts.flat[k]} (not twisted)")
        if report["problems"]:
            report["ok"] = False
            raise ValidationError("; ".join(report["problems"]))
        if -1 in T:
            ur = np.abs(T[-1][..., 0, 1])
            if np.min(ur, initial=np.inf) < 1e-8:
                k = int(np.argmin(ur))
                warnings.warn(f"upper-right entry of A_-1 vanishes near z={pts.flat[k]}", BranchPointRisk)
                report["branch_point_risk"] = complex(pts.flat[k])
        else:
            raise ValidationError("potential has no lambda^-1 term")
        return report

    def default_samples(self):
        xs = np.linspace(-1.5, 1.5, 13)
        Z = (xs[:, None] + 1j * xs[None, :]).ravel()
        for p in self.domain.punctures:
            Z = Z[np.abs(Z - p) > 1e-3]
        return Z

    # serialization ----------------------------------------------------------
    def to_json(self):
        if self.name != "custom":
            return {"family": self.name, "params": _jsonable(self.params)}
        return {"terms": [{"j": j, "matrix": [[e.to_json() for e in row] for row in m]}
                          for j, m in sorted(self.terms.items())],
                "domain": self.domain.to_json()}


def _jsonable(params):
    out = {}
    for k, v in params.items():
        if isinstance(v, complex):
            out[k] = [v.real, v.imag]
        else:
            out[k] = v
    return out


class SampledPotential:
    """Escape hatch for potentials that are not rational: a callable z -> loop array."""

    def __init__(self, fn, domain=None, name="sampled", base_point=0j):
        self.fn = fn
        self.domain = domain or DomainSpec()
        self.name = name
        self.base_point = complex(base_point)
        self.terms = None

    def loop_at(self, z, N=la.DEFAULT_ORDER):
        return self.fn(np.asarray(z, dtype=complex), N)


# ----------------------------------------------------------------------------
# builtins
# ----------------------------------------------------------------------------


def _c(x):
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def builtin(name, params=None):
    params = dict(params or {})
    C = RationalFn.const
    Z = ZERO
    if name == "cylinder":
        return HolomorphicPotential({-1: [[Z, C(1)], [C(1), Z]]}, DomainSpec("plane"), name, params)
    if name == "sphere":
        return HolomorphicPotential({-1: [[Z, C(1)], [Z, Z]]}, DomainSpec("plane"), name, params)
    if name == "delaunay":
        r = params.get("r", 0.0)
        s = _c(params.get("s", 0.25))
        t = _c(params.get("t", 0.25))
        if isinstance(r, (list, tuple)) or abs(complex(r).imag) > 0:
            raise BadParams("delaunay: r must be real")
        r = float(np.real(r))
        if abs((s * t).imag) > 1e-12:
            raise BadParams("delaunay: s*t must be real")
        if s == 0 and t == 0:
            raise BadParams("delaunay: s and t both zero")
        inv = lambda c: RationalFn((c,), (0, 1), punctures=(0j,))
        terms = {-1: [[Z, inv(s)], [inv(t), Z]],
                 0: [[inv(r), Z], [Z, inv(-r)]],
                 1: [[Z, inv(np.conj(t))], [inv(np.conj(s)), Z]]}
        if r == 0:
            terms.pop(0)
        return HolomorphicPotential(terms, DomainSpec("punctured", (0j,)), name,
                                    {"r": r, "s": s, "t": t}, base_point=1.0)
    if name == "smyth":
        k = params.get("k", 0)
        if int(k) != k or k < 0:
            raise BadParams("smyth: k must be a non-negative integer")
        c = _c(params.get("c", 1.0))
        if c == 0:
            raise BadParams("smyth: c must be nonzero")
        return HolomorphicPotential({-1: [[Z, C(1)], [RationalFn.monomial(c, int(k)), Z]]},
                                    DomainSpec("plane"), name, {"k": int(k), "c": c})
    raise BadParams(f"unknown potential family {name!r}")


def from_json(d):
    if isinstance(d, str):
        d = json.loads(d)
    if "family" in d:
        return builtin(d["family"], d.get("params", {}))
    if "terms" not in d:
        raise ValidationError("potential JSON needs 'family' or 'terms'")
    terms = {}
    for entry in d["terms"]:
        m = entry["matrix"]
        terms[int(entry["j"])] = [[RationalFn.from_json(m[a][b]) for b in range(2)] for a in range(2)]
    dom = DomainSpec.from_json(d.get("domain"))
    bp = d.get("base_point", 0)
    return HolomorphicPotential(terms, dom, "custom", base_point=_c(bp))


# ----------------------------------------------------------------------------
# transformations
# ----------------------------------------------------------------------------


def _is_plus(c, tol=1e-12):
    N = la.order_of(c)
    return float(np.max(np.abs(c[..., :N, :, :]), initial=0.0)) < tol


def gauge(xi, p_plus, N=la.DEFAULT_ORDER):
    """Right gauge phi -> phi p_+, xi -> p_+^-1 xi p_+ + p_+^-1 dp_+.

    p_plus: either a constant loop (TwistedLoop or array) or a callable
    z -> (P, dP) loop arrays.  Constant loops that are constant in lambda keep
    the potential rational; everything else returns a SampledPotential."""
    if isinstance(p_plus, la.TwistedLoop):
        p_plus = p_plus.coeffs
    if not callable(p_plus):
        P = np.asarray(p_plus, dtype=complex)
        if not _is_plus(P):
            raise NotPlusLoop("gauge needs a plus loop (no negative lambda powers)")
        M = la.order_of(P)
        rest = np.delete(P, M, axis=0)
        if isinstance(xi, HolomorphicPotential) and np.max(np.abs(rest), initial=0.0) == 0:
            g = P[M]
            gi = np.linalg.inv(g)
            terms = {}
            for j, m in xi.terms.items():
                terms[j] = _conj_rational(m, gi, g)
            params = dict(xi.params)
            out = HolomorphicPotential(terms, xi.domain, "custom", base_point=xi.base_point)
            out.params = params
            return out
        const = P
        p_plus = lambda z: (np.broadcast_to(la.resize(const, N)[0], np.shape(z) + (2 * N + 1, 2, 2)),
                            np.zeros(np.shape(z) + (2 * N + 1, 2, 2), dtype=complex))

    def fn(z, NN):
        Pz, dPz = p_plus(z)
        Pz = la.resize(np.asarray(Pz), NN)[0]
        dPz = la.resize(np.asarray(dPz), NN)[0]
        if not _is_plus(Pz, 1e-10):
            raise NotPlusLoop("gauge function is not a plus loop")
        Pinv = la.inv_coeffs(Pz, NN)
        X = xi.loop_at(z, NN)
        a, _ = la.conv(Pinv, X, NN)
        a, _ = la.conv(a, Pz, NN)
        b, _ = la.conv(Pinv, dPz, NN)
        return a + b

    return SampledPotential(fn, xi.domain, "gauged", xi.base_point)


def _conj_rational(m, gi, g):
    """gi @ m @ g for a 2x2 RationalFn matrix and constant matrices; only diagonal/antidiagonal
    constant matrices keep each entry a single rational function."""
    out = [[ZERO, ZERO], [ZERO, ZERO]]
    for a in range(2):
        for b in range(2):
            coef_terms = []
            for c in range(2):
                for d in range(2):
                    w = gi[a, c] * g[d, b]
                    if w != 0 and not m[c][d].is_zero():
                        coef_terms.append((w, m[c][d]))
            if not coef_terms:
                continue
            if len(coef_terms) > 1:
                raise NotImplementedError("constant gauge mixing entries; use a callable gauge")
            w, f = coef_terms[0]
            out[a][b] = RationalFn(tuple(w * c for c in f.num), f.den, f.exp, f.pow, f.punctures)
    return out


def delaunay_phase_gauge(xi):
    """Constant gauge diag(e^{i alpha}, e^{-i alpha}) making s real; returns (gauged xi, alpha)."""
    s = xi.params["s"]
    alpha = float(np.angle(s)) / 2 if s != 0 else -float(np.angle(xi.params["t"])) / 2
    g = np.diag([np.exp(1j * alpha), np.exp(-1j * alpha)])
    out = gauge(xi, la.TwistedLoop.constant(g))
    p = dict(xi.params)
    p["s"] = s * np.exp(-2j * alpha)
    p["t"] = xi.params["t"] * np.exp(2j * alpha)
    out.params = p
    return out, alpha


def off_diagonalize(xi, z_star=None, N=la.DEFAULT_ORDER, nodes=24):
    """Gauge away the diagonal part: dp = p A_diag dz, p(z_*) = I, xi~ = p A_off p^-1.

    A_diag is diagonal, so p = diag(exp(theta), exp(-theta)) with theta the integral of its
    (1,1) entry; the integral is taken by Gauss-Legendre quadrature on the segment from z_*.
    Returns (xi~ as SampledPotential, p as callable z -> loop array)."""
    z_star = xi.base_point if z_star is None else complex(z_star)
    gx, gw = np.polynomial.legendre.leggauss(nodes)

    def theta(z):
        z = np.asarray(z, dtype=complex)
        t = (gx + 1) / 2
        pts = z_star + (z[..., None] - z_star) * t
        L = xi.loop_at(pts, N)[..., 0, 0]  # (..., nodes, 2N+1)
        return np.einsum("...kj,k->...j", L, gw / 2) * (z - z_star)[..., None]

    def p_of(z):
        th = theta(z)
        X = np.zeros(th.shape[:-1] + (2 * N + 1, 2, 2), dtype=complex)
        X[..., 0, 0] = th
        X[..., 1, 1] = -th
        return la.expm_coeffs(X, N)

    def fn(z, NN):
        if NN != N:
            raise ValueError("off-diagonalized potential was built for a fixed order")
        X = xi.loop_at(z, N)
        off = X.copy()
        off[..., 0, 0] = 0
        off[..., 1, 1] = 0
        P = p_of(z)
        a, _ = la.conv(P, off, N)
        a, _ = la.conv(a, la.inv_coeffs(P, N), N)
        return a

    has_diag = any(not (m[0][0].is_zero() and m[1][1].is_zero()) for m in xi.terms.values()) \
        if getattr(xi, "terms", None) else True
    if not has_diag:
        ident = lambda z: np.broadcast_to(la.TwistedLoop.identity(N).coeffs,
                                          np.shape(z) + (2 * N + 1, 2, 2)).copy()
        return xi, ident
    return SampledPotential(fn, xi.domain, "off_diagonal", z_star), p_of


def dress(phi_solution, h_plus):
    """Left multiplication by a z-constant plus loop; the potential is unchanged and
    monodromies transform as M -> h M h^-1."""
    from .holode import PhiSolution

    H = h_plus.coeffs if isinstance(h_plus, la.TwistedLoop) else np.asarray(h_plus)
    if not _is_plus(H):
        raise NotPlusLoop("dressing needs a plus loop")
    N = phi_solution.N
    H = la.resize(H, N)[0]
    phi0, _ = la.conv(H, phi_solution.phi0, N)
    return PhiSolution(phi_solution.potential, phi_solution.z_star, phi0, N=N, tol=phi_solution.tol,
                       zmap=phi_solution.zmap, dressing=H)
