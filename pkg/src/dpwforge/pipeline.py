"""DPW surfaces end to end: potential -> phi -> Iwasawa -> Sym, on grids or scattered points."""

import numpy as np

from . import factor, holode, sym
from . import loopalg as la
from .errors import BadParams, ZeroQ


class SymParams:
    """Ambient tag plus the Sym parameters of that ambient."""

    def __init__(self, ambient="R3", H=0.5, lam0=1.0, gamma1=None, gamma2=None, q=None, psi=0.0):
        self.ambient = ambient.upper()
        self.H, self.lam0 = float(H), complex(lam0)
        self.gamma1, self.gamma2 = gamma1, gamma2
        self.q, self.psi = q, float(psi)
        if self.ambient == "R3":
            if self.H == 0:
                raise BadParams("H must be nonzero")
            if abs(abs(self.lam0) - 1) > 1e-12:
                raise BadParams("lambda0 must lie on the unit circle")
        elif self.ambient == "S3":
            if gamma1 is None or gamma2 is None:
                raise BadParams("S3 needs gamma1 and gamma2")
            sym._check_gammas(float(gamma1), float(gamma2))
        elif self.ambient == "H3":
            if not q:
                raise ZeroQ("H3 needs q != 0")
        else:
            raise BadParams(f"unknown ambient {ambient!r}")

    @property
    def mean_curvature(self):
        if self.ambient == "R3":
            return self.H
        if self.ambient == "S3":
            return float(sym.mean_curvature_s3(self.gamma1, self.gamma2))
        return float(sym.mean_curvature_h3(self.q))

    def apply(self, F):
        """(coords, normals) for frame coefficient arrays F (..., 2N+1, 2, 2)."""
        if self.ambient == "R3":
            return sym.sym_r3(F, self.H, self.lam0)
        if self.ambient == "S3":
            return sym.sym_s3(F, self.gamma1, self.gamma2)
        return sym.sym_h3(F, self.q, self.psi)

    def to_json(self):
        d = {"ambient": self.ambient}
        if self.ambient == "R3":
            d.update(H=self.H, lambda0=[self.lam0.real, self.lam0.imag])
        elif self.ambient == "S3":
            d.update(gamma1=self.gamma1, gamma2=self.gamma2)
        else:
            d.update(q=self.q, psi=self.psi)
        return d


class DPWSurface:
    """Surface from a holomorphic potential; parametrized by w with z = zmap.z(w)."""

    def __init__(self, potential, params=None, N=la.DEFAULT_ORDER, tol=1e-12, zmap=holode.IDENTITY,
                 z_star=None, phi0=None, iwasawa_tol=1e-10):
        self.params = params or SymParams()
        self.solution = holode.PhiSolution(potential, z_star, phi0, N, tol, zmap)
        self.iwasawa_tol = iwasawa_tol
        self.last_residual = None

    @property
    def N(self):
        return self.solution.N

    @property
    def potential(self):
        return self.solution.potential

    def phi_points(self, w):
        """phi by straight w-paths from the base point; w any shape."""
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        sol = self.solution
        y0 = np.broadcast_to(sol.phi0, (flat.size,) + sol.phi0.shape)
        out = holode.integrate_segments(y0, sol.potential, np.full(flat.size, sol.w_star), flat,
                                        sol.zmap, sol.tol)
        return out.reshape(w.shape + sol.phi0.shape)

    def split(self, phi):
        F, B, res = factor.iwasawa_coeffs(phi, self.iwasawa_tol)
        self.last_residual = float(np.max(res))
        return F, B

    def frames(self, w):
        return self.split(self.phi_points(w))[0]

    def frames_grid(self, W):
        return self.split(self.solution.grid(W))

    def __call__(self, w):
        """(coords, normals) at w; this is the geomcheck sampler interface."""
        return self.params.apply(self.frames(w))

    def grid(self, W):
        F, B = self.frames_grid(W)
        X, Nrm = self.params.apply(F)
        return X, Nrm, F, B


class FrameSurface:
    """Surface from an explicit frame function w -> F coefficients (closed forms)."""

    def __init__(self, frame_fn, params=None):
        self.frame_fn = frame_fn
        self.params = params or SymParams()

    def __call__(self, w):
        return self.params.apply(self.frame_fn(np.asarray(w, dtype=complex)))


def closed_form_frames(family, params, w, N=la.DEFAULT_ORDER, zmap=holode.IDENTITY, tol=1e-10):
    """Iwasawa frames of the closed-form phi at points w (batched)."""
    w = np.asarray(w, dtype=complex)
    z = zmap.z(w.ravel())
    phi = np.stack([holode.closed_form_coeffs(family, params, zz, N) for zz in z])
    F, B, res = factor.iwasawa_coeffs(phi, tol)
    return F.reshape(w.shape + F.shape[1:])
