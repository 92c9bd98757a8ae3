"""Sym-Bobenko formulas in R3, S3 and H3, ambient models, display maps and isometries.

Matrix models
  R3: (x1,x2,x3) <-> (-i/2) [[-x3, x1+i x2], [x1-i x2, x3]], <x,y> = -2 tr(xy)
  S3: (x1,x2,x3,x4) = (a1, b2, b1, a2) <-> [[a, b], [-conj b, conj a]], a = a1+i a2, b = b1+i b2
  H3: (x1,x2,x3,x0) <-> [[x0+x3, x1-i x2], [x1+i x2, x0-x3]], Minkowski signature (+,+,+,-)
"""

from dataclasses import dataclass

import numpy as np

from . import loopalg as la
from .errors import BadGammas, NotUnitary, ProjectionPole, ZeroQ

E3 = np.diag([1j, -1j])  # diag(i, -i)


# ----------------------------------------------------------------------------
# coordinate conversions (batched over leading axes)
# ----------------------------------------------------------------------------


def r3_from_matrix(X):
    X = np.asarray(X)
    x1 = np.real(1j * (X[..., 0, 1] + X[..., 1, 0]))
    x2 = np.real(X[..., 0, 1] - X[..., 1, 0])
    x3 = np.real(2j * X[..., 1, 1])
    return np.stack([x1, x2, x3], axis=-1)


def r3_to_matrix(x):
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    M = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    M[..., 0, 0] = -x3
    M[..., 0, 1] = x1 + 1j * x2
    M[..., 1, 0] = x1 - 1j * x2
    M[..., 1, 1] = x3
    return -0.5j * M


def s3_from_matrix(X):
    X = np.asarray(X)
    a, b = X[..., 0, 0], X[..., 0, 1]
    return np.stack([a.real, b.imag, b.real, a.imag], axis=-1)


def s3_to_matrix(x):
    x = np.asarray(x, dtype=float)
    a = x[..., 0] + 1j * x[..., 3]
    b = x[..., 2] + 1j * x[..., 1]
    M = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    M[..., 0, 0] = a
    M[..., 0, 1] = b
    M[..., 1, 0] = -np.conj(b)
    M[..., 1, 1] = np.conj(a)
    return M


def h3_from_matrix(X):
    X = np.asarray(X)
    x0 = np.real(X[..., 0, 0] + X[..., 1, 1]) / 2
    x3 = np.real(X[..., 0, 0] - X[..., 1, 1]) / 2
    x1 = np.real(X[..., 0, 1] + X[..., 1, 0]) / 2
    x2 = np.real((X[..., 1, 0] - X[..., 0, 1]) / 2j)
    return np.stack([x1, x2, x3, x0], axis=-1)


def h3_to_matrix(x):
    x = np.asarray(x, dtype=float)
    x1, x2, x3, x0 = (x[..., k] for k in range(4))
    M = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    M[..., 0, 0] = x0 + x3
    M[..., 0, 1] = x1 - 1j * x2
    M[..., 1, 0] = x1 + 1j * x2
    M[..., 1, 1] = x0 - x3
    return M


FROM_MATRIX = {"R3": r3_from_matrix, "S3": s3_from_matrix, "H3": h3_from_matrix}
TO_MATRIX = {"R3": r3_to_matrix, "S3": s3_to_matrix, "H3": h3_to_matrix}
METRIC_DIAG = {"R3": np.ones(3), "S3": np.ones(4), "H3": np.array([1.0, 1.0, 1.0, -1.0])}


def ambient_inner(ambient, x, y):
    """Ambient bilinear form on coordinate vectors (Euclidean, Euclidean R4, Minkowski)."""
    return np.sum(METRIC_DIAG[ambient] * np.asarray(x) * np.asarray(y), axis=-1)


@dataclass(frozen=True)
class AmbientPoint:
    tag: str
    matrix: np.ndarray

    @property
    def coords(self):
        return FROM_MATRIX[self.tag](self.matrix)

    @classmethod
    def from_coords(cls, tag, x):
        return cls(tag, TO_MATRIX[tag](x))

    def check(self, tol=1e-9):
        M = np.asarray(self.matrix)
        if self.tag == "R3":
            return la.is_traceless(M, tol) and np.max(np.abs(M + M.conj().T)) < tol
        if self.tag == "S3":
            return la.is_su2(M, tol)
        return la.is_hermitian(M, tol) and la.is_det_one(M, tol) and np.trace(M).real > 0

    def display(self):
        return to_display(self)


# ----------------------------------------------------------------------------
# metrics
# ----------------------------------------------------------------------------


def metric_r3(x, y):
    return float(np.real(-2 * np.trace(np.asarray(x) @ np.asarray(y))))


def metric_s3(X, Y):
    return float(np.real(0.5 * np.trace(np.asarray(X) @ la.SIGMA2 @ np.asarray(Y).T @ la.SIGMA2)))


def metric_h3(X, Y):
    return float(np.real(-0.5 * np.trace(np.asarray(X) @ la.SIGMA2 @ np.asarray(Y).T @ la.SIGMA2)))


# ----------------------------------------------------------------------------
# Sym-Bobenko formulas (batched over leading axes of the loop arrays)
# ----------------------------------------------------------------------------


def _coeffs(F):
    return F.coeffs if isinstance(F, la.TwistedLoop) else np.asarray(F, dtype=complex)


def _inv2(A):
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    out = np.empty_like(A)
    out[..., 0, 0] = A[..., 1, 1]
    out[..., 1, 1] = A[..., 0, 0]
    out[..., 0, 1] = -A[..., 0, 1]
    out[..., 1, 0] = -A[..., 1, 0]
    return out / det[..., None, None]


def _dag(A):
    return np.conj(np.swapaxes(A, -1, -2))


def sym_r3_matrix(F, H=0.5, lam0=1.0, check=True):
    """(f, N) as su2 matrices."""
    if H == 0:
        raise ValueError("H must be nonzero")
    c = _coeffs(F)
    F0 = la.evaluate(c, lam0)
    dF0 = la.evaluate(la.dlambda_coeffs(c)[0], lam0)
    if check:
        res = float(np.max(np.abs(F0 @ _dag(F0) - la.I2)))
        if res > 1e-6:
            raise NotUnitary(f"frame not unitary at lambda0 (residual {res:.2e})")
    Fi = _inv2(F0)
    f = (-0.5 * F0 @ E3 @ Fi - 1j * lam0 * dF0 @ Fi) / (2 * H)
    Nm = F0 @ (0.5 * E3) @ Fi
    return f, Nm


def sym_r3(F, H=0.5, lam0=1.0, check=True):
    """Point f and unit normal N in R3 coordinates."""
    f, Nm = sym_r3_matrix(F, H, lam0, check)
    return r3_from_matrix(f), r3_from_matrix(Nm)


def _check_gammas(g1, g2):
    if abs(np.sin(g2 - g1)) < 1e-12:
        raise BadGammas("(gamma2 - gamma1)/pi must not be an integer")


def sym_s3_matrix(F, g1, g2, check=True):
    _check_gammas(g1, g2)
    c = _coeffs(F)
    F1 = la.evaluate(c, np.exp(1j * g1))
    F2 = la.evaluate(c, np.exp(1j * g2))
    if check:
        res = max(float(np.max(np.abs(F1 @ _dag(F1) - la.I2))), float(np.max(np.abs(F2 @ _dag(F2) - la.I2))))
        if res > 1e-6:
            raise NotUnitary(f"frame not unitary at exp(i gamma) (residual {res:.2e})")
    d = np.exp(0.5j * (g1 - g2))
    f = F1 @ np.diag([d, 1 / d]) @ _inv2(F2)
    Nm = 1j * F1 @ np.diag([d, -1 / d]) @ _inv2(F2)
    return f, Nm


def sym_s3(F, g1, g2, check=True):
    f, Nm = sym_s3_matrix(F, g1, g2, check)
    return s3_from_matrix(f), s3_from_matrix(Nm)


def mean_curvature_s3(g1, g2):
    _check_gammas(g1, g2)
    return 1 / np.tan(g2 - g1)


def sym_h3_matrix(F, q, psi=0.0):
    if q == 0:
        raise ZeroQ("q must be nonzero")
    c = _coeffs(F)
    F0 = la.evaluate(c, np.exp(q / 2 + 1j * psi))
    Ft = F0 @ np.diag([np.exp(q / 4), np.exp(-q / 4)])
    f = Ft @ _dag(Ft)
    Nm = Ft @ la.SIGMA3 @ _dag(Ft)
    return f, Nm


def sym_h3(F, q, psi=0.0):
    f, Nm = sym_h3_matrix(F, q, psi)
    return h3_from_matrix(f), h3_from_matrix(Nm)


def mean_curvature_h3(q):
    if q == 0:
        raise ZeroQ("q must be nonzero")
    return 1 / np.tanh(-q)


def hat_involution(f):
    """f -> -sigma3 f^T sigma3, relating the two Sym conventions (matrix form)."""
    f = np.asarray(f)
    return -la.SIGMA3 @ np.swapaxes(f, -1, -2) @ la.SIGMA3


# ----------------------------------------------------------------------------
# display
# ----------------------------------------------------------------------------


def stereographic(x):
    x = np.asarray(x, dtype=float)
    den = 1 - x[..., 3]
    if np.any(np.abs(den) < 1e-12):
        raise ProjectionPole("stereographic projection at (0,0,0,1)")
    return x[..., :3] / den[..., None]


def stereographic_inverse(p):
    p = np.asarray(p, dtype=float)
    n2 = np.sum(p ** 2, axis=-1)
    return np.concatenate([2 * p, (n2 - 1)[..., None]], axis=-1) / (n2 + 1)[..., None]


def poincare_from_matrix(A):
    A = np.asarray(A)
    a11, a12, a22 = A[..., 0, 0], A[..., 0, 1], A[..., 1, 1]
    den = np.real(2 + a11 + a22)
    v = np.stack([np.real(a12 + np.conj(a12)), np.real(1j * (np.conj(a12) - a12)), np.real(a11 - a22)], -1)
    return v / den[..., None]


def to_display(p, tag=None):
    """Real triple for plotting: identity (R3), stereographic (S3), Poincare ball (H3).

    Accepts an AmbientPoint or (tag, coordinate array)."""
    if isinstance(p, AmbientPoint):
        tag, x = p.tag, p.coords
    else:
        x = np.asarray(p, dtype=float)
    if tag == "R3":
        return x
    if tag == "S3":
        return stereographic(x)
    if tag == "H3":
        return poincare_from_matrix(h3_to_matrix(x))
    raise ValueError(f"unknown ambient {tag!r}")


# ----------------------------------------------------------------------------
# isometries from z-constant loops
# ----------------------------------------------------------------------------


@dataclass
class IsometryDescriptor:
    ambient: str
    matrix: np.ndarray  # 3x3 rotation (R3) or 4x4 action on coordinates
    translation: np.ndarray = None  # R3 only
    axis: np.ndarray = None
    angle: float = None
    A1: np.ndarray = None
    A2: np.ndarray = None

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        y = x @ self.matrix.T
        if self.translation is not None:
            y = y + self.translation
        return y


def _linear_action(ambient, act):
    to, fro = TO_MATRIX[ambient], FROM_MATRIX[ambient]
    n = 3 if ambient == "R3" else 4
    cols = [fro(act(to(e))) for e in np.eye(n)]
    return np.array(cols).T


def isometry_from_loop(A, ambient="R3", H=0.5, lam0=1.0, g1=None, g2=None, q=None, psi=0.0):
    c = _coeffs(A)
    if ambient == "R3":
        A0 = la.evaluate(c, lam0)
        if np.max(np.abs(A0 @ _dag(A0) - la.I2)) > 1e-6:
            raise NotUnitary("isometry loop not unitary at lambda0")
        dA = la.evaluate(la.dlambda_coeffs(c)[0], lam0)
        Ai = _inv2(A0)
        R = _linear_action("R3", lambda X: A0 @ X @ Ai)
        T = r3_from_matrix(-1j * lam0 * dA @ Ai / (2 * H))
        a, b = A0[0, 0], A0[0, 1]
        axis = np.array([-b.imag, b.real, a.imag])
        ang = float(np.arccos(np.clip(a.real ** 2 - a.imag ** 2 - abs(b) ** 2, -1, 1)))
        return IsometryDescriptor("R3", R, T, axis, ang, A0)
    if ambient == "S3":
        _check_gammas(g1, g2)
        A1 = la.evaluate(c, np.exp(1j * g1))
        A2 = la.evaluate(c, np.exp(1j * g2))
        for M in (A1, A2):
            if np.max(np.abs(M @ _dag(M) - la.I2)) > 1e-6:
                raise NotUnitary("isometry loop not unitary at exp(i gamma)")
        A2i = _inv2(A2)
        R = _linear_action("S3", lambda X: A1 @ X @ A2i)
        return IsometryDescriptor("S3", R, A1=A1, A2=A2)
    if ambient == "H3":
        if not q:
            raise ZeroQ("q must be nonzero")
        A0 = la.evaluate(c, np.exp(q / 2 + 1j * psi))
        R = _linear_action("H3", lambda X: A0 @ X @ _dag(A0))
        return IsometryDescriptor("H3", R, A1=A0)
    raise ValueError(f"unknown ambient {ambient!r}")
