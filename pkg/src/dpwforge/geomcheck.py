"""Finite-difference verifier: fundamental forms, curvatures, Hopf differential, Gauss-Codazzi,
harmonicity, Smyth symmetry and Lawson checks.

Every quantity is measured from surface samples on a 7x7 stencil of spacing h around each
sample point; nothing here uses the construction that produced the surface.  Pointwise
quantities (metric, H, extrinsic K, Q) use fourth-order central differences; quantities that
differentiate those again (intrinsic K, dQ/dzbar, harmonicity) add a second-order layer."""

from dataclasses import dataclass, field

import numpy as np

from . import loopalg as la
from . import sym
from .errors import DegenerateMetric

KBAR = {"R3": 0.0, "S3": 1.0, "H3": -1.0}
OFFS = np.arange(-3, 4)
D0 = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12
D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12


def _split(out):
    if isinstance(out, tuple):
        return np.asarray(out[0], dtype=float), np.asarray(out[1], dtype=float)
    return np.asarray(out, dtype=float), None


def _normal_covector(ambient, X, a, b):
    """c_k = det[X, a, b, e_k] (or det[a, b, e_k] in R3), raised with the ambient metric."""
    if ambient == "R3":
        return np.cross(a, b)
    M = np.stack([X, a, b], axis=-2)
    out = np.empty(X.shape, dtype=float)
    for k in range(4):
        minor = np.delete(M, k, axis=-1)
        out[..., k] = (-1) ** (k + 3) * np.linalg.det(minor)
    return out / sym.METRIC_DIAG[ambient]


@dataclass
class GeomReport:
    ambient: str
    h: float
    samples: dict = field(default_factory=dict)
    aggregates: dict = field(default_factory=dict)
    header: dict = field(default_factory=dict)

    def to_json(self, per_sample=False):
        d = {"ambient": self.ambient, "h": self.h, "header": self.header, **self.aggregates}
        if per_sample:
            d["samples"] = {k: np.asarray(v).tolist() for k, v in self.samples.items()
                            if not np.iscomplexobj(v)}
        return d


def stencil_points(w, h):
    w = np.asarray(w, dtype=complex).ravel()
    return w[:, None, None] + h * (OFFS[None, :, None] + 1j * OFFS[None, None, :])


def analyze(sampler, ambient, points, h=1e-3, H_expected=None, metric_floor=1e-10, tolerances=None):
    """Measure a surface w -> ambient coordinates at the given parameter points.

    sampler(w) returns coordinates (..., 3|4), optionally with reference normals as a
    second element; the measured normal is oriented to agree with the reference."""
    ambient = ambient.upper()
    pts = stencil_points(points, h)
    X, Nref = _split(sampler(pts))
    P = X.shape[0]
    ip = lambda a, b: sym.ambient_inner(ambient, a, b)

    # fourth-order derivatives on the 3x3 block of inner nodes, each from its own 5x5 window
    win = np.stack([np.stack([X[:, a:a + 5, b:b + 5] for b in range(3)], 1) for a in range(3)], 1)
    fx = np.einsum("pabijc,i,j->pabc", win, D1, D0) / h
    fy = np.einsum("pabijc,i,j->pabc", win, D0, D1) / h
    fxx = np.einsum("pabijc,i,j->pabc", win, D2, D0) / h ** 2
    fyy = np.einsum("pabijc,i,j->pabc", win, D0, D2) / h ** 2
    fxy = np.einsum("pabijc,i,j->pabc", win, D1, D1) / h ** 2
    Xc = X[:, 2:5, 2:5]

    E, F, G = ip(fx, fx), ip(fx, fy), ip(fy, fy)
    n = _normal_covector(ambient, Xc, fx, fy)
    nn = np.sqrt(np.abs(ip(n, n)))
    if np.any(nn == 0):
        raise DegenerateMetric("tangent vectors are parallel")
    n = n / nn[..., None]
    if Nref is not None:
        sgn = np.sign(ip(n[:, 1, 1], Nref[:, 3, 3]))
        sgn[sgn == 0] = 1
        n = n * sgn[:, None, None, None]
    L, M, Nn = ip(fxx, n), ip(fxy, n), ip(fyy, n)
    detg = E * G - F * F
    metric = (E + G) / 2
    if np.min(metric) < metric_floor or np.min(detg) <= 0:
        raise DegenerateMetric(f"metric factor {np.min(metric):.2e} below floor")
    Q = (L - Nn - 2j * M) / 4
    Hc = ((G * L - 2 * F * M + E * Nn) / (2 * detg))[:, 1, 1]
    Kext = ((L * Nn - M * M) / detg)[:, 1, 1]
    conf = np.abs(E - G - 2j * F)[:, 1, 1] / 4

    def d1x(A):
        return (A[:, 2, 1] - A[:, 0, 1]) / (2 * h)

    def d1y(A):
        return (A[:, 1, 2] - A[:, 1, 0]) / (2 * h)

    def d2xx(A):
        return (A[:, 2, 1] - 2 * A[:, 1, 1] + A[:, 0, 1]) / h ** 2

    def d2yy(A):
        return (A[:, 1, 2] - 2 * A[:, 1, 1] + A[:, 1, 0]) / h ** 2

    def d2xy(A):
        return (A[:, 2, 2] - A[:, 2, 0] - A[:, 0, 2] + A[:, 0, 0]) / (4 * h * h)

    e, f_, g = E[:, 1, 1], F[:, 1, 1], G[:, 1, 1]
    A1 = np.stack([
        np.stack([-d2yy(E) / 2 + d2xy(F) - d2xx(G) / 2, d1x(E) / 2, d1x(F) - d1y(E) / 2], -1),
        np.stack([d1y(F) - d1x(G) / 2, e, f_], -1),
        np.stack([d1y(G) / 2, f_, g], -1)], -2)
    A2 = np.stack([
        np.stack([np.zeros_like(e), d1y(E) / 2, d1x(G) / 2], -1),
        np.stack([d1y(E) / 2, e, f_], -1),
        np.stack([d1x(G) / 2, f_, g], -1)], -2)
    Kint = (np.linalg.det(A1) - np.linalg.det(A2)) / (e * g - f_ * f_) ** 2

    dQ = np.abs(d1x(Q) + 1j * d1y(Q)) / 2
    met_c = metric[:, 1, 1]
    codazzi = 2 * dQ / met_c
    gauss = np.abs(Kint - (Kext + KBAR[ambient]))

    harm = None
    if ambient == "R3":
        Nzz = (d2xx(n) + d2yy(n)) / 4
        nc = n[:, 1, 1]
        a = np.linalg.norm(Nzz, axis=-1)
        perp = np.linalg.norm(np.cross(Nzz, nc), axis=-1)
        harm = np.where(a > 1e-12, perp / np.where(a > 1e-12, a, 1), 0.0)

    samples = {"w": np.asarray(points, dtype=complex).ravel(), "X": X[:, 3, 3], "N": n[:, 1, 1],
               "conformal_defect": conf, "metric_factor": met_c, "H": Hc, "K_extrinsic": Kext,
               "K_intrinsic": Kint, "Q": Q[:, 1, 1], "dQ": dQ, "gauss_residual": gauss,
               "codazzi_residual": codazzi}
    if harm is not None:
        samples["harmonicity"] = harm
    Hm = float(np.mean(Hc))
    ref = Hm if H_expected is None else float(H_expected)
    agg = {
        "n_samples": int(P),
        "conformal_defect_max": float(np.max(conf)),
        "conformal_defect_rel_max": float(np.max(conf / met_c)),
        "metric_factor_min": float(np.min(met_c)),
        "metric_factor_max": float(np.max(met_c)),
        "H_mean": Hm,
        "H_max_dev": float(np.max(np.abs(Hc - ref))),
        "K_extrinsic_mean": float(np.mean(Kext)),
        "K_intrinsic_mean": float(np.mean(Kint)),
        "K_intrinsic_max": float(np.max(Kint)),
        "K_intrinsic_absmax": float(np.max(np.abs(Kint))),
        "gauss_residual_max": float(np.max(gauss)),
        "codazzi_residual_max": float(np.max(codazzi)),
        "dQ_max": float(np.max(dQ)),
        "harmonicity_max": None if harm is None else float(np.max(harm)),
    }
    header = {"stencil": "7x7 central differences (4th order pointwise, 2nd order nested)", "h": h, "H_reference": ref,
              "K_ambient": KBAR[ambient], "tolerances": dict(tolerances or {})}
    return GeomReport(ambient, h, samples, agg, header)


# ----------------------------------------------------------------------------
# Smyth reflections
# ----------------------------------------------------------------------------


def smyth_A(k, ell):
    a = np.exp(1j * np.pi * ell / (k + 2))
    return np.diag([a, 1 / a])


def smyth_reflect(z, k, ell):
    return np.exp(2j * np.pi * ell / (k + 2)) * np.conj(z)


def smyth_symmetry_check(frame_fn, k, points, ells=None, K=64):
    """max |F(R_l z, lambda) - A_l conj(F(z, conj lambda)) A_l^-1| over points, l and sampled lambda.

    frame_fn(z array) -> coefficient arrays (..., 2N+1, 2, 2)."""
    z = np.asarray(points, dtype=complex).ravel()
    ells = range(k + 2) if ells is None else ells
    base = frame_fn(z)
    out = {}
    for ell in ells:
        A = smyth_A(k, ell)
        Fr = frame_fn(smyth_reflect(z, k, ell))
        G = A @ np.conj(base) @ np.linalg.inv(A)
        out[ell] = float(np.max(np.abs(la.samples(Fr - G, K))))
    return out


def smyth_surface_check(frame_fn, k, points, H=0.5, ells=None):
    """max |f(R_l z) + A_l conj(f(z)) A_l^-1| (matrix form in su2)."""
    z = np.asarray(points, dtype=complex).ravel()
    ells = range(k + 2) if ells is None else ells
    f0 = sym.sym_r3_matrix(frame_fn(z), H)[0]
    out = {}
    for ell in ells:
        A = smyth_A(k, ell)
        fr = sym.sym_r3_matrix(frame_fn(smyth_reflect(z, k, ell)), H)[0]
        out[ell] = float(np.max(np.abs(fr + A @ np.conj(f0) @ np.linalg.inv(A))))
    return out


# ----------------------------------------------------------------------------
# Lawson correspondence
# ----------------------------------------------------------------------------


def lawson_parameters(dgamma):
    """Sym parameters in R3, S3, H3 giving the same metric and Hopf differential from one frame."""
    s = abs(np.sin(dgamma))
    return {"S3": {"gamma1": -dgamma / 2, "gamma2": dgamma / 2, "H": 1 / np.tan(dgamma)},
            "R3": {"H": 1 / s, "lam0": 1.0},
            "H3": {"q": -np.arcsinh(s), "H": np.sqrt(1 + s * s) / s}}


def lawson_check(frame_fn, points, dgamma, h=1e-3):
    """Apply the three Sym formulas to one frame and measure H, metric and |Q| in each ambient.

    frame_fn(w array) -> coefficient arrays.  Returns the Lawson residuals
    |H_s^2 + 1 - H_r^2| and |H_r^2 + 1 - H_h^2| from measured H values."""
    prm = lawson_parameters(dgamma)
    samplers = {
        "R3": lambda w: sym.sym_r3(frame_fn(w), prm["R3"]["H"], 1.0),
        "S3": lambda w: sym.sym_s3(frame_fn(w), prm["S3"]["gamma1"], prm["S3"]["gamma2"]),
        "H3": lambda w: sym.sym_h3(frame_fn(w), prm["H3"]["q"]),
    }
    reps = {a: analyze(fn, a, points, h) for a, fn in samplers.items()}
    H = {a: reps[a].samples["H"] for a in reps}
    res_sr = float(np.max(np.abs(H["S3"] ** 2 + 1 - H["R3"] ** 2)))
    res_rh = float(np.max(np.abs(H["R3"] ** 2 + 1 - H["H3"] ** 2)))
    m = {a: reps[a].samples["metric_factor"] for a in reps}
    q = {a: np.abs(reps[a].samples["Q"]) for a in reps}
    metric_mis = float(max(np.max(np.abs(m["S3"] / m["R3"] - 1)), np.max(np.abs(m["H3"] / m["R3"] - 1))))
    hopf_mis = float(max(np.max(np.abs(q["S3"] - q["R3"])), np.max(np.abs(q["H3"] - q["R3"]))))
    return {"H": {a: float(np.mean(H[a])) for a in H},
            "H_formula": {a: float(prm[a]["H"]) for a in prm},
            "residual_s_r": res_sr, "residual_r_h": res_rh,
            "metric_mismatch": metric_mis, "hopf_abs_mismatch": hopf_mis, "reports": reps}
