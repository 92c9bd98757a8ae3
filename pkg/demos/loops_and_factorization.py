"""
Twisted loops and their factorizations
======================================

Build a loop, split it into unitary and plus parts, and check the pieces.
"""

import numpy as np

from dpwforge import factor, holode
from dpwforge import loopalg as la

N = 16

# phi(z) for the sphere potential, at one point
z = 0.4 - 0.3j
phi = holode.closed_form_phi("sphere", {}, z, N)
print("phi resolved to 1e-14:", phi.is_resolved(1e-14))

# Iwasawa: phi = F B, F unitary on |lambda| = 1, B holomorphic inside with B(0) positive diagonal
res = factor.iwasawa(phi)
print("Iwasawa residual:", res.residual)
print("B(0) diagonal:", np.round(res.b0_diag, 12))
print("F unitary:", la.is_unitary_loop(res.F))

# the explicit factors, for comparison
s = np.sqrt(1 + abs(z) ** 2)
print("rho vs 1/sqrt(1+|z|^2):", res.rho, 1 / s)

# Birkhoff of a product of a minus loop and a plus loop
rng = np.random.default_rng(0)
minus = factor.random_minus_loop(rng, 3, N)
plus = factor.random_plus_loop(rng, 3, N)
psi = la.conv(minus, plus, N)[0]
Bm, Bp, res_b, _ = factor.birkhoff_coeffs(psi, 1e-10, twisted=True)
K = la._fft_len(4 * N + 2)
print("Birkhoff residual:", res_b)
print("recovered minus factor error:", np.max(np.abs(la.samples(Bm - minus, K))))

# constant matrices reduce to Gram-Schmidt
m = np.array([[2.0, 1j], [0.5, (1 + 0.5j) / 2.0]])
m /= np.sqrt(np.linalg.det(m))
U, T = factor.gram_schmidt_sl2(m)
print("U unitary:", np.allclose(U @ U.conj().T, np.eye(2)), " T upper triangular:", abs(T[1, 0]) < 1e-15)

# the full round-trip suite
print(factor.roundtrip_suite(20, N, seed=1))
