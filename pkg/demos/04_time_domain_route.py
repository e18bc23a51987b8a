"""Derivatives and remainders through time integrals of unitary evolutions.

Functions with an explicit Fourier transform (phi = int phi_hat e^{itx} dt)
admit representations of D1 and D2 as nested time integrals over products of
e^{itA}.  This route shares nothing with divided differences beyond the
eigendecomposition used for the evolutions, so agreement between the two is
a strong cross-check.  A Gaussian packet plays phi; its transform pair is

    phi(x)     = exp(-(x - c)^2 / (2 s^2)),
    phi_hat(t) = s / sqrt(2 pi) exp(-s^2 t^2 / 2) exp(-i c t).
"""

import numpy as np

from specshift import (
    FourierFunction,
    HermitianOperator,
    d1_divdiff,
    d1_fourier,
    d2_divdiff,
    d2_fourier,
    eig,
    remainder_fourier,
    remainder_trace,
    schatten_norm,
    unitary_evolution,
)
from specshift.functions import GaussianPacket
from specshift.oracles import random_hermitian, random_instance

rng = np.random.default_rng(99)
A, V = random_instance(seed=31, n=4, v_norm=0.8)
A = HermitianOperator(A.entries * (2.0 / schatten_norm(A, "op")))
dec = eig(A)
X = random_hermitian(rng, 4).entries
Y = random_hermitian(rng, 4).entries

g = GaussianPacket(center=float(dec.eigenvalues.mean()), width=1.0)
ff = FourierFunction.from_gaussian(g)
print(f"Gaussian packet: center {g.center:+.4f}, width {g.width}")
print(f"truncation T = {ff.truncation} (relative transform tail < 1e-10)\n")

U = unitary_evolution(dec, 0.7)
print(f"evolution sanity: ||U U* - I||_max = "
      f"{np.max(np.abs(U @ U.conj().T - np.eye(4))):.2e}")

d1_t = d1_fourier(ff, A, X)
d1_d = d1_divdiff(g, dec, X)
print(f"\nfirst derivative, time integrals vs divided differences:")
print(f"  max |difference| / scale = "
      f"{np.max(np.abs(d1_t - d1_d)) / np.max(np.abs(d1_d)):.2e}")

d2_t = d2_fourier(ff, A, X, Y)
d2_d = d2_divdiff(g, dec, X, Y)
print(f"second derivative:")
print(f"  max |difference| / scale = "
      f"{np.max(np.abs(d2_t - d2_d)) / np.max(np.abs(d2_d)):.2e}")

z_t = remainder_fourier(ff, A, V)
z_s = remainder_trace(g, A, V, 3)
print(f"\nthird-order remainder:")
print(f"  time-domain  {z_t:+.12e}")
print(f"  spectral     {z_s:+.12e}")
print(f"  relative gap {abs(z_t - z_s) / (1 + abs(z_s)):.2e}")
