"""Why Types II, N and III never admit a unit timelike T with W(T, ., ., T) = 0.

Each certificate checks the polynomial identities of the case analysis, scans a
grid of timelike vectors, and runs the multistart solver.
"""

import numpy as np

from weylbridge import exclusion_certificate, solve_lorentzian
from weylbridge.petrov import normal_form_matrix, random_fixture_params
from weylbridge.weylop import WeylOperator6, random_lorentz, reframe

for ptype, lam in (("III", None), ("N", None), ("II", 0.25)):
    cert = exclusion_certificate(ptype, lam)
    print("\n".join(cert.lines()))
    print("certificate ok:", cert.ok, "\n")

rng = np.random.default_rng(1)
hits = 0
for i in range(60):
    t = ("II", "N", "III")[i % 3]
    lam, mu, sc = random_fixture_params(t, rng)
    M = reframe(normal_form_matrix(t, lam, mu, sc), "lorentzian", random_lorentz(rng))
    hits += len(solve_lorentzian(WeylOperator6(M, "lorentzian"), True)) > 0
print(f"random II/N/III fixtures with a timelike annihilator: {hits}/60")
