"""Going back: a Lorentzian Weyl tensor annihilated by a timelike T, seen through g = gL + 2 T T.

The Riemannian operator has A = O, so its Berger-Thorpe normal form (and hence
the Lorentzian tensor) is fixed by the critical data of the g-quadratic form.
"""

import numpy as np

from weylbridge import classify, lorentz_weyl_via_riemann_bridge
from weylbridge.petrov import normal_form_matrix
from weylbridge.weylop import bridge_operator, tensor_from_operator

np.set_printoptions(precision=4, suppress=True)

mu = np.array([-1.4, 0.3, 1.1])
ML = normal_form_matrix("I", (0, 0, 0), mu)
print("Lorentzian operator, type", classify(ML).petrov)

Wf = tensor_from_operator(ML, "lorentzian")
eta = np.diag([-1.0, 1, 1, 1])
opT, g, _ = bridge_operator(Wf, eta, [1, 0, 0, 0], "lorentzian")
print("Riemannian bridge operator:\n", opT.mat)

rec = lorentz_weyl_via_riemann_bridge(opT)
print("recovered lambda:", np.round(rec.form.params.lam, 12))
print("recovered mu:    ", np.round(rec.form.params.mu, 12), "(the Lorentzian mu with sign flipped)")
print(f"reconstruction error {rec.reconstruction_error:.1e}, A-block residual {rec.a_block_residual:.1e}")
