"""Walk through the warped example metric (2x)^3 dr^2 + dx^2 + (2x)^-3 dy^2 + dz^2.

Computes its Weyl operator, finds the unit vectors T with W(T, ., ., T) = 0,
then flips the signature along one of them and classifies the result.
"""

import numpy as np

from weylbridge import build_operator, builtin, classify, curvature_at, orthonormal_frame
from weylbridge.annihilator import solve_frame_tensor
from weylbridge.curvature import frame_components
from weylbridge.quadform import count_spacelike_critical_points
from weylbridge.weylop import annihilates, bridge_operator

np.set_printoptions(precision=4, suppress=True)

chart = builtin("paper-example")
p = np.array([0.0, 1.3, 0.0, 0.0])
pc = curvature_at(chart, p)
fb = orthonormal_frame(chart, p)
op = build_operator(pc.weyl, fb)

print(f"Weyl operator at x = {p[1]} (expect 3/(2x^2) = {1.5 / p[1] ** 2:.4f} on the diagonal):")
print(op.mat)

Wf = frame_components(pc.weyl, fb.vectors)
sols = solve_frame_tensor(Wf)
print(f"\n{len(sols)} annihilating directions, up to sign (frame coefficients):")
for s in sols:
    print("  ", s.c, f"residual {s.residual:.1e}")

# take the first one back to coordinates and check it directly
T = fb.vectors @ sols[0].c
print("\nannihilates(W, T):", bool(annihilates(pc.weyl, T, pc.g)))

# gL = g - 2 T T: the Weyl tensor now commutes with the Lorentzian star
opL, gL, _ = bridge_operator(pc.weyl, pc.g, T, "riemannian")
cw = classify(opL)
cc = count_spacelike_critical_points(opL, oracle=True, cw=cw)
print(f"\nLorentzian bridge: Petrov type {cw.petrov}, spacelike critical points {cc.label}"
      f" (search oracle agrees: {cc.agrees})")
