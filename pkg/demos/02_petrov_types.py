"""The five Petrov normal forms: eigenstructure, eigen-2-planes and critical-point counts."""

import numpy as np

from weylbridge import canonical_eigenplanes, classify, normal_form_fixture
from weylbridge.quadform import count_spacelike_critical_points
from weylbridge.weylop import WeylOperator6, random_lorentz, reframe

rng = np.random.default_rng(0)
fixtures = {
    "I": normal_form_fixture("I", (1, 2, -3), (0.5, -1, 0.5)),
    "D": normal_form_fixture("D", (-2, 1, 1), (0, 0, 0)),
    "II": normal_form_fixture("II", 0.25, 0.1),
    "N": normal_form_fixture("N"),
    "III": normal_form_fixture("III"),
}

for name, op in fixtures.items():
    # hide the normal form behind a random Lorentz frame first
    op = WeylOperator6(reframe(op.mat, "lorentzian", random_lorentz(rng)), "lorentzian")
    cw = classify(op)
    planes = canonical_eigenplanes(cw)
    cc = count_spacelike_critical_points(op, oracle=True, cw=cw)
    kinds = ", ".join(p.causal for p in planes)
    print(f"{name:>3}: classified {cw.petrov:<3} eigenvectors {cw.independent_eigenvectors}, "
          f"distinct eigenvalues {cw.distinct_eigenvalues}, planes [{kinds}], "
          f"critical points {cc.label} (oracle {cc.oracle})")
