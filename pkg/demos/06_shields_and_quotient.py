#!/usr/bin/env python3
"""Two finishing experiments.

1. The modified Shields space X_r: the shift is order-bounded for means of
   order >= 2 but its order-1 means grow like log n when the peripheral
   spectrum fills the whole circle -- the log-growth shows up cleanly in
   n^{-r} ||F_n||_r.
2. The limsup-seminorm quotient: on diag(1, e^{i pi/3}, 1/2) with the power
   scheme, the seminorm kills the decaying direction and the operator
   induced on the quotient is the unitary part.
"""

import numpy as np

from ergolab import (
    diag_operator, gamma_quotient, identity_powers, log_fit, shields_report,
)

print("=== Shields log growth (r = 0) ===")
mean_rep, power_rep, inner_rep = shields_report(0, 2048)
mask = mean_rep.ns >= 64
c, d, rel = log_fit(mean_rep.ns[mask], mean_rep.values[mask])
print(f"  fit ||F_n||_0 ~ c log n + d: c = {c:.4f}, d = {d:.4f} "
      f"(relative residual {rel:.4f})")
for n, v in mean_rep.points[::8]:
    print(f"  n = {n:>5}: {v:.4f}   ({v / np.log(n):.4f} per log n)"
          if n > 1 else f"  n = {n:>5}: {v:.4f}")
print(f"  power sequence n^{{-1}} ||z^n||_0 stays at "
      f"{power_rep.values.min():.1f} (no decay)")

print()
print("=== limsup-seminorm quotient ===")
t = diag_operator([1.0, np.exp(1j * np.pi / 3.0), 0.5])
model = gamma_quotient(t, identity_powers(), 0, (256, 512))
print(f"  kernel dimension: {model.kernel_basis.shape[1]} "
      f"(the 0.5-eigendirection)")
print(f"  induced operator eigenvalues: "
      f"{np.round(np.linalg.eigvals(model.induced_op), 6)}")
print(f"  isometry defect on probes: {model.isometry_defect:.2e}")
print(f"  per-probe seminorm, window halves agree to "
      f"{max(abs(a - b) for a, b in zip(model.gamma_values['first_half'], model.gamma_values['second_half'])):.2e}")
