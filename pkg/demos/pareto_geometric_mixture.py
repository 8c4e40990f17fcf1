"""A continuous and a discrete margin joined by alpha*M + (1-alpha)*Pi.

X is Pareto and Y geometric, so the subcopula lives on [0,1] x range(F_Y).
Discretising on a 201-point u-grid recovers mu = alpha whatever the geometric
parameter.
"""
import numpy as np

from subdep import ParetoGeometricMixture, mu_measure

print(f"{'alpha':>6} " + " ".join(f"theta={t:<4}" for t in (0.2, 0.5, 0.8)))
for alpha in np.linspace(0, 1, 5):
    row = []
    for theta in (0.2, 0.5, 0.8):
        model = ParetoGeometricMixture(alpha, theta)
        row.append(float(mu_measure(model.subcopula(201)).mu))
    print(f"{alpha:6.2f} " + " ".join(f"{v:10.6f}" for v in row))

m = ParetoGeometricMixture(0.5, 0.2)
print(f"\ngeometric levels kept: {m.v_levels().size}, tail mass dropped: {m.truncation_error:.1e}")
