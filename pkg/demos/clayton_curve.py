"""mu, Kendall's tau and Spearman's rho along the Clayton family.

The family runs from W (theta = -1) through Pi (theta -> 0) towards M, so all
three measures sweep [-1, 1]. tau is closed form; mu and rho are numeric.
"""
import numpy as np

from subdep import CopulaFamily, clayton_curve, lambda_inf_numeric, mu_copula_numeric

rows = clayton_curve(np.concatenate([np.linspace(-1, 0, 6)[:-1], [0.5, 1, 2, 5, 10, 20, 50]]))
print(f"{'theta':>7} {'mu':>9} {'tau':>9} {'rho':>9}")
for r in rows:
    print(f"{r.theta:7.2f} {r.mu:9.5f} {r.tau:9.5f} {r.rho:9.5f}")

c = CopulaFamily.clayton(3.0)
sup = mu_copula_numeric(c)
print(f"\ntheta=3: sup(C-Pi)={sup.sup_pos:.6f} at {tuple(round(a, 4) for a in sup.at_pos)}")
print(f"Lambda={lambda_inf_numeric(c):.6f}  |mu|={abs(sup.mu):.6f}")
print(f"theta=1e6: mu={mu_copula_numeric(CopulaFamily.clayton(1e6)).mu:.6f}")
