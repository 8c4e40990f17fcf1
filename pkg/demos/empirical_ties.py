"""mu on samples with ties.

With ties the empirical subcopula lives on a coarse grid, so d(M) and d(W) are
smaller than 1/4 and the normaliser matters. The same data also go through
the dependence matrix.
"""
import numpy as np

from subdep import BivariateSample, dependence_matrix, empirical_subcopula, mu_empirical, pearson_sample

rng = np.random.default_rng(7)
n = 500
grade = rng.integers(1, 6, n)                      # 1..5 rating
hours = np.round(grade * 2 + rng.normal(0, 2, n))  # noisy, rounded
hours[rng.random(n) < 0.05] = np.nan               # a few missing

s = BivariateSample.from_arrays(grade, hours)
rep = mu_empirical(s)
print(f"n={rep.n} dropped={rep.dropped} grid {rep.domain_sizes[0]}x{rep.domain_sizes[1]}")
print(f"d(S)={float(rep.d_s):.5f}  d(M)={float(rep.d_m):.5f}  d(W)={float(rep.d_w):.5f}")
print(f"mu={float(rep.mu):.5f}  pearson={pearson_sample(s.x.astype(float), s.y.astype(float)):.5f}")
print("largest positive gap at", (float(rep.argmax_pos.u), float(rep.argmax_pos.v)))

S = empirical_subcopula(BivariateSample.from_arrays(grade[:12], grade[:12] % 3))
print("\nsmall subcopula (exact, scale", S.scale, ")")
print(S.values)

noise = rng.normal(size=n)
dm = dependence_matrix({"grade": grade, "hours": hours, "noise": noise, "neg_hours": -hours})
print("\n" + " " * 10 + "".join(f"{c:>10}" for c in dm.names))
for name, row in zip(dm.names, dm.values):
    print(f"{name:>10}" + "".join(f"{v:10.4f}" for v in row))
