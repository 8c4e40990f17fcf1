"""Two dependent Bernoulli variables: mu against Pearson's r.

Fixes theta1 = 3/10 and theta2 = 6/10 and walks alpha = P(X=1, Y=1) across its
feasible range. mu reaches +1 and -1 at the Frechet limits while r does not,
because the margins differ.
"""
from fractions import Fraction as F

from subdep import (
    BernoulliPairModel,
    bernoulli_mu_closed,
    bernoulli_pearson,
    bernoulli_subcopula,
    mu_measure,
)

t1, t2 = F(3, 10), F(6, 10)
lo, hi = BernoulliPairModel(t1, t2, t1 * t2).alpha_bounds
print(f"theta1={t1}  theta2={t2}  alpha in [{lo}, {hi}]")
print(f"{'alpha':>8} {'mu':>10} {'closed':>10} {'r':>9}")
for alpha in (lo, F(1, 20), F(1, 10), t1 * t2, F(1, 4), hi):
    m = BernoulliPairModel(t1, t2, alpha)
    mu = mu_measure(bernoulli_subcopula(m)).mu
    assert mu == bernoulli_mu_closed(m)
    print(f"{str(alpha):>8} {str(mu):>10} {float(bernoulli_mu_closed(m)):>10.4f} {bernoulli_pearson(m):>9.4f}")

# with equal margins r does reach +1 at the upper limit
m = BernoulliPairModel(F(2, 5), F(2, 5), F(2, 5))
print("\nequal margins, alpha = theta:", mu_measure(bernoulli_subcopula(m)).mu, round(bernoulli_pearson(m), 12))
