"""Attach a PAC certificate to a trained classifier.

The scenario approach turns a count of margin violations on N i.i.d.
samples into a two-sided bound on the probability that a fresh state
violates its constraint, valid with confidence 1 - 3*beta.  Since a
misclassification always violates the margin, the upper bound also
caps the misclassification probability.
"""

import numpy as np

from petcbound import (
    LtiPetcSystem,
    certify,
    epsilon_bounds,
    generate_dataset,
    monte_carlo_risk,
    split,
    train,
)

print("risk interval as the violation count grows (N = 10000, beta = 1e-6):")
for s_star in (0, 99, 212, 325):
    lo, hi = epsilon_bounds(10000, s_star, beta=1e-6)
    print(f"  s* = {s_star:3d}: eps in [{lo:.4f}, {hi:.4f}]")

system = LtiPetcSystem(
    A=np.array([[0.0, 1.0], [-2.0, 3.0]]),
    B=np.array([[0.0], [1.0]]),
    K=np.array([[0.0, -5.0]]),
    h=0.05,
    kappa_bar=4,
    sigma=0.1,
)

dataset = generate_dataset(system, ell=1, n_samples=10000, seed=12345)
train_set, holdout = split(dataset, 0.8, seed=1)
model, _ = train(train_set, mode="conic")

cert = certify(model, train_set, holdout, beta=1e-6)
print(f"\ncertificate: N = {cert.n_samples}, s* = {cert.s_star}, "
      f"eps in [{cert.eps_lo:.4f}, {cert.eps_hi:.4f}] "
      f"at confidence {cert.confidence}")
print(f"holdout violation rate {cert.holdout_violation_rate:.4f} "
      f"(bound {cert.eps_hi:.4f}), misclassification rate "
      f"{cert.holdout_misclassification_rate:.4f}")

mc = monte_carlo_risk(model, system, ell=1, n_samples=20000, seed=777)
print(f"\nfresh-sample check: violation rate {mc['violation_rate']:.4f} "
      f"(95% CI {mc['violation_ci'][0]:.4f}..{mc['violation_ci'][1]:.4f}), "
      f"misclassification rate {mc['misclassification_rate']:.4f}")
