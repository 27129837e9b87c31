"""Learn the map from states to IST sequences with a multiclass SVM.

States are sampled on the unit sphere, labeled by exact simulation,
and fed to a margin classifier on degree-2 monomial features.  The
conic variant learns one quadratic per class and reads the class off
the first positive form, matching the nested structure of the
triggering regions.
"""

import numpy as np

from petcbound import (
    LtiPetcSystem,
    count_violations,
    generate_dataset,
    predict_labels,
    split,
    train,
)

system = LtiPetcSystem(
    A=np.array([[0.0, 1.0], [-2.0, 3.0]]),
    B=np.array([[0.0], [1.0]]),
    K=np.array([[0.0, -5.0]]),
    h=0.05,
    kappa_bar=4,
    sigma=0.1,
)

dataset = generate_dataset(system, ell=1, n_samples=4000, seed=12345)
print(f"{len(dataset)} samples, {len(dataset.label_table)} classes:",
      dataset.label_table)

train_set, holdout = split(dataset, 0.8, seed=0)
model, info = train(train_set, mode="conic")
print(f"trained conic model: objective {info['objective']:.1f}, "
      f"{info['n_violations']} margin violations on {len(train_set)} samples")

pred = predict_labels(model, holdout.states())
accuracy = np.mean([p == s.label for p, s in zip(pred, holdout.samples)])
print(f"holdout accuracy: {accuracy:.3f}")
print(f"holdout margin violations: {count_violations(model, holdout.samples)}"
      f" of {len(holdout)}")

# were the labels sequences (ell > 1), flat mode would be chosen: the
# first-positive rule needs the single-IST class order
seq_set = generate_dataset(system, ell=3, n_samples=4000, seed=12345)
seq_model, seq_info = train(seq_set, mode="flat")
print(f"\nell=3: {len(seq_set.label_table)} classes, flat model with "
      f"{seq_info['n_violations']} violations")
