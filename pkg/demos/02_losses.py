#!/usr/bin/env python3
"""Walkthrough: what the three losses do with a single observed positive.

Compares full-supervision BCE against the two single-positive strategies:
assume-negative (treat unknowns as absent) and entropy-maximization (pull
unknown predictions toward 0.5). Then trains a tiny model with each and
looks at where the predicted probabilities end up.
"""

import numpy as np

from spml import (
    SynthConfig,
    TrainConfig,
    an_loss,
    bce_full,
    corrupt_to_single_positive,
    em_loss,
    forward,
    generate_synthetic,
    train_model,
)

# One example, four categories. Category 0 is the observed positive;
# categories 1-3 are unknown (category 1 happens to be truly present).
probs = np.array([[0.7, 0.6, 0.4, 0.2]])
true_labels = np.array([[1, 1, 0, 0]])
observed = np.array([0])

print("predictions :", probs[0])
print("true labels :", true_labels[0], "(observed: only index 0)")
print()
print(f"bce_full (needs all labels)   : {bce_full(probs, true_labels).value:.4f}")
print(f"an_loss  (unknowns -> 0)      : {an_loss(probs, observed).value:.4f}")
print(f"em_loss  (unknowns -> 0.5)    : {em_loss(probs, observed, alpha=0.1).value:.4f}")

grad_an = an_loss(probs, observed).dloss_dlogits[0]
grad_em = em_loss(probs, observed, alpha=0.1).dloss_dlogits[0]
print()
print("logit gradients (positive value pushes the probability DOWN):")
print(f"  an: {np.round(grad_an, 4)}  <- punishes the hidden positive at index 1")
print(f"  em: {np.round(grad_em, 4)}  <- index 1 only nudged toward 0.5")

# Train a small model with each loss on the same single-positive data and
# compare where predictions for true positives vs true negatives land.
data = generate_synthetic(SynthConfig(n_examples=800, n_features=10, n_labels=6, seed=3))
spml_data = corrupt_to_single_positive(data.labels, data.features, seed=4)

print("\nmean predicted probability after training (true positives / true negatives):")
for kind in ("an", "em"):
    result = train_model(spml_data, TrainConfig(loss_kind=kind, epochs=20, seed=0))
    p = forward(result.model, data.features)
    pos_mean = p[data.labels == 1].mean()
    neg_mean = p[data.labels == 0].mean()
    print(f"  {kind}: {pos_mean:.3f} / {neg_mean:.3f}")
print("assume-negative suppresses everything unobserved, including true positives;")
print("entropy-maximization keeps unknowns near 0.5 and separates by ranking.")
