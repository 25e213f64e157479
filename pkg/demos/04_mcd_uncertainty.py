#!/usr/bin/env python3
"""Monte Carlo Dropout: prediction spread, variance and entropy.

With dropout alive at inference, the same image produces a distribution
of softmax outputs. Its variance proxies the model's uncertainty; binary
entropy of the probabilities measures how surprising the prediction is.
Rate 0 is the control: every pass identical, variance exactly zero.
"""

import numpy as np

from proteoknight import (
    Architecture,
    TrainConfig,
    emit_histogram,
    entropy,
    expectation,
    mc_predict,
    train,
    variance,
    variance_moment_form,
)

rng = np.random.default_rng(3)

# quick separable blobs instead of images: the MCD math is input-agnostic
arch = Architecture(input_size=8, conv_filters=(4,), hidden_units=16,
                    n_classes=2, dropout=0.2)
x = rng.normal(size=(60, 3, 8, 8))
x[30:] += 1.2
y = np.array([0] * 30 + [1] * 30)
model, _ = train((x, y), TrainConfig(epochs=8, batch_size=10,
                                     learning_rate=0.05, seed=0), arch)

image = x[45]
for rate in (0.0, 0.1, 0.3):
    dist = mc_predict(model, image, passes=200, p=rate, seed=9, rid="demo")
    mean = expectation(dist)
    print(f"rate {rate}: mean P(positive) = {mean[1]:.4f}  "
          f"variance = {variance(dist):.6f}  "
          f"entropy(mean) = {entropy(mean[1]):.4f}")

dist = mc_predict(model, image, passes=200, p=0.3, seed=9, rid="demo")
print("moment-form variance matches the definitional form:",
      abs(variance(dist) - variance_moment_form(dist)) < 1e-12)

counts = emit_histogram(dist.positive_probs, bins=10)
print("softmax histogram (10 bins over [0, 1]):")
for i, count in enumerate(counts):
    print(f"  [{i / 10:.1f}, {(i + 1) / 10:.1f})  {'#' * int(count)}")
