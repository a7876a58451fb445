"""Pick the coupling weight by stratified cross-validation.

Folds are stratified by gender and rank so every training fold keeps both
genders and at least two ranks.  Exact ties in the validation score break
toward the larger coupling weight, then toward the smaller loss weights.
"""

import numpy as np

from genage import SynthConfig, cross_validate, generate, hyper_grid

ds = generate(SynthConfig(discrepancy=2.0, seed=42))
grid = hyper_grid(lambda1s=(10.0,), lambda2s=(10.0,), lambda3s=(0.0, 10.0, 100.0, 1000.0))

best, table = cross_validate(ds, grid, folds=5)
print(f"{'lambda3':>8s} {'mean mae':>9s}  fold scores")
for hp, scores in table:
    print(f"{hp.lambda3:8.0f} {np.mean(scores):9.4f}  {np.round(scores, 3)}")
print(f"\nselected coupling weight: {best.lambda3:.0f}")
