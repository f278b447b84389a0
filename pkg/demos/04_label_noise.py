"""What the noise models do to a single soft label and to a dataset.

NCAR and NAR push probability mass through a transition matrix, the four
miscalibration variants bend the plurality probability, and in every case
the result is blended with the original by a random factor around 1.
"""
import numpy as np

from softlabel import noise
from softlabel.core import SoftDataset

print("NCAR transition matrix at p_e = 0.3, k = 3:\n", noise.ncar_matrix(0.3, 3))
rng = np.random.default_rng(0)
print("NAR draws its off-diagonal split per row:\n", np.round(noise.nar_matrix(0.3, 3, rng), 3))

grid = np.array([0.1, 0.25, 0.5, 0.75, 0.9])
print("\nmiscalibration at beta = 0.3")
for variant in noise.MISCALIBRATION:
    print(f"  {variant:16s}", np.round(noise.miscalibrate_scalar(grid, noise.MiscalSpec(variant, 0.3)), 3))

# corrupt a small dataset at every noise level; the labels drift further
# from the originals as beta grows
P = rng.dirichlet([4, 1, 1], size=200)
data = SoftDataset(rng.standard_normal((200, 2)), P, 3)
print("\nmean TVD to the clean labels per NCAR level")
for level in range(noise.N_LEVELS):
    beta = noise.level_to_beta(level)
    noisy = noise.corrupt_dataset(data, "ncar", beta, seed=level)
    print(f"  level {level} (beta {beta:.2f}): {np.mean(0.5 * np.abs(noisy.labels - P).sum(axis=1)):.4f}")
