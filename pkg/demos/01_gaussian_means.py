"""Estimating a class mean from soft versus hard labels.

Two unit Gaussians sit at (+0.5, +0.5) and (-0.5, -0.5). Every point knows
its exact posterior, so a soft-label estimate of the class-one mean can
weight each point by p(C1 | x), while the hard-label estimate only averages
the points that really came from class one.
"""
from softlabel.simulate import GaussianSimConfig, run_delta_mse

SEED = 7

print("clean soft labels: negative means the soft estimate has lower MSE")
cfg = GaussianSimConfig(priors=(0.1, 0.5), sample_sizes=(4, 10, 100, 1000), repeats=4000)
for curve in run_delta_mse(cfg, SEED):
    cells = "  ".join(f"n={n}: {d:+.4f}" for n, d in zip(curve.sample_sizes, curve.delta_mse))
    print(f"  prior {curve.prior}: {cells}")

# With a little Gaussian noise on p(C1) the picture changes once samples
# are plentiful: the hard labels stay exact, the noisy weights do not.
print("\nsoft labels with N(0, 0.1) noise, prior 0.1")
noisy = GaussianSimConfig(priors=(0.1,), sample_sizes=(10, 100, 1000), repeats=2000, noise_sigma=0.1)
(curve,) = run_delta_mse(noisy, SEED)
for n, d, se in zip(curve.sample_sizes, curve.delta_mse, curve.stderr):
    print(f"  n={n:5d}  delta={d:+.4f}  se={se:.4f}")
