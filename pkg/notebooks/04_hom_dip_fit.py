# %% [markdown]
# # Hong-Ou-Mandel dip: Gaussian fit
#
# Simulate a delay scan with a 79 % deep dip and fit the four-parameter
# Gaussian model.

# %%
import numpy as np

from noisyent.hom import HomFit, fit_gaussian_dip, hom_model, simulate_hom_scan

true = HomFit(baseline=400.0, visibility=0.79, center=0.05, width=0.3)
delays = np.linspace(-1.2, 1.2, 31)
scan = simulate_hom_scan(true, delays, rng_seed=2)
fit = fit_gaussian_dip(scan)
print(fit)

# %%
for t, n, m in zip(scan.delays[::3], scan.counts[::3], hom_model(fit, scan.delays[::3])):
    print(f"{t:+.2f}  {n:6.0f}  {'#' * int(n / 10):<45s} model {m:6.1f}")
