# %% [markdown]
# # Witness, key correlations and the CHSH test on the private state

# %%
import numpy as np

from noisyent.analysis import (KEY_CHSH_SETTING, analysis_report, chsh_optimal, chsh_value,
                               key_correlation_report, witness_expectation)
from noisyent.qmat import partial_trace
from noisyent.states import noisy_private, private_state, smolin_state
from noisyent.tomography import ExperimentConfig, bootstrap_ensemble, mle_reconstruct, simulate_counts

# %% [markdown]
# The four-fold witness. Written as I + sum sigma^4 it gives +4 on the ideal
# Smolin state. The sign-flipped operator gives -2.

# %%
print(witness_expectation(smolin_state()), witness_expectation(smolin_state(), sign=-1))

# %% [markdown]
# Key qubits measured in the sigma_y basis: equal outcomes, coherence 1/4.

# %%
print(key_correlation_report(private_state()).to_dict())

# %% [markdown]
# CHSH on the key qubits: the fixed y-z setting and the optimum from the
# correlation matrix both give sqrt(5).

# %%
key = partial_trace(private_state(), [0, 1])
print(chsh_value(key, KEY_CHSH_SETTING), chsh_optimal(key)[0], np.sqrt(5))

# %% [markdown]
# The same numbers on a simulated experiment, with bootstrap error bars.

# %%
sigma = 0.035
data = simulate_counts(noisy_private(sigma, 5), ExperimentConfig(rng_seed=5, misalign_sigma=sigma))
rho_hat, _ = mle_reconstruct(data)
ensemble = bootstrap_ensemble(rho_hat, ExperimentConfig(rng_seed=6), 10)
rep = analysis_report(rho_hat, private_state(), ensemble)
print(f"F = {rep['fidelity_to_target']:.4f} +- {rep['bootstrap_std']['fidelity_to_target']:.4f}")
print(f"B = {rep['chsh']['key_setting_value']:.3f} +- {rep['bootstrap_std']['chsh_key_setting_value']:.3f}")
