# %% [markdown]
# # Smolin and private states from correlated wave-plate noise
#
# Two |phi+> pairs (A,B) and (A',B') go in. Photons B and B' then get a
# randomly chosen, correlated pair of Pauli flips from a stack of wave plates.

# %%
import numpy as np

from noisyent.qmat import herm_eig, partial_trace
from noisyent.states import (PAULI_PLATES, apply_schedule, compose_plates, equal_up_to_phase, pauli,
                             phi_plus_pairs, private_schedule, private_state, smolin_pauli_form,
                             smolin_schedule, smolin_state)
from noisyent.analysis import fidelity

np.set_printoptions(precision=3, suppress=True)

# %% [markdown]
# Each Pauli (up to global phase) comes from a QWP-QWP-HWP stack:

# %%
for label, plates in PAULI_PLATES.items():
    angles = [f"{p.retardance.value[0].upper()}WP({p.angle / np.pi:.2f} pi)" for p in plates]
    print(label, " -> ".join(angles), equal_up_to_phase(compose_plates(plates), pauli(label)))

# %% [markdown]
# Apply the equiprobable noise and compare with the Bell-mixture and Pauli forms.

# %%
rho = apply_schedule(phi_plus_pairs(), smolin_schedule())
print("max |noise - mixture| :", np.abs(rho - smolin_state()).max())
print("max |mixture - Pauli| :", np.abs(smolin_state() - smolin_pauli_form()).max())
print("spectrum:", herm_eig(rho)[0][-5:])

# %% [markdown]
# The private state, and its key-qubit marginal 1/4 phi- + 3/4 psi+.

# %%
priv = apply_schedule(phi_plus_pairs(), private_schedule())
print("max |noise - definition| :", np.abs(priv - private_state()).max())
print(np.real(partial_trace(priv, [0, 1])))

# %% [markdown]
# Misaligned plates: every plate angle gets a Gaussian offset per noise setting.

# %%
for sigma in (0.0, 0.02, 0.035, 0.05, 0.1):
    f = [fidelity(apply_schedule(phi_plus_pairs(), smolin_schedule(), sigma, seed), smolin_state())
         for seed in range(10)]
    print(f"sigma={sigma:5.3f} rad  F={np.mean(f):.4f} +- {np.std(f):.4f}")
