"""
What Bob holds under each reduction rule
========================================

Bob's reduced state for the path-entangled pair, averaged over Alice's
outcomes, under the three rules.
"""

import numpy as np

from eprsignal import BipartiteLayout, MeasurementRule, path_entangled_state
from eprsignal.measurement import bob_marginal, signal_strength

psi = path_entangled_state()
layout = BipartiteLayout(2, 2)
np.set_printoptions(precision=4, suppress=True)

for rule in MeasurementRule:
    rho = bob_marginal(rule, psi, layout)
    print(rule.value)
    print(rho.entries.real)
    print("  purity", round(rho.purity(), 12))

# The off-focal and Lueders marginals coincide, so no information reaches
# Bob. The coherent rule leaves him a pure state instead.
sig = signal_strength(psi, layout)
print("trace distance", sig.trace_dist)
print("best single-shot guess", sig.helstrom_success)

sig_lu = signal_strength(psi, layout, MeasurementRule.LUEDERS_FOCAL)
print("same under Lueders:", sig_lu.trace_dist, sig_lu.helstrom_success)
