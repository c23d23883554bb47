"""Print the headline numbers: postselection rate, fidelities, coherences, yields."""
import math

import numpy as np

from wlift import analysis, protocol
from wlift.bases import w_basis
from wlift.protocol import PostselectionPolicy, SourceSpec

spec = SourceSpec.from_a2(0.5, math.pi / 5)
print(f"a^2 = 0.5, theta = pi/5: F0 = {protocol.source_fidelity(spec):.4f}, F = {protocol.analytic_fidelity(spec):.4f}")
print(f"F(F0 = 0.5) = {protocol.fidelity_from_source_fidelity(0.5):.4f}")

flawed = SourceSpec.from_a2(0.6)
print("a^2 = 0.6 outcome table:", np.round(protocol.outcome_probabilities(flawed), 6))
report = analysis.monte_carlo(flawed, 100_000, seed=42, policy=PostselectionPolicy.KEEP_W1_AND_W5)
print(f"postselected rate {report.accepted_fraction:.5f} (a^2 - a^4 = {protocol.postselection_success_probability(flawed):.5f})")

rho_w = w_basis().represent(analysis.brute_force_oracle(flawed).rho.matrix)
print("rho in W basis (oracle):")
print(np.round(rho_w.real, 6))
print(f"coherence K derived {protocol.coherence_K(flawed):.6f}, printed form {protocol.coherence_K_printed(flawed):.6f}")

est = analysis.yield_estimate(0.1, 3_000_000)
print(f"yield from 3e6 pairs at eps = 0.1: {est.expected_perfect_w:.0f} (published asymptotic {est.paper_asymptotic:.0f})")
