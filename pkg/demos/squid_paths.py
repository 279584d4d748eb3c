"""
Watching the squid on Beale's function
======================================

A single seeded SSA run with the trace switched on. We follow the two
swarms over the first generations and write the full path file that any
plotting tool can pick up.
"""

import numpy as np

from squidopt import RngStream, SsaParams, export_trace, registry_lookup, ssa_minimize

# Beale lives on [-4.5, 4.5]^2 with its minimum 0 at (3, 0.5)
beale = registry_lookup("beale")
print(beale.name, "optimum", beale.known_optimum)

# a small swarm keeps the trace readable
params = SsaParams(population=10, max_evaluations=5000)
result = ssa_minimize(beale, params, RngStream(2024), trace=True)
print("best", result.best_fitness, "at", result.best_position)
print("evaluations", result.evaluations, "generations", result.generations)

# the incumbent only ever goes down
history = np.array(result.history)
print("incumbent after generations 0, 5, 10, 20:", history[[0, 5, 10, 20]])

# the trace holds one row per squid per generation, tagged by swarm
gen = np.array([r.generation for r in result.trace])
tag = np.array([r.swarm_tag for r in result.trace])
fit = np.array([r.fitness for r in result.trace])
for g in (1, 2, 3):
    here = gen == g
    print(f"generation {g}: primary median {np.median(fit[here & (tag == 'primary')]):.3g}, "
          f"secondary median {np.median(fit[here & (tag == 'secondary')]):.3g}")

# squid swap sides as the landscape reorders them
ids = {g: {r.squid_id for r in result.trace if r.generation == g and r.swarm_tag == "primary"}
       for g in range(1, 6)}
for g in range(1, 5):
    print(f"generation {g} -> {g + 1}: {len(ids[g] ^ ids[g + 1]) // 2} squid changed swarm")

export_trace(result, "beale_paths.csv")
print("wrote beale_paths.csv")
