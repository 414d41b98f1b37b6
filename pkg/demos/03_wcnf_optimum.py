"""Recover a weighted MaxSAT optimum that brute force can certify.

A 10-variable instance has only 1024 assignments, so the exact optimum is
cheap to compute and the optimizer's answer can be judged, not guessed at.
The run stops the moment it matches the certified value.
"""
import numpy as np

from graphbo import RunConfig, run
from graphbo.benchmarks.maxsat import (brute_force_optimum, parse_wcnf,
                                       serialize_wcnf, wmaxsat_objective)
from graphbo.oracles import synthetic_wcnf

text = synthetic_wcnf(n_vars=10, n_clauses=25, seed=5)
inst = parse_wcnf(text)
print(f"instance: {inst.n_vars} variables, {inst.n_clauses} clauses")
print("first lines of the WCNF file:")
for line in serialize_wcnf(inst).splitlines()[:4]:
    print("   ", line)

best_x, best_val = brute_force_optimum(inst)
print(f"\nbrute force over 2^{inst.n_vars}: optimum {best_val:.6f} at {best_x}")

# Negated satisfied weight is minimized, so random assignments give a feel
# for how far from optimal "typical" is.
rng = np.random.default_rng(0)
randoms = [wmaxsat_objective(rng.integers(0, 2, size=10), inst)
           for _ in range(200)]
print(f"random assignments: median {np.median(randoms):.4f}, "
      f"best of 200 {min(randoms):.4f}")

print("\noptimizer runs, budget 100 (20 random + up to 80 model-guided):")
for seed in range(3):
    cfg = RunConfig(benchmark="maxsat", budget=100, seed=seed, n_init=20,
                    benchmark_config={"text": text}, stop_on_target=best_val)
    trace = run(cfg)
    found = trace.best <= best_val + 1e-12
    print(f"  seed {seed}: best {trace.best:.6f} after {len(trace.records)} "
          f"evaluations, optimum {'found' if found else 'missed'}")
