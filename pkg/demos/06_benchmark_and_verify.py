"""Throughput of the vectorized engine vs the naive per-agent oracle, and the
bitwise replay-equivalence check between them.

The keyed counter-based draw scheme means both implementations consume
identical randomness for identical decisions, so a correct build reproduces
the engine's trajectory in the oracle exactly, field for field.
"""

from epivec import bench, default_scenario, verify_equivalence
from epivec.scenario import default_population_dict, scenario_from_dict

print("=== engine vs oracle throughput (same workload) ===")
config = default_scenario(n_agents=10_000, horizon=5, replications=1)
engine_report = bench(config)
oracle_report = bench(config, use_oracle=True)
print(f"engine: {engine_report}")
print(f"oracle: {oracle_report}")
speedup = (engine_report.interactions_per_second
           / oracle_report.interactions_per_second)
print(f"speedup: {speedup:.1f}x")

print()
print("=== bitwise replay equivalence ===")
pop = default_population_dict()
pop["n_agents"] = 400
lockstep = scenario_from_dict({
    "population": pop, "horizon": 30, "replications": 1,
    "base_seed": 5, "initial_infections": 10,
    "interventions": {
        "quarantine": {"enabled": True},
        "testing": {"enabled": True, "kind": "rt-pcr"},
        "den": {"enabled": True},
        "vaccination": {"enabled": True, "daily_rate": 0.01},
    }}, name="lockstep")
steps = verify_equivalence(lockstep)
print(f"engine and oracle trajectories identical over {steps} steps "
      f"({lockstep.population.n_agents} agents, all interventions enabled)")

print()
print("=== scale (larger run) ===")
big = default_scenario(n_agents=100_000, horizon=20, replications=1)
report = bench(big)
print(f"engine: {report}")
print(f"(about {report.interactions / report.steps / big.population.n_agents:.1f} "
      "interactions per agent per step)")
