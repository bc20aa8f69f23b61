"""One seeded replication end to end, with the time series printed as a
console plot: stage counts, cumulative infections and deaths."""

import numpy as np

from epivec import default_scenario, run_replication

config = default_scenario(n_agents=10_000, horizon=120, replications=1,
                          base_seed=2024)
result = run_replication(config, 0)

infections = result.column("cumulative_infections")
deaths = result.column("cumulative_deaths")
active = (config.population.n_agents
          - result.column("n_susceptible") - result.column("n_recovered")
          - result.column("n_dead") - result.column("n_vaccinated"))

print(f"replication 0, seed {result.seed:#x}, "
      f"{result.n_edges_total:,} interactions over {config.horizon} steps")
print()
print("step  active     cumulative                         deaths")
scale = max(1, int(active.max() / 40))
for step in range(0, config.horizon, 5):
    bar = "#" * (int(active[step]) // scale)
    print(f"{step:4d}  {active[step]:6d} {bar:42s} "
          f"inf={infections[step]:6d} dead={deaths[step]:4d}")

attack_rate = infections[-1] / config.population.n_agents
print()
print(f"final attack rate {attack_rate:.1%}, "
      f"deaths {deaths[-1]} ({deaths[-1] / config.population.n_agents:.2%}), "
      f"peak active {active.max()} on step {int(np.argmax(active))}")
