"""Infectiousness curve and hazard arithmetic.

Walks through the transmission building blocks: the day-by-day weight of the
gamma infectiousness curve, how one interaction's hazard is assembled from
the scale factors, and the hazard -> probability conversion.
"""

import numpy as np

from epivec import DiseaseParams, day_weight_table, edge_hazard, infection_probability
from epivec.scenario import default_disease_dict
from epivec.stages import NetworkKind

params = DiseaseParams.from_dict(default_disease_dict())

print("=== day weights: gamma curve integrated per day ===")
table = params.day_weights
peak = int(np.argmax(table))
print(f"curve mean {params.infectiousness_mean_days} days, "
      f"sd {params.infectiousness_sd_days} days")
print(f"table covers days 1..{params.t_max} "
      f"(tail mass < 1e-6 beyond that), peak on day {peak}")
for t in range(1, min(15, params.t_max + 1)):
    bar = "#" * int(300 * table[t])
    print(f"  day {t:2d}  w={table[t]:.4f}  {bar}")
print(f"sum of all weights: {table.sum():.9f}")

print()
print("=== one interaction's hazard, factor by factor ===")
t = peak
for kind in NetworkKind:
    lam = edge_hazard(t, False, 7, int(kind), params)
    print(f"  symptomatic source, 71-80 target, {kind.name.lower():10s}"
          f" network: hazard {lam:.5f} -> p {infection_probability(lam):.5f}")
lam_asym = edge_hazard(t, True, 7, int(NetworkKind.HOUSEHOLD), params)
print(f"  asymptomatic source scales household hazard to {lam_asym:.5f} "
      f"({params.asymptomatic_factor}x)")

print()
print("=== hazards add before the draw ===")
lam = edge_hazard(t, False, 7, int(NetworkKind.HOUSEHOLD), params)
for k in (1, 2, 4, 8):
    total = k * lam
    print(f"  {k} identical contacts: total hazard {total:.4f}, "
          f"infection probability {infection_probability(total):.4f}")
print("(a single draw against the summed hazard equals independent per-edge "
      "draws; see tests for the exact identity)")
