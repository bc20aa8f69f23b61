"""Synthetic population generation.

Static agent attributes are drawn from configurable distributions: nine age
bands, household sizes (households are filled from a shuffled agent order, so
membership crosses age bands), 23 occupations restricted to eligible age
bands (everyone else gets occupation 0 = not employed), and an age-stratified
mean count of daily random interactions.

The shipped default distributions are synthetic approximations of county
demographics, not census microdata; every downstream check is phrased
relative to the configured values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from . import rng as keyed
from .rng import Purpose, substream
from .stages import NEVER, N_AGE_BANDS, N_OCCUPATIONS, Stage
from .state import AgentColumns

_DIST_TOL = 1e-9


def _check_distribution(p, size: int, path: str) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (size,):
        raise ConfigError(f"{path}: expected {size} entries, got shape {arr.shape}")
    if np.any(arr < 0):
        bad = int(np.nonzero(arr < 0)[0][0])
        raise ConfigError(f"{path}[{bad}]: negative probability")
    if abs(arr.sum() - 1.0) > _DIST_TOL:
        raise ConfigError(f"{path}: probabilities sum to {arr.sum():.12g}, not 1")
    return arr


@dataclass
class PopulationSpec:
    n_agents: int
    age_distribution: np.ndarray             # 9 probabilities
    household_sizes: np.ndarray              # candidate sizes
    household_size_probs: np.ndarray
    occupation_distribution: np.ndarray      # 23 probabilities
    occupation_eligible_bands: tuple         # age bands that can be employed
    random_degree_by_age: np.ndarray         # 9 means
    occupation_mean_interactions: np.ndarray  # 23 per-occupation means
    rewire_beta: float = 0.1

    def __post_init__(self):
        if self.n_agents < 1:
            raise ConfigError("population.n_agents must be >= 1")
        self.age_distribution = _check_distribution(
            self.age_distribution, N_AGE_BANDS, "population.age_distribution")
        self.household_sizes = np.asarray(self.household_sizes, dtype=np.int64)
        if np.any(self.household_sizes < 1):
            raise ConfigError("population.household_size_distribution.sizes: sizes must be >= 1")
        self.household_size_probs = _check_distribution(
            self.household_size_probs, len(self.household_sizes),
            "population.household_size_distribution.probabilities")
        self.occupation_distribution = _check_distribution(
            self.occupation_distribution, N_OCCUPATIONS,
            "population.occupation_distribution")
        for b in self.occupation_eligible_bands:
            if not 0 <= b < N_AGE_BANDS:
                raise ConfigError(f"population.occupation_eligible_age_bands: band {b} out of range")
        self.random_degree_by_age = np.asarray(self.random_degree_by_age, dtype=np.float64)
        if self.random_degree_by_age.shape != (N_AGE_BANDS,):
            raise ConfigError(f"population.random_degree_by_age: need {N_AGE_BANDS} entries")
        if np.any(self.random_degree_by_age < 0):
            raise ConfigError("population.random_degree_by_age: negative mean")
        self.occupation_mean_interactions = np.asarray(
            self.occupation_mean_interactions, dtype=np.float64)
        if self.occupation_mean_interactions.shape != (N_OCCUPATIONS,):
            raise ConfigError("population.networks.occupation_mean_interactions: "
                              f"need {N_OCCUPATIONS} entries")
        if not 0.0 <= self.rewire_beta <= 1.0:
            raise ConfigError("population.networks.rewire_beta outside [0, 1]")

    @classmethod
    def from_dict(cls, d: dict) -> "PopulationSpec":
        try:
            hh = d["household_size_distribution"]
            networks = d.get("networks", {})
            return cls(
                n_agents=int(d["n_agents"]),
                age_distribution=d["age_distribution"],
                household_sizes=hh["sizes"],
                household_size_probs=hh["probabilities"],
                occupation_distribution=d["occupation_distribution"],
                occupation_eligible_bands=tuple(d["occupation_eligible_age_bands"]),
                random_degree_by_age=d["random_degree_by_age"],
                occupation_mean_interactions=networks.get(
                    "occupation_mean_interactions", [8.0] * N_OCCUPATIONS),
                rewire_beta=float(networks.get("rewire_beta", 0.1)),
            )
        except KeyError as e:
            raise ConfigError(f"population spec: missing field {e.args[0]!r}") from e

    @classmethod
    def from_file(cls, path: str | Path) -> "PopulationSpec":
        with open(path) as f:
            return cls.from_dict(json.load(f))


def synthesize(spec: PopulationSpec, seed: int) -> AgentColumns:
    """Draw the static population for one replication.

    Deterministic per (spec, seed); the synthesis substream is independent of
    the per-step decision streams.
    """
    rng = substream(seed, Purpose.POPULATION)
    n = spec.n_agents
    cols = AgentColumns.allocate(n)

    cols.age_band[:] = rng.choice(N_AGE_BANDS, size=n, p=spec.age_distribution)

    # households: draw sizes until the population is covered, truncate the last
    sizes = []
    covered = 0
    while covered < n:
        s = int(rng.choice(spec.household_sizes, p=spec.household_size_probs))
        sizes.append(min(s, n - covered))
        covered += sizes[-1]
    order = rng.permutation(n)
    hh = np.empty(n, dtype=np.int32)
    at = 0
    for i, s in enumerate(sizes):
        hh[order[at:at + s]] = i
        at += s
    cols.household_id[:] = hh

    eligible = np.isin(cols.age_band, np.asarray(spec.occupation_eligible_bands, dtype=np.int8))
    n_eligible = int(eligible.sum())
    occ = np.zeros(n, dtype=np.int16)
    if n_eligible:
        occ[eligible] = rng.choice(
            np.arange(1, N_OCCUPATIONS + 1), size=n_eligible,
            p=spec.occupation_distribution).astype(np.int16)
    cols.occupation[:] = occ

    cols.random_degree[:] = spec.random_degree_by_age[cols.age_band]
    return cols


def seed_infections(cols: AgentColumns, count: int, seed: int, table) -> np.ndarray:
    """Move ``count`` uniformly chosen susceptible agents into an initial
    infected stage at step 0 and schedule their first transition.

    Returns the chosen agent ids.  Raises when count exceeds the susceptible
    population.
    """
    susceptible = np.nonzero(cols.stage == int(Stage.SUSCEPTIBLE))[0]
    if count > len(susceptible):
        raise ConfigError(f"initial_infections={count} exceeds susceptible "
                          f"population {len(susceptible)}")
    if count == 0:
        return np.empty(0, dtype=np.int64)
    chooser = substream(seed, Purpose.SEEDING)
    chosen = np.sort(chooser.choice(susceptible, size=count, replace=False))

    u_entry = keyed.uniforms(seed, 0, Purpose.ENTRY_STAGE, chosen)
    entry = table.entry_stages(cols.age_band[chosen], u_entry)
    cols.stage[chosen] = entry
    cols.infected_at[chosen] = 0
    u_branch = keyed.uniforms(seed, 0, Purpose.PROGRESSION_BRANCH, chosen)
    u_delay = keyed.uniforms(seed, 0, Purpose.PROGRESSION_DELAY, chosen)
    nxt, delay = table.schedule_transitions(entry, cols.age_band[chosen],
                                            u_branch, u_delay)
    cols.next_stage[chosen] = nxt
    cols.next_transition_at[chosen] = 0 + delay
    return chosen
