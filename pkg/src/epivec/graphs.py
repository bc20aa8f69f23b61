"""Interaction-network construction.

Three network families are realized each step and merged into one edge list:

* households: complete graphs, fixed for the whole run;
* occupations: one small-world graph per occupation, membership fixed but
  edges redrawn every step with that occupation's mean interaction count;
* a global random network redrawn every step, honoring per-agent target
  degrees in expectation via configuration-model stub pairing (a small-world
  approximation: one ring-lattice-plus-rewiring graph cannot honor
  heterogeneous per-agent degrees).

Undirected interactions are stored as two directed edges so that the
transmission gather can treat every edge as (source candidate -> target).
Dead agents appear in no network; quarantined and hospitalized agents stay in
the edge list and are silenced by the transmission pass instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .rng import Purpose, substream
from .stages import NetworkKind


@dataclass
class StepGraph:
    """Union edge list of one step's interactions, tagged by network kind."""

    step: int
    src: np.ndarray    # int32 agent indices (infector candidate)
    dst: np.ndarray    # int32 agent indices (susceptible candidate)
    kind: np.ndarray   # int8 NetworkKind values

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def kind_counts(self) -> np.ndarray:
        return np.bincount(self.kind, minlength=3)

    @classmethod
    def empty(cls, step: int) -> "StepGraph":
        return cls(step,
                   np.empty(0, dtype=np.int32),
                   np.empty(0, dtype=np.int32),
                   np.empty(0, dtype=np.int8))


def build_households(household_id: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Directed edge arrays for complete per-household graphs.

    Households of size one contribute no edges; a household of size m
    contributes m*(m-1) directed edges.
    """
    order = np.argsort(household_id, kind="stable")
    sorted_ids = household_id[order]
    boundaries = np.nonzero(np.diff(sorted_ids))[0] + 1
    groups = np.split(order, boundaries)
    src_parts, dst_parts = [], []
    for members in groups:
        m = len(members)
        if m < 2:
            continue
        src_parts.append(np.repeat(members, m - 1))
        dst_parts.append(_all_others(members))
    if not src_parts:
        empty = np.empty(0, dtype=np.int32)
        return empty, empty.copy()
    return (np.concatenate(src_parts).astype(np.int32),
            np.concatenate(dst_parts).astype(np.int32))


def _all_others(members: np.ndarray) -> np.ndarray:
    """For each member, all other members, flattened (complete-graph targets)."""
    m = len(members)
    tiled = np.broadcast_to(members, (m, m))
    mask = ~np.eye(m, dtype=bool)
    return tiled[mask]


def watts_strogatz(n_nodes: int, k: int, beta: float,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Small-world graph; returns undirected edges as (u, v) position arrays.

    Ring lattice joining each node to k/2 neighbors per side, then each edge
    rewired at its source end with probability beta, avoiding self-loops and
    duplicate edges.  Rewiring replaces edges one-for-one, so the undirected
    edge count is always n*k/2.
    """
    if k % 2 != 0:
        raise ValueError(f"mean degree k must be even, got {k}")
    if k >= n_nodes:
        raise ValueError(f"need k < n_nodes, got k={k}, n={n_nodes}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"rewire probability must be in [0, 1], got {beta}")
    if k == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()

    half = k // 2
    base = np.arange(n_nodes, dtype=np.int64)
    us = np.concatenate([base for _ in range(half)])
    vs = np.concatenate([(base + j) % n_nodes for j in range(1, half + 1)])

    if beta > 0.0:
        rewire = np.nonzero(rng.random(len(us)) < beta)[0]
        if len(rewire):
            lo = np.minimum(us, vs)
            hi = np.maximum(us, vs)
            taken = set((lo * n_nodes + hi).tolist())
            for i in rewire.tolist():
                u, v = int(us[i]), int(vs[i])
                old_key = min(u, v) * n_nodes + max(u, v)
                taken.discard(old_key)
                new_v = v
                for _ in range(8 * n_nodes):
                    w = int(rng.integers(0, n_nodes))
                    key = min(u, w) * n_nodes + max(u, w)
                    if w != u and key not in taken:
                        new_v = w
                        break
                vs[i] = new_v
                taken.add(min(u, new_v) * n_nodes + max(u, new_v))
    return us, vs


def undirected_to_directed(us: np.ndarray, vs: np.ndarray
                           ) -> tuple[np.ndarray, np.ndarray]:
    return (np.concatenate([us, vs]).astype(np.int32),
            np.concatenate([vs, us]).astype(np.int32))


def stub_pairing(agents: np.ndarray, target_degrees: np.ndarray,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Configuration-model pairing honoring fractional degrees in expectation.

    Each agent contributes floor(d) stubs plus one more with probability
    frac(d); shuffled stubs are paired off, dropping self-pairs and duplicate
    pairs (rare for large populations).
    """
    base = np.floor(target_degrees).astype(np.int64)
    frac = target_degrees - base
    extra = rng.random(len(agents)) < frac
    counts = base + extra
    stubs = np.repeat(agents, counts)
    if len(stubs) < 2:
        empty = np.empty(0, dtype=np.int32)
        return empty, empty.copy()
    stubs = rng.permutation(stubs)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    us = stubs[0::2].astype(np.int64)
    vs = stubs[1::2].astype(np.int64)
    keep = us != vs
    us, vs = us[keep], vs[keep]
    # drop duplicate undirected pairs
    n = int(max(us.max(), vs.max())) + 1 if len(us) else 0
    if len(us):
        key = np.minimum(us, vs) * n + np.maximum(us, vs)
        _, first = np.unique(key, return_index=True)
        keep_idx = np.sort(first)
        us, vs = us[keep_idx], vs[keep_idx]
    return us.astype(np.int32), vs.astype(np.int32)


def round_to_even(x: float) -> int:
    """Nearest even integer (mean interaction counts -> lattice degree)."""
    return int(2 * round(x / 2.0))


class GraphRealizer:
    """Rebuilds the per-step union graph for one replication.

    Construction is a pure function of (replication seed, step, dead mask),
    so any two simulations holding identical state realize identical graphs.
    """

    def __init__(self, seed: int, household_id: np.ndarray,
                 occupation: np.ndarray, random_degree: np.ndarray,
                 occupation_mean_interactions: np.ndarray,
                 rewire_beta: float = 0.1):
        self.seed = seed
        self.n_agents = len(household_id)
        self.hh_src, self.hh_dst = build_households(household_id)
        self.occupation = occupation
        self.random_degree = np.asarray(random_degree, dtype=np.float64)
        self.occ_members = {
            j: np.nonzero(occupation == j)[0].astype(np.int32)
            for j in np.unique(occupation) if j > 0
        }
        self.occ_k = {j: float(occupation_mean_interactions[j - 1])
                      for j in self.occ_members}
        self.rewire_beta = float(rewire_beta)

    def realize(self, step: int, dead: np.ndarray) -> StepGraph:
        src_parts, dst_parts, kind_parts = [], [], []

        if len(self.hh_src):
            alive = ~(dead[self.hh_src] | dead[self.hh_dst])
            s, d = self.hh_src[alive], self.hh_dst[alive]
            src_parts.append(s)
            dst_parts.append(d)
            kind_parts.append(np.full(len(s), int(NetworkKind.HOUSEHOLD), dtype=np.int8))

        for j, members in self.occ_members.items():
            live = members[~dead[members]]
            m = len(live)
            k = min(round_to_even(self.occ_k[j]), 2 * ((m - 1) // 2))
            if m < 3 or k < 2:
                continue
            rng = substream(self.seed, Purpose.GRAPH_OCCUPATION, step, int(j))
            us, vs = watts_strogatz(m, k, self.rewire_beta, rng)
            s, d = undirected_to_directed(live[us], live[vs])
            src_parts.append(s)
            dst_parts.append(d)
            kind_parts.append(np.full(len(s), int(NetworkKind.OCCUPATION), dtype=np.int8))

        live_agents = np.nonzero(~dead)[0].astype(np.int32)
        if len(live_agents) >= 2:
            rng = substream(self.seed, Purpose.GRAPH_RANDOM, step)
            us, vs = stub_pairing(live_agents, self.random_degree[live_agents], rng)
            s, d = undirected_to_directed(us, vs)
            src_parts.append(s)
            dst_parts.append(d)
            kind_parts.append(np.full(len(s), int(NetworkKind.RANDOM), dtype=np.int8))

        if not src_parts:
            return StepGraph.empty(step)
        graph = StepGraph(step,
                          np.concatenate(src_parts),
                          np.concatenate(dst_parts),
                          np.concatenate(kind_parts))
        if len(graph.src) and np.any(graph.src == graph.dst):
            raise InvariantViolation("graph realization produced a self-loop")
        return graph
