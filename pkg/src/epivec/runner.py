"""Replication runner, time-series output, summaries, benchmark, verifier.

Each replication derives its own 64-bit seed from ``(base_seed, index)``, so
results are independent of execution order and worker count.  Time series are
written as one CSV per replication with a versioned header; summaries report
the 25th/50th/75th percentiles across replications per step and metric.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng as keyed
from .engine import Engine, StepEvents
from .errors import ConfigError, VerificationDivergence
from .graphs import GraphRealizer
from .interventions import InterventionConfig
from .oracle import OracleSim, agents_from_columns
from .population import seed_infections, synthesize
from .rng import Purpose
from .scenario import ScenarioConfig
from .stages import NEVER, N_STAGES, Stage
from .state import AgentColumns, DYNAMIC_COLUMNS

SCHEMA = "epivec-timeseries-v1"
STAGE_COLUMNS = [f"n_{s.name.lower()}" for s in Stage]
CSV_COLUMNS = (["step"] + STAGE_COLUMNS
               + ["cumulative_infections", "cumulative_deaths", "in_hospital_or_icu",
                  "new_infections", "tests_administered", "doses_given",
                  "notifications_sent"])
SUMMARY_METRICS = [c for c in CSV_COLUMNS if c != "step"]


@dataclass
class RunResult:
    """Per-step time series of one replication."""

    replication: int
    seed: int
    data: np.ndarray        # (horizon, len(CSV_COLUMNS)) int64
    n_edges_total: int = 0
    wall_seconds: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return self.data[:, CSV_COLUMNS.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={SCHEMA}\n")
        buf.write(f"# replication={self.replication} seed={self.seed}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.data:
            buf.write(",".join(str(int(v)) for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunResult":
        lines = text.splitlines()
        if not lines or lines[0] != f"# schema={SCHEMA}":
            raise ConfigError(f"not a {SCHEMA} file")
        meta = dict(part.split("=") for part in lines[1][2:].split(" "))
        header = lines[2].split(",")
        if header != CSV_COLUMNS:
            raise ConfigError("time-series column mismatch with schema")
        data = np.array([[int(v) for v in line.split(",")]
                         for line in lines[3:] if line], dtype=np.int64)
        return cls(replication=int(meta["replication"]), seed=int(meta["seed"]),
                   data=data)


def replication_seed(base_seed: int, index: int) -> int:
    return keyed.derive_seed(base_seed, Purpose.REPLICATION, index)


def initialize_run(config: ScenarioConfig, seed: int
                   ) -> tuple[AgentColumns, GraphRealizer]:
    """Population synthesis, initial infections, app assignment, graph realizer."""
    cols = synthesize(config.population, seed)
    seed_infections(cols, config.initial_infections, seed, config.progression)
    if config.interventions.den_enabled:
        u = keyed.uniforms(seed, 0, Purpose.DEN_APP,
                           np.arange(cols.n_agents, dtype=np.int64))
        cols.has_den_app[:] = u < config.interventions.den.app_adoption
    realizer = GraphRealizer(
        seed,
        cols.household_id,
        cols.occupation,
        cols.random_degree,
        config.population.occupation_mean_interactions,
        config.population.rewire_beta,
    )
    return cols, realizer


def _record_row(out: np.ndarray, row: int, cols: AgentColumns,
                ev: StepEvents) -> None:
    counts = cols.stage_counts()
    cumulative_infections = int(np.sum(cols.infected_at != NEVER))
    cumulative_deaths = int(counts[int(Stage.DEAD)])
    in_care = int(counts[int(Stage.HOSPITALIZED)] + counts[int(Stage.CRITICAL_ICU)])
    out[row, 0] = ev.step
    out[row, 1:1 + N_STAGES] = counts
    base = 1 + N_STAGES
    out[row, base + 0] = cumulative_infections
    out[row, base + 1] = cumulative_deaths
    out[row, base + 2] = in_care
    out[row, base + 3] = ev.new_infections
    out[row, base + 4] = ev.tests_administered
    out[row, base + 5] = ev.doses_given
    out[row, base + 6] = ev.notifications_sent


def dump_graph_csv(graph, path: Path) -> None:
    """Debug dump of one step's edge list as src,dst,network_kind."""
    with open(path, "w") as f:
        f.write("src,dst,network_kind\n")
        for s, d, k in zip(graph.src.tolist(), graph.dst.tolist(),
                           graph.kind.tolist()):
            f.write(f"{s},{d},{k}\n")


def run_replication(config: ScenarioConfig, index: int,
                    check_invariants: bool = True,
                    dump_graphs_dir: str | Path | None = None) -> RunResult:
    """One seeded end-to-end replication.

    ``dump_graphs_dir`` writes every realized step graph as a CSV
    (debugging aid; large)."""
    seed = replication_seed(config.base_seed, index)
    t0 = time.perf_counter()
    cols, realizer = initialize_run(config, seed)
    engine = Engine(cols, config.disease, config.progression,
                    config.interventions, seed, check_invariants=check_invariants)
    data = np.zeros((config.horizon, len(CSV_COLUMNS)), dtype=np.int64)
    edges_total = 0
    if dump_graphs_dir is not None:
        dump_graphs_dir = Path(dump_graphs_dir)
        dump_graphs_dir.mkdir(parents=True, exist_ok=True)
    for step in range(config.horizon):
        graph = realizer.realize(step, cols.stage == int(Stage.DEAD))
        if dump_graphs_dir is not None:
            dump_graph_csv(graph, dump_graphs_dir
                           / f"rep{index:03d}_step{step:04d}.csv")
        ev = engine.step(graph)
        edges_total += ev.n_edges
        _record_row(data, step, cols, ev)
    wall = time.perf_counter() - t0
    return RunResult(replication=index, seed=seed, data=data,
                     n_edges_total=edges_total, wall_seconds=wall)


def _run_one(args) -> tuple[int, str, int, float]:
    config, index = args
    result = run_replication(config, index)
    return index, result.to_csv(), result.n_edges_total, result.wall_seconds


def run_scenario(config: ScenarioConfig, out_dir: str | Path | None = None,
                 workers: int = 1) -> list[RunResult]:
    """Run all replications; optionally write one CSV per replication.

    Results are identical for any worker count: each replication depends only
    on (base_seed, index).
    """
    indices = list(range(config.replications))
    results: list[RunResult] = []
    if workers > 1 and len(indices) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, csv_text, n_edges, wall in pool.map(
                    _run_one, [(config, i) for i in indices]):
                r = RunResult.from_csv(csv_text)
                r.n_edges_total = n_edges
                r.wall_seconds = wall
                results.append(r)
    else:
        for i in indices:
            results.append(run_replication(config, i))
    results.sort(key=lambda r: r.replication)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for r in results:
            (out_dir / f"run_{r.replication:03d}.csv").write_text(r.to_csv())
    return results


# -- summaries --------------------------------------------------------------

def summarize(results: list[RunResult]) -> dict[str, np.ndarray]:
    """Quartiles across replications: metric -> (horizon, 3) array [q25, q50, q75]."""
    if not results:
        raise ConfigError("summarize needs at least one replication")
    horizon = results[0].data.shape[0]
    for r in results:
        if r.data.shape[0] != horizon:
            raise ConfigError("replications disagree on horizon")
    out = {}
    for metric in SUMMARY_METRICS:
        stacked = np.stack([r.column(metric) for r in results], axis=1)
        out[metric] = np.percentile(stacked, [25, 50, 75], axis=1).T
    return out


def summary_to_csv(summary: dict[str, np.ndarray]) -> str:
    """Wide layout: one row per step, three columns per metric."""
    buf = io.StringIO()
    buf.write("# schema=epivec-summary-v1\n")
    header = ["step"]
    for metric in SUMMARY_METRICS:
        header += [f"{metric}_q25", f"{metric}_q50", f"{metric}_q75"]
    buf.write(",".join(header) + "\n")
    horizon = next(iter(summary.values())).shape[0]
    for step in range(horizon):
        row = [str(step)]
        for metric in SUMMARY_METRICS:
            row += [repr(float(v)) for v in summary[metric][step]]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def summary_to_long_csv(summary: dict[str, np.ndarray]) -> str:
    """Plot-ready long layout: step, metric, quantile, value."""
    buf = io.StringIO()
    buf.write("# schema=epivec-summary-long-v1\n")
    buf.write("step,metric,quantile,value\n")
    horizon = next(iter(summary.values())).shape[0]
    for metric in SUMMARY_METRICS:
        block = summary[metric]
        for step in range(horizon):
            for qname, value in zip(("q25", "q50", "q75"), block[step]):
                buf.write(f"{step},{metric},{qname},{repr(float(value))}\n")
    return buf.getvalue()


def load_results(run_dir: str | Path) -> list[RunResult]:
    run_dir = Path(run_dir)
    paths = sorted(run_dir.glob("run_*.csv"))
    if not paths:
        raise ConfigError(f"no run_*.csv files under {run_dir}")
    return [RunResult.from_csv(p.read_text()) for p in paths]


# -- benchmark ----------------------------------------------------------------

@dataclass
class BenchReport:
    n_agents: int
    steps: int
    interactions: int
    wall_seconds: float

    @property
    def interactions_per_second(self) -> float:
        return self.interactions / self.wall_seconds if self.wall_seconds else 0.0

    def __str__(self):
        return (f"{self.n_agents} agents x {self.steps} steps: "
                f"{self.interactions:,} interactions in {self.wall_seconds:.2f}s "
                f"({self.interactions_per_second:,.0f} interactions/s)")


def bench(config: ScenarioConfig, use_oracle: bool = False) -> BenchReport:
    """Throughput of one replication; interactions = directed edges gathered."""
    seed = replication_seed(config.base_seed, 0)
    cols, realizer = initialize_run(config, seed)
    t0 = time.perf_counter()
    interactions = 0
    if use_oracle:
        sim = OracleSim(agents_from_columns(cols), config.disease,
                        config.progression, config.interventions, seed)
        for step in range(config.horizon):
            graph = realizer.realize(step, sim.column("stage") == int(Stage.DEAD))
            sim.step(graph)
            interactions += graph.n_edges
    else:
        engine = Engine(cols, config.disease, config.progression,
                        config.interventions, seed, check_invariants=False)
        for step in range(config.horizon):
            graph = realizer.realize(step, cols.stage == int(Stage.DEAD))
            ev = engine.step(graph)
            interactions += ev.n_edges
    wall = time.perf_counter() - t0
    return BenchReport(cols.n_agents, config.horizon, interactions, wall)


# -- engine/oracle equivalence ------------------------------------------------

def verify_equivalence(config: ScenarioConfig, replication: int = 0,
                       oracle_disease=None) -> int:
    """Run engine and oracle in lockstep on identical inputs.

    Returns the number of steps checked; raises VerificationDivergence at the
    first differing (step, agent, field).  ``oracle_disease`` substitutes the
    oracle's transmission parameters (the checker's own sanity test).
    """
    if config.population.n_agents > 2000:
        raise ConfigError("verification runs on small scenarios (<= 2000 agents)")
    seed = replication_seed(config.base_seed, replication)
    cols, realizer = initialize_run(config, seed)
    engine = Engine(cols, config.disease, config.progression,
                    config.interventions, seed)
    oracle = OracleSim(agents_from_columns(cols),
                       oracle_disease or config.disease,
                       config.progression, config.interventions, seed)
    for step in range(config.horizon):
        graph = realizer.realize(step, cols.stage == int(Stage.DEAD))
        engine.step(graph)
        oracle.step(graph)
        _compare_states(step, cols, oracle)
    return config.horizon


def _compare_states(step: int, cols: AgentColumns, oracle: OracleSim) -> None:
    for field in DYNAMIC_COLUMNS:
        engine_vals = getattr(cols, field)
        oracle_vals = oracle.column(field)
        if engine_vals.dtype == bool:
            same = engine_vals == oracle_vals
        elif np.issubdtype(engine_vals.dtype, np.floating):
            same = (engine_vals == oracle_vals) | (np.isnan(engine_vals)
                                                   & np.isnan(oracle_vals))
        else:
            same = engine_vals == oracle_vals.astype(engine_vals.dtype)
        if not np.all(same):
            agent = int(np.nonzero(~same)[0][0])
            raise VerificationDivergence(step, agent, field,
                                         engine_vals[agent], oracle_vals[agent])
