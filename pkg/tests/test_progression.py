"""Progression table validation, scheduling, and Monte Carlo branch checks."""

import numpy as np
import pytest

from epivec.errors import ConfigError
from epivec.progression import DurationSpec, ProgressionTable, round_delay
from epivec.rng import Purpose, uniform, uniforms
from epivec.stages import NEVER, Stage


def minimal_table(p_hosp_80plus=0.3, asymp_duration=None):
    """Small but complete table; uniform entry into ASYMPTOMATIC for youth."""
    ones = [1.0] * 9
    p_hosp = [0.1] * 8 + [p_hosp_80plus]
    p_rec = [round(1.0 - p, 10) for p in p_hosp]
    duration = asymp_duration or {"family": "constant", "days": 7}
    return ProgressionTable.from_dict({"edges": [
        {"from": "susceptible", "to": "asymptomatic", "probability": [0.4] * 9},
        {"from": "susceptible", "to": "presymptomatic_mild", "probability": [0.5] * 9},
        {"from": "susceptible", "to": "presymptomatic_severe", "probability": [0.1] * 9},
        {"from": "asymptomatic", "to": "recovered", "probability": ones,
         "duration": duration},
        {"from": "presymptomatic_mild", "to": "mild_symptomatic",
         "probability": ones, "duration": {"family": "gamma", "mean": 5, "sd": 2}},
        {"from": "presymptomatic_severe", "to": "severe_symptomatic",
         "probability": ones, "duration": {"family": "lognormal", "mu": 1.5, "sigma": 0.4}},
        {"from": "mild_symptomatic", "to": "recovered", "probability": ones,
         "duration": {"family": "gamma", "mean": 7, "sd": 2}},
        {"from": "severe_symptomatic", "to": "hospitalized", "probability": p_hosp,
         "duration": {"family": "gamma", "mean": 4, "sd": 1}},
        {"from": "severe_symptomatic", "to": "recovered", "probability": p_rec,
         "duration": {"family": "gamma", "mean": 9, "sd": 2}},
        {"from": "hospitalized", "to": "critical_icu", "probability": [0.2] * 9,
         "duration": {"family": "gamma", "mean": 3, "sd": 1}},
        {"from": "hospitalized", "to": "recovered", "probability": [0.8] * 9,
         "duration": {"family": "gamma", "mean": 8, "sd": 2}},
        {"from": "critical_icu", "to": "dead", "probability": [0.5] * 9,
         "duration": {"family": "gamma", "mean": 5, "sd": 2}},
        {"from": "critical_icu", "to": "recovered", "probability": [0.5] * 9,
         "duration": {"family": "gamma", "mean": 7, "sd": 2}},
    ]})


class TestValidation:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ConfigError, match=r"sum to"):
            ProgressionTable.from_dict({"edges": [
                {"from": "susceptible", "to": "asymptomatic",
                 "probability": [0.5] * 9},
                {"from": "susceptible", "to": "presymptomatic_mild",
                 "probability": [0.4] * 9},
                {"from": "susceptible", "to": "presymptomatic_severe",
                 "probability": [0.2] * 9},
            ]})

    def test_illegal_edge_rejected_with_location(self):
        with pytest.raises(ConfigError, match=r"edges\[0\].*illegal"):
            ProgressionTable.from_dict({"edges": [
                {"from": "recovered", "to": "susceptible", "probability": [1.0] * 9},
            ]})

    def test_out_of_range_probability_reports_band(self):
        probs = [0.4] * 9
        probs[7] = 1.4
        with pytest.raises(ConfigError, match=r"probability\[7\]"):
            ProgressionTable.from_dict({"edges": [
                {"from": "susceptible", "to": "asymptomatic", "probability": probs},
            ]})

    def test_duration_family_errors(self):
        with pytest.raises(ConfigError, match="duration"):
            DurationSpec.from_dict({"family": "weibull", "k": 2}, "edges[0].duration")
        with pytest.raises(ConfigError):
            DurationSpec.from_dict({"family": "gamma", "mean": -1, "sd": 2}, "x")


class TestScheduling:
    def test_degenerate_constant_table(self):
        table = minimal_table()
        nxt, delay = table.schedule_transition(Stage.ASYMPTOMATIC, 3, 0.37, 0.91)
        assert nxt == Stage.RECOVERED
        assert delay == 7

    def test_absorbing_stage_refused(self):
        table = minimal_table()
        for stage in (Stage.DEAD, Stage.RECOVERED, Stage.VACCINATED):
            with pytest.raises(ValueError, match="absorbing"):
                table.schedule_transition(stage, 0, 0.5, 0.5)

    def test_delay_at_least_one_step(self):
        table = minimal_table(asymp_duration={"family": "gamma",
                                              "mean": 0.3, "sd": 0.2})
        for u in (0.001, 0.5, 0.999):
            _, delay = table.schedule_transition(Stage.ASYMPTOMATIC, 0, 0.0, u)
            assert delay >= 1

    def test_round_delay_half_even(self):
        assert round_delay(1.5) == 2.0
        assert round_delay(2.5) == 2.0
        assert round_delay(0.2) == 1.0

    def test_vectorized_matches_scalar(self):
        table = minimal_table()
        rng = np.random.default_rng(0)
        stages = rng.choice([int(Stage.ASYMPTOMATIC), int(Stage.SEVERE_SYMPTOMATIC),
                             int(Stage.HOSPITALIZED), int(Stage.CRITICAL_ICU)],
                            size=400).astype(np.int8)
        ages = rng.integers(0, 9, size=400).astype(np.int8)
        u_b = rng.random(400)
        u_d = rng.random(400)
        nxt_vec, delay_vec = table.schedule_transitions(stages, ages, u_b, u_d)
        for i in range(400):
            nxt, delay = table.schedule_transition(Stage(stages[i]), int(ages[i]),
                                                   float(u_b[i]), float(u_d[i]))
            assert nxt_vec[i] == int(nxt)
            assert delay_vec[i] == delay

    def test_entry_stage_vector_matches_scalar(self):
        table = minimal_table()
        rng = np.random.default_rng(1)
        ages = rng.integers(0, 9, size=300).astype(np.int8)
        u = rng.random(300)
        vec = table.entry_stages(ages, u)
        for i in range(300):
            assert vec[i] == int(table.entry_stage(int(ages[i]), float(u[i])))

    def test_branch_frequency_monte_carlo(self):
        # configured P(severe -> hospitalized) = 0.3 for the 80+ band; the
        # empirical rate over 1e5 keyed draws must sit within +-0.005
        table = minimal_table(p_hosp_80plus=0.3)
        n = 100_000
        ids = np.arange(n, dtype=np.int64)
        u_b = uniforms(99, 0, Purpose.PROGRESSION_BRANCH, ids)
        u_d = uniforms(99, 0, Purpose.PROGRESSION_DELAY, ids)
        stages = np.full(n, int(Stage.SEVERE_SYMPTOMATIC), dtype=np.int8)
        ages = np.full(n, 8, dtype=np.int8)
        nxt, _ = table.schedule_transitions(stages, ages, u_b, u_d)
        freq = np.mean(nxt == int(Stage.HOSPITALIZED))
        assert abs(freq - 0.3) < 0.005

    def test_only_legal_destinations_fire(self):
        from epivec.progression import LEGAL_EDGES
        table = minimal_table()
        rng = np.random.default_rng(2)
        for stage in (Stage.ASYMPTOMATIC, Stage.PRESYMPTOMATIC_MILD,
                      Stage.PRESYMPTOMATIC_SEVERE, Stage.MILD_SYMPTOMATIC,
                      Stage.SEVERE_SYMPTOMATIC, Stage.HOSPITALIZED,
                      Stage.CRITICAL_ICU):
            for _ in range(50):
                nxt, delay = table.schedule_transition(
                    stage, int(rng.integers(0, 9)),
                    float(rng.random()), float(rng.random()))
                assert nxt in LEGAL_EDGES[stage]
                assert delay >= 1
