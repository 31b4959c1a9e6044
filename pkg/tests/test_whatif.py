import datetime as dt

import numpy as np
import pytest

from sitetwin.costs import CostItem, CostLedger
from sitetwin.errors import AcyclicityViolation, UnknownTarget
from sitetwin.project_model import Activity, Calendar, PrecedenceRelation, build_network
from sitetwin.rng import DOMAIN_GENERIC, SubStream
from sitetwin.state import ProjectMeta, TwinState
from sitetwin.stochastic import DurationPrior
from sitetwin.whatif import (
    CapacityChange,
    DeliveryShift,
    PriceMultiplier,
    Resequence,
    Scenario,
    ScenarioResult,
    ScopeChange,
    WeatherDays,
    apply_scenario,
    evaluate,
    sensitivity_rank,
    tornado_rows,
    touched_targets,
)

ALL_WEEK = frozenset(range(7))


def toy_state(calendar=None, relations=None, durations=(5.0, 10.0, 5.0)):
    acts = [
        Activity("A", baseline_duration=durations[0], wbs_code="WBS-1", csi_division="03"),
        Activity("B", baseline_duration=durations[1], wbs_code="WBS-2", csi_division="23"),
        Activity("C", baseline_duration=durations[2], wbs_code="WBS-3", csi_division="09"),
    ]
    rels = relations or [PrecedenceRelation("A", "B"), PrecedenceRelation("B", "C")]
    ledger = CostLedger.from_items(
        [
            CostItem("X-1", "09", "WBS-3", material=500_000, labor=200_000, equipment=0),
            CostItem("X-2", "23", "WBS-2", material=900_000, labor=400_000, equipment=100_000),
        ]
    )
    return TwinState(
        meta=ProjectMeta(name="toy", seed=7, start_date=dt.date(2025, 1, 6)),
        network=build_network(acts, rels),
        calendar=calendar or Calendar(workweek=ALL_WEEK),
        priors={a.id: DurationPrior.triangular(d, d, d) for a, d in zip(acts, durations)},
        ledger=ledger,
    )


class TestApplyScenario:
    def test_empty_scenario_is_identity(self):
        base = toy_state()
        out = apply_scenario(base, Scenario("null"))
        assert out is not base
        assert base.semantically_equal(out)

    def test_base_never_mutated(self):
        base = toy_state()
        snapshot = base.input_hash()
        apply_scenario(
            base,
            Scenario(
                "mix",
                operators=(
                    PriceMultiplier(factor=1.2, divisions=("09",)),
                    DeliveryShift(activity_ids=("B",), days=14.0),
                    WeatherDays(dates=(dt.date(2025, 2, 3),)),
                ),
            ),
        )
        assert base.input_hash() == snapshot

    def test_delivery_shift_moves_posterior_only_for_target(self):
        base = toy_state()
        out = apply_scenario(base, Scenario("d", operators=(DeliveryShift(("B",), 14.0),)))
        base_post = base.posteriors()
        out_post = out.posteriors()
        assert out_post["B"].mean == pytest.approx(base_post["B"].mean + 14.0)
        assert out_post["A"] == base_post["A"]
        assert out_post["C"] == base_post["C"]

    def test_weather_adds_exactly_those_dates(self):
        base = toy_state(calendar=Calendar())
        dates = (dt.date(2025, 3, 18), dt.date(2025, 3, 19), dt.date(2025, 3, 20))
        out = apply_scenario(base, Scenario("w", operators=(WeatherDays(dates),)))
        assert out.calendar.exceptions == base.calendar.exceptions | set(dates)
        assert len(out.calendar.exceptions - base.calendar.exceptions) == 3

    def test_resequence_rejects_cycles(self):
        base = toy_state()
        with pytest.raises(AcyclicityViolation):
            apply_scenario(
                base,
                Scenario("bad", operators=(Resequence(add=(PrecedenceRelation("C", "A"),)),)),
            )

    def test_unknown_targets_rejected(self):
        base = toy_state()
        with pytest.raises(UnknownTarget):
            apply_scenario(base, Scenario("x", operators=(DeliveryShift(("ZZ",), 1.0),)))
        with pytest.raises(UnknownTarget):
            apply_scenario(base, Scenario("y", operators=(PriceMultiplier(1.1, item_ids=("NOPE",)),)))

    def test_touched_divisions(self):
        base = toy_state()
        scenario = Scenario(
            "mix",
            operators=(PriceMultiplier(1.08, divisions=("09",)), DeliveryShift(("B",), 3.0)),
        )
        touched = touched_targets(base, scenario)
        assert touched["divisions"] == ["09", "23"]


class TestEvaluate:
    def test_null_scenario_exact_zeros(self):
        base = toy_state()
        result = evaluate(base, Scenario("null"), n_trials=2_000, seed=42)
        assert result.dfinish_p50 == 0.0
        assert result.dfinish_p80 == 0.0
        assert result.dcost_p50 == 0

    def test_delay_on_fully_critical_activity(self):
        base = toy_state()  # chain: every activity 100% critical
        result = evaluate(
            base, Scenario("d", operators=(DeliveryShift(("B",), 14.0),)), n_trials=5_000, seed=42
        )
        assert result.dfinish_p50 == pytest.approx(14.0, abs=0.1)
        assert result.dfinish_p80 == pytest.approx(14.0, abs=0.1)

    def test_price_escalation_cost_delta(self):
        base = toy_state()
        result = evaluate(
            base,
            Scenario("p", operators=(PriceMultiplier(1.08, divisions=("09",)),)),
            n_trials=1_000,
            seed=42,
        )
        assert result.dcost_p50 == round(700_000 * 0.08)
        assert result.dcost_p80 == round(result.dcost_p50 * 1.3)
        assert result.dfinish_p50 == 0.0
        assert result.assumed_cost_spread

    def test_resequencing_can_only_help_when_removing_constraints(self):
        # extra A->C lag constraint drives the finish; dropping it saves 2 days
        rels = [
            PrecedenceRelation("A", "B"),
            PrecedenceRelation("B", "C"),
            PrecedenceRelation("A", "C", lag=12.0),
        ]
        base = toy_state(relations=rels)
        scenario = Scenario("reseq", operators=(Resequence(remove=(("A", "C"),)),))
        result = evaluate(base, scenario, n_trials=2_000, seed=42)
        assert result.dfinish_p50 == pytest.approx(-2.0, abs=0.1)
        assert result.dfinish_p50 <= 0

    def test_weather_days_never_decrease_finish(self):
        stream = SubStream(77, DOMAIN_GENERIC, "weather-fuzz")
        start = dt.date(2025, 1, 6)
        for k in range(100):
            u = stream.uniforms(6)
            durations = tuple(2.0 + round(float(x) * 8, 1) for x in u[:3])
            base = toy_state(calendar=Calendar(), durations=durations)
            n_exc = 1 + int(u[3] * 3)
            dates = tuple(
                start + dt.timedelta(days=int(u[4] * 20 + i * (1 + u[5] * 5)))
                for i in range(n_exc)
            )
            result = evaluate(
                base, Scenario("w", operators=(WeatherDays(dates),)), n_trials=400, seed=k
            )
            assert result.dfinish_p50 >= -1e-9
            assert result.dfinish_p80 >= -1e-9

    def test_capacity_cut_slows_demanding_activities(self):
        acts = [
            Activity("A", baseline_duration=5.0, resource_demands={"electricians": 2}),
            Activity("B", baseline_duration=5.0),
        ]
        from sitetwin.leveling import ResourcePool

        state = TwinState(
            meta=ProjectMeta(name="cap", seed=3),
            network=build_network(acts, [PrecedenceRelation("A", "B")]),
            calendar=Calendar(workweek=ALL_WEEK),
            pools=(ResourcePool("electricians", 4.0, 1.0),),
            priors={"A": DurationPrior.triangular(5, 5, 5), "B": DurationPrior.triangular(5, 5, 5)},
        )
        scenario = Scenario("crew", operators=(CapacityChange("electricians", -1.0),))
        result = evaluate(state, scenario, n_trials=500, seed=3)
        assert result.dfinish_p50 > 0

    def test_difference_quantile_mode(self):
        base = toy_state()
        scenario = Scenario("d", operators=(DeliveryShift(("B",), 14.0),))
        alt = evaluate(base, scenario, n_trials=2_000, seed=42, delta_mode="difference_quantile")
        # every paired trial shifts by exactly 14 workdays on the point-prior chain
        assert alt.dfinish_p50 == pytest.approx(14.0, abs=1e-9)
        assert alt.dfinish_p80 == pytest.approx(14.0, abs=1e-9)
        with pytest.raises(ValueError):
            evaluate(base, scenario, n_trials=100, seed=1, delta_mode="bogus")

    def test_commuting_operators_order_independent(self):
        base = toy_state()
        ops_a = (PriceMultiplier(1.1, divisions=("09",)), DeliveryShift(("B",), 5.0))
        ops_b = (DeliveryShift(("B",), 5.0), PriceMultiplier(1.1, divisions=("09",)))
        out_a = apply_scenario(base, Scenario("ab", operators=ops_a))
        out_b = apply_scenario(base, Scenario("ba", operators=ops_b))
        assert out_a.semantically_equal(out_b)
        ra = evaluate(base, Scenario("ab", operators=ops_a), n_trials=1_000, seed=5)
        rb = evaluate(base, Scenario("ba", operators=ops_b), n_trials=1_000, seed=5)
        assert (ra.dfinish_p50, ra.dcost_p50) == (rb.dfinish_p50, rb.dcost_p50)


class TestSensitivityRank:
    FIXTURE = [
        ScenarioResult("drywall-material-escalation", 6, 8, 650_000, 800_000, ("09", "06")),
        ScenarioResult("late-ahu-delivery", 5, 6, 420_000, 550_000, ("23", "26")),
        ScenarioResult("rain-days-critical-window", 4, 4, 300_000, 400_000, ("03", "07")),
        ScenarioResult("steel-lead-time", 4, 5, 350_000, 450_000, ("05", "03")),
        ScenarioResult("electrician-shortage", 3, 4, 260_000, 350_000, ("26",)),
        ScenarioResult("fireproofing-change-order", 2, 3, 220_000, 300_000, ("07", "05")),
        ScenarioResult("glazing-resequencing", -2, -1, -140_000, -80_000, ("08", "07")),
    ]

    def test_fixture_ordering(self):
        ranked = sensitivity_rank(self.FIXTURE)
        names = [r.name for r in ranked]
        assert names[0] == "drywall-material-escalation"
        assert names[1] == "late-ahu-delivery"
        # +4d tie: higher cost impact first
        assert names[2] == "steel-lead-time"
        assert names[3] == "rain-days-critical-window"
        assert names[4] == "electrician-shortage"
        assert names[5] == "fireproofing-change-order"
        assert names[6] == "glazing-resequencing"
        assert ranked[-1].dfinish_p50 < 0
        deltas = [r.dfinish_p50 for r in ranked]
        assert deltas == sorted(deltas, reverse=True)

    def test_single_result(self):
        only = [self.FIXTURE[0]]
        assert sensitivity_rank(only) == only

    def test_tie_break_by_cost(self):
        a = ScenarioResult("a", 4, 5, 100, 130, ())
        b = ScenarioResult("b", 4, 5, 900, 1170, ())
        assert [r.name for r in sensitivity_rank([a, b])] == ["b", "a"]

    def test_tornado_rows(self):
        rows = tornado_rows(self.FIXTURE)
        assert rows[0] == ("drywall-material-escalation", 6)
        assert rows[-1] == ("glazing-resequencing", -2)
