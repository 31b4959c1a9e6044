import datetime as dt

import pytest

from sitetwin.errors import CycleError, DanglingReference, MissingDuration
from sitetwin.project_model import (
    Activity,
    Calendar,
    PrecedenceRelation,
    build_network,
    calendar_offset,
    cpm_pass,
    workday_add,
)
from sitetwin.rng import SubStream, DOMAIN_GENERIC


def chain(*durations):
    acts = [Activity(chr(65 + i), baseline_duration=d) for i, d in enumerate(durations)]
    rels = [PrecedenceRelation(acts[i].id, acts[i + 1].id) for i in range(len(acts) - 1)]
    return build_network(acts, rels), {a.id: a.baseline_duration for a in acts}


class TestBuildNetwork:
    def test_chain_topo_order(self):
        net, _ = chain(1, 1, 1)
        assert net.topo_order == ("A", "B", "C")

    def test_smallest_cycle_names_members(self):
        acts = [Activity("A", baseline_duration=1), Activity("B", baseline_duration=1)]
        rels = [PrecedenceRelation("A", "B"), PrecedenceRelation("B", "A")]
        with pytest.raises(CycleError) as exc:
            build_network(acts, rels)
        assert set(exc.value.cycle) == {"A", "B"}

    def test_dangling_reference_names_offender(self):
        acts = [Activity("A", baseline_duration=1)]
        with pytest.raises(DanglingReference) as exc:
            build_network(acts, [PrecedenceRelation("A", "ZZ")])
        assert exc.value.ref == "ZZ"

    def test_large_synthetic_instance_loads(self):
        # layered DAG at the scale of a real tower schedule
        n_acts, n_rels = 1186, 3452
        stream = SubStream(7, DOMAIN_GENERIC, "layers")
        acts = [Activity(f"T{i:04d}", baseline_duration=float(1 + i % 9)) for i in range(n_acts)]
        seen = set()
        # backbone keeps the graph connected; extra edges drawn until full
        for i in range(1, n_acts):
            j = int(stream.uniforms(1)[0] * i)
            seen.add((j, i))
        while len(seen) < n_rels:
            u = stream.uniforms(2048).reshape(-1, 2)
            for a, b in u:
                i = int(a * (n_acts - 1))
                j = i + 1 + int(b * (n_acts - i - 1))
                if j < n_acts:
                    seen.add((i, j))
                if len(seen) >= n_rels:
                    break
        rels = [
            PrecedenceRelation(f"T{i:04d}", f"T{j:04d}") for i, j in sorted(seen)[:n_rels]
        ]
        net = build_network(acts, rels)
        assert len(net) == n_acts
        assert len(net.relations) == n_rels
        pos = {a: i for i, a in enumerate(net.topo_order)}
        assert all(pos[r.predecessor] < pos[r.successor] for r in net.relations)

    def test_duplicate_ids_rejected(self):
        acts = [Activity("A", baseline_duration=1), Activity("A", baseline_duration=2)]
        with pytest.raises(ValueError):
            build_network(acts, [])


class TestCpmPass:
    def test_two_activity_chain(self):
        net, durs = chain(2, 3)
        res = cpm_pass(net, durs)
        assert res.project_finish == 5
        assert res.critical_set == {"A", "B"}
        assert res.total_float == {"A": 0.0, "B": 0.0}

    def test_parallel_branch_float(self):
        # A(2)->B(3) in parallel with C(4), all feeding an end milestone
        acts = [
            Activity("A", baseline_duration=2),
            Activity("B", baseline_duration=3),
            Activity("C", baseline_duration=4),
            Activity("End", baseline_duration=0),
        ]
        rels = [
            PrecedenceRelation("A", "B"),
            PrecedenceRelation("B", "End"),
            PrecedenceRelation("C", "End"),
        ]
        net = build_network(acts, rels)
        res = cpm_pass(net, {"A": 2, "B": 3, "C": 4, "End": 0})
        assert res.project_finish == 5
        assert res.total_float["C"] == 1
        assert res.critical_set == {"A", "B", "End"}

    def test_zero_duration_single_activity(self):
        net, durs = chain(0)
        res = cpm_pass(net, durs)
        assert res.project_finish == 0
        assert res.critical_set == {"A"}

    def test_missing_duration(self):
        net, _ = chain(1, 2)
        with pytest.raises(MissingDuration):
            cpm_pass(net, {"A": 1})

    def test_relation_kinds(self):
        # SS+1: B may start 1 day after A starts; FF+0: C must finish with B
        acts = [Activity(x, baseline_duration=d) for x, d in [("A", 4), ("B", 2), ("C", 3)]]
        rels = [
            PrecedenceRelation("A", "B", kind="SS", lag=1),
            PrecedenceRelation("B", "C", kind="FF", lag=0),
        ]
        net = build_network(acts, rels)
        res = cpm_pass(net, {"A": 4, "B": 2, "C": 3})
        assert res.es["B"] == 1
        assert res.ef["C"] == res.ef["B"] == 3
        assert res.project_finish == 4

    def test_negative_lag_clamp_warns(self):
        acts = [Activity("A", baseline_duration=1), Activity("B", baseline_duration=1)]
        rels = [PrecedenceRelation("A", "B", kind="SS", lag=-5)]
        net = build_network(acts, rels)
        res = cpm_pass(net, {"A": 1, "B": 1})
        assert res.es["B"] == 0
        assert any("clamped" in w for w in res.warnings)

    def test_purity_bit_identical(self):
        net, durs = chain(2.25, 3.5, 0.75)
        r1 = cpm_pass(net, durs)
        r2 = cpm_pass(net, durs)
        assert r1 == r2

    def test_float_identity_and_criticality_promotion(self):
        # LS-ES == LF-EF everywhere; consuming exactly the float makes an
        # activity critical
        stream = SubStream(3, DOMAIN_GENERIC, "cpmfuzz")
        for trial in range(25):
            n = 4 + trial % 5
            durs = {chr(65 + i): round(1 + 9 * stream.uniforms(1)[0], 2) for i in range(n)}
            acts = [Activity(k, baseline_duration=v) for k, v in durs.items()]
            rels = []
            for i in range(1, n):
                j = int(stream.uniforms(1)[0] * i)
                rels.append(PrecedenceRelation(chr(65 + j), chr(65 + i)))
            net = build_network(acts, rels)
            res = cpm_pass(net, durs)
            for a in durs:
                assert res.ls[a] - res.es[a] == pytest.approx(res.lf[a] - res.ef[a], abs=1e-9)
                assert res.total_float[a] >= -1e-9
            noncrit = [a for a in durs if a not in res.critical_set]
            if noncrit:
                a = noncrit[0]
                bumped = dict(durs)
                bumped[a] = durs[a] + res.total_float[a]
                res2 = cpm_pass(net, bumped)
                assert a in res2.critical_set
                assert res2.project_finish == pytest.approx(res.project_finish, abs=1e-9)


class TestWorkdayArithmetic:
    def test_weekend_skip(self):
        fri = dt.date(2025, 1, 3)
        assert workday_add(fri, 1, Calendar()) == dt.date(2025, 1, 6)

    def test_exception_skip(self):
        mon = dt.date(2025, 1, 6)
        cal = Calendar(exceptions=frozenset({dt.date(2025, 1, 8)}))
        assert workday_add(mon, 3, cal) == dt.date(2025, 1, 10)

    def test_zero_is_identity(self):
        sat = dt.date(2025, 1, 4)
        assert workday_add(sat, 0, Calendar()) == sat

    def test_calendar_offset_counts_nonworking_days(self):
        fri = dt.date(2025, 1, 3)
        assert calendar_offset(fri, 1, Calendar()) == 3.0  # Sat+Sun+Mon
        assert calendar_offset(fri, 0, Calendar()) == 0.0

    def test_fractional_days(self):
        fri = dt.date(2025, 1, 3)
        assert calendar_offset(fri, 1.5, Calendar()) == pytest.approx(3.5)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            workday_add(dt.date(2025, 1, 3), -1, Calendar())
