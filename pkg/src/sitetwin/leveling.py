"""Weekly look-ahead resource leveling.

A serial schedule-generation scheme produces the baseline; a small tabular
value learner then proposes one adjustment per week from a masked action set
(no-op, start shifts, crew moves, extra shifts, crew splits, task merges).
Recommendations go through an adopt/reject log, and accounting compares
overtime and idle hours against the untouched baseline.

Time is a half-day grid of workdays, five workdays per week. Overtime is
resource usage above regular capacity (plus any extra-shift hours), at 8
hours per unit-day. Idle is unused regular capacity during weeks where the
resource has any assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .errors import DuplicateDecision, InfeasibleInstance
from .rng import DOMAIN_POLICY, SubStream

DAYS_PER_WEEK = 5
HOURS_PER_UNIT_DAY = 8.0
SLOT = 0.5  # scheduling granularity in days


@dataclass(frozen=True)
class ResourcePool:
    resource_id: str
    regular_capacity: float
    overtime_cap: float = 0.0
    overtime_rate_weight: float = 1.0

    def __post_init__(self):
        if self.regular_capacity < 0 or self.overtime_cap < 0:
            raise ValueError(f"{self.resource_id}: capacities must be >= 0")


@dataclass(frozen=True)
class Objective:
    w_span: float = 0.0
    w_overtime: float = 1.0
    w_idle: float = 0.0

    def __post_init__(self):
        if min(self.w_span, self.w_overtime, self.w_idle) < 0:
            raise ValueError("objective weights must be >= 0")
        if self.w_span == self.w_overtime == self.w_idle == 0:
            raise ValueError("objective weights cannot all be zero")

    def value(self, accounting: "Accounting") -> float:
        return (
            self.w_span * accounting.makespan
            + self.w_overtime * accounting.overtime_hours
            + self.w_idle * accounting.idle_hours
        )


@dataclass(frozen=True)
class LevelTask:
    id: str
    duration: float  # workdays, half-day granularity
    demands: Mapping[str, float]
    preds: tuple[str, ...] = ()

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"{self.id}: duration must be > 0")
        object.__setattr__(self, "demands", dict(self.demands))
        object.__setattr__(self, "preds", tuple(self.preds))


@dataclass(frozen=True)
class LevelingInstance:
    tasks: tuple[LevelTask, ...]
    pools: tuple[ResourcePool, ...]
    weeks: int
    objective: Objective = Objective()

    def __post_init__(self):
        ids = {t.id for t in self.tasks}
        for t in self.tasks:
            for p in t.preds:
                if p not in ids:
                    raise ValueError(f"{t.id}: unknown predecessor {p!r}")

    @property
    def horizon_days(self) -> int:
        return self.weeks * DAYS_PER_WEEK

    def pool(self, resource_id: str) -> ResourcePool:
        for p in self.pools:
            if p.resource_id == resource_id:
                return p
        raise KeyError(resource_id)


@dataclass
class Schedule:
    """Mutable working copy: starts, effective durations/demands, extra shifts."""

    instance: LevelingInstance
    starts: dict[str, float]
    durations: dict[str, float]
    demands: dict[str, dict[str, float]]
    extra_shift_hours: float = 0.0

    def clone(self) -> "Schedule":
        return Schedule(
            self.instance,
            dict(self.starts),
            dict(self.durations),
            {k: dict(v) for k, v in self.demands.items()},
            self.extra_shift_hours,
        )

    def finish(self, task_id: str) -> float:
        return self.starts[task_id] + self.durations[task_id]

    def usage(self) -> dict[str, list[float]]:
        """Per-resource usage per half-day slot."""
        n_slots = int(self.instance.horizon_days / SLOT)
        grids = {p.resource_id: [0.0] * n_slots for p in self.instance.pools}
        for t in self.instance.tasks:
            s = self.starts[t.id]
            e = s + self.durations[t.id]
            lo, hi = int(round(s / SLOT)), int(round(e / SLOT))
            for r, units in self.demands[t.id].items():
                grid = grids[r]
                for k in range(lo, min(hi, n_slots)):
                    grid[k] += units
        return grids

    def precedence_ok(self) -> bool:
        by_id = {t.id: t for t in self.instance.tasks}
        return all(
            self.starts[t.id] >= self.finish(p) - 1e-9
            for t in self.instance.tasks
            for p in t.preds
            if p in by_id
        )

    def capacity_ok(self) -> bool:
        for r, grid in self.usage().items():
            pool = self.instance.pool(r)
            cap = pool.regular_capacity + pool.overtime_cap
            if any(u > cap + 1e-9 for u in grid):
                return False
        return True

    def within_horizon(self) -> bool:
        return all(self.finish(t.id) <= self.instance.horizon_days + 1e-9 for t in self.instance.tasks)


@dataclass(frozen=True)
class Accounting:
    makespan: float
    overtime_hours: float
    idle_hours: float
    weekly_overtime: tuple[float, ...]

    @staticmethod
    def of(schedule: Schedule) -> "Accounting":
        inst = schedule.instance
        grids = schedule.usage()
        slots_per_week = int(DAYS_PER_WEEK / SLOT)
        weekly_ot = [0.0] * inst.weeks
        idle = 0.0
        for r, grid in grids.items():
            regular = inst.pool(r).regular_capacity
            for w in range(inst.weeks):
                window = grid[w * slots_per_week : (w + 1) * slots_per_week]
                over = sum(max(0.0, u - regular) for u in window) * SLOT
                weekly_ot[w] += over * HOURS_PER_UNIT_DAY
                if any(u > 0 for u in window):
                    idle += sum(max(0.0, regular - u) for u in window) * SLOT
        total_ot = sum(weekly_ot) + schedule.extra_shift_hours
        makespan = max((schedule.finish(t.id) for t in inst.tasks), default=0.0)
        return Accounting(
            makespan=makespan,
            overtime_hours=total_ot,
            idle_hours=idle * HOURS_PER_UNIT_DAY,
            weekly_overtime=tuple(weekly_ot),
        )


def greedy_baseline(instance: LevelingInstance, priority_rule: str = "latest-finish") -> Schedule:
    """Serial schedule generation: place eligible tasks at the earliest
    capacity-feasible time, highest priority first."""
    if priority_rule not in ("latest-finish", "most-total-successors"):
        raise ValueError(f"unknown priority rule {priority_rule!r}")
    _check_demand_fits(instance)
    priority = _priorities(instance, priority_rule)
    by_id = {t.id: t for t in instance.tasks}
    scheduled: dict[str, float] = {}
    schedule = Schedule(
        instance,
        starts={},
        durations={t.id: t.duration for t in instance.tasks},
        demands={t.id: dict(t.demands) for t in instance.tasks},
    )
    n_slots = int(instance.horizon_days / SLOT)
    grids = {p.resource_id: [0.0] * n_slots for p in instance.pools}
    caps = {
        p.resource_id: p.regular_capacity + p.overtime_cap for p in instance.pools
    }
    remaining = set(by_id)
    while remaining:
        eligible = sorted(
            (t for t in remaining if all(p in scheduled for p in by_id[t].preds)),
            key=lambda t: (priority[t], t),
        )
        if not eligible:
            raise InfeasibleInstance("precedence deadlock")
        task = by_id[eligible[0]]
        est = max((scheduled[p] + by_id[p].duration for p in task.preds), default=0.0)
        start = _earliest_fit(task, est, grids, caps, n_slots)
        if start is None:
            raise InfeasibleInstance(f"{task.id}: no capacity-feasible start before horizon")
        lo = int(round(start / SLOT))
        hi = int(round((start + task.duration) / SLOT))
        for r, units in task.demands.items():
            for k in range(lo, hi):
                grids[r][k] += units
        scheduled[task.id] = start
        schedule.starts[task.id] = start
        remaining.remove(task.id)
    return schedule


def _check_demand_fits(instance):
    for t in instance.tasks:
        for r, units in t.demands.items():
            pool = instance.pool(r)
            if units > pool.regular_capacity + pool.overtime_cap + 1e-9:
                raise InfeasibleInstance(
                    f"{t.id}: demand {units} on {r} exceeds regular+overtime cap"
                )


def _earliest_fit(task, est, grids, caps, n_slots):
    width = int(round(task.duration / SLOT))
    start_slot = int(math.ceil(round(est / SLOT, 6)))
    for lo in range(start_slot, n_slots - width + 1):
        ok = True
        for r, units in task.demands.items():
            grid, cap = grids[r], caps[r]
            if any(grid[k] + units > cap + 1e-9 for k in range(lo, lo + width)):
                ok = False
                break
        if ok:
            return lo * SLOT
    return None


def _priorities(instance, rule):
    by_id = {t.id: t for t in instance.tasks}
    succs: dict[str, set[str]] = {t.id: set() for t in instance.tasks}
    for t in instance.tasks:
        for p in t.preds:
            succs[p].add(t.id)
    if rule == "most-total-successors":
        # negate so many successors sorts first
        memo: dict[str, set[str]] = {}

        def all_succ(x):
            if x not in memo:
                out = set(succs[x])
                for s in succs[x]:
                    out |= all_succ(s)
                memo[x] = out
            return memo[x]

        return {t.id: -len(all_succ(t.id)) for t in instance.tasks}
    # latest-finish: backward pass on precedence only (no resources)
    lf: dict[str, float] = {}

    def late_finish(x):
        if x not in lf:
            if not succs[x]:
                lf[x] = float(instance.horizon_days)
            else:
                lf[x] = min(late_finish(s) - by_id[s].duration for s in succs[x])
        return lf[x]

    return {t.id: late_finish(t.id) for t in instance.tasks}


# Actions -------------------------------------------------------------------

NOOP = ("noop",)


@dataclass(frozen=True)
class LevelingState:
    instance: LevelingInstance
    schedule: Schedule
    week: int

    @property
    def week_start(self) -> float:
        return self.week * DAYS_PER_WEEK

    @property
    def week_end(self) -> float:
        return self.week_start + DAYS_PER_WEEK

    def unstarted(self) -> list[str]:
        return sorted(t for t, s in self.schedule.starts.items() if s >= self.week_start - 1e-9)

    def starting_this_week(self) -> list[str]:
        return sorted(
            t
            for t, s in self.schedule.starts.items()
            if self.week_start - 1e-9 <= s < self.week_end - 1e-9
        )

    def active_this_week(self) -> list[str]:
        return sorted(
            t
            for t in self.schedule.starts
            if self.schedule.starts[t] < self.week_end - 1e-9
            and self.schedule.finish(t) > self.week_start + 1e-9
        )

    def eligible(self) -> list[str]:
        """Unstarted tasks whose predecessors are complete at the week start."""
        by_id = {t.id: t for t in self.instance.tasks}
        return [
            t
            for t in self.unstarted()
            if all(self.schedule.finish(p) <= self.week_start + 1e-9 for p in by_id[t].preds)
        ]


def valid_actions(state: LevelingState) -> list[tuple]:
    """Feasibility-preserving actions for this week; always includes no-op."""
    actions = [NOOP]
    sched = state.schedule
    by_id = {t.id: t for t in state.instance.tasks}
    starting = state.starting_this_week()
    active = state.active_this_week()

    for t in starting:
        for delta in (-2.0, -1.0, 1.0, 2.0):
            if _apply_shift(state, t, delta) is not None:
                actions.append(("shift_start", t, delta))

    for t in active:
        if sched.starts[t] < state.week_start - 1e-9:
            continue  # frozen past: already started
        if sched.durations[t] < 1.0:
            continue
        if all(
            state.instance.pool(r).overtime_cap > 0 for r in sched.demands[t]
        ) and sched.demands[t]:
            actions.append(("add_shift", t))

    for donor in starting:
        for receiver in starting:
            if donor == receiver:
                continue
            shared = [
                r
                for r in sched.demands[donor]
                if r in sched.demands[receiver] and sched.demands[donor][r] >= 2.0
            ]
            for r in shared:
                if _apply_move_crew(state, donor, receiver, r) is not None:
                    actions.append(("move_crew", donor, receiver, r))

    for t in starting:
        if _apply_split(state, t) is not None:
            actions.append(("split_crew", t))

    for a in starting:
        for b in starting:
            if a >= b:
                continue
            if by_id[a].demands.keys() != by_id[b].demands.keys():
                continue
            if b in _ancestors(by_id, a) or a in _ancestors(by_id, b):
                continue
            if _apply_merge(state, a, b) is not None:
                actions.append(("merge_tasks", a, b))

    return sorted(actions)


def _ancestors(by_id, x):
    out = set()
    stack = list(by_id[x].preds)
    while stack:
        p = stack.pop()
        if p not in out:
            out.add(p)
            stack.extend(by_id[p].preds)
    return out


def apply_action(state: LevelingState, action: tuple) -> Schedule | None:
    """New schedule after the action, or None if infeasible."""
    kind = action[0]
    if kind == "noop":
        return state.schedule.clone()
    if kind == "shift_start":
        return _apply_shift(state, action[1], action[2])
    if kind == "add_shift":
        return _apply_add_shift(state, action[1])
    if kind == "move_crew":
        return _apply_move_crew(state, action[1], action[2], action[3])
    if kind == "split_crew":
        return _apply_split(state, action[1])
    if kind == "merge_tasks":
        return _apply_merge(state, action[1], action[2])
    raise ValueError(f"unknown action {action!r}")


def _cascade(schedule: Schedule, week_start: float) -> bool:
    """Push unstarted successors to restore precedence; False if impossible."""
    by_id = {t.id: t for t in schedule.instance.tasks}
    order = _topo_ids(schedule.instance)
    for t in order:
        need = max(
            (schedule.finish(p) for p in by_id[t].preds),
            default=0.0,
        )
        if schedule.starts[t] < need - 1e-9:
            if schedule.starts[t] < week_start - 1e-9:
                return False  # would move a task already underway
            schedule.starts[t] = need
    return True


def _topo_ids(instance):
    by_id = {t.id: t for t in instance.tasks}
    seen: list[str] = []
    mark = set()

    def visit(x):
        if x in mark:
            return
        mark.add(x)
        for p in by_id[x].preds:
            visit(p)
        seen.append(x)

    for t in sorted(by_id):
        visit(t)
    return seen


def _finalize(state, sched):
    if not _cascade(sched, state.week_start):
        return None
    if not (sched.precedence_ok() and sched.capacity_ok() and sched.within_horizon()):
        return None
    return sched


def _apply_shift(state, task_id, delta):
    sched = state.schedule.clone()
    new_start = sched.starts[task_id] + delta
    if new_start < state.week_start - 1e-9:
        return None
    by_id = {t.id: t for t in state.instance.tasks}
    earliest = max(
        (sched.finish(p) for p in by_id[task_id].preds),
        default=0.0,
    )
    if new_start < earliest - 1e-9:
        return None
    sched.starts[task_id] = new_start
    return _finalize(state, sched)


def _apply_add_shift(state, task_id):
    sched = state.schedule.clone()
    if sched.durations[task_id] < 1.0:
        return None
    demands = sched.demands[task_id]
    if not demands:
        return None
    for r in demands:
        if state.instance.pool(r).overtime_cap <= 0:
            return None
    sched.durations[task_id] -= SLOT
    # extra-shift work happens outside the regular day and is all overtime
    sched.extra_shift_hours += sum(demands.values()) * SLOT * HOURS_PER_UNIT_DAY
    return _finalize(state, sched)


def _apply_move_crew(state, donor, receiver, resource):
    sched = state.schedule.clone()
    d_units = sched.demands[donor].get(resource, 0.0)
    r_units = sched.demands[receiver].get(resource, 0.0)
    if d_units < 2.0 or r_units <= 0.0:
        return None
    # duration scales with the crew ratio on the moved resource
    sched.demands[donor][resource] = d_units - 1.0
    sched.demands[receiver][resource] = r_units + 1.0
    sched.durations[donor] = _half_up(sched.durations[donor] * d_units / (d_units - 1.0))
    sched.durations[receiver] = _half_up(sched.durations[receiver] * r_units / (r_units + 1.0))
    return _finalize(state, sched)


def _apply_split(state, task_id):
    sched = state.schedule.clone()
    for r, units in sched.demands[task_id].items():
        pool = state.instance.pool(r)
        if 2 * units > pool.regular_capacity + pool.overtime_cap + 1e-9:
            return None
    if sched.durations[task_id] < 1.0:
        return None
    sched.demands[task_id] = {r: 2 * u for r, u in sched.demands[task_id].items()}
    sched.durations[task_id] = _half_up(sched.durations[task_id] / 2)
    return _finalize(state, sched)


def _apply_merge(state, a, b):
    sched = state.schedule.clone()
    sched.starts[b] = sched.starts[a]
    # shared setup saves half a day on the joined task
    sched.durations[b] = max(SLOT, sched.durations[b] - SLOT)
    return _finalize(state, sched)


def _half_up(days):
    return max(SLOT, round(days / SLOT) * SLOT)


# Value learner --------------------------------------------------------------


@dataclass
class Policy:
    values: dict[tuple, float] = field(default_factory=dict)
    episodes_trained: int = 0

    def score(self, key: tuple) -> float:
        return self.values.get(key, 0.0)


def _state_key(state: LevelingState) -> tuple:
    inst = state.instance
    grids = state.schedule.usage()
    slots_per_week = int(DAYS_PER_WEEK / SLOT)
    lo = state.week * slots_per_week
    buckets = []
    for p in inst.pools:
        window = grids[p.resource_id][lo : lo + slots_per_week]
        used = sum(window) / max(len(window), 1)
        if p.regular_capacity <= 0:
            buckets.append(0)
            continue
        slack = (p.regular_capacity - used) / p.regular_capacity
        buckets.append(-1 if slack < 0 else 0 if slack < 0.25 else 1 if slack < 0.75 else 2)
    return (state.week, tuple(buckets), min(len(state.eligible()), 5))


def train_policy(
    instance: LevelingInstance,
    episodes: int,
    seed: int,
    weights: Objective | None = None,
    alpha: float = 0.25,
    epsilon: float = 0.25,
) -> Policy:
    """Tabular value learning over masked weekly actions.

    Reward per step is the objective decrease from applying the action to the
    working schedule; values are Q(state-features, action) learned with a
    one-step update. Zero episodes yields a uniform (all-ties) policy whose
    greedy argmax is the no-op.
    """
    objective = weights or instance.objective
    policy = Policy()
    baseline = greedy_baseline(instance)
    for episode in range(episodes):
        stream = SubStream(seed, DOMAIN_POLICY, episode)
        sched = baseline.clone()
        value = objective.value(Accounting.of(sched))
        for week in range(instance.weeks):
            state = LevelingState(instance, sched, week)
            actions = valid_actions(state)
            if stream.uniforms(1)[0] < epsilon:
                action = actions[stream.choice_index(len(actions))]
            else:
                action = min(
                    actions,
                    key=lambda a: (-policy.score((_state_key(state), a)), _action_sort_key(a)),
                )
            nxt = apply_action(state, action)
            if nxt is None:
                continue
            new_value = objective.value(Accounting.of(nxt))
            reward = value - new_value
            key = (_state_key(state), action)
            old = policy.values.get(key, 0.0)
            policy.values[key] = old + alpha * (reward - old)
            sched, value = nxt, new_value
    policy.episodes_trained = episodes
    return policy


def _action_sort_key(action: tuple):
    # deterministic tie-break: no-op first, then lexicographic
    return (0,) if action[0] == "noop" else (1,) + action


@dataclass(frozen=True)
class Recommendation:
    action_id: str
    week: int
    summary: str
    action: tuple
    predicted_delta_objective: float
    predicted_delta_overtime_hours: float
    adopted: str = "pending"  # pending | yes | no
    rejection_reason: str = ""


def recommend(state: LevelingState, policy: Policy, objective: Objective | None = None) -> Recommendation:
    """Best masked action under the learned values, with its simulated impact."""
    objective = objective or state.instance.objective
    actions = valid_actions(state)
    best = min(
        actions,
        key=lambda a: (-policy.score((_state_key(state), a)), _action_sort_key(a)),
    )
    before = Accounting.of(state.schedule)
    after_sched = apply_action(state, best)
    after = Accounting.of(after_sched) if after_sched is not None else before
    return Recommendation(
        action_id=f"RL-{state.week + 1:03d}",
        week=state.week + 1,
        summary=_summarize(best),
        action=best,
        predicted_delta_objective=objective.value(after) - objective.value(before),
        predicted_delta_overtime_hours=after.overtime_hours - before.overtime_hours,
    )


def _summarize(action: tuple) -> str:
    kind = action[0]
    if kind == "noop":
        return "hold current plan"
    if kind == "shift_start":
        direction = "pull" if action[2] < 0 else "push"
        return f"{direction} start of {action[1]} by {abs(action[2]):g} d"
    if kind == "add_shift":
        return f"add half-shift on {action[1]}"
    if kind == "move_crew":
        return f"move 1 {action[3]} crew from {action[1]} to {action[2]}"
    if kind == "split_crew":
        return f"split {action[1]} across two crews"
    return f"merge {action[1]} with {action[2]}"


def synthetic_lookahead_instance(weeks: int = 16) -> LevelingInstance:
    """Deterministic 16-week benchmark instance.

    A serial backbone of week-long tasks carries a calibrated overtime load
    (1,444 h), and two pairs of overlapping finish-crew tasks add 64 h of
    avoidable overtime, for a 1,508 h greedy baseline. The backbone has no
    float, so only the finish-crew overlaps are improvable.
    """
    overload = [1.5, 2.0, 2.5, 3.0, 2.0, 2.5, 3.0, 2.5, 2.0, 2.5, 3.0, 2.5, 2.0, 2.0, 2.0, 1.1]
    tasks = []
    prev = None
    for w in range(weeks):
        tid = f"W{w + 1:02d}"
        tasks.append(
            LevelTask(
                tid,
                duration=float(DAYS_PER_WEEK),
                demands={"crew": 10.0 + overload[w % len(overload)]},
                preds=(prev,) if prev else (),
            )
        )
        prev = tid
    tasks += [
        LevelTask("P1", duration=2.0, demands={"finish": 3.0}),
        LevelTask("P2", duration=2.0, demands={"finish": 3.0}),
    ]
    if weeks >= 9:
        tasks += [
            LevelTask("P3", duration=2.0, demands={"finish": 3.0}, preds=("W08",)),
            LevelTask("P4", duration=2.0, demands={"finish": 3.0}, preds=("W08",)),
        ]
    pools = (
        ResourcePool("crew", regular_capacity=10.0, overtime_cap=4.0),
        ResourcePool("finish", regular_capacity=4.0, overtime_cap=2.0),
    )
    return LevelingInstance(
        tasks=tuple(tasks),
        pools=pools,
        weeks=weeks,
        objective=Objective(w_span=1.0, w_overtime=1.0, w_idle=0.0),
    )


def rollout(
    instance: LevelingInstance, policy: Policy, objective: Objective | None = None
) -> tuple[Schedule, Accounting, list[Recommendation]]:
    """Apply the policy's weekly recommendations greedily over the horizon."""
    objective = objective or instance.objective
    sched = greedy_baseline(instance)
    recs = []
    for week in range(instance.weeks):
        state = LevelingState(instance, sched, week)
        rec = recommend(state, policy, objective)
        recs.append(rec)
        nxt = apply_action(state, rec.action)
        if nxt is not None:
            sched = nxt
    return sched, Accounting.of(sched), recs


@dataclass
class DecisionLog:
    entries: dict[int, Recommendation] = field(default_factory=dict)

    def record_decision(self, rec: Recommendation, adopted: bool, reason: str = "") -> Recommendation:
        if rec.week in self.entries and self.entries[rec.week].adopted != "pending":
            raise DuplicateDecision(f"week {rec.week} already decided")
        if not adopted and not reason.strip():
            raise ValueError("rejection requires a reason")
        decided = replace(
            rec, adopted="yes" if adopted else "no", rejection_reason="" if adopted else reason
        )
        self.entries[rec.week] = decided
        return decided

    @property
    def adoption_rate(self) -> float:
        decided = [r for r in self.entries.values() if r.adopted != "pending"]
        if not decided:
            return 0.0
        return 100.0 * sum(1 for r in decided if r.adopted == "yes") / len(decided)


def overtime_report(
    log: DecisionLog,
    baseline_weekly_overtime: Sequence[float],
    realized_deltas: Mapping[int, float] | None = None,
) -> dict:
    """Weekly overtime vs. baseline; rejected weeks contribute exactly zero.

    realized_deltas overrides the predicted per-week overtime deltas where
    field measurements are available.
    """
    rows = []
    total_delta = 0.0
    for week, base in enumerate(baseline_weekly_overtime, start=1):
        rec = log.entries.get(week)
        delta = 0.0
        if rec is not None and rec.adopted == "yes":
            delta = (
                realized_deltas[week]
                if realized_deltas and week in realized_deltas
                else rec.predicted_delta_overtime_hours
            )
        rows.append(
            {
                "week": week,
                "baseline_overtime_h": base,
                "leveled_overtime_h": base + delta,
                "delta_h": delta,
                "adopted": rec.adopted if rec else "pending",
            }
        )
        total_delta += delta
    return {
        "rows": rows,
        "total_delta_h": total_delta,
        "adoption_rate": log.adoption_rate,
    }
