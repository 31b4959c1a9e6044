"""Command-line interface over a project file.

All subcommands are deterministic for a given (project file, seed): reports
carry no timestamps, and simulation uses counter-based streams, so rerunning
a command reproduces identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import click

from . import reports
from .errors import SiteTwinError
from .leveling import rollout, train_policy
from .progress import round_half_up
from .project_model import cpm_pass
from .projectfile import load_project, save_project
from .sample import sample_project_path
from .stochastic import quantile, run_mcs
from .whatif import evaluate, sensitivity_rank


def _load(project):
    path = Path(project) if project else sample_project_path()
    return load_project(path)


def _emit(report, fmt, out):
    text = report.render(fmt)
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Project-control engine: earned value, probabilistic schedule, what-if."""


project_option = click.option(
    "--project", type=click.Path(exists=True), default=None, help="project file (default: bundled sample)"
)
format_option = click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table")
out_option = click.option("--out", type=click.Path(), default=None, help="write output to a file")


@main.command()
@project_option
def validate(project):
    """Load and validate a project file."""
    try:
        state = _load(project)
    except SiteTwinError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"ok: {state.meta.name}: {len(state.network)} activities, "
        f"{len(state.network.relations)} relations, "
        f"{len(state.ledger.items)} cost items, input_hash={state.input_hash()}"
    )


@main.command()
@project_option
@format_option
@out_option
def cpm(project, fmt, out):
    """Deterministic schedule pass on baseline durations."""
    state = _load(project)
    result = cpm_pass(state.network, state.baseline_durations(), state.calendar)
    rows = [
        [a.id, result.es[a.id], result.ef[a.id], result.ls[a.id], result.lf[a.id],
         round_half_up(result.total_float[a.id], 3), "yes" if a.id in result.critical_set else ""]
        for a in state.network.activities
    ]
    report = reports.Report(
        title=f"deterministic CPM (finish {result.project_finish:g} workdays)",
        columns=["activity_id", "ES", "EF", "LS", "LF", "total_float", "critical"],
        rows=rows,
        seed=state.meta.seed,
        input_hash=state.input_hash(),
        annotations=result.warnings,
    )
    _emit(report, fmt, out)


@main.command()
@project_option
@click.option("--trials", type=int, default=20_000)
@click.option("--seed", type=int, default=None, help="override the project seed")
@click.option("--week", type=int, default=None, help="posteriors as of this week")
@click.option("--workers", type=int, default=1)
@format_option
@out_option
def simulate(project, trials, seed, week, workers, fmt, out):
    """Monte-Carlo schedule forecast; prints P50/P80 and the forecast log."""
    state = _load(project)
    seed = state.meta.seed if seed is None else seed
    week = state.meta.current_week if week is None else week
    dist = run_mcs(
        state.network,
        state.posteriors(week),
        state.calendar,
        n_trials=trials,
        seed=seed,
        workers=workers,
    )
    p50, p80 = quantile(dist, 0.5), quantile(dist, 0.8)
    click.echo(f"P50 {p50:.1f} workdays, P80 {p80:.1f} workdays (week {week}, seed {seed}, trials {trials})")
    _emit(reports.forecast_report(state), fmt, out)
    _emit(reports.criticality_report(state, dist), fmt, None)


@main.command()
@project_option
@click.option("--week", type=int, default=None, help="print a single period")
@format_option
@out_option
def ev(project, week, fmt, out):
    """Earned-value table with variances, indices, and cost forecast."""
    state = _load(project)
    report = reports.ev_report(state)
    if week is not None:
        rows = [r for r in report.rows if r[0] == week]
        if not rows:
            raise click.ClickException(f"no period {week} in the budget series")
        report = reports.Report(
            report.title, report.columns, rows, report.seed, report.input_hash, report.annotations
        )
    _emit(report, fmt, out)


@main.command()
@project_option
@format_option
@out_option
def buffers(project, fmt, out):
    """Weekly feeding/project buffer consumption."""
    _emit(reports.buffer_report(_load(project)), fmt, out)


@main.command()
@project_option
@click.option("--episodes", type=int, default=30)
@click.option("--seed", type=int, default=None)
@format_option
@out_option
def level(project, episodes, seed, fmt, out):
    """Train the leveling recommender and print the weekly log."""
    state = _load(project)
    if state.leveling is None:
        raise click.ClickException("project has no leveling instance")
    seed = state.meta.seed if seed is None else seed
    policy = train_policy(state.leveling, episodes=episodes, seed=seed)
    _sched, acc, recs = rollout(state.leveling, policy)
    rows = [
        [r.week, r.action_id, r.summary,
         {"yes": "Yes", "no": "No", "pending": "Pending"}[r.adopted],
         r.rejection_reason,
         f"predicted {r.predicted_delta_objective:+.1f} objective"]
        for r in recs
    ]
    report = reports.Report(
        title=(
            f"leveling recommendations (makespan {acc.makespan:g} d, "
            f"overtime {acc.overtime_hours:g} h, idle {acc.idle_hours:g} h)"
        ),
        columns=reports.LEVELING_COLUMNS,
        rows=rows,
        seed=seed,
        input_hash=state.input_hash(),
    )
    _emit(report, fmt, out)


@main.command()
@project_option
@click.option("--scenario", "scenario_name", default=None, help="evaluate one saved scenario")
@click.option("--trials", type=int, default=20_000)
@click.option("--seed", type=int, default=None)
@click.option("--rank/--no-rank", default=False, help="rank all saved scenarios")
@click.option("--plot", type=click.Path(), default=None, help="write a tornado chart")
@format_option
@out_option
def whatif(project, scenario_name, trials, seed, rank, plot, fmt, out):
    """Evaluate saved scenarios against the current snapshot."""
    state = _load(project)
    seed = state.meta.seed if seed is None else seed
    if scenario_name is not None:
        if scenario_name not in state.scenarios:
            raise click.ClickException(f"unknown scenario {scenario_name!r}")
        chosen = [state.scenarios[scenario_name]]
    else:
        chosen = list(state.scenarios.values())
    if not chosen:
        raise click.ClickException("project has no saved scenarios")
    results = [evaluate(state, s, n_trials=trials, seed=seed) for s in chosen]
    if rank or len(results) > 1:
        results = sensitivity_rank(results)
        _emit(reports.tornado_report(state, results), fmt, None)
    _emit(reports.scenario_report(state, results), fmt, out)
    if plot:
        _write_tornado_plot(results, plot)
        click.echo(f"wrote {plot}")


def _write_tornado_plot(results, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .whatif import tornado_rows

    rows = tornado_rows(results)
    names = [name for name, _ in rows][::-1]
    values = [delta for _, delta in rows][::-1]
    fig, ax = plt.subplots(figsize=(8, 0.5 * len(rows) + 1.5))
    colors = ["#2a9d8f" if v < 0 else "#e76f51" for v in values]
    ax.barh(names, values, color=colors)
    ax.axvline(0, color="black", linewidth=0.8)
    ax.set_xlabel("finish-date impact (days, P50)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command()
@project_option
@click.option("--confusion", type=click.Path(exists=True), default=None,
              help="CSV confusion matrix (rows predicted, header actual)")
@format_option
@out_option
def metrics(project, confusion, fmt, out):
    """Classification/segmentation/mapping quality tables."""
    state = _load(project)
    if confusion is not None:
        import csv

        import numpy as np

        from .progress import ConfusionMatrix

        with open(confusion) as fh:
            reader = list(csv.reader(fh))
        classes = tuple(c.strip() for c in reader[0][1:])
        counts = np.array([[int(c) for c in row[1 : 1 + len(classes)]] for row in reader[1:]])
        state.confusion_matrices = {"ingested": ConfusionMatrix(classes, counts)}
    for report in reports.metrics_reports(state):
        _emit(report, fmt, out)
        out = None  # only the first table goes to the file


@main.command()
@project_option
@click.option("--port", type=int, default=8800)
@click.option("--host", default="127.0.0.1")
def serve(project, port, host):
    """Run the HTTP service for the sandbox UI."""
    import uvicorn

    from .service import create_app

    path = Path(project) if project else sample_project_path()
    state = load_project(path)
    uvicorn.run(create_app(state, project_path=str(path)), host=host, port=port)


@main.command("export-sample")
@click.argument("path", type=click.Path())
def export_sample(path):
    """Write the bundled sample project to PATH."""
    from .sample import sample_state

    save_project(sample_state(), path)
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
