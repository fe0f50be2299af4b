"""Command-line surface for batch workflows.

Exit codes: 0 success, 1 domain error, 2 usage error. Every command that
uses randomness requires an explicit --seed.
"""

from __future__ import annotations

import json
import sys

import click

from friendaudit.config import load_session_config
from friendaudit.domain import FriendAuditError, ResponseSet
from friendaudit.features import dump_snapshot, load_snapshot_file
from friendaudit.learning import (
    ForestParams,
    TARGETS,
    TreeParams,
    cross_validate,
    model_from_text,
    model_to_text,
    train_forest,
    train_tree,
)
from friendaudit.metrics import chi_square_2x2, pearson_correlation
from friendaudit.quality import ParticipantRecord, QualityConfig, screening_report
from friendaudit.rules import (
    canonical_rule_table,
    load_rule_table_file,
    validate_rule_table,
)
from friendaudit.session import (
    COMPATIBLE_DECISIONS,
    SessionConfig,
    SessionMode,
    build_decision,
    create_session,
)
from friendaudit.synth import GeneratorParams, generate_population, labeled_instances


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Friend-audit toolkit: rule engine, prediction, screening, sessions."""


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--users", type=int, default=114, show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="snapshot output path")
@click.option("--truth", type=click.Path(), required=True, help="ground-truth sidecar path")
def gen(seed: int, users: int, noise: float, out: str, truth: str) -> None:
    """Generate a synthetic population snapshot plus ground truth."""
    try:
        params = GeneratorParams(user_count=users, seed=seed, answer_noise=noise)
        snapshot, ground_truth = generate_population(params)
    except FriendAuditError as exc:
        _fail(str(exc))
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(dump_snapshot(snapshot))
    with open(truth, "w", encoding="utf-8") as handle:
        handle.write(ground_truth.to_text())
    click.echo(
        f"wrote {len(snapshot.users)} users, {len(ground_truth.records)} pairs"
    )


@main.command("validate-rules")
@click.option("--table", default="canonical", show_default=True,
              help="'canonical' or a rule-table file path")
@click.option("--sandbox/--no-sandbox", default=False, show_default=True)
def validate_rules(table: str, sandbox: bool) -> None:
    """Check a rule table for totality, reachability and slot domains."""
    try:
        if table == "canonical":
            rule_table = canonical_rule_table(sandbox_enabled=sandbox)
        else:
            rule_table = load_rule_table_file(table, sandbox_enabled=sandbox)
        report = validate_rule_table(rule_table)
    except FriendAuditError as exc:
        _fail(str(exc))
    if report.total:
        click.echo("total over 675 tuples")
    else:
        sample = report.unmatched[0]
        click.echo(f"NOT TOTAL: e.g. unmatched {sample.to_labels()}")
    for index in report.unreachable_rules:
        click.echo(f"unreachable rule: {index}")
    for problem in report.domain_errors:
        click.echo(f"domain error: {problem}")
    if not report.ok:
        sys.exit(1)


@main.group()
def stats() -> None:
    """Statistical helpers: chi-square tests and correlations."""


@stats.command()
@click.argument("cells", nargs=4, type=int)
def chi2(cells: tuple[int, int, int, int]) -> None:
    """Pearson 2x2 chi-square for cells A B (row 1) C D (row 2)."""
    a, b, c, d = cells
    try:
        result = chi_square_2x2([[a, b], [c, d]])
    except (FriendAuditError, ValueError) as exc:
        _fail(str(exc))
    click.echo(
        f"statistic {result.statistic:.3f}, df {result.df}, p {result.p_value:.3f}"
    )


@stats.command()
@click.argument("path", type=click.Path(exists=True))
def corr(path: str) -> None:
    """Pearson r over a two-column (x y per line) text file."""
    xs, ys = [], []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            x, y = line.split()
            xs.append(float(x))
            ys.append(float(y))
    try:
        r = pearson_correlation(xs, ys)
    except (FriendAuditError, ValueError) as exc:
        _fail(str(exc))
    click.echo(f"r {r:.4f}")


def _load_dataset(snapshot_path: str, truth_path: str, target: str):
    from friendaudit.synth import GroundTruth

    snapshot = load_snapshot_file(snapshot_path)
    with open(truth_path, encoding="utf-8") as handle:
        truth = GroundTruth.from_text(handle.read())
    return snapshot, labeled_instances(snapshot, truth, target)


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), required=True)
@click.option("--truth", "truth_path", type=click.Path(exists=True), required=True)
@click.option("--target", type=click.Choice(sorted(TARGETS)), required=True)
@click.option("--algo", type=click.Choice(["tree", "forest"]), default="forest",
              show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--trees", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def train(snapshot_path, truth_path, target, algo, seed, trees, out) -> None:
    """Train a model on a snapshot plus ground-truth labels."""
    try:
        _, data = _load_dataset(snapshot_path, truth_path, target)
        if algo == "tree":
            model = train_tree(data, TARGETS[target], TreeParams())
        else:
            model = train_forest(
                data, TARGETS[target], ForestParams(tree_count=trees, seed=seed)
            )
    except FriendAuditError as exc:
        _fail(str(exc))
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(model_to_text(model))
    click.echo(f"wrote {algo} model for {target} to {out}")


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), required=True)
@click.option("--truth", "truth_path", type=click.Path(exists=True), required=True)
@click.option("--target", type=click.Choice(sorted(TARGETS)), required=True)
@click.option("--algo", type=click.Choice(["tree", "forest"]), default="forest",
              show_default=True)
@click.option("--k", type=int, default=10, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--trees", type=int, default=25, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="JSON report path")
def evaluate(snapshot_path, truth_path, target, algo, k, seed, trees, out) -> None:
    """Run grouped k-fold cross-validation and print the report."""
    try:
        _, data = _load_dataset(snapshot_path, truth_path, target)
        report = cross_validate(
            data, TARGETS[target], algo, k, seed,
            forest_params=ForestParams(tree_count=trees, seed=seed),
        )
    except FriendAuditError as exc:
        _fail(str(exc))
    click.echo(report.to_text())
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            json.dump(report.to_dict(), handle, sort_keys=True, indent=1)


@main.command()
@click.option("--participants", "participants_path", type=click.Path(exists=True),
              required=True, help="JSONL participant records")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def screen(participants_path, config_path) -> None:
    """Screen participants for attention, bogus-friend and timing failures."""
    quality = QualityConfig()
    if config_path:
        quality = load_session_config(config_path).quality
    records = []
    try:
        with open(participants_path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                doc = json.loads(line)
                records.append(
                    ParticipantRecord(
                        id=doc["id"],
                        attention_passed=doc["attention_passed"],
                        timings=tuple(
                            (t[0], t[1], t[2]) for t in doc.get("timings", [])
                        ),
                        bogus_responses={
                            fid: ResponseSet.from_labels(resp)
                            for fid, resp in doc.get("bogus_responses", {}).items()
                        },
                    )
                )
        click.echo(screening_report(records, quality))
    except (FriendAuditError, KeyError, json.JSONDecodeError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), required=True)
@click.option("--participant", required=True)
@click.option("--mode", type=click.Choice(["questionnaire", "wild"]),
              default="questionnaire", show_default=True)
@click.option("--responses", "responses_path", type=click.Path(exists=True),
              default=None, help="JSONL scripted responses (questionnaire mode)")
@click.option("--models", "models_dir", type=click.Path(exists=True), default=None,
              help="directory with Q1..Q5 and Decision model files (wild mode)")
@click.option("--sample-size", type=int, default=None)
@click.option("--seed", type=int, required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), required=True, help="session log path")
def audit(snapshot_path, participant, mode, responses_path, models_dir,
          sample_size, seed, config_path, out) -> None:
    """Run one audit session end to end and write its event log."""
    try:
        snapshot = load_snapshot_file(snapshot_path)
        config = load_session_config(config_path) if config_path else SessionConfig()
        session_mode = (
            SessionMode.QUESTIONNAIRE if mode == "questionnaire" else SessionMode.WILD
        )
        session = create_session(
            snapshot, participant, session_mode,
            sample_size or config.sample_size, seed, config=config,
        )
        if session_mode is SessionMode.QUESTIONNAIRE:
            if not responses_path:
                _fail("questionnaire mode requires --responses")
            script = {}
            with open(responses_path, encoding="utf-8") as handle:
                for line in handle:
                    if line.strip():
                        doc = json.loads(line)
                        script[doc["friend_id"]] = doc
            for entry in list(session.queue):
                if entry.friend_id not in script:
                    _fail(f"no scripted responses for {entry.friend_id}")
                doc = script[entry.friend_id]
                verdict = session.submit_responses(
                    entry.friend_id,
                    ResponseSet.from_labels(doc["responses"]),
                    doc.get("timings", [5.0] * 5),
                )
                if verdict is not None:
                    decision_doc = doc.get("decision")
                    if decision_doc:
                        decision = build_decision(
                            decision_doc["kind"], decision_doc.get("ignore_reason")
                        )
                    else:
                        # default: accept with the first compatible action
                        kinds = sorted(
                            d.value
                            for d in COMPATIBLE_DECISIONS[verdict.action]
                            if d.value != "Ignore"
                        )
                        decision = build_decision(kinds[0])
                    session.submit_decision(entry.friend_id, decision)
        else:
            if not models_dir:
                _fail("wild mode requires --models")
            import os

            models = {}
            for name in ("Q1", "Q2", "Q3", "Q4", "Q5", "Decision"):
                path = os.path.join(models_dir, f"{name}.model.json")
                with open(path, encoding="utf-8") as handle:
                    models[name] = model_from_text(handle.read())
            surfaced = session.run_wild(models, snapshot)
            for friend_id, verdict in surfaced:
                kinds = sorted(
                    d.value
                    for d in COMPATIBLE_DECISIONS[verdict.action]
                    if d.value != "Ignore"
                )
                session.submit_decision(friend_id, build_decision(kinds[0]))
    except FriendAuditError as exc:
        _fail(str(exc))
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(session.log_text())
    summary = session.summary()
    click.echo(json.dumps(summary.to_dict(), sort_keys=True))


@main.command()
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(snapshot_path, config_path, host, port) -> None:
    """Serve the interactive audit API over HTTP."""
    import uvicorn

    from friendaudit.service import create_app

    snapshot = load_snapshot_file(snapshot_path)
    config = load_session_config(config_path) if config_path else SessionConfig()
    uvicorn.run(create_app(snapshot, config), host=host, port=port)


if __name__ == "__main__":
    main()
