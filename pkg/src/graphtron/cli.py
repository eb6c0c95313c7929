"""Command-line entry point.

Subcommands:
  run         execute a run matrix (reps x one configuration) to CSV
  sweep       execute a JSON config file of run entries to CSV
  validate    run the property-validation suite
  comparator  fit the offline comparator on runs recorded in a CSV
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import harness, validation
from .feedback_graph import KIND_ALIASES
from .harness import LEARNER_NAMES, RunSpec

GRAPH_CHOICES = ("full", "bandit", "apple", "label-efficient", "spam-filter")
LOSS_CHOICES = ("logistic", "smooth-hinge", "hinge")
TUNING_CHOICES = ("unit", "theory-expectation", "theory-hp")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="bandit", choices=GRAPH_CHOICES)
    p.add_argument("--learner", default="gappletron")
    p.add_argument("--loss", default="smooth-hinge", choices=LOSS_CHOICES)
    p.add_argument("--kappa", type=float, default=0.5)
    p.add_argument("--k", type=int, default=6, help="number of classes")
    p.add_argument("--dprime", type=int, default=2, help="feature dim is 40*dprime")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--rounds", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma", type=float, default=None, help="overrides --tuning")
    p.add_argument("--tuning", default="unit", choices=TUNING_CHOICES)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--oco", default="adaptive", choices=("adaptive", "projected"))
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--explore", type=float, default=None,
                   help="Banditron exploration rate; default (X^2/T)^(1/3) capped at 1/2")
    p.add_argument("--explore-printed-max", action="store_true",
                   help="use the max-with-1/2 variant of the default rate")
    p.add_argument("--out", default="results.csv")


def _specs_from_entry(entry: dict) -> list[RunSpec]:
    graph = entry.get("graph", "bandit")
    learner_name = entry.get("learner", "gappletron")
    if learner_name not in LEARNER_NAMES:
        raise SystemExit(
            f"unknown learner {learner_name!r}; valid learners: {', '.join(LEARNER_NAMES)}"
        )
    if graph not in GRAPH_CHOICES and graph not in KIND_ALIASES:
        raise SystemExit(f"unknown graph {graph!r}; valid graphs: {', '.join(GRAPH_CHOICES)}")
    loss = entry.get("loss", "smooth-hinge")
    kappa = float(entry.get("kappa", 0.5))
    k = int(entry.get("k", 6))
    dprime = int(entry.get("dprime", 2))
    noise = float(entry.get("noise", 0.0))
    rounds = int(entry.get("rounds", 10_000))
    reps = int(entry.get("reps", 1))
    seed = int(entry.get("seed", 0))
    radius = float(entry.get("radius", 1.0))
    delta = float(entry.get("delta", 0.05))
    tuning = entry.get("tuning", "unit")
    gamma_flag = entry.get("gamma")
    gamma, tuning_label = harness.resolve_gamma(
        tuning, gamma_flag, graph, loss, kappa, k, dprime, radius, delta
    )
    explore = entry.get("explore")
    if explore is None:
        from .baselines import banditron_theory_explore

        explore = banditron_theory_explore(
            harness.synth_x_norm_bound(dprime) ** 0.5,
            max(rounds, 1),
            printed_max=bool(entry.get("explore_printed_max", False)),
        )
    return [
        RunSpec(
            graph=graph,
            learner=learner_name,
            loss=loss,
            kappa=kappa,
            n_classes=k,
            d_prime=dprime,
            noise=noise,
            rounds=rounds,
            seed=seed,
            rep=rep,
            gamma=gamma,
            tuning=tuning_label,
            oco_mode=entry.get("oco", "adaptive"),
            radius=radius,
            explore=float(explore),
        )
        for rep in range(reps)
    ]


def cmd_run(args: argparse.Namespace) -> int:
    entry = {
        "graph": args.graph,
        "learner": args.learner,
        "loss": args.loss,
        "kappa": args.kappa,
        "k": args.k,
        "dprime": args.dprime,
        "noise": args.noise,
        "rounds": args.rounds,
        "reps": args.reps,
        "seed": args.seed,
        "gamma": args.gamma,
        "tuning": args.tuning,
        "delta": args.delta,
        "oco": args.oco,
        "radius": args.radius,
        "explore": args.explore,
        "explore_printed_max": args.explore_printed_max,
    }
    specs = _specs_from_entry(entry)
    row_groups = harness.execute_many(specs)
    harness.write_csv(args.out, row_groups)
    total = sum(len(rows) for rows in row_groups)
    print(f"wrote {total} rows for {len(specs)} runs to {args.out}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    with open(args.config, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise SystemExit("sweep config must be a JSON list of run entries")
    specs: list[RunSpec] = []
    for entry in entries:
        specs.extend(_specs_from_entry(entry))
    row_groups = harness.execute_many(specs)
    harness.write_csv(args.out, row_groups)
    total = sum(len(rows) for rows in row_groups)
    print(f"wrote {total} rows for {len(specs)} runs to {args.out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = validation.run_suite(fast=args.fast)
    text, ok = validation.report(results)
    print(text)
    return 0 if ok else 1


def cmd_comparator(args: argparse.Namespace) -> int:
    with open(args.csv, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    by_run: dict[str, list[dict]] = {}
    for row in rows:
        by_run.setdefault(row["run_id"], []).append(row)
    print("run_id,comparator_loss,comparator_norm,m_final,surrogate_regret")
    for run_id, group in by_run.items():
        final = max(group, key=lambda r: int(r["t"]))
        rep = int(run_id.rsplit("rep", 1)[-1])
        spec = RunSpec(
            graph=final["graph"],
            learner=final["learner"],
            loss=final["loss"],
            kappa=0.5,
            n_classes=int(final["k"]),
            d_prime=int(final["d"]) // 40,
            noise=float(final["noise"]),
            rounds=int(final["t"]),
            seed=int(final["seed"]),
            rep=rep,
            gamma=float(final["gamma"]),
            tuning=final["tuning"],
        )
        u_hat, total = harness.comparator_loss_for_spec(
            spec, epochs=args.epochs, radius=args.radius
        )
        import numpy as np

        m_final = int(final["cum_mistakes"])
        regret = m_final - total
        print(
            f"{run_id},{total:.9g},{float(np.linalg.norm(u_hat)):.9g},"
            f"{m_final},{regret:.9g}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphtron",
        description="Online multiclass classification under feedback graphs: benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configuration x reps")
    _add_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="execute a JSON sweep config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--out", default="results.csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the property-validation suite")
    p_val.add_argument("--fast", action="store_true", help="reduced sample sizes")
    p_val.set_defaults(func=cmd_validate)

    p_cmp = sub.add_parser("comparator", help="offline comparator for a results CSV")
    p_cmp.add_argument("csv")
    p_cmp.add_argument("--epochs", type=int, default=20)
    p_cmp.add_argument("--radius", type=float, default=10.0)
    p_cmp.set_defaults(func=cmd_comparator)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
