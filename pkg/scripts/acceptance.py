#!/usr/bin/env python3
"""Full-budget acceptance runs for the team optimizer.

Each check reproduces one published result within a band rather than
matching numbers exactly:
  1. 15D Zakharov, rank/exponential/best x gamma 1/10/50    mean error <= 1e-3
  2. 15D Griewank, same grid                                mean error <= 0.02
  3. 15D Rosenbrock, gamma 1 (<= 1.0) and 10/50/500 (<= 10)
  4. 15D Rosenbrock, team beats standalone BATLévy
  5. Ablation: removing FP hurts most, no ablation beats the full roster
  6. 25D Rosenbrock, team error < 10% of BATLévy's
  7. Linear SVM on BCW / IS, team trainer vs SGD

These take tens of minutes; run single checks with --only.

Usage:
    python3 scripts/acceptance.py
    python3 scripts/acceptance.py --only 1,4 --trials 3
"""

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from mmo.benchmarks import make_benchmark
from mmo.orchestrator import (
    MmoConfig, run_ablation, run_mmo, run_single, run_trials, summarize, trial_seeds,
)

passed = 0
failed = 0
skipped = 0


def report(name: str, ok: bool, detail: str = ""):
    global passed, failed
    tag = "PASS" if ok else "FAIL"
    msg = f"  [{tag}] {name}"
    if detail:
        msg += f"  ({detail})"
    print(msg, flush=True)
    if ok:
        passed += 1
    else:
        failed += 1


def skip(name: str, reason: str):
    global skipped
    skipped += 1
    print(f"  [SKIP] {name}  ({reason})")


def _team_error(objective, trials, **changes):
    base = MmoConfig(agents=100, generations=2000)
    return run_trials(
        lambda seed: run_mmo(base.replace(master_seed=seed, **changes), objective).best.fitness,
        trial_seeds(0, trials))


def _grid(name, bound, trials):
    objective = make_benchmark(name, 15)
    for frequency in (1, 10, 50):
        for scheme in ("rank", "exponential", "best"):
            s = _team_error(objective, trials, scheme=scheme, frequency=frequency)
            report(f"{name} gamma={frequency} {scheme}: mean <= {bound:g}",
                   s.mean <= bound, f"{s.mean:.3g} ± {s.se:.2g}")


def check_zakharov(trials):
    print("\n--- 1: Zakharov grid ---")
    _grid("zakharov", 1e-3, trials)


def check_griewank(trials):
    print("\n--- 2: Griewank grid ---")
    _grid("griewank", 0.02, trials)


def check_rosenbrock(trials):
    print("\n--- 3: Rosenbrock by frequency ---")
    objective = make_benchmark("rosenbrock", 15)
    for scheme in ("exponential", "best"):
        s = _team_error(objective, trials, scheme=scheme, frequency=1)
        report(f"gamma=1 {scheme}: mean <= 1.0", s.mean <= 1.0, f"{s.mean:.3g} ± {s.se:.2g}")
    for frequency in (10, 50, 500):
        s = _team_error(objective, trials, scheme="exponential", frequency=frequency)
        report(f"gamma={frequency} exponential: mean <= 10", s.mean <= 10.0,
               f"{s.mean:.3g} ± {s.se:.2g}")


def check_team_vs_batlevy(trials):
    print("\n--- 4: Team vs standalone BATLévy ---")
    objective = make_benchmark("rosenbrock", 15)
    team = _team_error(objective, trials, scheme="exponential", frequency=1)
    alone = run_trials(
        lambda seed: run_single("batlevy", objective, 100, 2000, seed).best.fitness,
        trial_seeds(0, trials))
    report("team mean < batlevy mean", team.mean < alone.mean,
           f"{team.mean:.3g} vs {alone.mean:.3g}")


def check_ablation(trials):
    print("\n--- 5: Ablation ordering ---")
    objective = make_benchmark("rosenbrock", 15)
    base = MmoConfig(agents=100, generations=2000, scheme="exponential", frequency=1)
    full = _team_error(objective, trials, scheme="exponential", frequency=1)
    means = {}
    for excluded in base.roster:
        s = run_trials(
            lambda seed: run_ablation(base.replace(master_seed=seed), objective,
                                      excluded).best.fitness,
            trial_seeds(0, trials))
        means[excluded] = s.mean
        print(f"    without {excluded:8s} {s.mean:.4g} ± {s.se:.2g}", flush=True)
    worst = max(means, key=means.get)
    report("removing fp hurts most", worst == "fp", f"worst: {worst}")
    report("no ablation beats the full roster", all(m >= full.mean for m in means.values()),
           f"full {full.mean:.3g}")


def check_cross_dimension(trials):
    print("\n--- 6: 25D Rosenbrock ---")
    objective = make_benchmark("rosenbrock", 25)
    team = _team_error(objective, trials, scheme="exponential", frequency=1, generations=4000)
    alone = run_trials(
        lambda seed: run_single("batlevy", objective, 100, 4000, seed).best.fitness,
        trial_seeds(0, trials))
    report("team mean < 10% of batlevy mean", team.mean < 0.1 * alone.mean,
           f"{team.mean:.3g} vs {alone.mean:.3g}")


def check_svm(trials):
    print("\n--- 7: Linear SVM ---")
    from mmo.svm import SvmHyperparams, evaluate_model, load_dataset, mmo_train, sgd_train, split_dataset

    cases = (("bcw", os.getenv("MMO_BCW_PATH", ""), "best"),
             ("image_segmentation", os.getenv("MMO_IS_PATH", ""), "exponential"))
    seeds = trial_seeds(0, min(trials, 5))
    for dataset, path, scheme in cases:
        if not path or not os.path.exists(path):
            skip(dataset, "data path not set")
            continue
        data = load_dataset(path, dataset)
        sgd, team = [], []
        for seed in seeds:
            split = split_dataset(data, seed)
            model, _ = sgd_train(split, SvmHyperparams(0.0, 0.01, 1000), seed)
            sgd.append(evaluate_model(model, split, 0.0))
            cfg = MmoConfig(agents=100, generations=1000, scheme=scheme, frequency=1,
                            master_seed=seed)
            model, _ = mmo_train(split, 0.0, cfg)
            team.append(evaluate_model(model, split, 0.0))
        sgd_valid = summarize([r.valid_acc for r in sgd]).mean
        team_valid = summarize([r.valid_acc for r in team]).mean
        sgd_test = summarize([r.test_acc for r in sgd]).mean
        team_test = summarize([r.test_acc for r in team]).mean
        if dataset == "bcw":
            report("bcw: team validation accuracy >= 85%", team_valid >= 85.0, f"{team_valid:.2f}%")
            report("bcw: team validation >= sgd validation", team_valid >= sgd_valid,
                   f"{team_valid:.2f}% vs {sgd_valid:.2f}%")
            report("bcw: sgd validation within [82%, 90%]", 82.0 <= sgd_valid <= 90.0,
                   f"{sgd_valid:.2f}%")
        else:
            report("is: team validation accuracy >= 80%", team_valid >= 80.0, f"{team_valid:.2f}%")
            report("is: team test beats sgd test by 10 points", team_test - sgd_test >= 10.0,
                   f"{team_test:.2f}% vs {sgd_test:.2f}%")


CHECKS = {
    1: check_zakharov,
    2: check_griewank,
    3: check_rosenbrock,
    4: check_team_vs_batlevy,
    5: check_ablation,
    6: check_cross_dimension,
    7: check_svm,
}


def main():
    parser = argparse.ArgumentParser(description="Full-budget acceptance runs")
    parser.add_argument("--only", default="", help="comma-separated check numbers")
    parser.add_argument("--trials", type=int, default=10, help="seeds per cell")
    args = parser.parse_args()

    chosen = [int(c) for c in args.only.split(",") if c.strip()] or list(CHECKS)
    start = time.time()
    for number in chosen:
        CHECKS[number](args.trials)

    print(f"\n{'=' * 50}")
    print(f"  {passed} passed, {failed} failed, {skipped} skipped"
          f"  ({time.time() - start:.0f}s)")
    print(f"{'=' * 50}")
    sys.exit(0 if failed == 0 else 1)


if __name__ == "__main__":
    main()
