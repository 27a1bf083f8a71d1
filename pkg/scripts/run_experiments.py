"""
Run the concentration, conjecture and reciprocal-bound experiments at desk scale
"""
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.schemas import ExperimentConfig
from app.services import export
from app.services.experiments import (
    is_strictly_decreasing,
    run_concentration,
    run_conjecture,
    run_reciprocal_mc,
    summarize,
)
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def concentration(config: ExperimentConfig, out_dir: str) -> bool:
    """Concentration run; True when median W1 and median M_n/r both fall as n grows"""
    records = run_concentration(config)
    meta = {"config": config.model_dump_json(), "master_seed": config.master_seed}
    export.emit_csv(records, os.path.join(out_dir, "concentration.csv"), meta)

    summary = summarize(records)
    export.write_frame(summary, os.path.join(out_dir, "concentration_summary.csv"), meta)
    ok = True
    for d, rows in summary.groupby("d"):
        w1 = is_strictly_decreasing(rows["median_w1_dist"])
        rate = is_strictly_decreasing(rows["median_M_over_r"])
        logger.info(f"d={d}: median W1 decreasing={w1}, median M_n/r decreasing={rate}")
        ok = ok and w1 and rate
    return ok


def conjecture(config: ExperimentConfig, out_dir: str) -> bool:
    records, summaries = run_conjecture(config)
    meta = {"config": config.model_dump_json(), "master_seed": config.master_seed}
    export.emit_csv(records, os.path.join(out_dir, "conjecture.csv"), meta)
    export.emit_csv(summaries, os.path.join(out_dir, "conjecture_summary.csv"), meta)
    medians = [s.median_statistic for s in summaries if s.function == "identity"]
    decreasing = is_strictly_decreasing(medians)
    logger.info(f"identity statistic medians {medians}: decreasing={decreasing}")
    return decreasing


def reciprocal(draws: int, seed: int, out_dir: str) -> bool:
    records = run_reciprocal_mc([50, 200, 1000], [0.1, 0.3, 0.5], [0.25, 0.5, 1.0], draws=draws, master_seed=seed)
    export.emit_csv(records, os.path.join(out_dir, "recbound.csv"), {"master_seed": seed, "draws": draws})
    audited = [r for r in records if not r.warning]
    passed = sum(r.within_bound for r in audited)
    logger.info(f"reciprocal audit: {passed}/{len(audited)} grid points within bound + 3 SE")
    return passed == len(audited)


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Run the desk-scale experiment suite")
    parser.add_argument("--sides", type=int, nargs="+", default=[16, 32, 64], help="Grid sides m (d = 2)")
    parser.add_argument("--trials", type=int, default=10, help="Trials per size")
    parser.add_argument("--seed", type=int, default=0, help="Master seed")
    parser.add_argument("--draws", type=int, default=100_000, help="Draws per (n, p) in the reciprocal audit")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes")
    parser.add_argument("--out-dir", type=str, default="results", help="Directory for the CSV files")

    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    config = ExperimentConfig(dims=[2], sides=args.sides, trials=args.trials, master_seed=args.seed, workers=args.workers)
    results = {
        "concentration": concentration(config, args.out_dir),
        "conjecture": conjecture(config, args.out_dir),
        "reciprocal": reciprocal(args.draws, args.seed, args.out_dir),
    }
    for name, ok in results.items():
        logger.info(f"{name}: {'trend reproduced' if ok else 'trend NOT reproduced'}")
