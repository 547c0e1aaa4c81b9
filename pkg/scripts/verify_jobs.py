# scripts/verify_jobs.py
"""
Run engine vs oracle over every job file in a directory.
Writes one CSV row per job and a summary.json with match counts.
Jobs without branches are skipped (the oracle needs parametrizations).
"""
import sys
from pathlib import Path
import argparse
import json
import time
import pandas as pd

# Make sure repo root is in path so "src.*" imports work when launching script direct.
repo_root = Path(__file__).resolve().parents[1]
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))

from src import config
from src.errors import SingPoincareError
from src.handlers.commands import filtration_spec, geometry
from src.handlers.jobfile import load_job
from src.logging_config import setup_logging
from src.workers.oracle import check_divisorial, compare, realize
from src.workers.poincare_engine import poincare_of_filtration


# -------------------------
# Helpers
# -------------------------
def verify_single(path: Path, truncation, seed):
    job = load_job(path)
    if job.branches is None:
        return None
    g, rc = geometry(job)
    spec = filtration_spec(job, g, rc)
    n = truncation if truncation is not None else (job.options.truncation or config.DEFAULT_TRUNCATION)
    box = job.options.box or [n] * spec.r

    started = time.perf_counter()
    vr = realize(rc, spec, box, seed=seed, seeds=job.options.seeds or None)
    oracle = check_divisorial(vr, box).series
    report = compare(poincare_of_filtration(rc, spec), oracle)
    first = report.first_mismatch()
    return {
        "job": path.name,
        "r": spec.r,
        "box": "x".join(map(str, box)),
        "components": len(g.components),
        "compared": report.compared,
        "mismatches": len(report.mismatches),
        "first_mismatch": None if first is None else str(first["monomial"]),
        "seconds": round(time.perf_counter() - started, 3),
    }


def main():
    parser = argparse.ArgumentParser(description="Verify engine series against the jet-space oracle")
    parser.add_argument("--jobs-dir", default="data/jobs", help="Directory with *.json job files")
    parser.add_argument("--truncate", type=int, default=None, help="Override box side / truncation")
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--out-csv", default="data/verify_jobs.csv")
    parser.add_argument("--out-summary", default="data/verify_summary.json")
    args = parser.parse_args()
    setup_logging()

    rows = []
    summary = {"jobs": {}, "params": {"truncate": args.truncate, "seed": args.seed}}
    for path in sorted(Path(args.jobs_dir).glob("*.json")):
        try:
            row = verify_single(path, args.truncate, args.seed)
        except SingPoincareError as exc:
            print(f"[ERROR] {path.name}: {exc}")
            summary["jobs"][path.name] = {"error": type(exc).__name__}
            continue
        if row is None:
            print(f"[SKIP] {path.name}: no branches")
            continue
        status = "MATCH" if row["mismatches"] == 0 else "MISMATCH"
        print(f"[{status}] {path.name}: {row['compared']} coefficients in {row['seconds']}s")
        summary["jobs"][path.name] = {"status": status, "compared": row["compared"]}
        rows.append(row)

    if not rows:
        print("[DONE] No jobs verified.")
        return 0

    df = pd.DataFrame(rows)
    out_csv = Path(args.out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out_csv, index=False)
    print(f"[SAVED] Per-job results -> {out_csv}")

    summary["totals"] = {
        "verified": len(df),
        "matched": int((df["mismatches"] == 0).sum()),
        "seconds": float(df["seconds"].sum()),
    }
    out_summary = Path(args.out_summary)
    out_summary.parent.mkdir(parents=True, exist_ok=True)
    with open(out_summary, "w") as f:
        json.dump(summary, f, default=str, indent=2)
    print(f"[SAVED] Summary -> {out_summary}")
    return 0 if summary["totals"]["matched"] == len(df) else 3


if __name__ == "__main__":
    sys.exit(main())
