#!/usr/bin/env python3
"""End-to-end run on the bundled corpus: ingest through report.

Writes all artifacts into out/ (created next to the repo data/ directory).
Every step shells through the CLI entry point so this doubles as a smoke
test of the command surface.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from attackdag.cli import main  # noqa: E402

DATA = ROOT / "data"
OUT = ROOT / "out"


def run(*argv: str) -> None:
    print(f"\n$ attackdag {' '.join(argv)}")
    code = main(list(argv))
    if code != 0:
        sys.exit(code)


def main_script() -> int:
    OUT.mkdir(exist_ok=True)
    dag = str(OUT / "dag.json")
    model = str(OUT / "model.json")
    predictions = str(OUT / "predictions.csv")

    run("ingest", "--corpus", str(DATA / "corpus.json"), "--out", dag)
    run("attrs", "--dag", dag, "--attrs", str(DATA / "attributes.csv"), "--check")
    run("negatives", "--dag", dag, "--attrs", str(DATA / "attributes.csv"),
        "--exceptions", str(DATA / "exceptions.csv"),
        "--out", str(OUT / "candidates.csv"))
    run("train", "--dag", dag, "--attrs", str(DATA / "attributes.csv"),
        "--labels", str(DATA / "labels.csv"), "--out", model)
    run("predict", "--model", model, "--dag", dag,
        "--attrs", str(DATA / "attributes.csv"),
        "--labels", str(DATA / "labels.csv"), "--out", predictions)
    run("paths", "--dag", dag, "--corpus", str(DATA / "corpus.json"),
        "--out", str(OUT / "paths.json"))
    run("csp", "--dag", dag, "--attrs", str(DATA / "attributes.csv"),
        "--labels", str(DATA / "labels.csv"))
    run("eval", "--model", model, "--dag", dag,
        "--attrs", str(DATA / "attributes.csv"),
        "--labels", str(DATA / "labels.csv"), "--baselines")
    run("report", "--model", model, "--dag", dag,
        "--attrs", str(DATA / "attributes.csv"),
        "--labels", str(DATA / "labels.csv"),
        "--predictions", predictions,
        "--corpus", str(DATA / "corpus.json"),
        "--out", str(OUT / "report.json"))
    print(f"\nartifacts in {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main_script())
