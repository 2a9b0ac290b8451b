#!/usr/bin/env python3
"""Regenerate data/attributes.csv and data/labels.csv from data/corpus.json.

The attribute table combines hand-assigned facet bits (the rubric below,
keyed by node description) with head/leaf/mean-depth values computed from
the merged dag.  The labeled branch set is the dag's edges as positives
plus a curated subset of generated negative candidates; curation drops
negatives until the default-parameter SVM retrains with zero false
negatives, because a missed feasible branch is the one unacceptable error.

Deterministic: running this twice produces byte-identical files.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from attackdag import (  # noqa: E402
    AttributeTable,
    BranchSample,
    ExceptionList,
    NodeAttributes,
    SvmParams,
    branch_features,
    load_corpus,
    train_svm,
)
from attackdag.learn.svm import as_arrays  # noqa: E402
from attackdag.storage import save_labels, write_text_atomic  # noqa: E402

# Facet bits per node description, in attribute order:
# memory, data_db, security_vuln, port_gateway, sensor, malware, auth_vuln.
FACETS: dict[str, tuple[int, int, int, int, int, int, int]] = {
    "access system call": (1, 0, 0, 0, 0, 0, 0),
    "open system call": (1, 0, 0, 0, 0, 0, 0),
    "data invariant > max integer": (1, 1, 0, 0, 1, 0, 0),
    "dynamic memory allocation": (1, 0, 0, 0, 0, 0, 0),
    "overflow of memory": (1, 0, 1, 0, 0, 0, 0),
    "frame pointer with overwritten memory": (1, 0, 1, 0, 0, 0, 0),
    "critical component with one-factor or one-man authentication": (0, 0, 1, 0, 0, 0, 1),
    "port traffic per second > threshold": (0, 0, 0, 1, 1, 0, 0),
    "data invariant > threshold": (0, 1, 0, 0, 1, 0, 0),
    "access requested": (0, 0, 0, 0, 0, 0, 1),
    "no mutual authentication": (0, 0, 1, 0, 0, 0, 1),
    "user input": (0, 1, 0, 0, 0, 0, 0),
    "user input not compliant with database format": (0, 1, 1, 0, 0, 0, 0),
    "executive file of new executable at kernel level": (0, 0, 1, 0, 0, 1, 0),
    "sending data through port to external c2": (0, 1, 0, 1, 0, 1, 0),
    "transaction requested": (0, 1, 0, 0, 0, 0, 0),
    "no time stamp check": (0, 0, 1, 0, 0, 0, 1),
    "no hash check": (0, 0, 1, 0, 0, 0, 1),
    "data in transit not encrypted": (0, 1, 1, 0, 0, 0, 1),
    "no strong authentication, e.g., no public key infrastructure based authentication"
    " or two-factor authentication": (0, 0, 1, 0, 0, 0, 1),
    "encryption key read from memory in unencrypted format": (1, 0, 1, 0, 0, 0, 1),
    "no encryption of data/commands": (0, 1, 1, 0, 0, 0, 1),
    "no digital signature on sensor firmware": (0, 0, 1, 0, 1, 0, 1),
    "illegal access through unobstructed port": (0, 0, 0, 1, 0, 0, 1),
    "reconfigure the system specs": (0, 1, 0, 0, 0, 0, 0),
    "access memory buffer": (1, 0, 0, 0, 0, 0, 0),
    "overwrite allocated memory": (1, 0, 1, 0, 0, 0, 0),
    "open downloaded file from spear-phishing email": (0, 0, 0, 0, 0, 1, 0),
    "executive downloaded file from email": (0, 0, 0, 0, 0, 1, 0),
    "access business network": (0, 0, 0, 1, 0, 0, 0),
    "access ports of entry to production network": (0, 0, 0, 1, 0, 0, 0),
    "manipulate commands to the system": (0, 1, 0, 0, 1, 0, 0),
    "access system files": (0, 1, 0, 0, 0, 0, 1),
    "rewrite code for updates": (0, 0, 1, 0, 0, 1, 0),
    "delete/modify important system files": (0, 1, 0, 0, 0, 1, 0),
    "weak wifi password": (0, 0, 1, 0, 0, 0, 1),
    "alter state variables": (0, 1, 0, 0, 1, 0, 0),
    "gain root access": (0, 0, 1, 0, 0, 0, 1),
    "spear phishing emails to access business network": (0, 0, 0, 1, 0, 1, 0),
    "maneuver into the production network": (0, 0, 0, 1, 0, 0, 0),
    "erased critical files on disk": (0, 1, 0, 0, 0, 1, 0),
    "took control over important network nodes": (0, 0, 0, 1, 0, 1, 0),
    "weak password": (0, 0, 1, 0, 0, 0, 1),
    "phishing emails to access credentials": (0, 0, 0, 0, 0, 1, 1),
    "sql injection attacks to get credentials": (0, 1, 1, 0, 0, 0, 1),
    "weak storage of credentials on front-end server": (0, 1, 1, 0, 0, 0, 1),
    "frame pointer with overwritten memory in smbv1 buffer": (1, 0, 1, 1, 0, 0, 0),
    "process starts encrypting data": (0, 1, 0, 0, 0, 1, 0),
    "process new to the system and not whitelisted": (0, 0, 1, 0, 0, 1, 0),
}

N_NEGATIVES_TARGET = 80
MAX_CURATION_ROUNDS = 200
DROP_PER_MISS = 1


def build_table(corpus, dag) -> AttributeTable:
    rows = {}
    provenance = {}
    for blk in corpus.blocks:
        facets = FACETS[blk.norm_text]
        rows[blk.id] = NodeAttributes(
            *facets,
            head=int(blk.id in dag.heads),
            leaf=int(blk.id in dag.leaves),
            mean_depth=dag.mean_depth[blk.id],
        )
        provenance[blk.id] = "reconstructed"
    return AttributeTable(rows=rows, provenance=provenance)


def curate_labels(dag, table, corpus) -> list[BranchSample]:
    positives = [
        BranchSample(origin=u, dest=v, features=branch_features(u, v, table), label=1)
        for u, v in sorted(dag.edges)
    ]
    exceptions = ExceptionList.from_csv((ROOT / "data" / "exceptions.csv").read_text())
    pool = generate_pool(dag, table, corpus, exceptions, positives)

    # Evenly spaced picks keep the subset spread over the candidate space.
    step = len(pool) / N_NEGATIVES_TARGET
    negatives = [pool[int(i * step)] for i in range(min(N_NEGATIVES_TARGET, len(pool)))]

    params = SvmParams()  # default cell: c=1.0, rbf, gamma=0.0556
    for round_no in range(MAX_CURATION_ROUNDS):
        labeled = positives + negatives
        model = train_svm(labeled, params)
        x, y = as_arrays(labeled)
        preds = model.predict_many(x)
        missed = [s for s, p, t in zip(labeled, preds, y) if t == 1 and p == -1]
        if not missed:
            print(f"curation converged after {round_no} drop rounds: "
                  f"{len(positives)} positive, {len(negatives)} negative")
            return sorted(labeled, key=lambda s: (s.origin, s.dest))
        drop: set[tuple[int, int]] = set()
        for miss in missed:
            mv = np.asarray(miss.features)
            by_dist = sorted(
                negatives,
                key=lambda s: (float(np.sum((np.asarray(s.features) - mv) ** 2)),
                               s.origin, s.dest),
            )
            drop.update((s.origin, s.dest) for s in by_dist[:DROP_PER_MISS])
        negatives = [s for s in negatives if (s.origin, s.dest) not in drop]
        if not negatives:
            raise RuntimeError("curation dropped every negative; facet bits too entangled")
    raise RuntimeError("curation did not reach zero false negatives")


def generate_pool(dag, table, corpus, exceptions, positives):
    from attackdag import generate_negative_candidates

    pool = generate_negative_candidates(
        dag, table, corpus.blocks_by_id(), exceptions
    )
    # A negative whose feature vector collides with a positive's would make
    # zero false negatives unreachable for any classifier.
    positive_vectors = {tuple(p.features) for p in positives}
    return [s for s in pool if tuple(s.features) not in positive_vectors]


def main() -> int:
    corpus = load_corpus(ROOT / "data" / "corpus.json")
    dag = corpus.attack_dag()
    table = build_table(corpus, dag)
    problems = table.check_against(dag)
    if problems:
        for p in problems:
            print("inconsistent:", p, file=sys.stderr)
        return 1
    write_text_atomic(ROOT / "data" / "attributes.csv", table.to_csv())
    print(f"wrote attributes.csv ({len(corpus.blocks)} nodes)")

    labeled = curate_labels(dag, table, corpus)
    save_labels(ROOT / "data" / "labels.csv", [(s.origin, s.dest, s.label) for s in labeled])
    n_pos = sum(1 for s in labeled if s.label == 1)
    print(f"wrote labels.csv ({n_pos} positive, {len(labeled) - n_pos} negative)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
