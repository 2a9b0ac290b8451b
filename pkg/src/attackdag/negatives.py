"""Negative (infeasible) branch candidate generation.

Training needs infeasible branches, and humans are bad at inventing them
exhaustively, so candidates come from two mechanical signals: pairs of
vulnerability categories believed independent (a step in one category
cannot enable a step in the other), and statistical outliers relative to
the known-branch population (extreme height difference, high attribute
hamming distance, head-to-leaf or leaf-to-leaf shapes).

Everything produced here is a candidate for review, not ground truth; a
curated exception list removes pairs that look independent but have a
documented enabling path.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .features import AttributeTable, branch_features, hamming, height_diff
from .model import (
    AttackDag,
    BasicBlock,
    BranchSample,
    CorpusStats,
    VulnerabilityCategory as VC,
)

# Unordered category pairs with no believed enabling relation.  The fourth
# pair is conditional: weak crypto/auth on one side, and on the other a
# malware or social-engineering step that is itself socially delivered.
PLAIN_INDEPENDENCE_PAIRS = (
    frozenset({VC.MEMORY, VC.NETWORK_PROTOCOL}),
    frozenset({VC.MEMORY, VC.SOCIAL_ENGINEERING}),
    frozenset({VC.NETWORK_PROTOCOL, VC.SOCIAL_ENGINEERING}),
)

SOCIAL_COMPOSITE = frozenset({VC.MALWARE, VC.SOCIAL_ENGINEERING})

# Branch statistics measured on the original, larger survey corpus.  The
# bundled corpus is a smaller reconstruction, so these are orientation values
# for reports, never assertion targets.
REFERENCE_BRANCH_STATS = {
    "mean_hd_feasible": 2.93,
    "mean_hd_infeasible": 4.30,
    "ht_diff_feasible": (-0.08, 0.997, 2.0),
    "ht_diff_infeasible": (-3.33, 0.071, 3.33),
    "headleaf_infeasible_ratio": 4.0,
}


class InsufficientData(ValueError):
    pass


def categories_independent(
    a: VC, b: VC, a_socially_delivered: bool = False, b_socially_delivered: bool = False
) -> bool:
    if frozenset({a, b}) in PLAIN_INDEPENDENCE_PAIRS:
        return True
    if a is VC.WEAK_CRYPTO_AUTH and b in SOCIAL_COMPOSITE and b_socially_delivered:
        return True
    if b is VC.WEAK_CRYPTO_AUTH and a in SOCIAL_COMPOSITE and a_socially_delivered:
        return True
    return False


EXCEPTIONS_CSV_HEADER = ("origin_node_id", "dest_node_id", "note")


@dataclass(frozen=True)
class ExceptionList:
    """Ordered pairs exempted from negative candidacy, with a reason each."""

    notes: Mapping[tuple[int, int], str]

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self.notes

    @classmethod
    def empty(cls) -> "ExceptionList":
        return cls(notes={})

    @classmethod
    def from_csv(cls, text: str) -> "ExceptionList":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != EXCEPTIONS_CSV_HEADER:
            raise ValueError(f"bad exception-list header: {header!r}")
        notes: dict[tuple[int, int], str] = {}
        for row in reader:
            if not row:
                continue
            notes[(int(row[0]), int(row[1]))] = row[2]
        return cls(notes=notes)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(EXCEPTIONS_CSV_HEADER)
        for (u, v), note in sorted(self.notes.items()):
            writer.writerow([u, v, note])
        return buf.getvalue()


@dataclass(frozen=True)
class NegativeFilterThresholds:
    """Statistical filters; None (or False) disables a filter entirely."""

    ht_diff_below: Optional[float] = -0.09  # candidate when ht_diff < this
    ht_diff_above: Optional[float] = 2.0  # candidate when ht_diff > this
    min_hamming: Optional[int] = 4  # candidate when hamming >= this
    head_to_leaf: bool = True
    leaf_to_leaf: bool = True

    @classmethod
    def disabled(cls) -> "NegativeFilterThresholds":
        return cls(ht_diff_below=None, ht_diff_above=None, min_hamming=None,
                   head_to_leaf=False, leaf_to_leaf=False)


def generate_negative_candidates(
    dag: AttackDag,
    table: AttributeTable,
    blocks: Mapping[int, BasicBlock],
    exceptions: ExceptionList | None = None,
    thresholds: NegativeFilterThresholds | None = None,
) -> list[BranchSample]:
    """Candidate infeasible branches, labeled -1, sorted by (origin, dest).

    Existing dag edges and excepted pairs are never candidates.  The -1
    labels mark candidates for human confirmation, not verdicts.
    """
    if exceptions is None:
        exceptions = ExceptionList.empty()
    if thresholds is None:
        thresholds = NegativeFilterThresholds()
    out: list[BranchSample] = []
    for u in sorted(dag.nodes):
        for v in sorted(dag.nodes):
            if u == v or (u, v) in dag.edges or (u, v) in exceptions:
                continue
            if _is_candidate(u, v, dag, table, blocks, thresholds):
                out.append(
                    BranchSample(origin=u, dest=v, features=branch_features(u, v, table), label=-1)
                )
    return out


def _is_candidate(
    u: int,
    v: int,
    dag: AttackDag,
    table: AttributeTable,
    blocks: Mapping[int, BasicBlock],
    th: NegativeFilterThresholds,
) -> bool:
    bu, bv = blocks[u], blocks[v]
    if categories_independent(bu.category, bv.category,
                              bu.socially_delivered, bv.socially_delivered):
        return True
    if th.ht_diff_below is not None or th.ht_diff_above is not None:
        ht = height_diff(u, v, table)
        if th.ht_diff_below is not None and ht < th.ht_diff_below:
            return True
        if th.ht_diff_above is not None and ht > th.ht_diff_above:
            return True
    if th.min_hamming is not None and hamming(u, v, table) >= th.min_hamming:
        return True
    if th.head_to_leaf and u in dag.heads and v in dag.leaves:
        return True
    if th.leaf_to_leaf and u in dag.leaves and v in dag.leaves:
        return True
    return False


def corpus_stats(samples: Iterable[BranchSample], table: AttributeTable) -> CorpusStats:
    """Branch-population statistics split by label.

    Needs at least one feasible and one infeasible sample.  The head/leaf
    ratio counts branches that start at a head and end at a leaf, or join
    two leaves; it is None when no feasible branch has that shape.
    """
    feas_hd: list[int] = []
    infeas_hd: list[int] = []
    feas_ht: list[float] = []
    infeas_ht: list[float] = []
    feas_hl = 0
    infeas_hl = 0
    for sample in samples:
        if sample.label not in (1, -1):
            raise InsufficientData(f"unlabeled sample ({sample.origin}, {sample.dest})")
        hd = hamming(sample.origin, sample.dest, table)
        ht = height_diff(sample.origin, sample.dest, table)
        o, d = table[sample.origin], table[sample.dest]
        terminal = bool((o.head and d.leaf) or (o.leaf and d.leaf))
        if sample.label == 1:
            feas_hd.append(hd)
            feas_ht.append(ht)
            feas_hl += terminal
        else:
            infeas_hd.append(hd)
            infeas_ht.append(ht)
            infeas_hl += terminal
    if not feas_hd or not infeas_hd:
        raise InsufficientData("need at least one sample of each label")

    def spread(values: list[float]) -> tuple[float, float, float]:
        return (min(values), sum(values) / len(values), max(values))

    return CorpusStats(
        mean_hd_feasible=sum(feas_hd) / len(feas_hd),
        mean_hd_infeasible=sum(infeas_hd) / len(infeas_hd),
        ht_diff_feasible=spread(feas_ht),
        ht_diff_infeasible=spread(infeas_ht),
        headleaf_infeasible_ratio=(infeas_hl / feas_hl if feas_hl else None),
    )
