"""Per-node attribute table and branch featurization.

Each node carries ten attributes: seven binary facet flags (memory,
data/database, generic security weakness, port/gateway, sensor, malware,
authentication weakness), binary head/leaf markers, and the node's mean
depth in the dag.  A branch sample is origin attributes followed by
destination attributes, twenty values.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .model import (
    ATTRIBUTE_NAMES,
    AttackDag,
    BranchSample,
    InvalidCounts,
    N_BINARY_ATTRIBUTES,
    NodeAttributes,
)
from .graph import UnknownNode

ATTRS_CSV_HEADER = ("node_id",) + ATTRIBUTE_NAMES + ("provenance",)

PROVENANCE_VALUES = ("published", "reconstructed")


class SelfBranch(ValueError):
    pass


@dataclass(frozen=True)
class AttributeTable:
    rows: Mapping[int, NodeAttributes]
    provenance: Mapping[int, str] = field(default_factory=dict)

    def __getitem__(self, node_id: int) -> NodeAttributes:
        try:
            return self.rows[node_id]
        except KeyError:
            raise UnknownNode(f"no attribute row for node {node_id}") from None

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ATTRS_CSV_HEADER)
        for node_id in sorted(self.rows):
            attrs = self.rows[node_id]
            row = [node_id] + [getattr(attrs, name) for name in ATTRIBUTE_NAMES[:N_BINARY_ATTRIBUTES]]
            row.append(repr(attrs.mean_depth))
            row.append(self.provenance.get(node_id, "reconstructed"))
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "AttributeTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != ATTRS_CSV_HEADER:
            raise ValueError(f"bad attribute header: {header!r}")
        rows: dict[int, NodeAttributes] = {}
        provenance: dict[int, str] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(ATTRS_CSV_HEADER):
                raise ValueError(f"line {lineno}: expected {len(ATTRS_CSV_HEADER)} fields")
            node_id = int(row[0])
            if node_id in rows:
                raise ValueError(f"line {lineno}: duplicate node {node_id}")
            bits = [int(x) for x in row[1 : 1 + N_BINARY_ATTRIBUTES]]
            depth = float(row[1 + N_BINARY_ATTRIBUTES])
            prov = row[-1]
            if prov not in PROVENANCE_VALUES:
                raise ValueError(f"line {lineno}: provenance must be one of {PROVENANCE_VALUES}")
            rows[node_id] = NodeAttributes(*bits, mean_depth=depth)
            provenance[node_id] = prov
        return cls(rows=rows, provenance=provenance)

    def check_against(self, dag: AttackDag, tol: float = 1e-9) -> list[str]:
        """Coverage plus head/leaf/depth consistency with the dag."""
        problems: list[str] = []
        for node in sorted(dag.nodes):
            if node not in self.rows:
                problems.append(f"node {node} has no attribute row")
        for node in sorted(self.rows):
            if node not in dag.nodes:
                problems.append(f"attribute row for unknown node {node}")
        for node in sorted(dag.nodes & set(self.rows)):
            attrs = self.rows[node]
            head = int(node in dag.heads)
            leaf = int(node in dag.leaves)
            if attrs.head != head:
                problems.append(f"node {node}: head bit {attrs.head}, dag says {head}")
            if attrs.leaf != leaf:
                problems.append(f"node {node}: leaf bit {attrs.leaf}, dag says {leaf}")
            depth = dag.mean_depth[node]
            if not math.isclose(attrs.mean_depth, depth, rel_tol=0.0, abs_tol=tol):
                problems.append(
                    f"node {node}: mean_depth {attrs.mean_depth!r}, dag says {depth!r}"
                )
        return problems


def node_features(node_id: int, table: AttributeTable) -> tuple[float, ...]:
    return table[node_id].vector()


def branch_features(origin: int, dest: int, table: AttributeTable) -> tuple[float, ...]:
    """Origin attribute vector concatenated with destination's (20 values)."""
    if origin == dest:
        raise SelfBranch(f"branch from node {origin} to itself")
    return node_features(origin, table) + node_features(dest, table)


def hamming(origin: int, dest: int, table: AttributeTable) -> int:
    """Differing binary attributes between the two endpoints (0..9).

    mean_depth is excluded; head/leaf bits count like the facet flags.
    """
    a = table[origin].binary_bits()
    b = table[dest].binary_bits()
    return sum(1 for x, y in zip(a, b) if x != y)


def height_diff(origin: int, dest: int, table: AttributeTable) -> float:
    """Destination mean depth minus origin mean depth (positive = downhill)."""
    return table[dest].mean_depth - table[origin].mean_depth


def search_space_size(n_nodes: int, n_training: int) -> int:
    """Ordered node pairs minus self-pairs minus training branches."""
    if n_nodes < 0 or n_training < 0:
        raise InvalidCounts("counts must be non-negative")
    available = n_nodes * n_nodes - n_nodes
    if n_training > available:
        raise InvalidCounts(
            f"{n_training} training branches exceed the {available} available pairs"
        )
    return available - n_training

def enumerate_candidates(
    dag: AttackDag, table: AttributeTable, training: Iterable[tuple[int, int]]
) -> list[BranchSample]:
    """All ordered node pairs not seen in training, unlabeled, sorted.

    The result size always equals search_space_size(|nodes|, |training|);
    training pairs must therefore be distinct ordered pairs of dag nodes.
    """
    training = set(training)
    for u, v in training:
        if u == v:
            raise SelfBranch(f"training branch from node {u} to itself")
        if u not in dag.nodes or v not in dag.nodes:
            raise UnknownNode(f"training branch ({u}, {v}) references unknown node")
    out: list[BranchSample] = []
    for u in sorted(dag.nodes):
        for v in sorted(dag.nodes):
            if u == v or (u, v) in training:
                continue
            out.append(BranchSample(origin=u, dest=v, features=branch_features(u, v, table)))
    return out
