import pytest

from attackdag.features import (
    ATTRS_CSV_HEADER,
    AttributeTable,
    SelfBranch,
    branch_features,
    enumerate_candidates,
    hamming,
    height_diff,
    node_features,
    search_space_size,
)
from attackdag.graph import UnknownNode, build_dag
from attackdag.model import InvalidCounts, NodeAttributes

CERT_PROXY = NodeAttributes(0, 0, 1, 0, 0, 0, 1, 0, 1, 1.0)
SQL_FORMAT = NodeAttributes(0, 1, 0, 0, 0, 0, 0, 0, 1, 3.75)


@pytest.fixture
def pair_table():
    return AttributeTable(
        rows={0: CERT_PROXY, 1: SQL_FORMAT},
        provenance={0: "published", 1: "published"},
    )


class TestBranchFeatures:
    def test_concatenation_order(self, pair_table):
        got = branch_features(0, 1, pair_table)
        assert got == (0, 0, 1, 0, 0, 0, 1, 0, 1, 1.0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 3.75)

    def test_reverse_direction_differs(self, pair_table):
        assert branch_features(1, 0, pair_table) != branch_features(0, 1, pair_table)

    def test_self_branch_rejected(self, pair_table):
        with pytest.raises(SelfBranch):
            branch_features(0, 0, pair_table)

    def test_unknown_node(self, pair_table):
        with pytest.raises(UnknownNode):
            node_features(7, pair_table)


class TestHammingAndHeight:
    def test_hamming_ignores_mean_depth(self, pair_table):
        # bits differ at data_db, security_vuln, auth_vuln; depths 1 vs 3.75
        # must not contribute
        assert hamming(0, 1, pair_table) == 3
        assert hamming(1, 0, pair_table) == 3

    def test_hamming_zero_for_identical_bits(self):
        a = NodeAttributes(1, 0, 0, 0, 0, 0, 0, 1, 0, 0.0)
        b = NodeAttributes(1, 0, 0, 0, 0, 0, 0, 1, 0, 4.5)
        t = AttributeTable(rows={0: a, 1: b}, provenance={0: "reconstructed", 1: "reconstructed"})
        assert hamming(0, 1, t) == 0

    def test_height_diff_is_dest_minus_origin(self, pair_table):
        assert height_diff(0, 1, pair_table) == pytest.approx(2.75)
        assert height_diff(1, 0, pair_table) == pytest.approx(-2.75)


class TestSearchSpaceSize:
    def test_published_counts(self):
        assert search_space_size(37, 140) == 1192
        assert search_space_size(29, 27) == 785

    def test_zero_training(self):
        assert search_space_size(3, 0) == 6

    def test_rejects_more_training_than_pairs(self):
        with pytest.raises(InvalidCounts):
            search_space_size(3, 7)

    def test_rejects_negative(self):
        with pytest.raises(InvalidCounts):
            search_space_size(-1, 0)


class TestCsvRoundTrip:
    def test_round_trip_exact(self, table):
        text = table.to_csv()
        again = AttributeTable.from_csv(text)
        assert again == table
        assert again.to_csv() == text

    def test_header_enforced(self):
        with pytest.raises(ValueError):
            AttributeTable.from_csv("a,b,c\n1,2,3\n")

    def test_duplicate_node_rejected(self):
        header = ",".join(ATTRS_CSV_HEADER)
        row = "5,0,0,0,0,0,0,0,1,0,0.0,reconstructed"
        with pytest.raises(ValueError):
            AttributeTable.from_csv(f"{header}\n{row}\n{row}\n")

    def test_bad_provenance_rejected(self):
        header = ",".join(ATTRS_CSV_HEADER)
        row = "5,0,0,0,0,0,0,0,1,0,0.0,guessed"
        with pytest.raises(ValueError):
            AttributeTable.from_csv(f"{header}\n{row}\n")

    def test_mean_depth_survives_exactly(self):
        row = NodeAttributes(0, 0, 0, 0, 0, 0, 0, 1, 0, 5 / 3)
        t = AttributeTable(rows={0: row}, provenance={0: "reconstructed"})
        assert AttributeTable.from_csv(t.to_csv())[0].mean_depth == 5 / 3


class TestCheckAgainst:
    def test_bundled_table_consistent(self, dag, table):
        assert table.check_against(dag) == []

    def test_stale_leaf_bit_detected(self, dag, table):
        node = sorted(dag.leaves)[0]
        old = table[node]
        rows = dict(table.rows)
        rows[node] = NodeAttributes(*old.binary_bits()[:7], head=old.head, leaf=0,
                                    mean_depth=old.mean_depth)
        bad = AttributeTable(rows=rows, provenance=dict(table.provenance))
        problems = bad.check_against(dag)
        assert any(str(node) in p and "leaf" in p for p in problems)

    def test_missing_row_detected(self, dag, table):
        rows = dict(table.rows)
        victim = sorted(rows)[0]
        del rows[victim]
        prov = {k: v for k, v in table.provenance.items() if k != victim}
        bad = AttributeTable(rows=rows, provenance=prov)
        assert any(str(victim) in p for p in bad.check_against(dag))

    def test_extra_row_detected(self, dag, table):
        rows = dict(table.rows)
        rows[999] = NodeAttributes(0, 0, 0, 0, 0, 0, 0, 1, 1, 0.0)
        prov = dict(table.provenance)
        prov[999] = "reconstructed"
        bad = AttributeTable(rows=rows, provenance=prov)
        assert any("999" in p for p in bad.check_against(dag))

    def test_stale_mean_depth_detected(self, dag, table):
        node = sorted(dag.nodes, key=lambda n: -dag.mean_depth[n])[0]
        old = table[node]
        rows = dict(table.rows)
        rows[node] = NodeAttributes(*old.binary_bits()[:7], head=old.head, leaf=old.leaf,
                                    mean_depth=old.mean_depth + 0.5)
        bad = AttributeTable(rows=rows, provenance=dict(table.provenance))
        assert any("depth" in p for p in bad.check_against(dag))


class TestEnumerateCandidates:
    def test_count_formula(self, dag, table, labeled):
        training = {(s.origin, s.dest) for s in labeled}
        cands = enumerate_candidates(dag, table, training)
        assert len(cands) == search_space_size(len(dag.nodes), len(training))

    def test_sorted_unlabeled_and_disjoint_from_training(self, dag, table, labeled):
        training = {(s.origin, s.dest) for s in labeled}
        cands = enumerate_candidates(dag, table, training)
        pairs = [(c.origin, c.dest) for c in cands]
        assert pairs == sorted(pairs)
        assert all(c.label is None for c in cands)
        assert not training & set(pairs)

    def test_small_dag_by_hand(self):
        dag = build_dag({0, 1, 2}, {(0, 1)}, {(0, 1): {"a"}})
        rows = {
            n: NodeAttributes(0, 0, 0, 0, 0, 0, 0,
                              head=int(n in dag.heads), leaf=int(n in dag.leaves),
                              mean_depth=dag.mean_depth[n])
            for n in dag.nodes
        }
        t = AttributeTable(rows=rows, provenance={n: "reconstructed" for n in rows})
        cands = enumerate_candidates(dag, t, {(0, 1)})
        assert [(c.origin, c.dest) for c in cands] == [
            (0, 2), (1, 0), (1, 2), (2, 0), (2, 1),
        ]

    def test_training_pair_must_reference_known_nodes(self, dag, table):
        with pytest.raises(UnknownNode):
            enumerate_candidates(dag, table, {(0, 999)})
