"""Acceptance checks: published figures and end-to-end contracts.

Each test prints exactly one `criterion N: PASS|FAIL` line on the real
stdout so the verdicts survive pytest's capture, then re-raises on failure.
"""

import random
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from attackdag.csp import CspFacts, csp_classify, csp_evaluate, csp_facts
from attackdag.expr import parse_expression, render_expression
from attackdag.features import (
    AttributeTable,
    branch_features,
    hamming,
    height_diff,
    search_space_size,
)
from attackdag.graph import (
    build_dag,
    discover_unexploited,
    enumerate_attack_paths,
    known_attack_paths,
)
from attackdag.learn import (
    GridSpec,
    SvmParams,
    fit_svm,
    full_alphas,
    grid_search_min_fn,
    kkt_violation,
    knn_predict,
    search_space_reduction,
    train_gnb,
    train_sgd_svm,
    train_tree,
)
from attackdag.model import BranchSample, Metrics, NodeAttributes
from attackdag.negatives import REFERENCE_BRANCH_STATS, corpus_stats
from attackdag.storage import load_corpus

from oracles import (
    dual_qp_reference,
    exhaustive_tree,
    gnb_log_posterior,
    knn_scan,
    reference_decisions,
    tree_predict,
)
from test_expr import random_ast

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"

N_FEATURES = 20


@pytest.fixture
def criterion(pytestconfig):
    """Context manager printing one uncaptured verdict line per criterion."""
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    @contextmanager
    def check(number: int):
        verdict = "FAIL"
        try:
            yield
            verdict = "PASS"
        finally:
            line = f"criterion {number}: {verdict}"
            if capman is not None:
                with capman.global_and_fixture_disabled():
                    print(line, flush=True)
            else:
                print(line, flush=True)

    return check


def mk(vec, label, i=0):
    features = tuple(float(v) for v in vec) + (0.0,) * (N_FEATURES - len(vec))
    return BranchSample(origin=i, dest=i + 1000, features=features, label=label)


def pad(vec):
    return tuple(float(v) for v in vec) + (0.0,) * (N_FEATURES - len(vec))


def test_criterion_01_search_space_counts(criterion):
    with criterion(1):
        assert search_space_size(37, 140) == 1192
        assert search_space_size(29, 27) == 785


def test_criterion_02_published_confusion_metrics(criterion):
    with criterion(2):
        larger = Metrics.from_counts(tp=122, fp=31, tn=1039, fn=0)
        assert abs(larger.accuracy - 0.9740) <= 0.0005
        assert abs(larger.precision - 0.797) <= 0.005
        assert larger.recall == 1.0
        assert abs(larger.fpr - 0.029) <= 0.001
        assert abs(larger.f1 - 0.887) <= 0.005

        smaller = Metrics.from_counts(tp=67, fp=21, tn=697, fn=0)
        assert abs(smaller.accuracy - 0.9732) <= 0.0005
        assert smaller.recall == 1.0


def test_criterion_03_published_search_space_reductions(criterion):
    with criterion(3):
        assert abs(100.0 * search_space_reduction(153, 1192) - 87.2) <= 0.05
        assert abs(100.0 * search_space_reduction(88, 785) - 88.8) <= 0.05


def _oracle_paths(nodes, edges):
    succ = {n: sorted(v for u, v in edges if u == n) for n in nodes}
    indeg = {n: 0 for n in nodes}
    for _, v in edges:
        indeg[v] += 1
    found = []

    def walk(prefix):
        node = prefix[-1]
        if not succ[node]:
            found.append(tuple(prefix))
            return
        for nxt in succ[node]:
            walk(prefix + [nxt])

    for head in sorted(n for n in nodes if indeg[n] == 0):
        walk([head])
    return sorted(found)


def test_criterion_04_path_discovery(criterion):
    with criterion(4):
        corpus = load_corpus(DATA / "aggregation_demo.json")
        dag = corpus.attack_dag()
        known = known_attack_paths(dag, corpus.record_cdfgs())
        novel = discover_unexploited(dag, known)
        assert len(novel) == 5
        assert all(p.provenance == "unexploited" for p in novel)
        known_set = {p.nodes for p in known}
        assert all(p.nodes not in known_set for p in novel)

        rng = random.Random(20260819)
        for _ in range(200):
            n = rng.randint(1, 12)
            nodes = set(range(n))
            edges = {
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if rng.random() < 0.3
            }
            dag = build_dag(nodes, edges, {e: {"r"} for e in edges})
            got = [p.nodes for p in enumerate_attack_paths(dag)]
            assert got == _oracle_paths(nodes, edges)


def test_criterion_05_svm_against_reference_qp(criterion):
    with criterion(5):
        rng = np.random.default_rng(20260819)
        for trial in range(50):
            n = int(rng.integers(4, 9))
            dim = int(rng.integers(2, 4))
            x = rng.uniform(-2.0, 2.0, size=(n, dim))
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            y[0], y[1] = 1.0, -1.0
            params = SvmParams(
                c=float(rng.choice([0.5, 1.0, 2.0])),
                kernel="rbf" if trial % 2 == 0 else "poly",
                gamma=float(rng.choice([0.1, 0.5])),
                tolerance=1e-6,
            )
            model = fit_svm(x, y, params)
            alphas = full_alphas(model)
            assert abs(float(alphas @ y)) <= 1e-6
            assert kkt_violation(model, x, y) <= params.tolerance + 1e-9

            ref_alphas, ref_bias, _ = dual_qp_reference(x, y, params)
            probes = np.vstack([x, rng.uniform(-2.5, 2.5, size=(4, dim))])
            got = model.decision_values(probes)
            want = reference_decisions(x, y, ref_alphas, ref_bias, params, probes)
            assert np.max(np.abs(got - want)) <= 1e-4


def test_criterion_06_grid_search_finds_zero_fn_cell(criterion, labeled):
    with criterion(6):
        best, surface = grid_search_min_fn(labeled, GridSpec())
        by_params = {
            (c.params.c, c.params.kernel, c.params.gamma): c for c in surface
        }
        best_cell = by_params[(best.c, best.kernel, best.gamma)]
        # a zero-FN cell exists on the bundled labels, so the winner has FN 0
        assert any(c.fn == 0 for c in surface if c.fn is not None)
        assert best_cell.fn == 0
        # the documented default cell also reaches zero FN
        default = SvmParams()
        assert by_params[(default.c, default.kernel, default.gamma)].fn == 0


def test_criterion_07_baselines_against_oracles(criterion):
    with criterion(7):
        rng = np.random.default_rng(20260819)

        x = rng.uniform(0, 4, size=(40, N_FEATURES))
        y = np.where(rng.random(40) < 0.5, 1, -1)
        y[0], y[1] = 1, -1
        samples = [mk(x[i], int(y[i]), i) for i in range(40)]
        for _ in range(100):
            probe = rng.uniform(0, 4, size=N_FEATURES)
            k = int(rng.integers(1, 8))
            assert knn_predict(samples, probe, k) == knn_scan(x, y, probe, k)

        gnb = train_gnb(samples)
        for _ in range(20):
            probe = rng.uniform(0, 4, size=N_FEATURES)
            for label in (1, -1):
                want = gnb_log_posterior(x, y, probe, label)
                assert abs(gnb.log_posterior(probe, label) - want) <= 1e-9

        for _ in range(15):
            n = int(rng.integers(3, 9))
            dim = int(rng.integers(1, 4))
            tx = np.round(rng.uniform(0, 3, size=(n, dim)), 1)
            ty = np.where(rng.random(n) < 0.5, 1, -1)
            ty[0], ty[1] = 1, -1
            tsamples = [mk(tx[i], int(ty[i]), i) for i in range(n)]
            got = train_tree(tsamples)
            want = exhaustive_tree(np.hstack([tx, np.zeros((n, N_FEATURES - dim))]), ty)
            for i in range(n):
                assert got.predict(pad(tx[i])) == tree_predict(want, pad(tx[i]))
            for _ in range(20):
                probe = pad(rng.uniform(-0.5, 3.5, size=dim))
                assert got.predict(probe) == tree_predict(want, probe)

        line = [mk([v], 1 if v > 0 else -1, i)
                for i, v in enumerate([-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0])]
        sgd = train_sgd_svm(line, epochs=20, c=1.0, seed=0)
        assert all(sgd.predict(s.features) == s.label for s in line)
        again = train_sgd_svm(line, epochs=20, c=1.0, seed=0)
        assert np.array_equal(sgd.weights, again.weights)
        assert sgd.bias == again.bias


def test_criterion_08_rule_classifier_boundaries(criterion, dag, table, labeled):
    with criterion(8):
        cases = [
            # (facts, expected fired rules)
            (CspFacts(hamming=0, ht_diff=-0.10, head_to_leaf=False, leaf_to_leaf=False), ("R1",)),
            (CspFacts(hamming=0, ht_diff=-0.09, head_to_leaf=False, leaf_to_leaf=False), ("R1",)),
            (CspFacts(hamming=0, ht_diff=-0.08, head_to_leaf=False, leaf_to_leaf=False), ()),
            (CspFacts(hamming=0, ht_diff=2.0, head_to_leaf=False, leaf_to_leaf=False), ()),
            (CspFacts(hamming=0, ht_diff=2.01, head_to_leaf=False, leaf_to_leaf=False), ("R1",)),
            (CspFacts(hamming=3, ht_diff=0.0, head_to_leaf=True, leaf_to_leaf=False), ()),
            (CspFacts(hamming=4, ht_diff=0.0, head_to_leaf=True, leaf_to_leaf=False), ("R3",)),
            (CspFacts(hamming=5, ht_diff=0.0, head_to_leaf=False, leaf_to_leaf=True), ("R3",)),
            (CspFacts(hamming=6, ht_diff=0.0, head_to_leaf=False, leaf_to_leaf=False), ("R2",)),
        ]
        for facts, fired in cases:
            verdict = csp_classify(facts)
            assert verdict.fired == fired
            assert verdict.label == (-1 if fired else 1)

        metrics, verdicts = csp_evaluate(labeled, dag, table)
        tp = fp = tn = fn = 0
        for sample, verdict in zip(labeled, verdicts):
            hd = hamming(sample.origin, sample.dest, table)
            ht = height_diff(sample.origin, sample.dest, table)
            hl = sample.origin in dag.heads and sample.dest in dag.leaves
            ll = sample.origin in dag.leaves and sample.dest in dag.leaves
            infeasible = (ht <= -0.09 or ht > 2.0) or hd > 5 or (4 <= hd <= 5 and (hl or ll))
            assert verdict.label == (-1 if infeasible else 1)
            assert verdict == csp_classify(csp_facts(sample.origin, sample.dest, dag, table))
            if sample.label == 1:
                tp += verdict.label == 1
                fn += verdict.label == -1
            else:
                fp += verdict.label == 1
                tn += verdict.label == -1
        assert (metrics.tp, metrics.fp, metrics.tn, metrics.fn) == (tp, fp, tn, fn)


def test_criterion_09_expression_round_trips(criterion, corpus):
    with criterion(9):
        for record in corpus.records:
            rendered = render_expression(record.expression)
            assert parse_expression(rendered) == record.expression

        rng = random.Random(20260819)
        for _ in range(1000):
            ast = random_ast(rng, rng.randint(0, 8))
            assert parse_expression(render_expression(ast)) == ast


def test_criterion_10_branch_feature_vector(criterion):
    with criterion(10):
        rows = {
            0: NodeAttributes(0, 0, 1, 0, 0, 0, 1, 0, 1, 1.0),
            1: NodeAttributes(0, 1, 0, 0, 0, 0, 0, 0, 1, 3.75),
        }
        table = AttributeTable(rows=rows, provenance={0: "published", 1: "published"})
        got = branch_features(0, 1, table)
        assert got == (0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0,
                       0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 3.75)
        assert hamming(0, 1, table) == 3
        assert height_diff(0, 1, table) == 2.75


def test_criterion_11_branch_statistics(criterion, labeled, table):
    with criterion(11):
        rows = {
            0: NodeAttributes(1, 0, 0, 0, 0, 0, 0, 1, 0, 0.0),
            1: NodeAttributes(0, 1, 0, 0, 0, 0, 0, 0, 1, 2.0),
            2: NodeAttributes(0, 0, 1, 0, 0, 0, 1, 1, 0, 0.0),
            3: NodeAttributes(0, 0, 0, 1, 0, 0, 0, 0, 1, 3.0),
        }
        fixture_table = AttributeTable(
            rows=rows, provenance={n: "reconstructed" for n in rows}
        )

        def sample(o, d, label):
            return BranchSample(
                origin=o, dest=d, features=branch_features(o, d, fixture_table), label=label
            )

        fixture = [
            sample(0, 1, 1),   # hd 4, ht +2.0, head->leaf
            sample(2, 3, 1),   # hd 5, ht +3.0, head->leaf
            sample(0, 3, -1),  # hd 4, ht +3.0, head->leaf
            sample(1, 3, -1),  # hd 2, ht +1.0, leaf->leaf
            sample(2, 1, -1),  # hd 5, ht +2.0, head->leaf
            sample(3, 0, -1),  # hd 4, ht -3.0, not terminal
        ]
        stats = corpus_stats(fixture, fixture_table)
        assert stats.mean_hd_feasible == 4.5
        assert stats.mean_hd_infeasible == 3.75
        assert stats.ht_diff_feasible == (2.0, 2.5, 3.0)
        assert stats.ht_diff_infeasible == (-3.0, 0.75, 3.0)
        assert stats.headleaf_infeasible_ratio == 1.5

        bundled = corpus_stats(labeled, table)
        assert bundled.mean_hd_feasible > 0.0
        assert bundled.mean_hd_infeasible > 0.0
        lo, mean, hi = bundled.ht_diff_feasible
        assert lo <= mean <= hi
        lo, mean, hi = bundled.ht_diff_infeasible
        assert lo <= mean <= hi
        assert bundled.headleaf_infeasible_ratio is not None
        # the original-corpus figures ride along as orientation only
        assert set(REFERENCE_BRANCH_STATS) == {
            "mean_hd_feasible", "mean_hd_infeasible",
            "ht_diff_feasible", "ht_diff_infeasible",
            "headleaf_infeasible_ratio",
        }
