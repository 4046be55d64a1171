from __future__ import annotations

import random

import pytest

from conftest import build_graph_with_raws
from oracle import (
    EXPERT_WEIGHTS,
    CROWD_WEIGHTS,
    F4_ORDER_CROWD,
    F4_ORDER_EXPERT,
    F4_RAWS,
    F4_SCORES_CROWD,
    F4_SCORES_EXPERT,
    brute_force_order,
    brute_force_scores,
    kendall_tau_brute,
)

from meritrank.canon import canonical_json
from meritrank.errors import (
    InvalidPopulation,
    NonFiniteInput,
    PopulationMismatch,
    ResourceNotInPopulation,
)
from meritrank.ranking import (
    Population,
    assessment_report,
    compare_rankings,
    normalize_indicator,
    rank,
    score,
)
from meritrank.values import ValueSystem


def make_vs(weights, vs_id):
    return ValueSystem(id=vs_id, owner="collective", weights=dict(weights))


EXPERT = make_vs(EXPERT_WEIGHTS, "e")
CROWD = make_vs(CROWD_WEIGHTS, "m")


@pytest.fixture(scope="module")
def f4_graph():
    return build_graph_with_raws(F4_RAWS)


@pytest.fixture(scope="module")
def f4_population():
    return Population(ids=("p1", "p2", "p3", "p4"), kind="person")


class TestNormalize:
    def test_fixture_citations(self):
        assert normalize_indicator([100, 20, 10, 0]) == [1.0, 0.2, 0.1, 0.0]

    def test_degenerate_population(self):
        assert normalize_indicator([5, 5, 5]) == [0.0, 0.0, 0.0]

    def test_singleton(self):
        assert normalize_indicator([42]) == [0.0]

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteInput):
            normalize_indicator([1.0, float("nan")])


class TestScore:
    def test_p1_under_expert_matches_oracle(self, f4_graph, f4_population):
        entry = score(f4_graph, "p1", EXPERT, f4_population)
        assert entry.score == pytest.approx(F4_SCORES_EXPERT["p1"], abs=1e-9)
        # derivation: 0.8*1 + 0.1*(10/12) + 0.1*0.2
        assert entry.score == pytest.approx(0.9033333333333334, abs=1e-9)

    def test_all_zero_resource_scores_zero(self, f4_graph, f4_population):
        entry = score(f4_graph, "p4", EXPERT, f4_population)
        assert entry.score == 0.0

    def test_p2_under_crowd(self, f4_graph, f4_population):
        entry = score(f4_graph, "p2", CROWD, f4_population)
        assert entry.score == pytest.approx(0.83, abs=1e-9)

    def test_breakdown_composes_the_score(self, f4_graph, f4_population):
        entry = score(f4_graph, "p2", EXPERT, f4_population)
        total = sum(d["contribution"] for d in entry.per_indicator.values())
        assert abs(entry.score - total) <= 1e-9
        for detail in entry.per_indicator.values():
            assert detail["contribution"] == detail["weight"] * detail["normalized"]

    def test_not_in_population(self, f4_graph, f4_population):
        with pytest.raises(ResourceNotInPopulation):
            score(f4_graph, "ghost", EXPERT, f4_population)


class TestRank:
    def test_expert_order(self, f4_graph, f4_population):
        assert rank(f4_graph, f4_population, EXPERT).order() == F4_ORDER_EXPERT

    def test_crowd_demotes_the_most_impressive(self, f4_graph, f4_population):
        ranking = rank(f4_graph, f4_population, CROWD)
        assert ranking.order() == F4_ORDER_CROWD
        for entry in ranking.entries:
            assert entry.score == pytest.approx(F4_SCORES_CROWD[entry.resource], abs=1e-9)

    def test_tie_broken_by_id(self):
        raws = {"cit": {"pa": 10, "pb": 10, "pz": 0}}
        graph = build_graph_with_raws(
            {"cit": raws["cit"], "hif": {}, "intl": {}}
        )
        population = Population(ids=("pz", "pb", "pa"), kind="person")
        ranking = rank(graph, population, make_vs({"cit": 1}, "only"))
        assert ranking.order() == ["pa", "pb", "pz"]

    def test_deterministic_bytes(self, f4_graph, f4_population):
        first = canonical_json(rank(f4_graph, f4_population, EXPERT).to_doc())
        second = canonical_json(rank(f4_graph, f4_population, EXPERT).to_doc())
        assert first == second

    def test_population_validation(self):
        with pytest.raises(InvalidPopulation):
            Population(ids=(), kind="person")
        with pytest.raises(InvalidPopulation):
            Population(ids=("a", "a"), kind="person")
        with pytest.raises(InvalidPopulation):
            Population(ids=("a",), kind="team")

    def test_kind_mix_detected(self, f4_graph):
        graph = build_graph_with_raws(F4_RAWS)
        graph.register_resource("unit", "U", resource_id="u1")
        population = Population(ids=("p1", "u1"), kind="person")
        with pytest.raises(InvalidPopulation):
            rank(graph, population, EXPERT)


class TestReport:
    def test_p1_expert(self, f4_graph, f4_population):
        report = assessment_report(f4_graph, "p1", EXPERT, f4_population)
        assert report["rank"] == 1
        assert report["strongest"] == "cit"
        assert report["per_indicator"]["cit"]["weight"] == pytest.approx(0.8, abs=1e-12)
        assert report["percentile"] == 75.0
        assert report["undervalued"] == []

    def test_p4_expert_all_zero(self, f4_graph, f4_population):
        report = assessment_report(f4_graph, "p4", EXPERT, f4_population)
        assert report["rank"] == 4
        assert all(
            d["contribution"] == 0.0 for d in report["per_indicator"].values()
        )

    def test_p1_crowd_flags_undervalued_citations(self, f4_graph, f4_population):
        report = assessment_report(f4_graph, "p1", CROWD, f4_population)
        assert report["rank"] == 3
        assert "cit" in report["undervalued"]


class TestCompare:
    def test_identity(self, f4_graph, f4_population):
        a = rank(f4_graph, f4_population, EXPERT)
        summary = compare_rankings(a, rank(f4_graph, f4_population, EXPERT))
        assert all(delta == 0 for delta in summary["deltas"].values())
        assert summary["kendall_tau_distance"] == 0

    def test_expert_vs_crowd(self, f4_graph, f4_population):
        a = rank(f4_graph, f4_population, EXPERT)
        b = rank(f4_graph, f4_population, CROWD)
        summary = compare_rankings(a, b)
        assert summary["deltas"]["p1"] == -2
        assert summary["kendall_tau_distance"] == 2
        assert summary["kendall_tau_distance"] == kendall_tau_brute(a.order(), b.order())

    def test_reversal_of_three_is_maximal(self):
        raws = {"cit": {"pa": 3, "pb": 2, "pc": 1}, "hif": {"pa": 1, "pb": 2, "pc": 3}}
        graph = build_graph_with_raws({**raws, "intl": {}})
        population = Population(ids=("pa", "pb", "pc"), kind="person")
        up = rank(graph, population, make_vs({"cit": 1}, "up"))
        down = rank(graph, population, make_vs({"hif": 1}, "down"))
        assert compare_rankings(up, down)["kendall_tau_distance"] == 3

    def test_population_mismatch(self, f4_graph):
        small = Population(ids=("p1", "p2"), kind="person")
        large = Population(ids=("p1", "p2", "p3"), kind="person")
        with pytest.raises(PopulationMismatch):
            compare_rankings(
                rank(f4_graph, small, EXPERT), rank(f4_graph, large, EXPERT)
            )


class TestProperties:
    def test_scores_bounded_and_max_scores_one(self):
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(2, 6)
            ids = [f"p{i}" for i in range(n)]
            raws = {
                ind: {r: rng.randint(0, 50) for r in ids}
                for ind in ("cit", "hif", "intl")
            }
            # make p0 component-wise maximal
            for ind in raws:
                raws[ind]["p0"] = max(raws[ind].values()) + 1
            graph = build_graph_with_raws(raws)
            population = Population(ids=tuple(ids), kind="person")
            weights = {"cit": rng.choice([0.25, 0.5, 1]), "hif": 0.25, "intl": 0.5}
            ranking = rank(graph, population, make_vs(weights, "w"))
            for entry in ranking.entries:
                assert -1e-12 <= entry.score <= 1 + 1e-12
            top = next(e for e in ranking.entries if e.resource == "p0")
            assert top.score == pytest.approx(1.0, abs=1e-9)

    def test_monotonicity_in_raw_value(self):
        rng = random.Random(11)
        for _ in range(20):
            ids = [f"p{i}" for i in range(4)]
            raws = {
                ind: {r: rng.randint(0, 20) for r in ids}
                for ind in ("cit", "hif", "intl")
            }
            weights = {"cit": 0.5, "hif": 0.25, "intl": 0.25}
            before_order = brute_force_order(ids, raws, weights)
            target = rng.choice(ids)
            before_position = before_order.index(target)
            raws["cit"][target] += rng.randint(1, 30)
            graph = build_graph_with_raws(raws)
            population = Population(ids=tuple(ids), kind="person")
            after = rank(graph, population, make_vs(weights, "w")).order()
            assert after.index(target) <= before_position

    def test_oracle_agreement_quick(self):
        rng = random.Random(3)
        for _ in range(25):
            n = rng.randint(1, 6)
            ids = [f"p{i}" for i in range(n)]
            raws = {
                ind: {r: rng.randint(0, 10) for r in ids}
                for ind in ("cit", "hif", "intl")
            }
            graph = build_graph_with_raws(raws)
            population = Population(ids=tuple(ids), kind="person")
            weights = {
                "cit": rng.choice([0, 0.25, 0.5, 1]),
                "hif": rng.choice([0, 0.25, 0.5, 1]),
                "intl": rng.choice([0, 0.25, 0.5, 1]),
            }
            if not any(weights.values()):
                weights["cit"] = 1
            ranking = rank(graph, population, make_vs(weights, "w"))
            assert ranking.order() == brute_force_order(ids, raws, weights)
            oracle_scores = brute_force_scores(ids, raws, weights)
            for entry in ranking.entries:
                assert entry.score == oracle_scores[entry.resource]
