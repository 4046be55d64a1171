from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meritrank.domain import (
    FLOOR_ACCEPTS,
    STATUS_EDGES,
    STATUSES,
    ResourceGraph,
    starter_schema,
)
from meritrank.errors import (
    DuplicateId,
    IllegalTransition,
    InvalidIdentifier,
    KindMismatch,
    MissingEvidence,
    SchemaViolation,
    UnknownAttribute,
    UnknownOwner,
    UnknownParent,
    UnknownResource,
    YearOutOfRange,
)


@pytest.fixture
def graph() -> ResourceGraph:
    g = ResourceGraph(schema=starter_schema())
    g.register_resource("organization", "NURE", resource_id="org_nure")
    g.register_resource("unit", "AI Dept", "org_nure", resource_id="u_ai")
    return g


class TestRegister:
    def test_minimal_person(self, graph):
        resource = graph.register_resource("person", "Ivanova", "u_ai")
        assert resource.member_of == "u_ai"
        assert graph.resources[resource.id] is resource

    def test_hierarchy_unit_under_org(self, graph):
        unit = graph.register_resource("unit", "Math Dept", "org_nure")
        assert unit.member_of == "org_nure"

    def test_person_under_person_is_kind_mismatch(self, graph):
        person = graph.register_resource("person", "A", "u_ai")
        with pytest.raises(KindMismatch):
            graph.register_resource("person", "X", member_of=person.id)

    def test_organization_cannot_have_parent(self, graph):
        with pytest.raises(KindMismatch):
            graph.register_resource("organization", "Top", member_of="org_nure")

    def test_unknown_parent(self, graph):
        with pytest.raises(UnknownParent):
            graph.register_resource("person", "X", member_of="nope")

    def test_duplicate_id(self, graph):
        with pytest.raises(DuplicateId):
            graph.register_resource("unit", "Again", "org_nure", resource_id="u_ai")

    def test_id_pattern_enforced(self, graph):
        with pytest.raises(InvalidIdentifier):
            graph.register_resource("person", "X", "u_ai", resource_id="Bad Id!")

    def test_generated_ids_unique(self, graph):
        ids = {graph.register_resource("person", f"P{i}", "u_ai").id for i in range(25)}
        assert len(ids) == 25


class TestAttach:
    def test_default_status_reported(self, graph):
        p = graph.register_resource("person", "A", "u_ai")
        a = graph.attach_achievement(
            p.id, "publication", {"impact_factor": 3.2, "title": "..."}, 2018
        )
        assert a.status == "reported"

    def test_evidence_gives_evidence_attached(self, graph):
        p = graph.register_resource("person", "A", "u_ai")
        a = graph.attach_achievement(
            p.id, "citation_record", {"citations": 100}, 2018, "https://scholar.example"
        )
        assert a.status == "evidence_attached"

    def test_unknown_attribute_rejected(self, graph):
        p = graph.register_resource("person", "A", "u_ai")
        with pytest.raises(SchemaViolation):
            graph.attach_achievement(p.id, "publication", {"nonexistent_attr": 1}, 2018)

    def test_wrong_attribute_type_rejected(self, graph):
        p = graph.register_resource("person", "A", "u_ai")
        with pytest.raises(SchemaViolation):
            graph.attach_achievement(p.id, "publication", {"impact_factor": "high"}, 2018)

    def test_unknown_category_rejected(self, graph):
        p = graph.register_resource("person", "A", "u_ai")
        with pytest.raises(SchemaViolation):
            graph.attach_achievement(p.id, "patent", {}, 2018)

    def test_owner_must_be_person(self, graph):
        with pytest.raises(UnknownOwner):
            graph.attach_achievement("u_ai", "publication", {}, 2018)
        with pytest.raises(UnknownOwner):
            graph.attach_achievement("ghost", "publication", {}, 2018)

    @pytest.mark.parametrize("year", [1899, 2101, "2018", 2018.0])
    def test_year_bounds(self, graph, year):
        p = graph.register_resource("person", "A", "u_ai")
        with pytest.raises(YearOutOfRange):
            graph.attach_achievement(p.id, "publication", {}, year)


class TestVerification:
    @pytest.fixture
    def person(self, graph):
        return graph.register_resource("person", "A", "u_ai")

    def test_verify_without_evidence_is_missing_evidence(self, graph, person):
        a = graph.attach_achievement(person.id, "publication", {}, 2018)
        with pytest.raises(MissingEvidence):
            graph.set_verification(a.id, "verified", "admin")

    def test_happy_path_verify(self, graph, person):
        a = graph.attach_achievement(person.id, "publication", {}, 2018, "https://ev")
        updated = graph.set_verification(a.id, "verified", "admin")
        assert updated.status == "verified"

    def test_verified_cannot_go_back_to_reported(self, graph, person):
        a = graph.attach_achievement(person.id, "publication", {}, 2018, "https://ev")
        graph.set_verification(a.id, "verified", "admin")
        with pytest.raises(IllegalTransition):
            graph.set_verification(a.id, "reported", "admin")

    def test_dispute_and_return(self, graph, person):
        a = graph.attach_achievement(person.id, "publication", {}, 2018, "https://ev")
        graph.set_verification(a.id, "disputed", "reviewer")
        assert a.status == "disputed"
        graph.set_verification(a.id, "evidence_attached", "owner")
        assert a.status == "evidence_attached"

    def test_attach_evidence_via_transition(self, graph, person):
        a = graph.attach_achievement(person.id, "publication", {}, 2018)
        graph.set_verification(a.id, "evidence_attached", "owner", "https://late-ev")
        assert a.evidence_uri == "https://late-ev"

    def test_status_machine_closure(self, graph, person):
        """No transition outside the declared edges, over all 4x4 pairs."""
        for source in STATUSES:
            for target in STATUSES:
                a = graph.attach_achievement(
                    person.id, "publication", {}, 2018, "https://ev"
                )
                a.status = source  # place the machine directly in the source state
                if (source, target) in STATUS_EDGES:
                    graph.set_verification(a.id, target, "admin")
                    assert a.status == target
                else:
                    with pytest.raises((IllegalTransition, MissingEvidence)):
                        graph.set_verification(a.id, target, "admin")
                    assert a.status == source


class TestIndicators:
    def test_define_and_duplicate(self, graph):
        graph.define_indicator("cit", "citations", "citation_record", "citations")
        with pytest.raises(DuplicateId):
            graph.define_indicator("cit", "again", "citation_record", "citations")

    def test_unknown_attribute(self, graph):
        with pytest.raises(UnknownAttribute):
            graph.define_indicator("x", "x", "publication", "not_an_attr")

    def test_sum_requires_number(self, graph):
        with pytest.raises(SchemaViolation):
            graph.define_indicator("t", "titles", "publication", "title", "sum")

    def test_count_over_text_is_fine(self, graph):
        graph.define_indicator("titled", "has title", "publication", "title", "count")


class TestRawValues:
    @pytest.fixture
    def loaded(self, graph):
        graph.define_indicator("cit", "citations", "citation_record", "citations")
        graph.define_indicator(
            "vcit", "verified citations", "citation_record", "citations",
            status_floor="verified",
        )
        p1 = graph.register_resource("person", "P1", "u_ai", resource_id="pa")
        p2 = graph.register_resource("person", "P2", "u_ai", resource_id="pb")
        return graph, p1, p2

    def test_single_record(self, loaded):
        graph, p1, _ = loaded
        graph.attach_achievement(p1.id, "citation_record", {"citations": 100}, 2018)
        assert graph.raw_indicator_value(p1.id, "cit") == 100

    def test_empty_aggregation_is_zero(self, loaded):
        graph, p1, _ = loaded
        assert graph.raw_indicator_value(p1.id, "cit") == 0

    def test_unit_rollup_hand_summed(self, loaded):
        graph, p1, p2 = loaded
        graph.attach_achievement(p1.id, "citation_record", {"citations": 100}, 2018)
        graph.attach_achievement(p2.id, "citation_record", {"citations": 20}, 2018)
        assert graph.raw_indicator_value("u_ai", "cit") == 120
        assert graph.raw_indicator_value("org_nure", "cit") == 120

    def test_count_aggregation(self, loaded):
        graph, p1, _ = loaded
        graph.define_indicator("pubs", "pubs", "publication", "impact_factor", "count")
        for factor in (1.0, 2.0, 3.0):
            graph.attach_achievement(p1.id, "publication", {"impact_factor": factor}, 2018)
        graph.attach_achievement(p1.id, "publication", {"title": "no factor"}, 2018)
        assert graph.raw_indicator_value(p1.id, "pubs") == 3

    def test_max_aggregation(self, loaded):
        graph, p1, _ = loaded
        graph.define_indicator("best", "best if", "publication", "impact_factor", "max")
        for factor in (1.5, 9.1, 4.0):
            graph.attach_achievement(p1.id, "publication", {"impact_factor": factor}, 2018)
        assert graph.raw_indicator_value(p1.id, "best") == 9.1

    def test_as_of_year_cutoff(self, loaded):
        graph, p1, _ = loaded
        graph.attach_achievement(p1.id, "citation_record", {"citations": 10}, 2015)
        graph.attach_achievement(p1.id, "citation_record", {"citations": 5}, 2019)
        assert graph.raw_indicator_value(p1.id, "cit", as_of_year=2016) == 10
        assert graph.raw_indicator_value(p1.id, "cit") == 15

    def test_verified_floor_excludes_unverified(self, loaded):
        graph, p1, _ = loaded
        a = graph.attach_achievement(
            p1.id, "citation_record", {"citations": 50}, 2018, "https://ev"
        )
        assert graph.raw_indicator_value(p1.id, "vcit") == 0
        graph.set_verification(a.id, "verified", "admin")
        assert graph.raw_indicator_value(p1.id, "vcit") == 50

    def test_disputed_never_scores(self, loaded):
        graph, p1, _ = loaded
        a = graph.attach_achievement(
            p1.id, "citation_record", {"citations": 50}, 2018, "https://ev"
        )
        graph.set_verification(a.id, "disputed", "reviewer")
        assert graph.raw_indicator_value(p1.id, "cit") == 0

    def test_unknown_ids(self, loaded):
        graph, p1, _ = loaded
        with pytest.raises(UnknownResource):
            graph.raw_indicator_value("ghost", "cit")
        from meritrank.errors import UnknownIndicator

        with pytest.raises(UnknownIndicator):
            graph.raw_indicator_value(p1.id, "ghost")


@settings(max_examples=40, deadline=None)
@given(
    values=st.lists(
        st.tuples(st.integers(0, 2), st.integers(0, 500)), min_size=1, max_size=12
    )
)
def test_rollup_additivity_random_hierarchies(values):
    """Organization value == sum over member persons, for sum indicators."""
    graph = ResourceGraph(schema=starter_schema())
    graph.define_indicator("cit", "citations", "citation_record", "citations")
    graph.register_resource("organization", "Org", resource_id="org")
    units = []
    for i in range(3):
        units.append(
            graph.register_resource("unit", f"U{i}", "org", resource_id=f"unit{i}").id
        )
    persons = []
    for i, (unit_index, citations) in enumerate(values):
        person = graph.register_resource(
            "person", f"P{i}", units[unit_index], resource_id=f"person{i}"
        )
        persons.append(person.id)
        if citations:
            graph.attach_achievement(
                person.id, "citation_record", {"citations": citations}, 2018
            )
    total = sum(graph.raw_indicator_value(p, "cit") for p in persons)
    assert graph.raw_indicator_value("org", "cit") == total
    unit_total = sum(graph.raw_indicator_value(u, "cit") for u in units)
    assert unit_total == total


@settings(max_examples=40, deadline=None)
@given(
    existing=st.lists(st.integers(0, 100), max_size=8),
    new_value=st.integers(1, 100),
    aggregation=st.sampled_from(["sum", "count"]),
)
def test_monotone_growth(existing, new_value, aggregation):
    """Attaching a positive-valued achievement never lowers sum/count values."""
    graph = ResourceGraph(schema=starter_schema())
    graph.define_indicator(
        "ind", "ind", "citation_record", "citations", aggregation
    )
    person = graph.register_resource("person", "P", resource_id="p")
    for value in existing:
        graph.attach_achievement(person.id, "citation_record", {"citations": value}, 2018)
    before = graph.raw_indicator_value("p", "ind")
    graph.attach_achievement(person.id, "citation_record", {"citations": new_value}, 2018)
    assert graph.raw_indicator_value("p", "ind") >= before


def test_floor_accepts_is_exactly_the_documented_sets():
    assert FLOOR_ACCEPTS["reported"] == ("reported", "evidence_attached", "verified")
    assert FLOOR_ACCEPTS["verified"] == ("verified",)
