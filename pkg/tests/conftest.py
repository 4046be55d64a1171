from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracle import CROWD_WEIGHTS, EXPERT_WEIGHTS, F4_RAWS

from meritrank import Platform
from meritrank.domain import ResourceGraph, starter_schema


def define_standard_indicators(platform: Platform) -> None:
    platform.define_indicator("cit", "citation index", "citation_record", "citations")
    platform.define_indicator(
        "hif", "high-impact publications", "publication", "impact_factor", "count"
    )
    platform.define_indicator(
        "intl", "international partnerships", "project", "intl_partner_count"
    )


def attach_f4_achievements(platform: Platform) -> None:
    for person, citations in F4_RAWS["cit"].items():
        if citations:
            platform.attach_achievement(
                person, "citation_record", {"citations": citations}, 2018
            )
    for person, publications in F4_RAWS["hif"].items():
        for _ in range(publications):
            platform.attach_achievement(
                person, "publication", {"impact_factor": 3.2}, 2018
            )
    for person, partners in F4_RAWS["intl"].items():
        if partners:
            platform.attach_achievement(
                person, "project", {"intl_partner_count": partners}, 2018
            )


@pytest.fixture
def platform() -> Platform:
    return Platform.create()


@pytest.fixture
def f4_platform() -> Platform:
    """Fixture population p1..p4 inside org/unit, indicators, PSVs E and M."""
    platform = Platform.create()
    platform.register_resource("organization", "NURE", resource_id="org_nure")
    platform.register_resource("unit", "AI Dept", "org_nure", resource_id="u_ai")
    for person in ("p1", "p2", "p3", "p4"):
        platform.register_resource("person", person.upper(), "u_ai", resource_id=person)
    define_standard_indicators(platform)
    attach_f4_achievements(platform)
    platform.create_value_system("p1", EXPERT_WEIGHTS, "expert", vs_id="e")
    platform.create_value_system(
        "p2", {"cit": 0.2, "hif": 0.4, "intl": 0.4}, "crowd-1", vs_id="crowd1"
    )
    platform.create_value_system(
        "p3", {"cit": 0.0, "hif": 0.5, "intl": 0.5}, "crowd-2", vs_id="crowd2"
    )
    doc = platform.aggregate_value_systems(
        ["crowd1", "crowd2"], "mean", label="crowd mean", vs_id="m"
    )
    assert doc["weights"] == CROWD_WEIGHTS
    return platform


def build_graph_with_raws(raws: dict[str, dict[str, float]]) -> ResourceGraph:
    """Bare graph whose three sum indicators reproduce the given raw matrix."""
    graph = ResourceGraph(schema=starter_schema())
    graph.define_indicator("cit", "citations", "citation_record", "citations")
    graph.define_indicator("hif", "impact", "publication", "impact_factor")
    graph.define_indicator("intl", "partners", "project", "intl_partner_count")
    attribute = {
        "cit": ("citation_record", "citations"),
        "hif": ("publication", "impact_factor"),
        "intl": ("project", "intl_partner_count"),
    }
    person_ids = sorted({r for values in raws.values() for r in values})
    for person in person_ids:
        graph.register_resource("person", person, resource_id=person)
    for indicator_id, values in raws.items():
        category, attr = attribute[indicator_id]
        for person, value in values.items():
            if value:
                graph.attach_achievement(
                    person, category, {attr: value}, 2018
                )
    return graph
