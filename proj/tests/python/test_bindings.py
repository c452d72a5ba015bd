"""Smoke tests for the Python bindings, run against the staged build tree."""

import math

import pytest

import cesshare


@pytest.fixture(scope="module")
def community():
    return cesshare.synthetic(buildings=3, scenarios=1, periods=4, seed=7)


def test_building_ids(community):
    ids = community.building_ids()
    assert len(ids) == 3
    assert len(set(ids)) == 3


def test_grand_value_is_subadditive(community):
    ids = community.building_ids()
    grand = community.evaluate()["value"]
    singles = sum(community.evaluate([i])["value"] for i in ids)
    assert grand <= singles + 1e-6


def test_evaluate_fields(community):
    out = community.evaluate()
    assert set(out) == {"value", "energy_capacity", "power_capacity", "capex",
                        "expected_opex"}
    assert math.isclose(out["value"], out["capex"] + out["expected_opex"],
                        rel_tol=0, abs_tol=1e-9)
    assert out["energy_capacity"] >= 0


def test_storage_beats_no_storage(community):
    ids = community.building_ids()
    for i in ids:
        assert community.evaluate([i])["value"] <= community.no_storage_cost(i) + 1e-6


def test_unknown_building_raises(community):
    with pytest.raises(ValueError):
        community.evaluate(["nope"])


@pytest.mark.parametrize("method", ["nucleolus", "shapley", "proportional"])
def test_allocation_is_efficient(community, method):
    grand = community.evaluate()["value"]
    res = community.allocate(method=method, threads=2)
    assert res["method"] == method
    assert math.isclose(sum(res["allocation"].values()), grand,
                        rel_tol=0, abs_tol=1e-6)


def test_nucleolus_satisfies_every_coalition(community):
    res = community.allocate(method="nucleolus", threads=2)
    assert res["max_excess"] <= 1e-6
    assert res["in_core"]


def test_report_dominance(community):
    rep = community.report(threads=2)
    assert rep["pooled_total"] <= rep["ces_total"] + 1e-6
    assert rep["ces_total"] <= rep["ies_sum"] + 1e-6
    assert rep["ies_sum"] <= rep["baseline_total"] + 1e-6
    assert len(rep["buildings"]) == 3
