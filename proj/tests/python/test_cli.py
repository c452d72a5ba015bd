"""End-to-end CLI smoke tests. The binary path arrives via CESSHARE_BIN."""

import json
import os
import subprocess

import pytest

BIN = os.environ["CESSHARE_BIN"]


def run(*args, **kwargs):
    return subprocess.run([BIN, *args], capture_output=True, text=True, **kwargs)


@pytest.fixture(scope="module")
def instance(tmp_path_factory):
    out = tmp_path_factory.mktemp("community")
    r = run("synth", "--buildings", "3", "--scenarios", "1", "--periods", "4",
            "--seed", "7", "--out", str(out))
    assert r.returncode == 0, r.stderr
    return out


def test_synth_writes_instance(instance):
    for name in ("profiles.csv", "probabilities.csv", "community.ini"):
        assert (instance / name).is_file()


def test_value_grand(instance, tmp_path):
    r = run("value", "--profiles", str(instance / "profiles.csv"),
            "--coalition", "grand", "--schedule", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "coalition.json").read_text())
    assert doc["value"] == pytest.approx(doc["capex"] + doc["expected_opex"])
    assert (tmp_path / "schedule.csv").read_text().count("\n") > 1


def test_allocate_all_methods(instance, tmp_path):
    r = run("allocate", "--profiles", str(instance / "profiles.csv"),
            "--method", "all", "--threads", "2", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    totals = []
    for method in ("nucleolus", "shapley", "proportional"):
        doc = json.loads((tmp_path / f"allocation_{method}.json").read_text())
        assert doc["method"] == method
        totals.append(doc["total"])
    assert max(totals) - min(totals) < 1e-6
    nuc = json.loads((tmp_path / "allocation_nucleolus.json").read_text())
    assert nuc["max_excess"] <= 1e-6


def test_compare_report(instance, tmp_path):
    r = run("compare", "--profiles", str(instance / "profiles.csv"),
            "--threads", "2", "--out", str(tmp_path))
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["community"]["pooled_total"] <= doc["community"]["ces_total"] + 1e-6
    assert (tmp_path / "report.csv").read_text().splitlines()[-1].startswith("community")


def test_bad_coalition_exits_2(instance):
    r = run("value", "--profiles", str(instance / "profiles.csv"),
            "--coalition", "no-such-building")
    assert r.returncode == 2
    assert "error" in r.stderr


def test_missing_profiles_exits_2(tmp_path):
    r = run("value", "--profiles", str(tmp_path / "absent.csv"))
    assert r.returncode == 2
