import copy
import json

import pytest

from mrflump.cli import fixtures
from mrflump.cli.generate import PROFILES, random_instance
from mrflump.cli.instance import InstanceError, instance_from_dict, instance_to_dict, parse_instance, serialize_instance
from mrflump.cli.main import bundled_path, check_fixture, main
from mrflump.cli.report import canonical, dumps


def _doc(name="example5"):
    return json.loads(bundled_path(name).read_text())


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_bundled_files_match_builders(name):
    built = fixtures.builtin_fixture(name)
    assert bundled_path(name).read_text() == serialize_instance(built)
    parsed = parse_instance(bundled_path(name))
    assert parsed.distribution.same_as(built.distribution)
    assert parsed.graph == built.graph


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_fixture_expectations(name):
    *_, fails = check_fixture(name)
    assert fails == []


@pytest.mark.parametrize("profile", PROFILES)
def test_random_instances_round_trip(profile):
    for seed in range(15):
        inst = random_instance(seed, profile)
        text = serialize_instance(inst)
        back = instance_from_dict(json.loads(text))
        assert serialize_instance(back) == text
        assert back.distribution.same_as(inst.distribution)


def test_random_instances_are_deterministic():
    for profile in PROFILES:
        a = serialize_instance(random_instance(7, profile))
        b = serialize_instance(random_instance(7, profile))
        assert a == b
    assert serialize_instance(random_instance(7)) != serialize_instance(random_instance(8))


def test_probability_sum_off_by_a_thousandth():
    doc = _doc()
    doc["distribution"]["entries"][0]["p"] = 0.333
    doc["distribution"]["entries"][1]["p"] = 0.333
    doc["distribution"]["entries"][2]["p"] = 0.333
    with pytest.raises(InstanceError) as err:
        instance_from_dict(doc)
    assert err.value.code == "PROB_SUM"


def test_float_sum_within_tolerance_is_renormalized():
    doc = _doc()
    for e in doc["distribution"]["entries"]:
        e["p"] = 1 / 3
    inst = instance_from_dict(doc)
    assert inst.table.mode == "float"
    assert instance_from_dict(doc, rational=True).table.mode == "exact"


@pytest.mark.parametrize("mutate,code", [
    (lambda d: d["lumping"][0]["map"].pop("2"), "PARTIAL_MAP"),
    (lambda d: d["lumping"][0]["map"].update({"7": "0"}), "UNKNOWN_SYMBOL"),
    (lambda d: d["distribution"]["entries"][0].update({"p": "-1/3"}), "NEGATIVE_PROB"),
    (lambda d: d["distribution"]["entries"].append(copy.deepcopy(d["distribution"]["entries"][0])), "DUPLICATE_ENTRY"),
    (lambda d: d["edges"].append([0, 5]), "DANGLING_VERTEX"),
    (lambda d: d["distribution"]["entries"][0].update({"x": ["9", "0"]}), "UNKNOWN_SYMBOL"),
    (lambda d: d.pop("variables"), "SCHEMA"),
])
def test_error_codes(mutate, code):
    doc = _doc()
    mutate(doc)
    with pytest.raises(InstanceError) as err:
        instance_from_dict(doc)
    assert err.value.code == code


def test_gibbs_errors():
    doc = instance_to_dict(fixtures.example4())
    bad = copy.deepcopy(doc)
    bad["distribution"]["potentials"][0]["table"][0]["value"] = 0
    with pytest.raises(InstanceError) as err:
        instance_from_dict(bad)
    assert err.value.code == "NONPOSITIVE_POTENTIAL"
    bad = copy.deepcopy(doc)
    bad["distribution"]["potentials"][0]["clique"] = [0, 2]
    with pytest.raises(InstanceError) as err:
        instance_from_dict(bad)
    assert err.value.code == "NOT_CLIQUE"


def test_json_syntax_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{ nope")
    with pytest.raises(InstanceError) as err:
        parse_instance(p)
    assert err.value.code == "JSON_SYNTAX"
    assert main(["lump", "--instance", str(p)]) == 2


def test_canonical_rounding():
    assert canonical(0.1 + 0.2) == 0.3
    assert canonical(-0.0) == 0.0
    assert canonical({"a": (1, 2.0)}) == {"a": [1, 2.0]}
    with pytest.raises(TypeError):
        canonical(object())


def test_examples_command(tmp_path, capsys):
    out = tmp_path / "ex.json"
    assert main(["examples", "--json", str(out)]) == 0
    assert "7/7 fixtures" in capsys.readouterr().out
    rep = json.loads(out.read_text())
    assert all(r["assertions_passed"] for r in rep["fixtures"])


def test_exit_codes(tmp_path):
    assert main(["check-mrf", "--instance", "example1"]) == 0
    assert main(["check-mrf", "--instance", "example1", "--graph-check", "X1-X3"]) == 1
    assert main(["check-mrf", "--instance", "example1", "--graph-check", "0-1,1-2"]) == 0
    assert main(["check-mrf", "--instance", "example1", "--graph-check", "X1-X9"]) == 2
    assert main(["lump", "--instance", "example4"]) == 0
    assert main(["lump", "--instance", "example1"]) == 1
    assert main(["info", "--instance", "example2"]) == 0
    assert main(["info", "--instance", "infoloss"]) == 1
    assert main(["minimal-graph", "--instance", "example2"]) == 0
    assert main(["lump", "--instance", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as err:
        main(["lump"])
    assert err.value.code == 2


def test_lump_without_lumping(tmp_path):
    doc = _doc()
    doc.pop("lumping")
    p = tmp_path / "nolump.json"
    p.write_text(json.dumps(doc))
    assert main(["lump", "--instance", str(p)]) == 2
    assert main(["check-mrf", "--instance", str(p)]) == 0


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        assert main(["lump", "--instance", "example4", "--json", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["lumpability"]["certificate"] == "prop1"
    assert "timing_seconds" not in rep


def test_random_suite_command(tmp_path):
    p = tmp_path / "suite.json"
    assert main(["random-suite", "--profile", "generic", "--count", "20", "--seed", "3", "--json", str(p)]) == 0
    first = p.read_bytes()
    main(["random-suite", "--profile", "generic", "--count", "20", "--seed", "3", "--json", str(p)])
    assert p.read_bytes() == first
    assert json.loads(first)["counts"]["mrf_methods"] == 20


def test_dumps_is_sorted_and_newline_terminated():
    s = dumps({"b": 1, "a": 2})
    assert s.endswith("\n") and s.index('"a"') < s.index('"b"')


def test_generator_contracts():
    from mrflump import assign_cliques, is_chordal

    for seed in range(30):
        c = random_instance(seed, "chordal", max_vertices=5)
        assert is_chordal(c.graph)[0] and c.distribution.is_positive()
        f = random_instance(seed, "prop1").family
        assert assign_cliques(f, random_instance(seed, "prop1").lumping)
    with pytest.raises(ValueError):
        random_instance(0, "nope")
