from fractions import Fraction

import pytest

import pevnet


def test_bundled_scenarios_load():
    names = pevnet.bundled_scenarios()
    assert {"example2", "figure1", "figure5", "qaidm_failure"} <= set(names)
    sc = pevnet.load_scenario("example2")
    assert sc.agents == list(range(1, 11))
    assert sc.quality_levels[0] == Fraction(1)


def test_example2_at_quality_8():
    r = pevnet.run("example2", "pev", quality=8)
    assert r["selected"] == 9
    assert r["sequence"] == [2, 6, 9]
    assert r["w"] == [Fraction(4), Fraction(4), Fraction(9, 2)]
    assert r["payoffs"][6] == Fraction(1, 2)
    assert r["payoffs"][9] == Fraction(7, 2)
    assert r["utilities"][9] == Fraction(5, 2)
    assert r["requester_utility"] == 4


def test_example1_vcg_deficit():
    r = pevnet.run("figure1", "vcg")
    assert r["payoffs"][1] == Fraction(1, 2)
    assert r["payoffs"][4] == Fraction(3, 5)
    assert r["requester_utility"] == Fraction(-1, 10)


def test_idm_precondition():
    with pytest.raises(pevnet.PreconditionError):
        pevnet.run("example2", "idm")


def test_qaidm_violation_witness():
    (ic,) = pevnet.audit("qaidm_failure", "qaidm", ["ic"], grid_step="1/10")
    assert not ic["holds"]
    assert ic["witness"]["delta"] > 0


def test_pev_properties_hold():
    reports = pevnet.audit("figure5", "pev", ["ir", "ic", "wbb", "lemmas", "efficiency"])
    by_name = {r["property"]: r for r in reports}
    assert all(r["holds"] for name, r in by_name.items() if name != "Efficiency")
    assert by_name["Efficiency"]["certificate"]["gap"] == Fraction(3, 10)


def test_simulation_matches_closed_form():
    r = pevnet.simulate("example2", trials=20000, seed=4)
    sim = r["simulation"]
    assert sim["pass"]
    requester = next(row for row in sim["rows"] if row["agent"] == "s")
    assert requester["variance"] == 0
    assert requester["empirical"] == 4


def test_generate_round_trip():
    sc = pevnet.generate(agents=6, seed=3)
    again = pevnet.parse_scenario(sc.to_json())
    assert again.to_json() == sc.to_json()
    assert pevnet.run(again)["requester_utility"] >= 0


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        pevnet.parse_scenario('{"name": 1.5}')


def test_cli_in_process():
    code, out, _ = pevnet.cli(["demo", "example2"])
    assert code == 0
    assert "3.5" in out
    assert pevnet.critical_sequence("example2", 9) == [2, 6, 9]
