import json
import warnings

import pytest
from hypothesis import given, strategies as st

from galdef.congruence import (CoefficientWarning, Newform, ars_congruence_primes, congruence_primes,
                               congruent_mod, gamma0_index, load_newforms, parse_newforms,
                               strict_congruence_primes, sturm_bound)
from galdef.errors import InsufficientCoefficients, InvalidParameters, NotComparable, SchemaError
from conftest import DATA
from oracles import curve_an, eta_product_11, gamma0_index as oracle_index


@pytest.fixture(scope="module")
def forms():
    return {f.label: f for f in load_newforms(DATA / "newforms.json")}


def test_fixture_coefficients_match_oracles(forms):
    assert list(forms["11a"].an_int) == eta_product_11(40)
    assert list(forms["11a"].an_int) == curve_an([0, -1, 1, -10, -20], 40)
    assert list(forms["26a"].an_int) == curve_an([1, 0, 1, -5, -8], 40)
    cremona = {f.label: f for f in load_newforms(DATA / "cremona26.json")}
    assert list(cremona["26b"].an_int) == curve_an([1, -1, 1, -3, 3], 40)


@given(st.integers(1, 3000))
def test_gamma0_index_matches_oracle(N):
    assert gamma0_index(N) == oracle_index(N)


def test_sturm_bounds():
    assert sturm_bound(11, 2) == 2
    assert sturm_bound(26, 2) == 7
    assert sturm_bound(1, 2) == 1
    assert sturm_bound(1, 12) == 1
    with pytest.raises(InvalidParameters):
        sturm_bound(11, 3)


def test_strict_primes_on_fixture(forms):
    pool = list(forms.values())
    found = strict_congruence_primes(forms["26a"], pool, 50)
    assert {c.ell for c in found} == {7}
    assert all(c.g_label == "26a-syn7" for c in found)


def test_smaller_level_partner_is_not_strict(forms):
    pool = list(forms.values())
    found = congruence_primes(forms["26a"], pool, 50)
    non_strict = [c for c in found if not c.strict]
    assert [(c.g_label, c.ell) for c in non_strict] == [("13-syn7", 7)]
    assert strict_congruence_primes(forms["13-syn7"], pool, 50) == []


def test_self_comparison(forms):
    f = forms["26a"]
    with pytest.raises(NotComparable):
        congruent_mod(f, f, 7)
    assert strict_congruence_primes(f, [f], 50) == []


def test_congruent_mod_witness(forms):
    res = congruent_mod(forms["26a"], forms["26a-syn7"], 5)
    assert not res.congruent and res.witness is not None
    assert all(n % 2 and n % 13 and n % 5 for n in res.compared)


def test_cremona_pair_gives_two():
    pool = load_newforms(DATA / "cremona26.json")
    found = strict_congruence_primes(pool[0], pool, 50)
    assert [c.ell for c in found] == [2]


def test_insufficient_coefficients():
    f = Newform("a", 26, 2, "a", an_int=(1, 2, 3))
    g = Newform("b", 26, 2, "b", an_int=(1, 2, 3))
    with pytest.raises(InsufficientCoefficients):
        congruent_mod(f, g, 7)


def _record(**kw):
    rec = {"label": "x", "level": 11, "weight": 2, "orbit_id": "x", "an_int": [1, -2, -1]}
    rec.update(kw)
    return {"forms": [rec]}


def test_schema_errors_name_the_field():
    with pytest.raises(SchemaError) as exc:
        parse_newforms(_record(an_int=[2, 0, 0]))
    assert exc.value.path == "forms/0/an_int/0"
    with pytest.raises(SchemaError) as exc:
        parse_newforms(_record(level="eleven"))
    assert exc.value.path == "forms/0/level"
    with pytest.raises(SchemaError):
        parse_newforms({"forms": [{"label": "x", "level": 11, "weight": 2, "orbit_id": "x"}]})
    with pytest.raises(SchemaError):
        parse_newforms(_record(an_mod={"6": [1, 2]}))


def test_short_data_warns():
    rec = _record()
    rec["forms"][0]["an_int"] = [1]
    with pytest.warns(CoefficientWarning):
        parse_newforms(rec)


def test_an_mod_columns():
    data = {"forms": [{"label": "m", "level": 11, "weight": 2, "orbit_id": "m", "an_mod": {"7": [1, 12, 3]}}]}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoefficientWarning)
        f = parse_newforms(data)[0]
    assert f.residues(7) == (1, 5, 3)
    assert f.residues(5) is None


def test_invalid_json_is_schema_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_newforms(p)


def test_round_trip(forms):
    data = {"forms": [f.to_dict() for f in forms.values()]}
    again = parse_newforms(json.loads(json.dumps(data)))
    assert [f.label for f in again] == sorted(forms, key=lambda k: (forms[k].level, k))


def test_ars():
    assert ars_congruence_primes(26, 6) == ([2, 3, 13], [2, 3])
    assert ars_congruence_primes(11, 1) == ([11], [])
    with pytest.raises(InvalidParameters):
        ars_congruence_primes(11, 0)
