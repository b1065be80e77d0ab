import math

import pytest

from gyrokit.report import CheckResult, VerificationReport, canonical_json


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_canonical_json_nested():
    obj = {"z": [1, {"y": True, "x": None}], "a": "s"}
    assert canonical_json(obj) == '{"a":"s","z":[1,{"x":null,"y":true}]}'


def test_float_formatting_roundtrips_exactly():
    import json

    for v in (0.1, 1e-9, 2.0 ** -24, 0.3, 1.0 / 3.0):
        s = canonical_json({"v": v})
        assert json.loads(s)["v"] == v


def test_integral_floats_keep_a_point():
    # 2.0 must not serialize as the integer 2
    assert canonical_json({"v": 2.0}) == '{"v":2.0}'
    assert canonical_json({"v": 2}) == '{"v":2}'


def test_nan_and_inf_rejected():
    with pytest.raises(ValueError):
        canonical_json({"v": math.nan})
    with pytest.raises(ValueError):
        canonical_json({"v": math.inf})


def test_string_escaping():
    s = canonical_json({"k": 'a"b\\c\n'})
    assert s == '{"k":"a\\"b\\\\c\\n"}'


def test_report_pass_iff_all_checks_pass():
    r = VerificationReport(suite="axioms", tolerances={})
    r.checks.append(CheckResult("a", True, 0.0, 10))
    assert r.passed
    r.checks.append(CheckResult("b", False, 1.0, 10))
    assert not r.passed
    assert r.check("b").max_residual == 1.0
    with pytest.raises(KeyError):
        r.check("missing")


def test_report_dict_shape():
    r = VerificationReport(suite="axioms", model="mobius", seed=7, tolerances={"abs_tol": 1e-9})
    r.checks.append(CheckResult("G1", True, 0.5, "exhaustive"))
    d = r.to_dict()
    assert d["suite"] == "axioms"
    assert d["checks"][0]["samples_or_exhaustive"] == "exhaustive"
    assert d["checks"][0]["pass"] is True
    assert "witness" not in d["checks"][0]
    r.checks[0].witness = {"x": [0.1]}
    assert "witness" in r.to_dict()["checks"][0]


def test_canonical_json_deterministic_for_report():
    r = VerificationReport(suite="s", seed=1, tolerances={"abs_tol": 1e-9, "rel_tol": 1e-9})
    r.checks.append(CheckResult("c", True, 1.2345678901234567e-12, 100))
    a = canonical_json(r.to_dict())
    b = canonical_json(r.to_dict())
    assert a == b
