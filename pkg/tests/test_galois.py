import warnings

import pytest
from gmpy2 import mpq

from revode import galois
from revode.funcfield import MoebiusMap, RatFunc, RationalMap
from revode.groups import group_from_data, mat_id
from revode.parser import parse_expression
from revode.polys import MPoly
from revode.scalars import conductor
from revode.scenario import Context, load_scenario
from revode.series import DualFirstIntegral

z = RatFunc.x()


def scenario_op(name, ref):
    data = load_scenario(name)
    with conductor(data.get("conductor", 120)):
        return Context(data, 40).op(ref)


def m(text, var="x"):
    return parse_expression(text, "map", var=var)


@pytest.fixture(scope="module")
def ops():
    return {
        "cubic-original": scenario_op("7.3", "L"),
        "cubic-modified": scenario_op("7.3", "Lm"),
        "octa-modified": scenario_op("7.4", "Lm"),
        "octa-original": scenario_op("7.4", "L"),
        "quartic": scenario_op("7.2", "L_fixed"),
    }


def test_accepted_symmetries_form_a_group(ops):
    for L in ops.values():
        maps = [r.map for r in galois.symmetry_group(L)]
        assert MoebiusMap.identity() in maps
        assert galois.group_closed(maps)


def test_factor_cocycle(ops):
    for L in ops.values():
        recs = {r.map: r.factor for r in galois.symmetry_group(L)}
        for s, fs in recs.items():
            for t, ft in recs.items():
                st = s @ t
                assert recs[st] == fs.compose(t.as_ratfunc()) * ft


def test_dihedral_symmetry_groups(ops):
    assert len(galois.symmetry_group(ops["cubic-modified"])) == 8
    assert galois.is_dihedral_group([r.map for r in galois.symmetry_group(ops["cubic-modified"])])
    assert len(galois.symmetry_group(ops["octa-modified"])) == 6
    assert galois.is_dihedral_group([r.map for r in galois.symmetry_group(ops["octa-modified"])])


def test_descent_is_stable_under_symmetries(ops):
    for key, name in (("cubic-modified", "7.3"), ("octa-modified", "7.4")):
        up = ops[key]
        down = scenario_op(name, "B")
        chk = next(c for c in load_scenario(name)["checks"] if c["type"] == "descent")
        r = parse_expression(chk["map"], "ratfunc", var="x")
        assert galois.verify_descent(up, RationalMap(r), down).verdict
        for rec in galois.symmetry_group(up):
            rs = RationalMap(r.compose(rec.map.as_ratfunc()))
            assert galois.verify_descent(up, rs, down).verdict


def test_descent_to_itself_has_zero_gauge(ops):
    L = ops["quartic"]
    cert = galois.verify_descent(L, MoebiusMap.identity(), L)
    assert cert.verdict and cert.gauge == 0


def test_candidates_for_distinct_local_data():
    L = parse_expression("y'' + (1/z + 2/(z - 1) + 3/(z + 1))*y' + 0*y + y/z^5", "operator")
    recs = galois.symmetry_group(L)
    assert [r.map for r in recs] == [MoebiusMap.identity()]


def test_translation_is_not_a_symmetry(ops):
    assert galois.verify_symmetry(ops["quartic"], MoebiusMap(1, 1, 0, 1)) is None
    assert galois.verify_symmetry(ops["quartic"], MoebiusMap(-1, 0, 0, 1)) is not None


def test_few_singular_points_warn():
    L = parse_expression("y'' - y/z", "operator")
    from revode.diffop import singular_points

    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        galois.moebius_candidates(singular_points(L))
    assert any(issubclass(x.category, galois.TooFewPoints) for x in w)


def test_identity_lift(ops):
    L = ops["quartic"]
    rec = galois.verify_symmetry(L, MoebiusMap.identity())
    rec = galois.compute_lift(L, rec, 0, 30)
    C, F = rec.lift
    assert [list(r) for r in C] == [[1, 0], [0, 1]]
    assert F == [[RatFunc(1), RatFunc(0)], [RatFunc(0), RatFunc(1)]]
    G = group_from_data("G27")[0]
    ident = galois.SymmetryRecord(MoebiusMap.identity(), RatFunc(1), (mat_id(3), None), "computed")
    assert galois.lift_normalizes(ident, G)


def test_reflection_lift_on_quartic(ops):
    L = ops["quartic"]
    rec = galois.verify_symmetry(L, MoebiusMap(-1, 0, 0, 1))
    rec = galois.compute_lift(L, rec, 0, 60)
    C, F = rec.lift
    assert [list(r) for r in C] == [[1, 0], [0, -1]]
    assert F == [[RatFunc(1), RatFunc(0)], [RatFunc(0), RatFunc(-1)]]
    gens = group_from_data("Dinf")[1]["generators"]
    assert galois.lift_normalizes(rec, gens)


def test_resonant_fixed_point_is_reported(ops):
    L = ops["cubic-modified"]
    rec = galois.verify_symmetry(L, m("x -> 1/x"))
    with pytest.raises(galois.ResonantFixedPoint):
        galois.compute_lift(L, rec, 1, 20)


def test_missing_lift():
    rec = galois.SymmetryRecord(MoebiusMap.identity(), RatFunc(1))
    with pytest.raises(galois.MissingLift):
        galois.lift_normalizes(rec, group_from_data("G27")[0])


def _dfi(name, value, degree):
    return DualFirstIntegral(MPoly.var((name,), name), RatFunc(value) if not isinstance(value, RatFunc) else value, degree)


def test_single_integral_presentation():
    kp = galois.knabla_presentation({"P": _dfi("P", z**2 + 1, 2)})
    assert kp.classification == "undetermined"
    assert len(kp.ratio_generators) == 1
    assert kp.ratio_generators[0][0] == 1


def test_ratio_generators_balance_degrees():
    ints = {"A": _dfi("A", z, 2), "B": _dfi("B", z + 1, 3), "C": _dfi("C", RatFunc(mpq(-2)), 4)}
    kp = galois.knabla_presentation(ints)
    for value, (a, b, ma, mb) in kp.ratio_generators:
        assert ma * ints[a].degree == mb * ints[b].degree
        assert value == ints[a].value ** ma / ints[b].value ** mb
    assert kp.unit_integral == ("C", mpq(-1, 2))
    assert kp.classification == "standard-candidate"


def test_witness_degree_mismatch():
    ints = {"A": _dfi("A", z, 2), "B": _dfi("B", z + 1, 3)}
    with pytest.raises(galois.DegreeMismatch):
        galois.knabla_presentation(ints, witness="A/B")
