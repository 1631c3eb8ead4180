"""Write the bundled verification scenarios (JSON) under src/revode/data/scenarios."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "revode" / "data" / "scenarios"

SCOPE = (
    "the correspondence between symmetries, the normalizer of the Galois group and the exact "
    "sequence is not verified in general; it is exercised only through the symmetry, descent, "
    "group-order and lift checks of these scenarios"
)

L71_Z = (
    "y''' - 3/z*y'' + 1/12*(77*z^4 - 122*z^2 + 81)/(z^3 - z)^2*y' "
    "- 1/54*(364*z^6 - 665*z^4 + 1030*z^2 - 405)/(z^3 - z)^3*y"
)
L71_V = (
    "y''' - 3*(5*z^2 - 3)/w*y'' + 1/3*(194*z^4 - 230*z^2 + 108)/w^2*y' "
    "- 4/27*(364*z^6 - 665*z^4 + 1030*z^2 - 405)/w^3*y"
)
L71_V_FIXED = L71_V.replace("194*z^4 - 230*z^2 + 108", "176*z^4 - 212*z^2 + 108")
L71_X = (
    "y''' + 1/48*(41*x^2 - 50*x + 45)/(x^2*(x-1)^2)*y' "
    "- 1/432*(364*x^3 - 665*x^2 + 1030*x - 405)/(x^3*(x-1)^3)*y"
)

s71 = {
    "id": "7.1",
    "title": "Third order equation over the curve z^3 - z = w^2",
    "conductor": 120,
    "var": "z",
    "scope": [SCOPE],
    "operators": {
        "Lz": L71_Z,
        "Lv": {"text": L71_V, "modulus": "z^3 - z", "direction": "2*w"},
        "Lv_fixed": {"text": L71_V_FIXED, "modulus": "z^3 - z", "direction": "2*w"},
        "Lx": {"text": L71_X, "var": "x"},
    },
    "checks": [
        {"name": "exponents of the z-form at 0", "type": "exponents", "operator": "Lz", "points": {"0": ["3/2", "2", "5/2"]}},
        {
            "name": "v-form rewritten in d/dz matches the printed z-form",
            "type": "quadext_rewrite",
            "operator": "Lv",
            "target": "Lz",
            "discrepancy": {
                "printed": "1/3*(194*z^4 - 230*z^2 + 108)/w^2 as the v(y) coefficient",
                "note": "the rewrite matches the z-form when that coefficient is 1/3*(176*z^4 - 212*z^2 + 108)/w^2",
            },
        },
        {"name": "v-form with the corrected v(y) coefficient matches the z-form", "type": "quadext_rewrite", "operator": "Lv_fixed", "target": "Lz"},
        {
            "name": "pushforward of v under w -> i*w, z -> -z is -i*v",
            "type": "pushforward",
            "modulus": "z^3 - z",
            "direction": "2*w",
            "z_image": "-z",
            "w_factor": "i",
            "factor": "-i",
        },
        {"name": "descent of the z-form under x = z^2", "type": "descent", "upstairs": "Lz", "map": "z^2", "downstairs": "Lx"},
        {
            "name": "cubic relation among X, Y, Z (leading coefficients 1)",
            "type": "relation_space",
            "operator": "Lz",
            "point": 0,
            "solutions": {"X": "2", "Y": "3/2", "Z": "5/2"},
            "degree": 3,
            "dimension": 1,
            "target": "Y^2*Z + X^2*Y - 1/81*Z^3",
            "discrepancy": {
                "printed": "Y^2*Z + X^2*Y - 1/81*Z^3",
                "note": "with leading coefficients 1 the relation is X^2*Y - Y^2*Z + 1/81*Z^3; the printed cubic holds after Z -> -Z",
            },
        },
        {
            "name": "cubic relation among X, Y, Z up to diagonal rescaling",
            "type": "relation_space",
            "operator": "Lz",
            "point": 0,
            "solutions": {"X": "2", "Y": "3/2", "Z": "5/2"},
            "degree": 3,
            "target": "Y^2*Z + X^2*Y - 1/81*Z^3",
            "rescaling": True,
        },
        {"name": "G27 orders and cubic invariants", "type": "group", "data": "G27", "order": 27, "center": 3, "projective_order": 9, "reynolds": [3, 2], "variables": ["X", "Y", "Z"]},
        {"name": "F36 and the image of G27", "type": "group", "data": "F36", "order": 36, "projective": True},
        {
            "name": "PG27 inside F36",
            "type": "group",
            "data": "G27",
            "order": 27,
            "normal_in": {"data": "F36", "index": 4, "cyclic": True},
        },
        {"name": "exact sequence Z(G27) -> G27 -> F36 -> <sigma> (orders)", "type": "exact_sequence", "orders": [3, 27, 36, 4]},
        {
            "name": "exact sequence Z(G27) -> G27 -> F36 -> <sigma> (groups)",
            "type": "exact_sequence",
            "groups": {"group": "G27", "image": "F36", "projective": True, "symmetry": 4, "cyclic": True},
        },
    ],
}

L72 = "y'' - (z^4 - 3*z^2 - 1)/(1 + z^4) * y"
L72_FIXED = "y'' - (z^4 - 3*z^2 - 1)/(z^4 - 1)^2 * y"
Y1 = {"powers": [["z^4 - 1", "1/4"]], "integrands": [["1", [["z^4 - 1", "-1/2"]]]]}
Y2 = {"powers": [["z^4 - 1", "1/4"]], "integrands": [["-1", [["z^4 - 1", "-1/2"]]]]}
INV72 = {
    "X21": {"poly": "X[1,1]*X[2,2] - X[1,2]*X[2,1]", "value": "-2"},
    "X41": {"poly": "(X[1,1]*X[1,2])^2", "value": "z^4 - 1"},
    "X42": {"poly": "(X[2,1]*X[2,2])^2", "value": "(z^6 - z^4 + 1)^2/(z^4 - 1)^3"},
    "X43": {"poly": "(X[1,1]*X[2,2] + X[2,1]*X[1,2])^2", "value": "4*z^6/(z^4 - 1)"},
    "X44": {"poly": "(X[1,1]*X[1,2])*(X[1,1]*X[2,2] + X[2,1]*X[1,2])", "value": "2*z^3"},
    "X45": {"poly": "(X[2,1]*X[2,2])*(X[1,1]*X[2,2] + X[2,1]*X[1,2])", "value": "2*z^3*(z^6 - z^4 + 1)/(z^4 - 1)^2"},
    "X46": {"poly": "X[1,1]*X[1,2]*X[2,1]*X[2,2]", "value": "(z^6 - z^4 + 1)/(z^4 - 1)"},
}
REL72_OK = [
    "X44*X45 - X46*X43",
    "X46^2 - X41*X42",
    "X41*X42 - 1/16*(X43 - X21^2)^2",
    "X44^2 - X41*X43",
    "X45^2 - X42*X43",
]
REL72_BAD = "X43*X21^2 - (X43 - 2*X46)^2"

s72 = {
    "id": "7.2",
    "title": "Second order equation with Galois group D_inf",
    "conductor": 120,
    "var": "z",
    "scope": [SCOPE, "the exact sequence G -> G_F -> <z -> -z> involves infinite groups and is not checked"],
    "operators": {"L": L72, "L_fixed": L72_FIXED},
    "checks": [
        {
            "name": "invariant table on Y1, Y2 (both quartic-root branches)",
            "type": "invariant_table",
            "point": 0,
            "order": 60,
            "solutions": [Y1, Y2],
            "branches": [0, 1],
            "invariants": INV72,
        },
        {
            "name": "Y1, Y2 solve the printed equation",
            "type": "solves",
            "operator": "L",
            "point": 0,
            "order": 60,
            "solutions": [Y1, Y2],
            "discrepancy": {
                "printed": "(z^4 - 3*z^2 - 1)/(1 + z^4)",
                "note": "Y1 and Y2 solve y'' = (z^4 - 3*z^2 - 1)/(z^4 - 1)^2 * y, which is also the equation the invariant table belongs to",
            },
        },
        {"name": "Y1, Y2 solve the equation with denominator (z^4 - 1)^2", "type": "solves", "operator": "L_fixed", "point": 0, "order": 60, "solutions": [Y1, Y2]},
        {
            "name": "basic witness",
            "type": "witness",
            "witness": "(4*X41 + X21^2)/(2*X44)",
            "value": "z",
            "classification": "basic",
            "unit": "X21",
            "unit_scale": "-1/2",
        },
        {
            "name": "ideal generators",
            "type": "relations",
            "relations": [{"poly": p, "value": "0"} for p in REL72_OK[:3]]
            + [
                {
                    "poly": REL72_BAD,
                    "value": "0",
                    "discrepancy": {
                        "printed": REL72_BAD,
                        "computed": "-4*(z^6 - z^4 + 1)^2/(z^4 - 1)^2",
                        "note": "this generator does not vanish; X43*X21^2 - (X43 - 2*X46)^2 + 4*X46^2 does",
                    },
                }
            ]
            + [{"poly": p, "value": "0"} for p in REL72_OK[3:]]
            + [{"poly": REL72_BAD + " + 4*X46^2", "value": "0"}],
        },
        {
            "name": "G_F generators fix the ideal of the five vanishing generators",
            "type": "fixes_ideal",
            "relations": REL72_OK,
            "elements": {
                "torus diag(lambda, 1/lambda)": "Dinf#0",
                "antidiagonal [[0, 1], [-1, 0]]": "Dinf#1",
                "diag(1, -1)": [["1", "0"], ["0", "-1"]],
                "unipotent [[1, 1], [0, 1]]": [["1", "1"], ["0", "1"]],
            },
            "expect": {"unipotent [[1, 1], [0, 1]]": False},
        },
        {"name": "z -> -z is a symmetry of the printed equation", "type": "symmetry", "operator": "L", "map": "z -> -z", "factor": "1"},
        {"name": "z -> 1/z is not a symmetry", "type": "symmetry", "operator": "L", "map": "z -> 1/z", "accept": False},
        {
            "name": "lift of z -> -z at 0 normalizes D_inf and fixes the ideal",
            "type": "lift",
            "operator": "L_fixed",
            "map": "z -> -z",
            "point": 0,
            "order": 60,
            "min_order": 40,
            "normalizes": "Dinf",
            "relations": REL72_OK,
        },
    ],
}

L73 = (
    "y''' + 3*(3*x^2 - 1)/(x*(x-1)*(x+1))*y'' + (221*x^4 - 206*x^2 + 5)/(12*x^2*(x-1)^2*(x+1)^2)*y' "
    "+ (374*x^6 - 673*x^4 + 254*x^2 + 5)/(54*x^3*(x-1)^3*(x+1)^3)*y"
)
L73_MOD = (
    "y''' + (5*x^4 - 1)/(x*(x^2-1)*(x^2+1))*y'' "
    "+ 1/12*(45*x^8 + 20*x^6 - 130*x^4 + 20*x^2 - 3)/(x^2*(x^2-1)^2*(x^2+1)^2)*y' "
    "- 20/27*(x^4 - 6*x^2 + 1)/(x*(x^2+1)^3*(x^2-1))*y"
)
B73 = "y''' + 1/2*(8*z-5)/(z*(z-1))*y'' + 5/48*(21*z-5)/(z^2*(z-1))*y' - 5/864/((z-1)*z^3)*y"
EXP73 = ["-1/6", "5/6", "-2/3"]

s73 = {
    "id": "7.3",
    "title": "Third order equation with Galois group G54",
    "conductor": 120,
    "var": "x",
    "scope": [SCOPE],
    "operators": {"L": L73, "Lm": L73_MOD, "B": {"text": B73, "var": "z"}},
    "checks": [
        {
            "name": "singular points and exponents",
            "type": "exponents",
            "operator": "L",
            "points": {"0": EXP73, "1": EXP73, "-1": EXP73, "oo": ["11/6", "17/6", "4/3"]},
            "singular": ["-1", "0", "1", "oo"],
        },
        {
            "name": "exponent named for Y at 0",
            "type": "not_exponent",
            "operator": "L",
            "point": "0",
            "value": "-5/6",
            "discrepancy": {"printed": "-5/6", "note": "-5/6 is not an exponent at 0; Y is taken with the tabulated exponent 5/6"},
        },
        {"name": "symmetries of the original equation", "type": "symmetry_group", "operator": "L", "maps": ["x -> x", "x -> -x"]},
        {
            "name": "symmetric product with the first order factor",
            "type": "gauge",
            "operator": "L",
            "g": "2/3*(1/x + 1/(x+1) + 1/(x-1) - x/(x^2+1))",
            "target": "Lm",
        },
        {"name": "exponents of the modified equation", "type": "exponents", "operator": "Lm", "points": {"0": ["0", "1/2", "3/2"], "i": ["-1/3", "2/3", "5/3"], "oo": ["0", "1/2", "3/2"]}},
        {
            "name": "symmetries of the modified equation",
            "type": "symmetry_group",
            "operator": "Lm",
            "maps": ["x -> x", "x -> 1/x", "x -> -x", "x -> -1/x", "x -> (-x+1)/(x+1)", "x -> (x+1)/(x-1)", "x -> (x+1)/(-x+1)", "x -> (x-1)/(x+1)"],
            "structure": "dihedral",
        },
        {"name": "descent to the basic equation", "type": "descent", "upstairs": "Lm", "map": "1/16*(x^2+1)^4/(x^2*(x+1)^2*(x-1)^2)", "downstairs": "B"},
        {
            "name": "cubic relation and semi-invariant",
            "type": "relation_space",
            "operator": "L",
            "point": 0,
            "solutions": {"X": "-1/6", "Y": "5/6", "Z": "-2/3"},
            "degree": 3,
            "dimension": 1,
            "target": "Y*Z^2 + X^3 - 16/81*X*Y^2",
            "rescaling": True,
            "semi_invariant": {"poly": "X*Z^2 + 32/162*X^2*Y + 256/19683*Y^3", "square": "1/(x^3*(x^2-1)^3)"},
        },
        {"name": "G54 orders", "type": "group", "data": "G54", "order": 54, "projective_order": 18, "normal_in": {"data": "F36", "index": 2}},
    ],
}

L74 = "y''' + 21*(x^2-x+1)/(25*x^2*(x-1)^2)*y' + 21*(-2*x^3+3*x^2-5*x+2)/(50*x^3*(x-1)^3)*y"
L74_MOD = (
    "y''' + 2*(2*x-1)/(x*(x-1))*y'' + 1/75*(163*x^2-163*x+13)/(x^2*(x-1)^2)*y' "
    "- 11/1350*(2*x^3-3*x^2-3*x+2)/(x^3*(x-1)^3)*y"
)
B74 = "y''' + 1/2*(7*z-4)/(z*(z-1))*y'' + 1/900*(1389*z-200)/(z^2*(z-1))*y' - 11/5400/(z^2*(z-1))*y"
EXP74 = ["3/5", "1", "7/5"]

s74 = {
    "id": "7.4",
    "title": "Third order equation with Galois group A5",
    "conductor": 120,
    "var": "x",
    "scope": [SCOPE],
    "operators": {"L": L74, "Lm": L74_MOD, "B": {"text": B74, "var": "z"}},
    "checks": [
        {"name": "singular points and exponents", "type": "exponents", "operator": "L", "points": {"0": EXP74, "1": EXP74, "oo": ["-7/5", "-1", "-3/5"]}, "singular": ["0", "1", "oo"]},
        {
            "name": "symmetries of the original equation",
            "type": "symmetry_group",
            "operator": "L",
            "maps": ["x -> x", "x -> 1 - x"],
        },
        {
            "name": "x -> 1 - x is a symmetry",
            "type": "symmetry",
            "operator": "L",
            "map": "x -> 1 - x",
            "factor": "-1",
        },
        {
            "name": "printed symmetry z -> -z + 1 read in the variable x",
            "type": "notation",
            "operator": "L",
            "printed": "z -> -z + 1",
            "map": "x -> 1 - x",
        },
        {
            "name": "symmetric product with the printed first order factor",
            "type": "gauge",
            "operator": "L",
            "g": "2/3*(1/x + 1/(x-1))",
            "target": "Lm",
            "discrepancy": {
                "printed": "2/3*(1/x + 1/(x-1))",
                "note": "the modified equation is the symmetric product with y' + 2/3*(1/x + 1/(x-1))*y; its exponents are those of the original shifted by -2/3",
            },
        },
        {"name": "symmetric product with the opposite factor", "type": "gauge", "operator": "L", "g": "-2/3*(1/x + 1/(x-1))", "target": "Lm"},
        {"name": "exponents of the modified equation", "type": "exponents", "operator": "Lm", "points": {"0": ["-1/15", "1/3", "11/15"], "1": ["-1/15", "1/3", "11/15"], "oo": ["-1/15", "1/3", "11/15"]}},
        {
            "name": "symmetries of the modified equation",
            "type": "symmetry_group",
            "operator": "Lm",
            "maps": ["x -> x", "x -> 1 - x", "x -> 1/x", "x -> (x-1)/x", "x -> 1/(1-x)", "x -> x/(x-1)"],
            "structure": "dihedral",
        },
        {"name": "descent to the basic equation", "type": "descent", "upstairs": "Lm", "map": "4/27*(x^2-x+1)^3/(x^2*(x-1)^2)", "downstairs": "B"},
        {
            "name": "conic relation",
            "type": "relation_space",
            "operator": "L",
            "point": 0,
            "solutions": {"X": "3/5", "Y": "7/5", "Z": "1"},
            "degree": 2,
            "dimension": 1,
            "rank": 3,
        },
        {"name": "A5 order and invariant conic", "type": "group", "data": "A5", "order": 60, "reynolds": [2, 1], "rank": 3, "variables": ["X", "Y", "Z"]},
    ],
}

s23 = {
    "id": "r2.3",
    "title": "The tower Q < Q(i) < Q(i)(zeta(16))",
    "conductor": 120,
    "scope": ["arithmetic analogue of the exact sequence; no differential equation is involved"],
    "checks": [
        {"name": "Galois group of X^8 + 1 over Q", "type": "group", "data": "Gal16", "order": 8, "abelian": True},
        {
            "name": "structure of the Galois group of the tower",
            "type": "group",
            "data": "Gal16",
            "order": 8,
            "dihedral": True,
            "discrepancy": {
                "printed": "dihedral group of order 8",
                "note": "Gal(Q(zeta(16))/Q) is (Z/16)^* = Z/2 x Z/4, abelian and not dihedral; the order bookkeeping is unaffected",
            },
        },
        {"name": "exact sequence 1 -> Z/4 -> Gal -> <i -> -i> -> 1 (orders)", "type": "exact_sequence", "orders": [4, 4, 8, 2], "mode": "linear"},
        {
            "name": "exact sequence 1 -> Z/4 -> Gal -> <i -> -i> -> 1 (groups)",
            "type": "exact_sequence",
            "mode": "linear",
            "groups": {"image": "Gal16", "subgroup": True, "symmetry": 2, "cyclic": True},
        },
    ],
}

E1 = {"integrands": [["2*z", []]]}
E2 = {"powers": [["z", "1"]], "integrands": [["2*z", []]]}
SYS = [["2*z", "0"], ["0", "1/z + 2*z"]]

s317 = {
    "id": "r3.17",
    "title": "Diagonal system with Galois group G_m",
    "conductor": 120,
    "var": "z",
    "scope": [SCOPE],
    "checks": [
        {
            "name": "relations on the fundamental matrix",
            "type": "check_relation",
            "point": 0,
            "order": 40,
            "matrix": [[E1, "0"], [ "0", E2]],
            "relations": [[["z", "X[1,1]"], ["-1", "X[2,2]"]], [["1", "X[1,2]"]], [["1", "X[2,1]"]]],
        },
        {"name": "only z -> -z (and the identity) among the Moebius candidates", "type": "system_symmetry", "system": SYS, "accept": ["z -> -z", "z -> z"]},
        {"name": "lift diag(1, -1) of z -> -z", "type": "lift_verify", "point": 0, "order": 40, "matrix": [[E1, "0"], ["0", E2]], "map": "z -> -z", "C": [["1", "0"], ["0", "-1"]]},
        {"name": "identity matrix is not a lift of z -> -z", "type": "lift_verify", "point": 0, "order": 40, "matrix": [[E1, "0"], ["0", E2]], "map": "z -> -z", "C": [["1", "0"], ["0", "1"]], "accept": False},
    ],
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for s in (s71, s72, s73, s74, s23, s317):
        path = OUT / (s["id"].replace(".", "_") + ".json")
        path.write_text(json.dumps(s, indent=2) + "\n")
        print("wrote", path.name)


if __name__ == "__main__":
    main()
