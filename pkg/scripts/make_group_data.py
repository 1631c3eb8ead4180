"""Regenerate the curated group files under src/revode/data/groups.

The matrices are classical; the acceptance tests re-derive every order and
invariant count from them, so nothing here is trusted.
"""

import json
from pathlib import Path

from revode.polys import MPoly
from revode.scalars import format_scalar, inv, zeta

OUT = Path(__file__).resolve().parents[1] / "src" / "revode" / "data" / "groups"


def dump(name, generators, provenance, conductor=120, projective=False, **extra):
    rows = [[[format_scalar(x) if not isinstance(x, str) else x for x in r] for r in g] for g in generators]
    data = {
        "name": name,
        "conductor": conductor,
        "dimension": len(generators[0]),
        "projective": projective,
        "generators": rows,
        "provenance": provenance,
    }
    data.update(extra)
    (OUT / f"{name}.json").write_text(json.dumps(data, indent=2) + "\n")


def sym2(g):
    """Matrix of g on quadratic forms in (u, v), basis (u^2, v^2, uv), row-vector action."""
    V = ("u", "v")
    u, v = MPoly.gens(V)
    up = u * g[0][0] + v * g[1][0]
    vp = u * g[0][1] + v * g[1][1]
    images = [up * up, vp * vp, up * vp]
    basis = [(2, 0), (0, 2), (1, 1)]
    return [[img.coefficient(b) for img in images] for b in basis]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    w = zeta(3)
    one, zero = 1, 0
    diag = [[one, zero, zero], [zero, w, zero], [zero, zero, w * w]]
    perm = [[zero, one, zero], [zero, zero, one], [one, zero, zero]]
    dump(
        "G27",
        [diag, perm],
        "Heisenberg group of order 27 in SL3: diagonal clock matrix diag(1, w, w^2) and the cyclic shift, w a primitive cube root of unity.",
    )
    refl = [[-1, 0, 0], [0, 0, -1], [0, -1, 0]]
    dump(
        "G54",
        [diag, perm, refl],
        "G27 extended by minus the transposition of the last two coordinates (determinant 1); projective image of order 18.",
    )
    s3 = 2 * w + 1  # square root of -3
    fourier = [[w ** (j * k) * inv(s3) for k in range(3)] for j in range(3)]
    dump(
        "F36",
        [diag, perm, fourier],
        "Lift of F36: G27 together with the finite Fourier matrix (1/sqrt(-3)) [w^(jk)], which normalizes G27 and has projective order 4.",
        projective=True,
    )
    e = zeta(5)
    r5 = e + e**4 - e**2 - e**3
    S = [[e**3, 0], [0, e**2]]
    T = [[-(e - e**4) * inv(r5), (e**2 - e**3) * inv(r5)], [(e**2 - e**3) * inv(r5), (e - e**4) * inv(r5)]]
    dump(
        "A5",
        [sym2(S), sym2(T)],
        "Rotational icosahedral group: symmetric square of Klein's binary icosahedral generators diag(e^3, e^2) and (1/sqrt5)[[-(e-e^4), e^2-e^3], [e^2-e^3, e-e^4]], e = zeta(5); basis (u^2, v^2, uv) preserves the conic XY - Z^2.",
    )
    dump(
        "Dinf",
        [[["lambda", "0"], ["0", "1/lambda"]], [["0", "1"], ["-1", "0"]]],
        "Infinite dihedral group in SL2: the diagonal torus diag(lambda, 1/lambda) and the anti-diagonal involution.",
    )
    # Galois group of X^8 + 1 over Q acting on its roots zeta(16)^k, k odd.
    roots = [1, 3, 5, 7, 9, 11, 13, 15]

    def perm_of(a):
        return [[1 if (roots[i] * a) % 16 == roots[j] else 0 for j in range(8)] for i in range(8)]

    dump(
        "Gal16",
        [perm_of(3), perm_of(5), perm_of(15)],
        "Galois group of X^8 + 1 over Q as permutations of the roots zeta(16)^k (k odd); k -> a*k for a in (Z/16)^*.",
        subgroup=[perm_of(5)],
        subgroup_note="stabilizer of i = zeta(16)^4: the automorphisms zeta(16) -> zeta(16)^(1+4j)",
    )


if __name__ == "__main__":
    main()
