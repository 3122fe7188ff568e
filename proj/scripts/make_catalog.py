#!/usr/bin/env python3
"""Enumerate reflexive lattice polygons and emit the polytope catalog.

A lattice polygon P (dim 2) is reflexive iff the origin is its unique
interior lattice point, equivalently every edge lies on a line
<n, x> = -1 with n primitive integer (inner normal).  Up to unimodular
equivalence there are exactly 16 such polygons; the script enumerates
them by brute force over primitive vertex candidates, deduplicates with
explicit GL(2,Z) isomorphism tests, and fails loudly if the count is
anything other than 16.

Outputs:
  data/catalog/<name>.json   one document per polytope (P1 included)
  src/catalog_data.cpp       the same documents embedded as C strings

Run from the repository root:  python3 scripts/make_catalog.py
"""

import itertools
import json
import math
import os
import sys
from fractions import Fraction

BOX = 3  # vertex coordinate bound for the search; verified sufficient by the count check


def primitive_vectors(box):
    out = []
    for x in range(-box, box + 1):
        for y in range(-box, box + 1):
            if (x, y) != (0, 0) and math.gcd(abs(x), abs(y)) == 1:
                out.append((x, y))
    return out


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(pts):
    """Monotone chain; returns hull vertices CCW, collinear points dropped."""
    pts = sorted(set(pts))
    if len(pts) < 3:
        return pts
    lo, hi = [], []
    for p in pts:
        while len(lo) >= 2 and cross(lo[-2], lo[-1], p) <= 0:
            lo.pop()
        lo.append(p)
    for p in reversed(pts):
        while len(hi) >= 2 and cross(hi[-2], hi[-1], p) <= 0:
            hi.pop()
        hi.append(p)
    return lo[:-1] + hi[:-1]


def interior_lattice_points(verts):
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    k = len(verts)
    pts = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            inside = True
            for i in range(k):
                if cross(verts[i], verts[(i + 1) % k], (x, y)) <= 0:
                    inside = False
                    break
            if inside:
                pts.append((x, y))
    return pts


def edge_normals(verts):
    """Primitive inner normals; returns None unless every edge has <n,v> = -1."""
    k = len(verts)
    normals = []
    for i in range(k):
        v, w = verts[i], verts[(i + 1) % k]
        d = (w[0] - v[0], w[1] - v[1])
        n = (d[1], -d[0])  # points to the interior for CCW order... check sign below
        g = math.gcd(abs(n[0]), abs(n[1]))
        n = (n[0] // g, n[1] // g)
        if n[0] * v[0] + n[1] * v[1] > 0:
            n = (-n[0], -n[1])
        if n[0] * v[0] + n[1] * v[1] != -1:
            return None
        normals.append(n)
    return normals


def enumerate_reflexive():
    prims = primitive_vectors(BOX)
    found = []
    for k in range(3, 7):
        for combo in itertools.combinations(prims, k):
            hull = convex_hull(combo)
            if len(hull) != k or set(hull) != set(combo):
                continue  # some candidate is not a vertex; the polygon shows up for its true vertex set
            if interior_lattice_points(hull) != [(0, 0)]:
                continue
            if edge_normals(hull) is None:
                continue
            found.append(tuple(hull))
    return found


def unimodular_equivalent(A, B):
    """Try to map vertex cycle A onto B by U in GL(2,Z) (reflections included)."""
    if len(A) != len(B):
        return False
    a0, a1 = A[0], A[1]
    det = a0[0] * a1[1] - a0[1] * a1[0]
    assert det != 0  # adjacent vertices with 0 interior are independent
    k = len(B)
    for orient in (1, -1):
        Bo = B if orient == 1 else tuple(reversed(B))
        for s in range(k):
            b0, b1 = Bo[s], Bo[(s + 1) % k]
            # solve U [a0 a1] = [b0 b1] over Q, keep only integer unimodular U
            num = [
                b0[0] * a1[1] - b1[0] * a0[1],
                -b0[0] * a1[0] + b1[0] * a0[0],
                b0[1] * a1[1] - b1[1] * a0[1],
                -b0[1] * a1[0] + b1[1] * a0[0],
            ]
            if any(n % det for n in num):
                continue
            U = [n // det for n in num]
            if abs(U[0] * U[3] - U[1] * U[2]) != 1:
                continue
            img = set((U[0] * v[0] + U[1] * v[1], U[2] * v[0] + U[3] * v[1]) for v in A)
            if img == set(B):
                return True
    return False


def canonical_rotation(verts):
    """Rotate the CCW cycle to start at the lexicographically smallest vertex."""
    i = verts.index(min(verts))
    return tuple(verts[i:] + verts[:i])


def boundary_points(verts):
    k = len(verts)
    b = 0
    for i in range(k):
        v, w = verts[i], verts[(i + 1) % k]
        b += math.gcd(abs(w[0] - v[0]), abs(w[1] - v[1]))
    return b


def is_smooth(verts):
    normals = edge_normals(verts)
    k = len(normals)
    for i in range(k):
        n, m = normals[i], normals[(i + 1) % k]
        if abs(n[0] * m[1] - n[1] * m[0]) != 1:
            return False
    return True


def area2(verts):
    s = 0
    k = len(verts)
    for i in range(k):
        v, w = verts[i], verts[(i + 1) % k]
        s += v[0] * w[1] - v[1] * w[0]
    return abs(s)  # twice the area, an integer


def centrally_symmetric(verts):
    vs = set(verts)
    return all((-v[0], -v[1]) in vs for v in vs)


# hand-pinned frames for the named polytopes (CCW, standard moment polygons)
PINNED = {
    "P2": ((-1, -1), (2, -1), (-1, 2)),
    "P1xP1": ((-1, -1), (1, -1), (1, 1), (-1, 1)),
    "Bl1P2": ((-1, 0), (0, -1), (2, -1), (-1, 2)),
    "Bl2P2": ((-1, 0), (0, -1), (1, -1), (1, 0), (-1, 2)),
    "Bl3P2": ((-1, 0), (0, -1), (1, -1), (1, 0), (0, 1), (-1, 1)),
    "P112": ((-1, -1), (3, -1), (-1, 1)),
    "P123": ((-1, -1), (2, -1), (-1, 1)),
}


def reduce_frame(verts):
    """Pick a small deterministic representative of the GL(2,Z) class."""
    best = None
    for a in range(-4, 5):
        for b in range(-4, 5):
            for c in range(-4, 5):
                for d in range(-4, 5):
                    if a * d - b * c not in (1, -1):
                        continue
                    img = [(a * v[0] + b * v[1], c * v[0] + d * v[1]) for v in verts]
                    hull = convex_hull(img)
                    key = (
                        max(max(abs(p[0]), abs(p[1])) for p in hull),
                        sum(p[0] * p[0] + p[1] * p[1] for p in hull),
                        canonical_rotation(hull),
                    )
                    if best is None or key < best:
                        best = key
    return best[2]


def pick_names(classes):
    """Assign stable names: the five smooth del Pezzo polygons and the two
    weighted projective planes get their usual names and pinned frames, the
    rest are numbered deterministically and lattice-reduced."""
    out = {}  # name -> vertex cycle
    rest = []
    for c in classes:
        name = None
        if is_smooth(c):
            k = len(c)
            if k == 3:
                name = "P2"
            elif k == 4:
                name = "P1xP1" if centrally_symmetric(c) else "Bl1P2"
            elif k == 5:
                name = "Bl2P2"
            elif k == 6:
                name = "Bl3P2"
            else:
                raise AssertionError("smooth reflexive polygon with %d vertices" % k)
        else:
            for cand in ("P112", "P123"):
                if unimodular_equivalent(c, canonical_rotation(convex_hull(PINNED[cand]))):
                    name = cand
                    break
        if name is None:
            rest.append(c)
        else:
            pinned = canonical_rotation(convex_hull(PINNED[name]))
            assert unimodular_equivalent(c, pinned), name
            out[name] = pinned
    rest.sort(key=lambda c: (-area2(c), len(c), c))
    for i, c in enumerate(rest):
        out["R%02d" % (i + 1)] = canonical_rotation(convex_hull(reduce_frame(c)))
    for name, verts in out.items():
        assert interior_lattice_points(list(verts)) == [(0, 0)], name
        assert edge_normals(list(verts)) is not None, name
    return out


def doc_for(name, verts):
    return {
        "name": name,
        "dimension": 2,
        "vertices": [[str(Fraction(v[0])), str(Fraction(v[1]))] for v in verts],
        "rays": [list(n) for n in edge_normals(verts)],
    }


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    raw = enumerate_reflexive()
    classes = []
    for poly in raw:
        poly = canonical_rotation(list(poly))
        if not any(unimodular_equivalent(poly, c) for c in classes):
            classes.append(poly)
    if len(classes) != 16:
        print("expected 16 reflexive polygon classes, found %d" % len(classes))
        sys.exit(1)

    # consistency: boundary point counts must pair up b + b* = 12 under duality
    bs = sorted(boundary_points(c) for c in classes)
    assert sorted(12 - b for b in bs) == bs, "duality check failed: %r" % bs

    names = pick_names(classes)
    docs = [{"name": "P1", "dimension": 1, "vertices": [["-1"], ["1"]], "rays": [[1], [-1]]}]
    order = sorted(names, key=lambda n: (-area2(names[n]), len(names[n]), names[n]))
    for n in order:
        docs.append(doc_for(n, list(names[n])))

    outdir = os.path.join(root, "data", "catalog")
    os.makedirs(outdir, exist_ok=True)
    for d in docs:
        with open(os.path.join(outdir, d["name"] + ".json"), "w") as f:
            json.dump(d, f, indent=2)
            f.write("\n")

    # embedded copy so the binaries work without the data directory
    lines = [
        "// Generated by scripts/make_catalog.py; do not edit by hand.",
        '#include "torific/catalog_data.hpp"',
        "",
        "namespace torific {",
        "",
        "const char* const kCatalogDocs[] = {",
    ]
    for d in docs:
        s = json.dumps(d, separators=(",", ":"))
        lines.append("    R\"json(%s)json\"," % s)
    lines.append("};")
    lines.append("const int kCatalogDocCount = %d;" % len(docs))
    lines.append("")
    lines.append("}  // namespace torific")
    lines.append("")
    with open(os.path.join(root, "src", "catalog_data.cpp"), "w") as f:
        f.write("\n".join(lines))

    for d in docs:
        if d["dimension"] == 1:
            print("%-8s dim 1" % d["name"])
            continue
        verts = [(int(Fraction(v[0])), int(Fraction(v[1]))) for v in d["vertices"]]
        print(
            "%-8s deg %d  #v %d  smooth %s  b %d"
            % (d["name"], area2(verts), len(verts), is_smooth(verts), boundary_points(verts))
        )
    print("wrote %d documents to %s" % (len(docs), outdir))


if __name__ == "__main__":
    main()
