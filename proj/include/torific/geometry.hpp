#pragma once
// Simplex meshes in dimension 1 and 2 with half-space clipping and exact
// monomial moments.  Templated over the scalar so the same code runs on
// rationals (lattice data, frozen oracles) and on doubles (hot loops).

#include <vector>

#include "torific/common.hpp"

namespace torific {

// Half-space {x : c0 + <g, x> >= 0}.
template <class S>
struct HalfSpaceT {
    S c0{};
    PointT<S> g{};
    S value(const PointT<S>& x) const { return c0 + g[0] * x[0] + g[1] * x[1]; }
};
using HalfSpace = HalfSpaceT<double>;

template <class S>
struct SimplexT {
    int dim = 2;                     // 1: segment in v[0..1], 2: triangle in v[0..2]
    std::array<PointT<S>, 3> v{};
};

template <class S>
struct MeshT {
    int dim = 2;
    std::vector<SimplexT<S>> cells;
};
using Mesh = MeshT<double>;

template <class S>
S simplex_volume(const SimplexT<S>& s) {
    if (s.dim == 1) {
        S d = s.v[1][0] - s.v[0][0];
        return d < 0 ? S(-d) : d;
    }
    S c = (s.v[1][0] - s.v[0][0]) * (s.v[2][1] - s.v[0][1]) -
          (s.v[1][1] - s.v[0][1]) * (s.v[2][0] - s.v[0][0]);
    if (c < 0) c = -c;
    return c / 2;
}

template <class S>
S mesh_volume(const MeshT<S>& m) {
    S v{};
    for (const auto& s : m.cells) v += simplex_volume(s);
    return v;
}

// Moments of order <= 2 (closed triangle/segment formulas; exact in S).
template <class S>
struct Moments2T {
    S m0{};          // integral of 1
    PointT<S> m1{};  // integral of x_i
    S xx{}, xy{}, yy{};

    void add(const SimplexT<S>& s) {
        S vol = simplex_volume(s);
        if (vol == 0) return;
        m0 += vol;
        if (s.dim == 1) {
            const S a = s.v[0][0], b = s.v[1][0];
            m1[0] += vol * (a + b) / 2;
            xx += vol * (a * a + a * b + b * b) / 3;
            return;
        }
        PointT<S> sum{s.v[0][0] + s.v[1][0] + s.v[2][0], s.v[0][1] + s.v[1][1] + s.v[2][1]};
        m1[0] += vol * sum[0] / 3;
        m1[1] += vol * sum[1] / 3;
        S sxx{}, sxy{}, syy{};
        for (int k = 0; k < 3; ++k) {
            sxx += s.v[k][0] * s.v[k][0];
            sxy += s.v[k][0] * s.v[k][1];
            syy += s.v[k][1] * s.v[k][1];
        }
        xx += vol * (sxx + sum[0] * sum[0]) / 12;
        xy += vol * (sxy + sum[0] * sum[1]) / 12;
        yy += vol * (syy + sum[1] * sum[1]) / 12;
    }

    // integral of an affine function over the measured region
    S int_affine(const HalfSpaceT<S>& a) const {
        return a.c0 * m0 + a.g[0] * m1[0] + a.g[1] * m1[1];
    }
    // integral of the product of two affine functions
    S int_affine_product(const HalfSpaceT<S>& a, const HalfSpaceT<S>& b) const {
        S r = a.c0 * b.c0 * m0;
        r += (a.c0 * b.g[0] + b.c0 * a.g[0]) * m1[0];
        r += (a.c0 * b.g[1] + b.c0 * a.g[1]) * m1[1];
        r += a.g[0] * b.g[0] * xx + a.g[1] * b.g[1] * yy;
        r += (a.g[0] * b.g[1] + a.g[1] * b.g[0]) * xy;
        return r;
    }
};
using Moments2 = Moments2T<double>;

template <class S>
Moments2T<S> mesh_moments2(const MeshT<S>& m) {
    Moments2T<S> acc;
    for (const auto& s : m.cells) acc.add(s);
    return acc;
}

// Clip one simplex against {a >= 0}.  Writes at most 2 simplices covering
// the kept region (boundary points included on both sides of a ties split,
// which is harmless for integration).  Returns the piece count.
template <class S>
int clip_simplex(const SimplexT<S>& s, const HalfSpaceT<S>& a, SimplexT<S> out[2]) {
    if (s.dim == 1) {
        S f0 = a.value(s.v[0]), f1 = a.value(s.v[1]);
        if (f0 >= 0 && f1 >= 0) {
            out[0] = s;
            return 1;
        }
        if (f0 < 0 && f1 < 0) return 0;
        // one endpoint kept; cut at the zero of a on the segment
        S t = f0 / (f0 - f1);
        PointT<S> cut{s.v[0][0] + t * (s.v[1][0] - s.v[0][0]), S{}};
        out[0] = s;
        if (f0 >= 0)
            out[0].v[1] = cut;
        else
            out[0].v[0] = cut;
        return 1;
    }

    S f[3];
    int npos = 0;
    for (int k = 0; k < 3; ++k) {
        f[k] = a.value(s.v[k]);
        if (f[k] >= 0) ++npos;
    }
    if (npos == 3) {
        out[0] = s;
        return 1;
    }
    if (npos == 0) return 0;

    // walk the edges, emit kept vertices and crossing points (<= 4 total)
    PointT<S> poly[4];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
        int j = (k + 1) % 3;
        if (f[k] >= 0) poly[n++] = s.v[k];
        if ((f[k] > 0 && f[j] < 0) || (f[k] < 0 && f[j] > 0)) {
            S t = f[k] / (f[k] - f[j]);
            poly[n++] = {s.v[k][0] + t * (s.v[j][0] - s.v[k][0]),
                         s.v[k][1] + t * (s.v[j][1] - s.v[k][1])};
        }
    }
    int cnt = 0;
    for (int k = 1; k + 1 < n; ++k) {
        out[cnt].dim = 2;
        out[cnt].v = {poly[0], poly[k], poly[k + 1]};
        ++cnt;
    }
    return cnt;
}

template <class S>
MeshT<S> clip_mesh(const MeshT<S>& m, const HalfSpaceT<S>& a) {
    MeshT<S> out;
    out.dim = m.dim;
    out.cells.reserve(m.cells.size());
    SimplexT<S> buf[2];
    for (const auto& s : m.cells) {
        int n = clip_simplex(s, a, buf);
        for (int k = 0; k < n; ++k) out.cells.push_back(buf[k]);
    }
    return out;
}

// Exact integral of x^ax * y^ay over a simplex via barycentric expansion:
// with x = sum_k v_k l_k on the standard simplex,
//   int_T l^b = n! vol(T) * prod(b_k!) / (|b| + n)! .
// Supports total degree <= 8 which covers every in-tree use (products of a
// degree-4 polynomial with an affine factor).
template <class S>
S simplex_monomial(const SimplexT<S>& s, int ax, int ay) {
    constexpr int kMaxDeg = 8;
    if (ax < 0 || ay < 0 || ax + ay > kMaxDeg)
        throw UsageError("monomial degree out of range for simplex integration");
    static const long long kFact[] = {1,    1,     2,      6,       24,       120,
                                      720,  5040,  40320,  362880,  3628800};
    const int nv = s.dim + 1;
    const int deg = ax + ay;
    // dense barycentric coefficients, index b0*(deg+1)^... use base (deg+1)
    const int base = deg + 1;
    std::vector<S> cur(1, S(1)), next;
    int curdeg = 0;
    auto idx = [&](int b0, int b1) { return b0 * base + b1; };  // b2 implied
    auto expand = [&](int coord) {
        next.assign((curdeg + 2) * base, S{});
        for (int b0 = 0; b0 <= curdeg; ++b0)
            for (int b1 = 0; b0 + b1 <= curdeg; ++b1) {
                const S& c = cur[idx(b0, b1)];
                if (c == 0) continue;
                for (int k = 0; k < nv; ++k) {
                    S vc = s.v[k][coord];
                    if (vc == 0) continue;
                    int n0 = b0 + (k == 0), n1 = b1 + (k == 1);
                    next[idx(n0, n1)] += c * vc;
                }
            }
        cur.swap(next);
        ++curdeg;
    };
    cur.assign(base * (deg + 1) + base, S{});
    cur[idx(0, 0)] = S(1);
    for (int r = 0; r < ax; ++r) expand(0);
    for (int r = 0; r < ay; ++r) expand(1);

    const S scale = simplex_volume(s) * S(kFact[s.dim]);
    S total{};
    for (int b0 = 0; b0 <= deg; ++b0)
        for (int b1 = 0; b0 + b1 <= deg; ++b1) {
            const S& c = cur[idx(b0, b1)];
            if (c == 0) continue;
            int b2 = deg - b0 - b1;  // remaining power sits on the last vertex
            if (s.dim == 1 && b2 != 0) continue;
            long long num = kFact[b0] * kFact[b1];
            if (s.dim == 2) num *= kFact[b2];
            total += c * S(num) / S(kFact[deg + s.dim]);
        }
    return total * scale;
}

template <class S>
S mesh_monomial(const MeshT<S>& m, int ax, int ay) {
    S total{};
    for (const auto& s : m.cells) total += simplex_monomial(s, ax, ay);
    return total;
}

}  // namespace torific
