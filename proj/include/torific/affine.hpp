#pragma once
// Affine and piecewise-linear convex functions on a polytope.  A PL convex
// function is the max of finitely many affine pieces; integration happens by
// splitting the domain into activity regions where one piece is the max.

#include <algorithm>
#include <vector>

#include "torific/common.hpp"
#include "torific/geometry.hpp"

namespace torific {

struct AffineFn {
    int dim = 2;
    double c0 = 0.0;
    Vec g{0.0, 0.0};

    double operator()(const Vec& x) const { return c0 + g[0] * x[0] + g[1] * x[1]; }
    HalfSpace half() const { return HalfSpace{c0, g}; }

    AffineFn operator-(const AffineFn& o) const { return {dim, c0 - o.c0, {g[0] - o.g[0], g[1] - o.g[1]}}; }
    AffineFn operator+(const AffineFn& o) const { return {dim, c0 + o.c0, {g[0] + o.g[0], g[1] + o.g[1]}}; }
    AffineFn operator*(double s) const { return {dim, c0 * s, {g[0] * s, g[1] * s}}; }
};

inline AffineFn affine_constant(int dim, double c) { return {dim, c, {0.0, 0.0}}; }

struct PLConvexFn {
    int dim = 2;
    std::vector<AffineFn> pieces;

    double operator()(const Vec& x) const {
        double best = pieces.at(0)(x);
        for (size_t k = 1; k < pieces.size(); ++k) best = std::max(best, pieces[k](x));
        return best;
    }
    // index of the active (maximal) piece at x, lowest index on ties
    int active_piece(const Vec& x) const {
        int arg = 0;
        double best = pieces.at(0)(x);
        for (size_t k = 1; k < pieces.size(); ++k) {
            double v = pieces[k](x);
            if (v > best) {
                best = v;
                arg = static_cast<int>(k);
            }
        }
        return arg;
    }
};

inline PLConvexFn to_pl(const AffineFn& a) { return PLConvexFn{a.dim, {a}}; }

// max(a, 0): "simple" test configurations
struct SimpleConvexFn {
    AffineFn a;
    PLConvexFn pl() const { return PLConvexFn{a.dim, {a, affine_constant(a.dim, 0.0)}}; }
};

// Activity decomposition: region k is the part of the base mesh where piece k
// attains the max.  Ties land in every achieving region; the overlaps have
// measure zero, so integrals are unaffected.
inline std::vector<Mesh> activity_regions(const Mesh& base, const std::vector<AffineFn>& pieces) {
    std::vector<Mesh> regions;
    regions.reserve(pieces.size());
    for (size_t i = 0; i < pieces.size(); ++i) {
        Mesh r = base;
        for (size_t j = 0; j < pieces.size() && !r.cells.empty(); ++j) {
            if (j == i) continue;
            r = clip_mesh(r, (pieces[i] - pieces[j]).half());
        }
        regions.push_back(std::move(r));
    }
    return regions;
}

}  // namespace torific
