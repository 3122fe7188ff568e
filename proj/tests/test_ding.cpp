#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "torific/ding.hpp"
#include "torific/grid.hpp"
#include "torific/polytope.hpp"

using namespace torific;

namespace {

PLConvexFn pl1(int dim, const AffineFn& a) { return PLConvexFn{dim, {a}}; }

PLConvexFn abs_x() {
    // |x| on a 1d polytope
    return PLConvexFn{1, {AffineFn{1, 0.0, {1.0, 0.0}}, AffineFn{1, 0.0, {-1.0, 0.0}}}};
}

}  // namespace

TEST_CASE("exact integrals of PL functions on the segment") {
    LatticePolytope P = catalog_load("P1");  // [-1, 1]
    REQUIRE(P.dim() == 1);
    CHECK(P.volume() == doctest::Approx(2.0).epsilon(1e-14));

    // int |x| = 1, int max(x,0) = 1/2
    CHECK(int_pl(P, abs_x()) == doctest::Approx(1.0).epsilon(1e-13));
    PLConvexFn hinge{1, {AffineFn{1, 0.0, {1.0, 0.0}}, AffineFn{1, 0.0, {0.0, 0.0}}}};
    CHECK(int_pl(P, hinge) == doctest::Approx(0.5).epsilon(1e-13));

    // adding a constant adds c * V
    PLConvexFn shifted = abs_x();
    for (auto& p : shifted.pieces) p.c0 += 0.75;
    CHECK(int_pl(P, shifted) == doctest::Approx(1.0 + 0.75 * 2.0).epsilon(1e-13));

    // int |x| * |x| = int x^2 = 2/3
    CHECK(int_pl_product(P, abs_x(), abs_x()) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

    // int |x| * (1 + x) = 1
    Polynomial g = Polynomial::affine(1, 1.0, Vec{1.0, 0.0});
    CHECK(int_pl_poly(P, abs_x(), g) == doctest::Approx(1.0).epsilon(1e-13));

    CHECK(pl_min(P, abs_x()) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pl_min(P, hinge) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("non-Archimedean Ding invariant on hand-computable inputs") {
    LatticePolytope P = catalog_load("P1");

    // D^NA(|x|) = -|0| + (1/2) int |x| = 1/2
    CHECK(dna(P, abs_x()) == doctest::Approx(0.5).epsilon(1e-13));
    // D^NA(max(x,0)) = (1/2)(1/2) = 1/4
    PLConvexFn hinge{1, {AffineFn{1, 0.0, {1.0, 0.0}}, AffineFn{1, 0.0, {0.0, 0.0}}}};
    CHECK(dna(P, hinge) == doctest::Approx(0.25).epsilon(1e-13));
    // constants are invisible to D^NA
    PLConvexFn c = pl1(1, affine_constant(1, 3.25));
    CHECK(dna(P, c) == doctest::Approx(0.0).epsilon(1e-14));

    // modified invariant with density g = 1 + x: int |x| (1+x) = 1
    Polynomial g = Polynomial::affine(1, 1.0, Vec{1.0, 0.0});
    CHECK(dna_modified(P, abs_x(), g) == doctest::Approx(0.5).epsilon(1e-13));
    PLConvexFn gpl = pl1(1, AffineFn{1, 1.0, {1.0, 0.0}});
    CHECK(dna_modified(P, abs_x(), gpl) == doctest::Approx(0.5).epsilon(1e-13));

    // quadrature path agrees with the exact one on a grid sampling of g
    Grid grid(P, 1.0 / 128);
    std::vector<double> gv(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) gv[k] = 1.0 + grid.points()[k][0];
    double q = dna_modified_quad(P, abs_x(), grid.points(), grid.weights(), gv);
    CHECK(q == doctest::Approx(0.5).epsilon(5e-4));
}

TEST_CASE("norm conventions") {
    LatticePolytope P = catalog_load("P1");
    PLConvexFn x = pl1(1, AffineFn{1, 0.0, {1.0, 0.0}});

    // variance of x on [-1,1] is 1/3; raw L2 norm squared is 2/3
    CHECK(tc_norm_sq(P, x) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(l2_norm_sq(P, x) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

    // variance ignores constants
    PLConvexFn xs = pl1(1, AffineFn{1, -2.0, {1.0, 0.0}});
    CHECK(tc_norm_sq(P, xs) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("Futaki-Mabuchi pairing on product geometry") {
    LatticePolytope S = catalog_load("P1");
    CHECK(fm_inner(S, Vec{1.0, 0.0}, Vec{1.0, 0.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    LatticePolytope Q = catalog_load("P1xP1");
    // coordinates decouple on the square: diagonal 1/3, off-diagonal 0
    CHECK(fm_inner(Q, Vec{1.0, 0.0}, Vec{1.0, 0.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(fm_inner(Q, Vec{0.0, 1.0}, Vec{0.0, 1.0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(fm_inner(Q, Vec{1.0, 0.0}, Vec{0.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));

    // bilinearity
    double mixed = fm_inner(Q, Vec{2.0, 1.0}, Vec{1.0, -1.0});
    CHECK(mixed == doctest::Approx(2.0 * (1.0 / 3.0) - 1.0 * (1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("extremal affine function vanishes exactly on barycenter-zero polygons") {
    for (const char* name : {"P1", "P2", "P1xP1", "Bl3P2", "R08", "R09"}) {
        CAPTURE(name);
        LatticePolytope P = catalog_load(name);
        Vec b = P.barycenter();
        CHECK(b[0] == 0.0);
        CHECK(b[1] == 0.0);
        ExtremalData ex = extremal_affine(P);
        CHECK(ex.eta[0] == 0.0);  // exact rational solve, so exactly zero
        CHECK(ex.eta[1] == 0.0);
        CHECK(ex.e.c0 == 0.0);
        CHECK(ex.min_ell == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(ex.residual <= 1e-12);
    }
}

TEST_CASE("extremal affine function on the two reference unstable polygons") {
    {
        LatticePolytope P = catalog_load("P112");
        ExtremalData ex = extremal_affine(P);
        CHECK(ex.eta[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ex.eta[1] == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(ex.e.c0 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(ex.min_ell == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(ex.residual <= 1e-12);
    }
    {
        LatticePolytope P = catalog_load("P123");
        CHECK(P.volume() == doctest::Approx(3.0).epsilon(1e-14));
        ExtremalData ex = extremal_affine(P);
        CHECK(ex.eta[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
        CHECK(ex.eta[1] == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(ex.e.c0 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
        CHECK(ex.min_ell == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(ex.residual <= 1e-12);
    }
}

TEST_CASE("extremal identities across the whole catalog") {
    for (const std::string& name : catalog_names()) {
        CAPTURE(name);
        LatticePolytope P = catalog_load(name);
        ExtremalData ex = extremal_affine(P);
        CHECK(ex.residual <= 1e-12);

        double V = P.volume();
        PLConvexFn e = pl1(P.dim(), ex.e);
        PLConvexFn ell = pl1(P.dim(), ex.ell);
        // e has zero average, so int ell = V
        CHECK(int_pl(P, e) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(int_pl(P, ell) == doctest::Approx(V).epsilon(1e-12));
        // self-pairing identity: V e(0) = int e^2
        CHECK(int_pl_product(P, e, e) == doctest::Approx(V * ex.e.c0).epsilon(1e-11));
        // min over vertices matches the reported min
        double m = std::numeric_limits<double>::infinity();
        for (const auto& v : P.vertices()) m = std::min(m, ex.ell(Vec{to_double(v[0]), to_double(v[1])}));
        CHECK(ex.min_ell == doctest::Approx(m).epsilon(1e-13));
    }
}

TEST_CASE("product configuration functions pair with the barycenter") {
    LatticePolytope P = catalog_load("P112");
    Vec b = P.barycenter();
    // D^NA(f_mu) = -<mu, barycenter>
    PLConvexFn f1 = product_config_fn(P, Vec{1.0, 0.0});
    PLConvexFn f2 = product_config_fn(P, Vec{0.0, 1.0});
    CHECK(dna(P, f1) == doctest::Approx(-b[0]).epsilon(1e-13));
    CHECK(dna(P, f2) == doctest::Approx(-b[1]).epsilon(1e-13));
    CHECK(b[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("W ratios: scale invariance and zero-variance rejection") {
    LatticePolytope P = catalog_load("P2");
    PLConvexFn f{2, {AffineFn{2, 0.0, {1.0, 0.5}}, AffineFn{2, 0.2, {-1.0, 0.0}}}};
    PLConvexFn f2 = f;
    for (auto& p : f2.pieces) p = p * 2.0;
    CHECK(w_ratio(P, f) == doctest::Approx(w_ratio(P, f2)).epsilon(1e-12));
    CHECK(w_ell_ratio(P, f) == doctest::Approx(w_ell_ratio(P, f2)).epsilon(1e-12));
    // shifting by a constant moves neither ratio
    PLConvexFn f3 = f;
    for (auto& p : f3.pieces) p.c0 += 1.0;
    CHECK(w_ratio(P, f3) == doctest::Approx(w_ratio(P, f)).epsilon(1e-12));

    PLConvexFn c = pl1(2, affine_constant(2, 1.0));
    CHECK_THROWS_AS(w_ratio(P, c), UsageError);
    CHECK_THROWS_AS(w_ell_ratio(P, c), UsageError);
}

TEST_CASE("random PL convex functions: determinism and integral properties") {
    Rng r1(1234), r2(1234);
    for (int rep = 0; rep < 10; ++rep) {
        PLConvexFn a = random_pl_convex(2, r1), b = random_pl_convex(2, r2);
        REQUIRE(a.pieces.size() == b.pieces.size());
        CHECK(a.pieces.size() <= 5);
        for (size_t k = 0; k < a.pieces.size(); ++k) {
            CHECK(a.pieces[k].c0 == b.pieces[k].c0);
            CHECK(a.pieces[k].g[0] == b.pieces[k].g[0]);
            CHECK(a.pieces[k].g[1] == b.pieces[k].g[1]);
        }
    }

    LatticePolytope P = catalog_load("P2");
    double V = P.volume();
    Rng rng(77);
    for (int rep = 0; rep < 50; ++rep) {
        PLConvexFn f = random_pl_convex(2, rng);
        double avg = int_pl(P, f) / V;
        // min <= average, and squares integrate nonnegative
        CHECK(pl_min(P, f) <= avg + 1e-12);
        CHECK(int_pl_product(P, f, f) >= -1e-12);
        // Jensen on a barycenter-zero polygon: D^NA(f) >= f(bary) - f(0) = 0
        CHECK(dna(P, f) >= -1e-12);
        CHECK(tc_norm_sq(P, f) >= -1e-12);
    }
}
