#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "torific/destabilizer.hpp"
#include "torific/grid.hpp"

using namespace torific;

TEST_CASE("balancing residuals of the trivial density") {
    // b = ell = 1 on a barycenter-zero polygon balances exactly
    LatticePolytope P = catalog_load("P2");
    PLConvexFn one{2, {affine_constant(2, 1.0)}};
    BalancingResiduals r = check_balancing(P, one);
    CHECK(r.max_abs(P.volume()) <= 1e-13);
    CHECK(r.min_value == doctest::Approx(1.0).epsilon(1e-14));

    // quadrature variant agrees on a grid sampling
    Grid g(P, 1.0 / 64);
    std::vector<double> bv(g.size(), 1.0);
    BalancingResiduals rq = check_balancing_quad(P, g.points(), g.weights(), bv);
    // cell weights sum to V exactly; grid moments carry O(h^2) quadrature error
    CHECK(std::abs(rq.mass) / P.volume() <= 1e-9);
    CHECK(rq.max_abs(P.volume()) <= 1e-3);
}

TEST_CASE("brute-force scan is nonnegative on semistable polygons") {
    for (const char* name : {"P1", "P2", "P1xP1"}) {
        CAPTURE(name);
        LatticePolytope P = catalog_load(name);
        ExtremalData ex = extremal_affine(P);
        BruteResult br = brute_force_wl(P, ex.ell);
        CHECK(br.min_w >= -1e-9);
        CHECK(br.evaluated > 0);
    }
}

TEST_CASE("brute-force scan is invariant under scaling the search box") {
    // W_l(max{a,0}) is invariant under a -> 2a (ratio of two 1-homogeneous
    // quantities), and the [-6,6] grid with 61 points is exactly 2x the
    // [-3,3] grid, so the minima agree to roundoff
    LatticePolytope P = catalog_load("P123");
    ExtremalData ex = extremal_affine(P);
    BruteResult a = brute_force_wl(P, ex.ell, BruteOptions{-3.0, 3.0, 61});
    BruteResult b = brute_force_wl(P, ex.ell, BruteOptions{-6.0, 6.0, 61});
    CHECK(a.min_w == doctest::Approx(b.min_w).epsilon(1e-11));
    CHECK(a.evaluated == b.evaluated);
}

TEST_CASE("semistable certificates: trivial destabilizer") {
    for (const char* name : {"P1", "P2", "P1xP1", "Bl3P2", "R08", "R09"}) {
        CAPTURE(name);
        LatticePolytope P = catalog_load(name);
        DestabilizerCertificate c = solve_destabilizer(P);
        CHECK(c.semistable);
        CHECK(c.certified);
        CHECK(c.min_ell == doctest::Approx(1.0).epsilon(1e-13));
        // a = ell = 1, d = 0, b = 1
        CHECK(c.a.c0 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(c.a.g[0]) <= 1e-13);
        CHECK(std::abs(c.a.g[1]) <= 1e-13);
        CHECK(c.residuals.max_abs(P.volume()) <= 1e-12);
        CHECK(std::abs(c.w_ell_d) <= 1e-13);
        CHECK(c.brute_min >= -1e-9);
        CHECK(c.minimizer_gap == 0.0);
        CHECK(c.newton_iters == 0);
        CHECK(c.semistability_margin >= -1e-12);
    }
}

TEST_CASE("boundary cases: min ell = 0 with a nonzero extremal function") {
    {
        LatticePolytope P = catalog_load("P112");
        DestabilizerCertificate c = solve_destabilizer(P);
        CHECK(c.semistable);  // b = ell >= 0 balances, so d = 0
        CHECK(c.certified);
        CHECK(std::abs(c.min_ell) <= 1e-13);
        // but the limit density is not 1: a = ell = (3/2)(1 + x2)
        CHECK(c.a.c0 == doctest::Approx(1.5).epsilon(1e-13));
        CHECK(std::abs(c.a.g[0]) <= 1e-13);
        CHECK(c.a.g[1] == doctest::Approx(1.5).epsilon(1e-13));
        CHECK(c.e.c0 == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(c.residuals.max_abs(P.volume()) <= 1e-12);
        CHECK(c.semistability_margin >= -1e-12);
    }
    {
        LatticePolytope P = catalog_load("R06");
        DestabilizerCertificate c = solve_destabilizer(P);
        CHECK(c.semistable);
        CHECK(c.certified);
        CHECK(std::abs(c.min_ell) <= 1e-13);
        CHECK(c.semistability_margin >= -1e-12);
    }
}

TEST_CASE("semistable certificates with nonzero extremal function") {
    for (const char* name : {"Bl1P2", "Bl2P2", "R03", "R05", "R07"}) {
        std::string nm(name);
        CAPTURE(nm);
        LatticePolytope P = catalog_load(name);
        DestabilizerCertificate c = solve_destabilizer(P);
        CHECK(c.semistable);
        CHECK(c.certified);
        CHECK(c.min_ell > 0.1);   // strictly inside the semistable region
        CHECK(c.min_ell < 0.99);  // but the extremal function is nonzero
        CHECK(std::abs(c.w_ell_d) <= 1e-13);
        CHECK(c.newton_iters == 0);
        CHECK(c.residuals.max_abs(P.volume()) <= 1e-12);
        CHECK(c.semistability_margin >= -1e-12);
    }
}

TEST_CASE("unstable certificate on the reference example") {
    LatticePolytope P = catalog_load("P123");
    DestabilizerCertificate c = solve_destabilizer(P);
    CHECK_FALSE(c.semistable);
    CHECK(c.certified);
    CHECK(c.min_ell == doctest::Approx(-1.0).epsilon(1e-12));

    // frozen optimum (independent damped-Newton run, cross-checked against
    // the 61^3 grid scan)
    CHECK(c.w_ell_d == doctest::Approx(-0.20906961316).epsilon(1e-9));
    CHECK(c.brute_min == doctest::Approx(-0.151084933093).epsilon(1e-9));
    CHECK(c.minimizer_gap >= -1e-12);  // Newton beats the grid
    CHECK(c.newton_fnorm <= 1e-10);
    CHECK(c.newton_iters > 0);

    double V = P.volume();
    CHECK(c.residuals.max_abs(V) <= 1e-12);
    // Yao normalization V b(0) = int b^2 and orthogonality int d e = 0
    CHECK(std::abs(c.yao_normalization) <= 1e-10 * V);
    CHECK(std::abs(c.orthogonality) <= 1e-10 * V);
    // d is a genuine two-piece PL function and b = d + ell >= 0 on P
    CHECK(c.d.pieces.size() == 2);
    CHECK(c.residuals.min_value >= -1e-12);
    // no sampled convex function violates Jensen for the balanced density
    CHECK(c.semistability_margin >= -1e-12);
}

TEST_CASE("destabilized certificates across the rest of the catalog") {
    for (const char* name : {"R01", "R02", "R04"}) {
        std::string nm(name);
        CAPTURE(nm);
        LatticePolytope P = catalog_load(name);
        DestabilizerCertificate c = solve_destabilizer(P);
        double V = P.volume();
        CHECK_FALSE(c.semistable);
        CHECK(c.certified);
        CHECK(c.min_ell < 0.0);
        CHECK(c.residuals.max_abs(V) <= 1e-10);
        CHECK(c.residuals.min_value >= -1e-12);
        CHECK(std::abs(c.yao_normalization) <= 1e-9 * V);
        CHECK(std::abs(c.orthogonality) <= 1e-9 * V);
        CHECK(c.w_ell_d < 0.0);
        CHECK(c.minimizer_gap >= -1e-12);
        CHECK(c.brute_min >= c.w_ell_d - 1e-12);
        CHECK(c.newton_fnorm <= 1e-10);
        CHECK(c.semistability_margin >= -1e-12);
    }
}

TEST_CASE("Jensen verification accepts balanced densities and rejects others") {
    LatticePolytope P = catalog_load("P2");
    PLConvexFn one{2, {affine_constant(2, 1.0)}};
    CHECK(verify_jensen(P, one, 200, 7) <= 1e-9);

    // unbalanced density (mass wrong) must be refused, not silently scored
    PLConvexFn two{2, {affine_constant(2, 2.0)}};
    CHECK_THROWS_AS(verify_jensen(P, two, 200, 7), UsageError);

    // quadrature variant on the optimal density of the unstable example
    LatticePolytope Q = catalog_load("P123");
    DestabilizerCertificate c = solve_destabilizer(Q);
    Grid g(Q, 1.0 / 64);
    std::vector<double> bv(g.size());
    for (size_t k = 0; k < g.size(); ++k) bv[k] = c.b(g.points()[k]);
    // grid quadrature balances only to O(h^2); pass a matching tolerance
    CHECK(verify_jensen_quad(Q, g.points(), g.weights(), bv, 200, 7, 1e-2) <= 1e-2);
}

TEST_CASE("certificate consistency: b = max(a, 0) = d + ell pointwise") {
    LatticePolytope P = catalog_load("R05");
    DestabilizerCertificate c = solve_destabilizer(P);
    REQUIRE(c.certified);
    Rng rng(99);
    Vec lo, hi;
    P.bbox(lo, hi);
    int tested = 0;
    while (tested < 200) {
        Vec x{lo[0] + (hi[0] - lo[0]) * rng.uniform(), lo[1] + (hi[1] - lo[1]) * rng.uniform()};
        if (!P.contains(x)) continue;
        ++tested;
        double b = c.b(x);
        CHECK(b == doctest::Approx(std::max(c.a(x), 0.0)).epsilon(1e-12));
        CHECK(b == doctest::Approx(c.d(x) + c.ell(x)).epsilon(1e-10));
        CHECK(b >= -1e-12);
    }
}
