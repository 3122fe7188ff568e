// Catalog integrity and exact moment oracles.  Volumes are frozen from an
// independent enumeration and double-checked in-test via Pick's theorem
// (area = interior + boundary/2 - 1, with exactly one interior point).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <map>
#include <numeric>

#include "torific/polytope.hpp"
#include "torific/random.hpp"

using namespace torific;

namespace {

// boundary lattice point count of a lattice polygon (sum of edge gcds)
long long boundary_points(const LatticePolytope& p) {
    const auto& vs = p.vertices();
    long long b = 0;
    for (size_t i = 0; i < vs.size(); ++i) {
        const auto& v = vs[i];
        const auto& w = vs[(i + 1) % vs.size()];
        long long dx = Rational(w[0] - v[0]).convert_to<long long>();
        long long dy = Rational(w[1] - v[1]).convert_to<long long>();
        b += std::gcd(std::llabs(dx), std::llabs(dy));
    }
    return b;
}

}  // namespace

TEST_CASE("catalog has the expected members") {
    auto names = catalog_names();
    REQUIRE(names.size() == 17);
    for (const char* want : {"P1", "P2", "P1xP1", "Bl1P2", "Bl2P2", "Bl3P2", "P112", "P123"})
        CHECK(std::count(names.begin(), names.end(), want) == 1);
}

TEST_CASE("frozen volumes and Pick's theorem") {
    const std::map<std::string, Rational> vol = {
        {"P1", 2},
        {"P2", Rational(9) / 2},
        {"P112", 4},
        {"P1xP1", 4},
        {"Bl1P2", 4},
        {"R01", Rational(7) / 2},
        {"Bl2P2", Rational(7) / 2},
        {"P123", 3},
        {"R02", 3},
        {"R03", 3},
        {"Bl3P2", 3},
        {"R04", Rational(5) / 2},
        {"R05", Rational(5) / 2},
        {"R06", 2},
        {"R07", 2},
        {"R08", 2},
        {"R09", Rational(3) / 2},
    };
    for (const auto& [name, v] : vol) {
        auto p = catalog_load(name);
        CHECK(p.volume_rat() == v);
        CHECK(p.reflexive());
        if (p.dim() == 2) {
            // unique interior point + Pick: area = 1 + b/2 - 1
            CHECK(p.volume_rat() == Rational(boundary_points(p)) / 2);
        }
    }
}

TEST_CASE("P1 exact moments") {
    auto p = catalog_load("P1");
    CHECK(p.volume_rat() == 2);
    CHECK(p.moment_rat(1, 0) == 0);
    CHECK(p.moment_rat(2, 0) == Rational(2) / 3);
    CHECK(p.moment_rat(4, 0) == Rational(2) / 5);
    CHECK(p.barycenter()[0] == 0.0);
    CHECK(p.covariance()[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("P2 exact moments") {
    auto p = catalog_load("P2");
    CHECK(p.volume_rat() == Rational(9) / 2);
    CHECK(p.moment_rat(1, 0) == 0);
    CHECK(p.moment_rat(0, 1) == 0);
    // second moments via the vertex formula: m2 = (A/12)(sum vv^T + ss^T), s = 0
    CHECK(p.moment_rat(2, 0) == Rational(9) / 4);
    CHECK(p.moment_rat(1, 1) == -Rational(9) / 8);
    CHECK(p.moment_rat(0, 2) == Rational(9) / 4);
    auto cov = p.covariance();
    CHECK(cov[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cov[1] == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(cov[2] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("P112 barycenter and covariance") {
    auto p = catalog_load("P112");
    CHECK(p.volume_rat() == 4);
    auto c = p.barycenter();
    CHECK(c[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(-1.0 / 3).epsilon(1e-15));
    auto cov = p.covariance();
    CHECK(cov[0] == doctest::Approx(8.0 / 9).epsilon(1e-14));
    CHECK(cov[1] == doctest::Approx(-2.0 / 9).epsilon(1e-14));
    CHECK(cov[2] == doctest::Approx(2.0 / 9).epsilon(1e-14));
}

TEST_CASE("triangulation volumes add up exactly") {
    for (const auto& name : catalog_names()) {
        auto p = catalog_load(name);
        CHECK(mesh_volume(p.rmesh()) == p.volume_rat());
        CHECK(p.triangulation().size() == p.rmesh().cells.size());
    }
}

TEST_CASE("construction from rays alone reproduces the vertex hull") {
    auto p = LatticePolytope::from_rays("t", 2, {{1, 0}, {0, 1}, {-1, -1}});
    auto q = catalog_load("P2");
    REQUIRE(p.vertices().size() == 3);
    CHECK(p.volume_rat() == q.volume_rat());
    for (const auto& v : p.vertices()) {
        bool found = false;
        for (const auto& w : q.vertices()) found = found || (v == w);
        CHECK(found);
    }
}

TEST_CASE("clip additivity at the polytope level") {
    auto p = catalog_load("Bl2P2");
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        AffineFn a{2, rng.symmetric(), {rng.symmetric(), rng.symmetric()}};
        AffineFn na = a * -1.0;
        double split = p.clip(a).volume() + p.clip(na).volume();
        CHECK(split == doctest::Approx(p.volume()).epsilon(1e-12));
    }
}

TEST_CASE("integrate_poly matches a small Monte Carlo probe") {
    auto p = catalog_load("P2");
    Vec lo, hi;
    p.bbox(lo, hi);
    Rng rng(42);
    const int n = 200000;
    double box = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        Vec x{lo[0] + (hi[0] - lo[0]) * rng.uniform(), lo[1] + (hi[1] - lo[1]) * rng.uniform()};
        double val = p.contains(x) ? x[0] * x[0] * x[1] : 0.0;
        sum += val;
        sumsq += val * val;
    }
    double mean = sum / n;
    double se = std::sqrt((sumsq / n - mean * mean) / n);
    Polynomial q(2);
    q.add_term(2, 1, 1.0);
    double exact = p.integrate_poly(q);
    CHECK(std::abs(exact - box * mean) <= 3.5 * box * se);
}

TEST_CASE("degree cap and dimension checks") {
    auto p = catalog_load("P2");
    Polynomial q(2);
    q.add_term(3, 2, 1.0);
    CHECK_THROWS_AS(p.integrate_poly(q), UsageError);
    Polynomial q1(1);
    q1.add_term(2, 0, 1.0);
    CHECK_THROWS_AS(p.integrate_poly(q1), UsageError);
    CHECK_THROWS_AS(catalog_load("NoSuchPolytope"), UsageError);
}

TEST_CASE("TORIFIC_CATALOG directory override") {
    setenv("TORIFIC_CATALOG", TORIFIC_DATA_DIR, 1);
    auto names = catalog_names();
    CHECK(names.size() == 17);
    auto p = catalog_load("P123");
    CHECK(p.volume_rat() == 3);
    unsetenv("TORIFIC_CATALOG");
    setenv("TORIFIC_CATALOG", "/no/such/dir", 1);
    CHECK_THROWS_AS(catalog_load("P2"), UsageError);
    unsetenv("TORIFIC_CATALOG");
}

TEST_CASE("alias lookup") {
    auto p = catalog_load("BlpP2");
    CHECK(p.name() == "Bl1P2");
}
