#include "torific/ding.hpp"

#include <cmath>
#include <limits>

#include "torific/geometry.hpp"

namespace torific {

namespace {

std::vector<Mesh> regions_on(const LatticePolytope& P, const PLConvexFn& f) {
    if (f.pieces.empty()) throw UsageError("PL function has no pieces");
    if (f.dim != P.dim()) throw UsageError("PL function dimension mismatch");
    return activity_regions(P.dmesh(), f.pieces);
}

}  // namespace

double int_pl(const LatticePolytope& P, const PLConvexFn& f) {
    auto regions = regions_on(P, f);
    double total = 0.0;
    for (size_t i = 0; i < regions.size(); ++i) {
        Moments2 m;
        for (const auto& s : regions[i].cells) m.add(s);
        total += m.int_affine(f.pieces[i].half());
    }
    return total;
}

double int_pl_product(const LatticePolytope& P, const PLConvexFn& f, const PLConvexFn& g) {
    auto fregions = regions_on(P, f);
    if (g.dim != P.dim()) throw UsageError("PL function dimension mismatch");
    double total = 0.0;
    for (size_t i = 0; i < fregions.size(); ++i) {
        auto sub = activity_regions(fregions[i], g.pieces);
        for (size_t j = 0; j < sub.size(); ++j) {
            Moments2 m;
            for (const auto& s : sub[j].cells) m.add(s);
            total += m.int_affine_product(f.pieces[i].half(), g.pieces[j].half());
        }
    }
    return total;
}

double int_pl_poly(const LatticePolytope& P, const PLConvexFn& f, const Polynomial& g) {
    auto regions = regions_on(P, f);
    double total = 0.0;
    for (size_t i = 0; i < regions.size(); ++i) {
        Polynomial piece = g.times_affine(f.pieces[i].c0, f.pieces[i].g);
        total += piece.integrate(regions[i]);
    }
    return total;
}

double pl_min(const LatticePolytope& P, const PLConvexFn& f) {
    auto regions = regions_on(P, f);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < regions.size(); ++i) {
        for (const auto& s : regions[i].cells) {
            for (int k = 0; k <= s.dim; ++k) {
                double val = f.pieces[i](s.v[k]);
                if (val < best) best = val;
            }
        }
    }
    if (!std::isfinite(best)) throw NumericalError("empty activity decomposition");
    return best;
}

double dna(const LatticePolytope& P, const PLConvexFn& f) {
    return -f(Vec{0.0, 0.0}) + int_pl(P, f) / P.volume();
}

double dna_modified(const LatticePolytope& P, const PLConvexFn& f, const PLConvexFn& g) {
    return -f(Vec{0.0, 0.0}) + int_pl_product(P, f, g) / P.volume();
}

double dna_modified(const LatticePolytope& P, const PLConvexFn& f, const Polynomial& g) {
    return -f(Vec{0.0, 0.0}) + int_pl_poly(P, f, g) / P.volume();
}

double dna_modified_quad(const LatticePolytope& P, const PLConvexFn& f,
                         const std::vector<Vec>& xs, const std::vector<double>& ws,
                         const std::vector<double>& gvals) {
    if (xs.size() != ws.size() || xs.size() != gvals.size())
        throw UsageError("quadrature arrays have mismatched lengths");
    double acc = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) acc += ws[k] * gvals[k] * f(xs[k]);
    return -f(Vec{0.0, 0.0}) + acc / P.volume();
}

double tc_norm_sq(const LatticePolytope& P, const PLConvexFn& f) {
    double v = P.volume();
    double avg = int_pl(P, f) / v;
    double second = int_pl_product(P, f, f) / v;
    double var = second - avg * avg;
    return var > 0.0 ? var : 0.0;
}

double l2_norm_sq(const LatticePolytope& P, const PLConvexFn& f) {
    return int_pl_product(P, f, f);
}

double fm_inner(const LatticePolytope& P, const Vec& mu1, const Vec& mu2) {
    auto cov = P.covariance();
    if (P.dim() == 1) return mu1[0] * cov[0] * mu2[0];
    return mu1[0] * cov[0] * mu2[0] + (mu1[0] * mu2[1] + mu1[1] * mu2[0]) * cov[1] +
           mu1[1] * cov[2] * mu2[1];
}

ExtremalData extremal_affine(const LatticePolytope& P) {
    const int d = P.dim();
    const Rational V = P.volume_rat();
    RVec c{P.moment_rat(1, 0) / V, d == 1 ? Rational(0) : P.moment_rat(0, 1) / V};
    std::array<Rational, 3> cov{P.moment_rat(2, 0) / V - c[0] * c[0],
                                d == 1 ? Rational(0) : P.moment_rat(1, 1) / V - c[0] * c[1],
                                d == 1 ? Rational(0) : P.moment_rat(0, 2) / V - c[1] * c[1]};

    std::array<Rational, 2> eta{Rational(0), Rational(0)};
    if (d == 1) {
        if (cov[0] == 0) throw NumericalError("degenerate covariance");
        eta[0] = -c[0] / cov[0];
    } else {
        Rational det = cov[0] * cov[2] - cov[1] * cov[1];
        if (det == 0) throw NumericalError("degenerate covariance");
        eta[0] = (-c[0] * cov[2] + c[1] * cov[1]) / det;
        eta[1] = (-c[1] * cov[0] + c[0] * cov[1]) / det;
    }

    Rational e0 = -(eta[0] * c[0] + eta[1] * c[1]);
    ExtremalData out;
    out.e = AffineFn{d, to_double(e0), Vec{to_double(eta[0]), to_double(eta[1])}};
    out.ell = AffineFn{d, to_double(e0 + 1), out.e.g};
    out.eta = out.e.g;

    Rational mn = 0;
    bool first = true;
    for (const auto& v : P.vertices()) {
        Rational val = 1 + e0 + eta[0] * v[0] + (d == 1 ? Rational(0) : eta[1] * v[1]);
        if (first || val < mn) mn = val, first = false;
    }
    out.min_ell = to_double(mn);

    // balancing identity in floating point: a_mu(0) = (1/V) int a_mu * e
    double res = 0.0;
    for (int i = 0; i < d; ++i) {
        Vec mu{0.0, 0.0};
        mu[i] = 1.0;
        double a0 = -to_double(c[i]);  // a_mu(0) = <mu,0> - <mu,c>
        double pair = fm_inner(P, mu, out.eta);
        res = std::max(res, std::abs(a0 - pair));
    }
    out.residual = res;
    return out;
}

double w_ratio(const LatticePolytope& P, const PLConvexFn& f) {
    double var = tc_norm_sq(P, f);
    double scale = 1.0 + l2_norm_sq(P, f) / P.volume();
    if (var <= 1e-24 * scale) throw UsageError("W ratio undefined for zero-variance input");
    return dna(P, f) / std::sqrt(var);
}

double w_ell_ratio(const LatticePolytope& P, const PLConvexFn& f) {
    double var = tc_norm_sq(P, f);
    double scale = 1.0 + l2_norm_sq(P, f) / P.volume();
    if (var <= 1e-24 * scale) throw UsageError("W ratio undefined for zero-variance input");
    return dna_modified(P, f, to_pl(extremal_affine(P).ell)) / std::sqrt(var);
}

PLConvexFn product_config_fn(const LatticePolytope& P, const Vec& mu) {
    Vec c = P.barycenter();
    double c0 = mu[0] * c[0] + (P.dim() == 1 ? 0.0 : mu[1] * c[1]);
    AffineFn a{P.dim(), c0, Vec{-mu[0], P.dim() == 1 ? 0.0 : -mu[1]}};
    return to_pl(a);
}

PLConvexFn random_pl_convex(int dim, Rng& rng) {
    int k = 1 + static_cast<int>(rng.below(5));
    PLConvexFn f;
    f.dim = dim;
    for (int i = 0; i < k; ++i) {
        AffineFn piece{dim, rng.symmetric(), Vec{0.0, 0.0}};
        for (int j = 0; j < dim; ++j) piece.g[j] = rng.symmetric();
        f.pieces.push_back(piece);
    }
    return f;
}

}  // namespace torific
