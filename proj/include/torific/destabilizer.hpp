#pragma once
// Optimal destabilizer solver: semistability detection, brute-force W_l scan,
// damped Newton for the balancing conditions of b = max{a, 0}, and the
// certificate that gates every downstream use of the result.

#include "torific/ding.hpp"

namespace torific {

struct BalancingResiduals {
    int dim = 0;
    double mass = 0.0;       // int b - V
    Vec moment{0.0, 0.0};    // int b x_i
    double min_value = 0.0;  // min of b over P
    double max_abs(double vol) const {
        double m = std::abs(mass) / vol;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(moment[i]) / vol);
        return m;
    }
};

BalancingResiduals check_balancing(const LatticePolytope& P, const PLConvexFn& b);
// quadrature variant for grid-sampled nonnegative densities
BalancingResiduals check_balancing_quad(const LatticePolytope& P, const std::vector<Vec>& xs,
                                        const std::vector<double>& ws,
                                        const std::vector<double>& bvals);

struct BruteOptions {
    double lo = -3.0;
    double hi = 3.0;
    int npts = 61;
};

struct BruteResult {
    double min_w = 0.0;   // min over the grid of W_l(max{a, 0})
    AffineFn argmin;      // grid candidate attaining it
    long long evaluated = 0;
};

BruteResult brute_force_wl(const LatticePolytope& P, const AffineFn& ell,
                           const BruteOptions& opts = {});

struct SolveOptions {
    BruteOptions brute;
    int margin_samples = 1000;
    uint64_t seed = 42;
    int max_newton_iters = 80;
};

struct DestabilizerCertificate {
    std::string polytope;
    bool semistable = false;
    bool certified = false;
    AffineFn a;       // b = max{a, 0}; for semistable cases a = ell
    PLConvexFn b;     // canonical limit density
    PLConvexFn d;     // b - ell as a PL function (zero when semistable)
    AffineFn e;       // extremal affine function
    AffineFn ell;     // e + 1
    double min_ell = 0.0;
    BalancingResiduals residuals;
    double yao_normalization = 0.0;   // V * b(0) - int b^2
    double orthogonality = 0.0;       // int d * e
    double w_ell_d = 0.0;             // W_l(d), unstable case only
    double brute_min = 0.0;
    AffineFn brute_argmin;
    double minimizer_gap = 0.0;       // brute_min - W_l(d)
    double semistability_margin = 0.0;  // min over sampled convex f of D^NA_b(f)
    double newton_fnorm = 0.0;
    int newton_iters = 0;
};

DestabilizerCertificate solve_destabilizer(const LatticePolytope& P,
                                           const SolveOptions& opts = {});

// max over sampled convex f of the Jensen violation f(0) - (1/V) int f b;
// requires b balancing (throws UsageError otherwise)
double verify_jensen(const LatticePolytope& P, const PLConvexFn& b, int samples, uint64_t seed,
                     double balancing_tol = 1e-8);
double verify_jensen_quad(const LatticePolytope& P, const std::vector<Vec>& xs,
                          const std::vector<double>& ws, const std::vector<double>& bvals,
                          int samples, uint64_t seed, double balancing_tol);

}  // namespace torific
