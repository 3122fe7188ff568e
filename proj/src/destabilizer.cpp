#include "torific/destabilizer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "torific/geometry.hpp"

namespace torific {

namespace {

// moments of {a >= 0} inside P, the only geometry the scan and Newton need
Moments2 clipped_moments(const LatticePolytope& P, const AffineFn& a) {
    Moments2 m;
    SimplexT<double> buf[2];
    const HalfSpace h = a.half();
    for (const auto& s : P.dmesh().cells) {
        int n = clip_simplex(s, h, buf);
        for (int k = 0; k < n; ++k) m.add(buf[k]);
    }
    return m;
}

double positive_part_mass(const LatticePolytope& P, const AffineFn& a) {
    return clipped_moments(P, a).int_affine(a.half());
}

int nparams(int dim) { return dim + 1; }

void pack(const AffineFn& a, double* p) {
    p[0] = a.c0;
    for (int i = 0; i < a.dim; ++i) p[1 + i] = a.g[i];
}

AffineFn unpack(int dim, const double* p) {
    AffineFn a{dim, p[0], Vec{0.0, 0.0}};
    for (int i = 0; i < dim; ++i) a.g[i] = p[1 + i];
    return a;
}

// balancing map F(a) = (int_R a - V, int_R a x, int_R a y) over R = {a>=0} cap P
void eval_f(const LatticePolytope& P, const AffineFn& a, double* F, Moments2* mom) {
    Moments2 m = clipped_moments(P, a);
    const HalfSpace h = a.half();
    F[0] = m.int_affine(h) - P.volume();
    F[1] = a.c0 * m.m1[0] + a.g[0] * m.xx + a.g[1] * m.xy;
    if (a.dim == 2) F[2] = a.c0 * m.m1[1] + a.g[0] * m.xy + a.g[1] * m.yy;
    if (mom) *mom = m;
}

// J is the Gram matrix of (1, x, y) over R; the region boundary {a = 0}
// contributes nothing because the integrands all vanish there
void eval_j(int dim, const Moments2& m, double J[3][3]) {
    J[0][0] = m.m0;
    J[0][1] = J[1][0] = m.m1[0];
    J[1][1] = m.xx;
    if (dim == 2) {
        J[0][2] = J[2][0] = m.m1[1];
        J[1][2] = J[2][1] = m.xy;
        J[2][2] = m.yy;
    }
}

double norm_inf(const double* F, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(F[i]));
    return r;
}

// dense solve of J s = F with partial pivoting; returns false when singular
bool solve_small(int n, double J[3][3], const double* F, double* s) {
    double A[3][4];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) A[i][j] = J[i][j];
        A[i][n] = F[i];
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-14) return false;
        if (piv != c)
            for (int j = c; j <= n; ++j) std::swap(A[c][j], A[piv][j]);
        for (int r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            for (int j = c; j <= n; ++j) A[r][j] -= f * A[c][j];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = A[i][n];
        for (int j = i + 1; j < n; ++j) acc -= A[i][j] * s[j];
        s[i] = acc / A[i][i];
    }
    return true;
}

struct NewtonResult {
    bool converged = false;
    AffineFn a;
    double fnorm = std::numeric_limits<double>::infinity();
    int iters = 0;
    double int_b2 = 0.0;
};

NewtonResult newton_from(const LatticePolytope& P, const AffineFn& seed, int max_iters) {
    const int dim = P.dim();
    const int n = nparams(dim);
    const double ftol = 1e-12 * std::max(1.0, P.volume());

    double p[3];
    pack(seed, p);
    double F[3];
    Moments2 m;
    eval_f(P, unpack(dim, p), F, &m);
    double fn = norm_inf(F, n);

    NewtonResult out;
    for (int it = 0; it < max_iters && fn > ftol; ++it) {
        if (m.m0 < 1e-12) return out;  // positivity region collapsed
        double J[3][3], s[3];
        eval_j(dim, m, J);
        if (!solve_small(n, J, F, s)) return out;
        double lam = 1.0, pnew[3], Fnew[3], fnew = fn;
        Moments2 mnew;
        bool ok = false;
        for (int half = 0; half < 30; ++half) {
            for (int i = 0; i < n; ++i) pnew[i] = p[i] - lam * s[i];
            eval_f(P, unpack(dim, pnew), Fnew, &mnew);
            fnew = norm_inf(Fnew, n);
            if (fnew < fn) {
                ok = true;
                break;
            }
            lam /= 2;
        }
        if (!ok) return out;
        for (int i = 0; i < n; ++i) {
            p[i] = pnew[i];
            F[i] = Fnew[i];
        }
        m = mnew;
        fn = fnew;
        out.iters = it + 1;
    }
    if (fn > ftol) return out;

    out.converged = true;
    out.a = unpack(dim, p);
    out.fnorm = fn;
    out.int_b2 = m.int_affine_product(out.a.half(), out.a.half());
    return out;
}

// analytic-vs-finite-difference agreement of the Jacobian at a generic point
void cross_check_jacobian(const LatticePolytope& P, const AffineFn& a) {
    const int dim = P.dim();
    const int n = nparams(dim);
    double p[3];
    pack(a, p);
    Moments2 m;
    double F[3];
    eval_f(P, a, F, &m);
    double J[3][3];
    eval_j(dim, m, J);

    double jmax = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) jmax = std::max(jmax, std::abs(J[i][j]));

    for (int j = 0; j < n; ++j) {
        const double eps = 1e-5 * (1.0 + std::abs(p[j]));
        double pp[3], Fp[3], Fm[3];
        for (int i = 0; i < n; ++i) pp[i] = p[i];
        pp[j] = p[j] + eps;
        eval_f(P, unpack(dim, pp), Fp, nullptr);
        pp[j] = p[j] - eps;
        eval_f(P, unpack(dim, pp), Fm, nullptr);
        for (int i = 0; i < n; ++i) {
            double fd = (Fp[i] - Fm[i]) / (2 * eps);
            if (std::abs(fd - J[i][j]) > 1e-6 * (1.0 + jmax))
                throw NumericalError("balancing Jacobian disagrees with finite differences");
        }
    }
}

}  // namespace

BalancingResiduals check_balancing(const LatticePolytope& P, const PLConvexFn& b) {
    BalancingResiduals r;
    r.dim = P.dim();
    r.mass = int_pl(P, b) - P.volume();
    for (int i = 0; i < r.dim; ++i) {
        Vec ei{0.0, 0.0};
        ei[i] = 1.0;
        r.moment[i] = int_pl_poly(P, b, Polynomial::affine(r.dim, 0.0, ei));
    }
    r.min_value = pl_min(P, b);
    return r;
}

BalancingResiduals check_balancing_quad(const LatticePolytope& P, const std::vector<Vec>& xs,
                                        const std::vector<double>& ws,
                                        const std::vector<double>& bvals) {
    if (xs.size() != ws.size() || xs.size() != bvals.size())
        throw UsageError("quadrature arrays have mismatched lengths");
    BalancingResiduals r;
    r.dim = P.dim();
    r.min_value = std::numeric_limits<double>::infinity();
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
        mass += ws[k] * bvals[k];
        mx += ws[k] * bvals[k] * xs[k][0];
        my += ws[k] * bvals[k] * xs[k][1];
        r.min_value = std::min(r.min_value, bvals[k]);
    }
    r.mass = mass - P.volume();
    r.moment[0] = mx;
    if (r.dim == 2) r.moment[1] = my;
    return r;
}

BruteResult brute_force_wl(const LatticePolytope& P, const AffineFn& ell,
                           const BruteOptions& opts) {
    if (opts.npts < 2 || !(opts.hi > opts.lo)) throw UsageError("bad brute-force grid");
    const int dim = P.dim();
    const double V = P.volume();
    const double step = (opts.hi - opts.lo) / (opts.npts - 1);
    const HalfSpace lh = ell.half();

    BruteResult best;
    best.min_w = std::numeric_limits<double>::infinity();
    const int ny = dim == 2 ? opts.npts : 1;
    SimplexT<double> buf[2];
    const auto& cells = P.dmesh().cells;

    for (int ic = 0; ic < opts.npts; ++ic) {
        const double c0 = opts.lo + ic * step;
        for (int ix = 0; ix < opts.npts; ++ix) {
            const double gx = opts.lo + ix * step;
            for (int iy = 0; iy < ny; ++iy) {
                const double gy = dim == 2 ? opts.lo + iy * step : 0.0;
                AffineFn a{dim, c0, Vec{gx, gy}};
                const HalfSpace h = a.half();
                Moments2 m;
                for (const auto& s : cells) {
                    int nn = clip_simplex(s, h, buf);
                    for (int k = 0; k < nn; ++k) m.add(buf[k]);
                }
                if (m.m0 <= 0.0) continue;  // f = max{a,0} vanishes on P
                ++best.evaluated;
                const double intb = m.int_affine(h);
                const double intb2 = m.int_affine_product(h, h);
                const double intbl = m.int_affine_product(h, lh);
                const double avg = intb / V;
                const double var = intb2 / V - avg * avg;
                if (var <= 1e-14 * (1.0 + intb2 / V)) continue;
                const double f0 = std::max(c0, 0.0);
                const double w = (-f0 + intbl / V) / std::sqrt(var);
                if (w < best.min_w) {
                    best.min_w = w;
                    best.argmin = a;
                }
            }
        }
    }
    if (!std::isfinite(best.min_w)) throw NumericalError("brute-force scan found no candidates");
    return best;
}

DestabilizerCertificate solve_destabilizer(const LatticePolytope& P, const SolveOptions& opts) {
    const int dim = P.dim();
    const double V = P.volume();
    ExtremalData ext = extremal_affine(P);

    DestabilizerCertificate cert;
    cert.polytope = P.name();
    cert.e = ext.e;
    cert.ell = ext.ell;
    cert.min_ell = ext.min_ell;

    BruteResult brute = brute_force_wl(P, ext.ell, opts.brute);
    cert.brute_min = brute.min_w;
    cert.brute_argmin = brute.argmin;

    cert.semistable = ext.min_ell >= -1e-10 && brute.min_w >= -1e-6;
    if (cert.semistable) {
        cert.a = ext.ell;
        cert.b = to_pl(ext.ell);
        cert.d = to_pl(affine_constant(dim, 0.0));
        cert.w_ell_d = 0.0;
        cert.minimizer_gap = 0.0;
    } else {
        std::vector<AffineFn> seeds;
        double mass = positive_part_mass(P, brute.argmin);
        if (mass > 1e-12 * V) seeds.push_back(brute.argmin * (V / mass));
        mass = positive_part_mass(P, ext.ell);
        if (mass > 1e-12 * V) seeds.push_back(ext.ell * (V / mass));
        const double bumps[][2] = {{1.15, 0.9}, {0.85, 1.1}, {1.0, 1.2}, {1.2, 1.0},
                                   {0.8, 0.95}, {1.05, 0.8}};
        const size_t nbase = seeds.size();
        for (size_t s = 0; s < nbase; ++s)
            for (const auto& f : bumps) {
                AffineFn a = seeds[s];
                a.c0 *= f[0];
                for (int i = 0; i < dim; ++i) a.g[i] *= f[1];
                seeds.push_back(a);
            }

        std::vector<NewtonResult> roots;
        double best_fnorm = std::numeric_limits<double>::infinity();
        for (const auto& s : seeds) {
            NewtonResult r = newton_from(P, s, opts.max_newton_iters);
            if (!r.converged) {
                best_fnorm = std::min(best_fnorm, r.fnorm);
                continue;
            }
            bool dup = false;
            for (const auto& q : roots) {
                double dist = std::abs(q.a.c0 - r.a.c0) + std::abs(q.a.g[0] - r.a.g[0]) +
                              std::abs(q.a.g[1] - r.a.g[1]);
                if (dist < 1e-7 * (1.0 + std::abs(r.a.c0))) dup = true;
            }
            if (!dup) roots.push_back(r);
        }
        if (roots.empty()) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "balancing Newton failed to converge on %s from all seeds (best |F| = %g)",
                          P.name().c_str(), best_fnorm);
            throw CertificationError(msg);
        }
        // among distinct roots the canonical one minimizes int b^2
        const NewtonResult* pick = &roots[0];
        for (const auto& r : roots)
            if (r.int_b2 < pick->int_b2) pick = &r;
        cross_check_jacobian(P, pick->a);

        cert.a = pick->a;
        cert.newton_fnorm = pick->fnorm;
        cert.newton_iters = pick->iters;
        cert.b = PLConvexFn{dim, {pick->a, affine_constant(dim, 0.0)}};
        cert.d = PLConvexFn{dim, {pick->a - ext.ell, affine_constant(dim, 0.0) - ext.ell}};
        cert.w_ell_d = w_ell_ratio(P, cert.d);
        cert.minimizer_gap = brute.min_w - cert.w_ell_d;
    }

    cert.residuals = check_balancing(P, cert.b);
    cert.yao_normalization = V * cert.b(Vec{0.0, 0.0}) - l2_norm_sq(P, cert.b);
    cert.orthogonality = int_pl_product(P, cert.d, to_pl(ext.e));

    Rng rng(opts.seed);
    double margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.margin_samples; ++s) {
        PLConvexFn f = random_pl_convex(dim, rng);
        margin = std::min(margin, dna_modified(P, f, cert.b));
    }
    cert.semistability_margin = margin;

    const bool resid_ok =
        cert.residuals.max_abs(V) <= 1e-8 && cert.residuals.min_value >= -1e-10;
    const bool yao_ok = std::abs(cert.yao_normalization) <= 1e-8 * V;
    const bool orth_ok = std::abs(cert.orthogonality) <= 1e-8;
    const bool gap_ok = cert.semistable || cert.minimizer_gap >= -1e-4;
    const bool margin_ok = cert.semistability_margin >= -1e-8;
    cert.certified = resid_ok && yao_ok && orth_ok && gap_ok && margin_ok;
    return cert;
}

double verify_jensen(const LatticePolytope& P, const PLConvexFn& b, int samples, uint64_t seed,
                     double balancing_tol) {
    BalancingResiduals r = check_balancing(P, b);
    if (r.max_abs(P.volume()) > balancing_tol || r.min_value < -balancing_tol)
        throw UsageError("verify_jensen requires a balancing density");
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        PLConvexFn f = random_pl_convex(P.dim(), rng);
        worst = std::max(worst, -dna_modified(P, f, b));
    }
    return worst;
}

double verify_jensen_quad(const LatticePolytope& P, const std::vector<Vec>& xs,
                          const std::vector<double>& ws, const std::vector<double>& bvals,
                          int samples, uint64_t seed, double balancing_tol) {
    BalancingResiduals r = check_balancing_quad(P, xs, ws, bvals);
    if (r.max_abs(P.volume()) > balancing_tol || r.min_value < -balancing_tol)
        throw UsageError("verify_jensen requires a balancing density");
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        PLConvexFn f = random_pl_convex(P.dim(), rng);
        worst = std::max(worst, -dna_modified_quad(P, f, xs, ws, bvals));
    }
    return worst;
}

}  // namespace torific
